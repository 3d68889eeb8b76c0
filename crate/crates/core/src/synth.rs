//! Seeded synthetic series for tests, calibration and fixtures.
//!
//! Noise is multiplicative log-normal: each noiseless value is multiplied by
//! `exp(noise_level * z)` with `z` standard normal. The generator is ChaCha8
//! seeded from the caller's seed, so output depends only on the arguments.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{HyperbolicParams, Observation, TimeSeries, SINGULARITY_GUARD};

/// Maddison's benchmark years for the pre-modern era plus the usual 20th-century anchors.
pub const MADDISON_BENCHMARK_YEARS: [i32; 11] = [
    1, 1000, 1500, 1600, 1700, 1820, 1870, 1913, 1950, 1973, 2008,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SyntheticKind {
    Stagnation,
    Hyperbolic,
    PiecewiseHyperbolic,
    HyperbolicWithSlowdown,
}

impl FromStr for SyntheticKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "stagnation" => Ok(Self::Stagnation),
            "hyperbolic" => Ok(Self::Hyperbolic),
            "piecewise" | "piecewise-hyperbolic" => Ok(Self::PiecewiseHyperbolic),
            "slowdown" | "hyperbolic-with-slowdown" => Ok(Self::HyperbolicWithSlowdown),
            _ => Err(Error::InvalidParams(format!(
                "unknown synthetic kind {s:?}"
            ))),
        }
    }
}

impl fmt::Display for SyntheticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Stagnation => "stagnation",
            Self::Hyperbolic => "hyperbolic",
            Self::PiecewiseHyperbolic => "piecewise-hyperbolic",
            Self::HyperbolicWithSlowdown => "hyperbolic-with-slowdown",
        })
    }
}

/// Generating law of a synthetic series. Levels are in billions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SyntheticModel {
    /// Constant level; with noise, fluctuations around a horizontal line.
    Stagnation {
        level: f64,
    },
    Hyperbolic {
        params: HyperbolicParams,
    },
    /// `first` for years before `breakpoint`, `second` from `breakpoint` on.
    PiecewiseHyperbolic {
        first: HyperbolicParams,
        second: HyperbolicParams,
        breakpoint: i32,
    },
    /// Hyperbolic up to `onset`; afterwards the reciprocal keeps falling but at
    /// `slowdown * k`, with `0 <= slowdown < 1`.
    HyperbolicWithSlowdown {
        params: HyperbolicParams,
        onset: i32,
        slowdown: f64,
    },
}

impl SyntheticModel {
    pub fn kind(&self) -> SyntheticKind {
        match self {
            Self::Stagnation { .. } => SyntheticKind::Stagnation,
            Self::Hyperbolic { .. } => SyntheticKind::Hyperbolic,
            Self::PiecewiseHyperbolic { .. } => SyntheticKind::PiecewiseHyperbolic,
            Self::HyperbolicWithSlowdown { .. } => SyntheticKind::HyperbolicWithSlowdown,
        }
    }

    /// Builds a model from `key=value` pairs separated by commas.
    ///
    /// | kind | keys |
    /// |------|------|
    /// | stagnation | `level` |
    /// | hyperbolic | `a`, `k` |
    /// | piecewise-hyperbolic | `a1`, `k1`, `a2`, `k2`, `breakpoint` |
    /// | hyperbolic-with-slowdown | `a`, `k`, `onset`, `slowdown` |
    pub fn from_params(kind: SyntheticKind, params: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for item in params.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::InvalidParams(format!("expected key=value, got {item:?}")))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| Error::InvalidParams(format!("{key} = {value:?} is not a number")))?;
            pairs.push((key.trim().to_string(), value));
        }
        let get = |key: &str| {
            pairs
                .iter()
                .find(|(k, _)| k == key)
                .map(|(_, v)| *v)
                .ok_or_else(|| Error::InvalidParams(format!("{kind} requires parameter {key:?}")))
        };
        let year = |key: &str| -> Result<i32> {
            let v = get(key)?;
            if v.fract() != 0.0 || v.abs() > f64::from(i32::MAX) {
                return Err(Error::InvalidParams(format!(
                    "{key} = {v} is not a whole year"
                )));
            }
            Ok(v as i32)
        };
        let model = match kind {
            SyntheticKind::Stagnation => Self::Stagnation {
                level: get("level")?,
            },
            SyntheticKind::Hyperbolic => Self::Hyperbolic {
                params: HyperbolicParams::new(get("a")?, get("k")?)?,
            },
            SyntheticKind::PiecewiseHyperbolic => Self::PiecewiseHyperbolic {
                first: HyperbolicParams::new(get("a1")?, get("k1")?)?,
                second: HyperbolicParams::new(get("a2")?, get("k2")?)?,
                breakpoint: year("breakpoint")?,
            },
            SyntheticKind::HyperbolicWithSlowdown => Self::HyperbolicWithSlowdown {
                params: HyperbolicParams::new(get("a")?, get("k")?)?,
                onset: year("onset")?,
                slowdown: get("slowdown")?,
            },
        };
        Ok(model)
    }

    /// Noiseless value at `year`.
    pub fn value_at(&self, year: i32) -> Result<f64> {
        let t = f64::from(year);
        let reciprocal = match *self {
            Self::Stagnation { level } => {
                if !(level.is_finite() && level > 0.0) {
                    return Err(Error::InvalidParams(format!(
                        "level {level} must be positive"
                    )));
                }
                return Ok(level);
            }
            Self::Hyperbolic { params } => params.reciprocal_at(t),
            Self::PiecewiseHyperbolic {
                first,
                second,
                breakpoint,
            } => {
                if year < breakpoint {
                    first.reciprocal_at(t)
                } else {
                    second.reciprocal_at(t)
                }
            }
            Self::HyperbolicWithSlowdown {
                params,
                onset,
                slowdown,
            } => {
                if !(0.0..1.0).contains(&slowdown) {
                    return Err(Error::InvalidParams(format!(
                        "slowdown {slowdown} must lie in [0, 1)"
                    )));
                }
                if year <= onset {
                    params.reciprocal_at(t)
                } else {
                    let at_onset = params.reciprocal_at(f64::from(onset));
                    at_onset - slowdown * params.k() * (t - f64::from(onset))
                }
            }
        };
        if reciprocal > SINGULARITY_GUARD {
            Ok(reciprocal.recip())
        } else {
            Err(Error::InvalidParams(format!(
                "{} law reaches its singularity by year {year}",
                self.kind()
            )))
        }
    }
}

/// Samples `model` on `years` with multiplicative log-normal noise.
pub fn generate_synthetic(
    model: &SyntheticModel,
    years: &[i32],
    noise_level: f64,
    seed: u64,
) -> Result<TimeSeries> {
    if !(noise_level.is_finite() && noise_level >= 0.0) {
        return Err(Error::InvalidParams(format!(
            "noise level {noise_level} must be finite and non-negative"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(years.len());
    for &year in years {
        let clean = model.value_at(year)?;
        let z: f64 = StandardNormal.sample(&mut rng);
        points.push(Observation::new(year, clean * (noise_level * z).exp()));
    }
    TimeSeries::new(points).map_err(|e| Error::InvalidParams(format!("year grid: {e}")))
}

/// Parses a year grid such as `1,1000,1500:1900:50,2008`.
///
/// `start:end:step` expands to `start, start+step, ...` up to and including `end`.
pub fn parse_year_grid(spec: &str) -> Result<Vec<i32>> {
    let bad = |item: &str| Error::InvalidParams(format!("bad year grid item {item:?}"));
    let mut years = Vec::new();
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [y] => years.push(y.trim().parse().map_err(|_| bad(item))?),
            [a, b, step] => {
                let a: i32 = a.trim().parse().map_err(|_| bad(item))?;
                let b: i32 = b.trim().parse().map_err(|_| bad(item))?;
                let step: i32 = step.trim().parse().map_err(|_| bad(item))?;
                if step <= 0 || a > b {
                    return Err(bad(item));
                }
                let mut y = a;
                while y <= b {
                    years.push(y);
                    y += step;
                }
            }
            _ => return Err(bad(item)),
        }
    }
    if years.is_empty() {
        return Err(Error::InvalidParams("empty year grid".into()));
    }
    Ok(years)
}
