//! Estimating `(a, k)` by straight-line regression of `1/S` on `t`.
//!
//! The regression is unweighted least squares in reciprocal space. Note that
//! the transform amplifies relative errors of small (early) GDP values.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{HyperbolicParams, Observation, TimeSeries};
use crate::ols::{fit_line, LineFit};

/// Fewest observations a fitted segment may hold.
pub const MIN_FIT_POINTS: usize = 3;

/// Inclusive year range `[start, end]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FitWindow {
    pub start: i32,
    pub end: i32,
}

impl FitWindow {
    pub fn new(start: i32, end: i32) -> Result<Self> {
        if start >= end {
            return Err(Error::InvalidParams(format!(
                "window start {start} must precede end {end}"
            )));
        }
        Ok(Self { start, end })
    }

    pub fn contains(&self, year: i32) -> bool {
        (self.start..=self.end).contains(&year)
    }

    pub fn observations<'a>(&self, ts: &'a TimeSeries) -> &'a [Observation] {
        ts.within(self.start..=self.end)
    }
}

impl std::fmt::Display for FitWindow {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.start, self.end)
    }
}

impl std::str::FromStr for FitWindow {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidParams(format!("window {s:?} is not start:end")))?;
        let parse = |v: &str| {
            v.trim().parse::<i32>().map_err(|_| {
                Error::InvalidParams(format!("window bound {v:?} is not an integer year"))
            })
        };
        Self::new(parse(a)?, parse(b)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicFit {
    pub params: HyperbolicParams,
    pub window: FitWindow,
    pub n_points: usize,
    pub sse_reciprocal: f64,
    pub r2_reciprocal: f64,
    pub slope_stderr: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmentedFit {
    pub breakpoint: i32,
    pub first: HyperbolicFit,
    pub second: HyperbolicFit,
    pub total_sse: f64,
}

/// Reciprocal-space line through a run of observations.
pub(crate) fn reciprocal_line(points: &[Observation]) -> Option<LineFit> {
    let xs: Vec<f64> = points.iter().map(|p| f64::from(p.year)).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.value.recip()).collect();
    fit_line(&xs, &ys)
}

fn hyperbolic_from_points(points: &[Observation]) -> Result<HyperbolicFit> {
    if points.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientData {
            needed: MIN_FIT_POINTS,
            found: points.len(),
        });
    }
    // Years are distinct, so a line always exists for n >= 2.
    let line = reciprocal_line(points).expect("distinct years");
    hyperbolic_from_line(&line, points)
}

fn hyperbolic_from_line(line: &LineFit, points: &[Observation]) -> Result<HyperbolicFit> {
    if line.slope >= 0.0 || line.slope.is_nan() {
        return Err(Error::NotHyperbolic { slope: line.slope });
    }
    let params = HyperbolicParams::new(line.intercept, -line.slope)?;
    Ok(HyperbolicFit {
        params,
        window: FitWindow {
            start: points[0].year,
            end: points[points.len() - 1].year,
        },
        n_points: line.n,
        sse_reciprocal: line.sse,
        r2_reciprocal: line.r2,
        slope_stderr: line.slope_stderr,
    })
}

/// Fits `S(t) = 1/(a - k t)` to the observations inside `window`.
///
/// The returned fit carries the requested window, not the span of the data in it.
pub fn fit_hyperbolic(ts: &TimeSeries, window: FitWindow) -> Result<HyperbolicFit> {
    let mut fit = hyperbolic_from_points(window.observations(ts))?;
    fit.window = window;
    Ok(fit)
}

/// Two-segment fit with an exhaustive breakpoint search.
///
/// For a breakpoint `b` the first segment holds observations with `year < b`
/// and the second those with `year >= b`; every observation year that leaves
/// at least `min_points` on each side is tried. The smallest total reciprocal
/// SSE wins, the earliest year on ties. Segment windows span their data.
pub fn fit_piecewise(ts: &TimeSeries, min_points: usize) -> Result<SegmentedFit> {
    if min_points < MIN_FIT_POINTS {
        return Err(Error::InvalidParams(format!(
            "min_points = {min_points} is below {MIN_FIT_POINTS}"
        )));
    }
    let points = ts.points();
    let n = points.len();
    if n < 2 * min_points {
        return Err(Error::InsufficientData {
            needed: 2 * min_points,
            found: n,
        });
    }

    let mut best: Option<(usize, LineFit, LineFit, f64)> = None;
    for split in min_points..=n - min_points {
        let left = reciprocal_line(&points[..split]).expect("distinct years");
        let right = reciprocal_line(&points[split..]).expect("distinct years");
        let total = left.sse + right.sse;
        if best.as_ref().is_none_or(|b| total < b.3) {
            best = Some((split, left, right, total));
        }
    }
    let (split, left, right, total_sse) = best.expect("at least one admissible split");

    Ok(SegmentedFit {
        breakpoint: points[split].year,
        first: hyperbolic_from_line(&left, &points[..split])?,
        second: hyperbolic_from_line(&right, &points[split..])?,
        total_sse,
    })
}

/// Signed percentage by which the observation at `year` lies above the fitted curve.
pub fn relative_deviation(fit: &HyperbolicFit, ts: &TimeSeries, year: i32) -> Result<f64> {
    let observed = ts.value_at(year).ok_or(Error::MissingObservation(year))?;
    let fitted = fit.params.eval(f64::from(year))?;
    Ok(100.0 * (observed - fitted) / fitted)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub year: i32,
    pub residual: f64,
}

/// `1/S_obs(t) - (a - k t)` for every observation, inside the window or not.
///
/// Positive residuals lie above the reciprocal line, i.e. on a slower trajectory.
pub fn residuals_reciprocal(fit: &HyperbolicFit, ts: &TimeSeries) -> Vec<Residual> {
    ts.points()
        .iter()
        .map(|p| Residual {
            year: p.year,
            residual: p.value.recip() - fit.params.reciprocal_at(f64::from(p.year)),
        })
        .collect()
}
