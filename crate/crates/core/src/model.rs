//! The hyperbolic growth law `S(t) = 1 / (a - k t)` and its reciprocal form.
//!
//! In reciprocal space a hyperbola is the straight line `1/S = a - k t`, which
//! crosses zero at the singularity `t_s = a / k`. Years are calendar years AD;
//! GDP values are in billions of 1990 GK$ unless stated otherwise.

use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest admissible value of `a - k t` before evaluation is refused.
pub const SINGULARITY_GUARD: f64 = 1e-9;

/// A single `(year, value)` observation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub year: i32,
    pub value: f64,
}

impl Observation {
    pub const fn new(year: i32, value: f64) -> Self {
        Self { year, value }
    }
}

/// Ordered, sparse observations of a positive quantity.
///
/// Years are integers `>= 1` and strictly increasing; values are finite and
/// strictly positive; the series is never empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Observation>", into = "Vec<Observation>")]
pub struct TimeSeries {
    points: Vec<Observation>,
}

impl TimeSeries {
    pub fn new(points: Vec<Observation>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidSeries("series is empty".into()));
        }
        for (i, p) in points.iter().enumerate() {
            if p.year < 1 {
                return Err(Error::InvalidSeries(format!(
                    "year {} is before AD 1",
                    p.year
                )));
            }
            if !(p.value.is_finite() && p.value > 0.0) {
                return Err(Error::InvalidSeries(format!(
                    "value {} at year {} is not a finite positive number",
                    p.value, p.year
                )));
            }
            if i > 0 && points[i - 1].year >= p.year {
                return Err(Error::InvalidSeries(format!(
                    "years not strictly increasing at {} -> {}",
                    points[i - 1].year,
                    p.year
                )));
            }
        }
        Ok(Self { points })
    }

    /// Builds a series from `(year, value)` pairs.
    pub fn from_pairs<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i32, f64)>,
    {
        Self::new(
            pairs
                .into_iter()
                .map(|(year, value)| Observation::new(year, value))
                .collect(),
        )
    }

    pub fn points(&self) -> &[Observation] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Always `false`; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn years(&self) -> impl Iterator<Item = i32> + '_ {
        self.points.iter().map(|p| p.year)
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.value)
    }

    pub fn first_year(&self) -> i32 {
        self.points[0].year
    }

    pub fn last_year(&self) -> i32 {
        self.points[self.points.len() - 1].year
    }

    pub fn value_at(&self, year: i32) -> Option<f64> {
        self.points
            .binary_search_by_key(&year, |p| p.year)
            .ok()
            .map(|i| self.points[i].value)
    }

    /// Observations whose year lies in `range` (inclusive on both ends).
    pub fn within(&self, range: RangeInclusive<i32>) -> &[Observation] {
        let lo = self.points.partition_point(|p| p.year < *range.start());
        let hi = self.points.partition_point(|p| p.year <= *range.end());
        &self.points[lo..hi.max(lo)]
    }

    /// Applies `f` to every value. The caller guarantees `f` keeps values positive.
    pub(crate) fn map_values(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            points: self
                .points
                .iter()
                .map(|p| Observation::new(p.year, f(p.value)))
                .collect(),
        }
    }
}

impl TryFrom<Vec<Observation>> for TimeSeries {
    type Error = Error;

    fn try_from(points: Vec<Observation>) -> Result<Self> {
        Self::new(points)
    }
}

impl From<TimeSeries> for Vec<Observation> {
    fn from(ts: TimeSeries) -> Self {
        ts.points
    }
}

/// Parameters `(a, k)` of `S(t) = 1 / (a - k t)`, both strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct HyperbolicParams {
    a: f64,
    k: f64,
}

#[derive(Deserialize)]
struct RawParams {
    a: f64,
    k: f64,
}

impl TryFrom<RawParams> for HyperbolicParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        Self::new(raw.a, raw.k)
    }
}

impl HyperbolicParams {
    pub fn new(a: f64, k: f64) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::InvalidParams(format!(
                "a = {a} must be finite and positive"
            )));
        }
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::InvalidParams(format!(
                "k = {k} must be finite and positive"
            )));
        }
        if !(a / k).is_finite() {
            return Err(Error::InvalidParams(format!(
                "singularity a/k overflows for a = {a}, k = {k}"
            )));
        }
        Ok(Self { a, k })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    /// `a - k t`, the fitted reciprocal line.
    pub fn reciprocal_at(&self, t: f64) -> f64 {
        self.a - self.k * t
    }

    /// Evaluates `S(t)`, refusing points where `a - k t <= SINGULARITY_GUARD`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        let reciprocal = self.reciprocal_at(t);
        if reciprocal > SINGULARITY_GUARD {
            Ok(1.0 / reciprocal)
        } else {
            Err(Error::NearSingularity { t, reciprocal })
        }
    }

    /// Singularity year `a / k`.
    pub fn singularity(&self) -> f64 {
        self.a / self.k
    }

    /// Singularity rounded half away from zero to a whole year.
    pub fn singularity_year(&self) -> i64 {
        self.singularity().round() as i64
    }

    /// Parameters for the same curve with GDP values multiplied by `c`.
    pub fn rescaled(&self, c: f64) -> Result<Self> {
        Self::new(self.a / c, self.k / c)
    }
}

pub fn eval_hyperbolic(params: &HyperbolicParams, t: f64) -> Result<f64> {
    params.eval(t)
}

pub fn singularity(params: &HyperbolicParams) -> f64 {
    params.singularity()
}

/// Pointwise `(year, 1/value)`.
pub fn reciprocal_series(ts: &TimeSeries) -> TimeSeries {
    ts.map_values(f64::recip)
}
