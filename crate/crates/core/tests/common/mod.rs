#![allow(dead_code)]

use hypertrend::{HyperbolicParams, TimeSeries};
use proptest::prelude::*;

/// Line through `(xs, ys)` from the raw normal equations, with the residual
/// sum of squares summed point by point.
pub fn naive_line(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    let sse = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| (y - intercept - slope * x).powi(2))
        .sum();
    (intercept, slope, sse)
}

pub fn reciprocal_sse(ts: &TimeSeries) -> f64 {
    let xs: Vec<f64> = ts.years().map(f64::from).collect();
    let ys: Vec<f64> = ts.values().map(f64::recip).collect();
    naive_line(&xs, &ys).2
}

/// Every admissible split, scored independently; returns (breakpoint year, total SSE).
pub fn brute_force_breakpoint(ts: &TimeSeries, min_points: usize) -> (i32, f64) {
    let pts = ts.points();
    let xs: Vec<f64> = pts.iter().map(|p| f64::from(p.year)).collect();
    let ys: Vec<f64> = pts.iter().map(|p| 1.0 / p.value).collect();
    let mut scored: Vec<(i32, f64)> = (min_points..=pts.len() - min_points)
        .map(|i| {
            let left = naive_line(&xs[..i], &ys[..i]).2;
            let right = naive_line(&xs[i..], &ys[i..]).2;
            (pts[i].year, left + right)
        })
        .collect();
    scored.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    scored[0]
}

/// Sorted, distinct years in `[lo, hi]`, at least `min` of them.
pub fn year_grid(lo: i32, hi: i32, min: usize, max: usize) -> impl Strategy<Value = Vec<i32>> {
    prop::collection::btree_set(lo..=hi, min..=max).prop_map(|s| s.into_iter().collect())
}

/// Parameters whose singularity lies in `[t_lo, t_hi]` with a positive intercept.
pub fn params_with_singularity(t_lo: f64, t_hi: f64) -> impl Strategy<Value = HyperbolicParams> {
    (1e-6f64..1e-2, t_lo..t_hi)
        .prop_map(|(k, ts)| HyperbolicParams::new(k * ts, k).expect("positive by construction"))
}

pub fn rel_err(got: f64, want: f64) -> f64 {
    ((got - want) / want).abs()
}
