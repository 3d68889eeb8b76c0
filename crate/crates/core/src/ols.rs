//! Unweighted least-squares line `y = intercept + slope * x`.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub n: usize,
    pub intercept: f64,
    pub slope: f64,
    /// Residual sum of squares.
    pub sse: f64,
    /// Total sum of squares about the mean of `y`.
    pub sst: f64,
    pub r2: f64,
    /// Standard error of the slope; `NaN` when `n < 3`.
    pub slope_stderr: f64,
    /// `slope / slope_stderr`, with `0/0` taken as 0.
    pub slope_t: f64,
}

/// Fits a line through `(x, y)` pairs. Requires `n >= 2` and at least two distinct `x`.
///
/// Sums are taken on centred data. `y` is first shifted by its first element so that
/// a constant input yields a slope and SSE of exactly zero.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> Option<LineFit> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let nf = n as f64;
    let x_mean = xs.iter().sum::<f64>() / nf;
    let y0 = ys[0];
    let d_mean = ys.iter().map(|y| y - y0).sum::<f64>() / nf;

    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        let dx = x - x_mean;
        let dy = (y - y0) - d_mean;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx <= 0.0 {
        return None;
    }

    let slope = sxy / sxx;
    let intercept = (y0 + d_mean) - slope * x_mean;
    let sse: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let e = ((y - y0) - d_mean) - slope * (x - x_mean);
            e * e
        })
        .sum();

    let r2 = if syy > 0.0 {
        (1.0 - sse / syy).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let slope_stderr = if n > 2 {
        (sse / (nf - 2.0) / sxx).sqrt()
    } else {
        f64::NAN
    };
    let slope_t = if slope == 0.0 {
        0.0
    } else {
        slope / slope_stderr
    };

    Some(LineFit {
        n,
        intercept,
        slope,
        sse,
        sst: syy,
        r2,
        slope_stderr,
        slope_t,
    })
}
