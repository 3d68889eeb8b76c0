//! Stagnation-versus-hyperbolic diagnostics in reciprocal space.
//!
//! A stagnant economy shows reciprocal values scattered around a horizontal
//! line; hyperbolic growth shows a decreasing straight line. A slower
//! trajectory bends the reciprocal values upward, a faster one (a takeoff)
//! bends them downward.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};
use crate::fitting::{reciprocal_line, FitWindow, HyperbolicFit};
use crate::model::{Observation, TimeSeries, SINGULARITY_GUARD};

/// Upper-tail critical value of Student's t with `dof` degrees of freedom.
fn t_critical(upper_tail: f64, dof: usize) -> f64 {
    let dist = StudentsT::new(0.0, 1.0, dof as f64).expect("dof > 0");
    dist.inverse_cdf(1.0 - upper_tail)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifierThresholds {
    /// Two-sided significance level of the slope test.
    pub alpha: f64,
    /// Minimum reciprocal-space R² for the `Hyperbolic` label.
    pub r2_min: f64,
}

impl Default for ClassifierThresholds {
    fn default() -> Self {
        Self {
            alpha: 0.05,
            r2_min: 0.98,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegimeLabel {
    Hyperbolic,
    StagnantLike,
    Indeterminate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeClassification {
    pub label: RegimeLabel,
    #[serde(with = "crate::serde_float")]
    pub slope_t_statistic: f64,
    pub r2: f64,
}

/// Minimum observations for a classification.
pub const MIN_CLASSIFY_POINTS: usize = 4;

/// Labels the observations in `window` from the reciprocal regression.
///
/// `Hyperbolic`: slope significantly negative and R² at least `r2_min`.
/// `StagnantLike`: slope not significantly different from zero.
/// Anything else is `Indeterminate`.
pub fn classify_segment(
    ts: &TimeSeries,
    window: FitWindow,
    thresholds: &ClassifierThresholds,
) -> Result<RegimeClassification> {
    let points = window.observations(ts);
    if points.len() < MIN_CLASSIFY_POINTS {
        return Err(Error::InsufficientData {
            needed: MIN_CLASSIFY_POINTS,
            found: points.len(),
        });
    }
    let line = reciprocal_line(points).expect("distinct years");
    let t_crit = t_critical(thresholds.alpha / 2.0, line.n - 2);
    let t = line.slope_t;
    let label = if t < -t_crit && line.r2 >= thresholds.r2_min {
        RegimeLabel::Hyperbolic
    } else if t.abs() <= t_crit {
        RegimeLabel::StagnantLike
    } else {
        RegimeLabel::Indeterminate
    };
    Ok(RegimeClassification {
        label,
        slope_t_statistic: t,
        r2: line.r2,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DivergenceSettings {
    /// Relative residual threshold `delta`, as a fraction of `a - k t`.
    pub delta: f64,
    /// Consecutive observations that must exceed `delta` with one sign.
    pub consecutive: usize,
}

impl Default for DivergenceSettings {
    fn default() -> Self {
        Self {
            delta: 0.05,
            consecutive: 3,
        }
    }
}

impl DivergenceSettings {
    pub fn new(delta: f64, consecutive: usize) -> Result<Self> {
        if !(delta.is_finite() && delta >= 0.0) {
            return Err(Error::InvalidParams(format!(
                "delta {delta} must be non-negative"
            )));
        }
        if consecutive == 0 {
            return Err(Error::InvalidParams(
                "consecutive count must be at least 1".into(),
            ));
        }
        Ok(Self { delta, consecutive })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    Slower,
    Faster,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DivergenceReport {
    pub onset: Option<i32>,
    pub direction: Direction,
    /// Singularity year minus onset year.
    pub bypass_margin_years: Option<f64>,
}

fn departure(fit: &HyperbolicFit, p: &Observation, delta: f64) -> Direction {
    let line = fit.params.reciprocal_at(f64::from(p.year));
    if line <= SINGULARITY_GUARD {
        // The fitted curve has already blown up; any finite GDP is slower.
        return Direction::Slower;
    }
    let rel = (p.value.recip() - line) / line;
    if rel > delta {
        Direction::Slower
    } else if rel < -delta {
        Direction::Faster
    } else {
        Direction::None
    }
}

/// Finds where the series leaves the fitted hyperbola.
///
/// Candidates are observation years from the last one inside the fit window
/// onward. The onset is the earliest candidate whose next `consecutive`
/// observations all depart by more than `delta` relative to `a - k t`, in the
/// same direction.
pub fn detect_divergence(
    fit: &HyperbolicFit,
    ts: &TimeSeries,
    settings: &DivergenceSettings,
) -> DivergenceReport {
    let points = ts.points();
    let m = settings.consecutive.max(1);
    let first = points
        .partition_point(|p| p.year <= fit.window.end)
        .saturating_sub(1);

    for j in first..points.len() {
        let run = &points[j + 1..];
        if run.len() < m {
            break;
        }
        let dir = departure(fit, &run[0], settings.delta);
        if dir == Direction::None {
            continue;
        }
        if run[1..m]
            .iter()
            .all(|p| departure(fit, p, settings.delta) == dir)
        {
            let onset = points[j].year;
            return DivergenceReport {
                onset: Some(onset),
                direction: dir,
                bypass_margin_years: Some(fit.params.singularity() - f64::from(onset)),
            };
        }
    }
    DivergenceReport {
        onset: None,
        direction: Direction::None,
        bypass_margin_years: None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TimelineGroup {
    Developed,
    LessDeveloped,
}

impl std::str::FromStr for TimelineGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "developed" => Ok(Self::Developed),
            "less-developed" | "lessdeveloped" => Ok(Self::LessDeveloped),
            _ => Err(Error::InvalidParams(format!(
                "unknown timeline group {s:?}"
            ))),
        }
    }
}

/// Postulated regime boundaries of Unified Growth Theory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GalorTimeline {
    pub group: TimelineGroup,
    pub malthusian_end: i32,
    pub post_malthusian_end: Option<i32>,
}

impl GalorTimeline {
    pub fn for_group(group: TimelineGroup) -> Self {
        match group {
            TimelineGroup::Developed => Self {
                group,
                malthusian_end: 1750,
                post_malthusian_end: Some(1870),
            },
            TimelineGroup::LessDeveloped => Self {
                group,
                malthusian_end: 1900,
                post_malthusian_end: None,
            },
        }
    }

    pub fn boundaries(&self) -> Vec<i32> {
        std::iter::once(self.malthusian_end)
            .chain(self.post_malthusian_end)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonSettings {
    /// Observations taken on each side of a boundary.
    pub side_points: usize,
    /// One-sided significance level for the gradient difference.
    pub alpha: f64,
    /// Required steepening as a fraction of the pre-boundary gradient.
    pub min_relative_steepening: f64,
}

impl Default for ComparisonSettings {
    fn default() -> Self {
        Self {
            side_points: 3,
            alpha: 0.05,
            min_relative_steepening: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TakeoffVerdict {
    TakeoffPresent,
    TakeoffAbsent,
    Indeterminate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GradientStats {
    pub first_year: i32,
    pub last_year: i32,
    pub slope: f64,
    pub slope_stderr: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryComparison {
    pub boundary: i32,
    pub verdict: TakeoffVerdict,
    pub before: Option<GradientStats>,
    pub after: Option<GradientStats>,
    /// `(slope_after - slope_before) / stderr`; negative means steepening.
    #[serde(with = "crate::serde_float::option")]
    pub t_statistic: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeComparison {
    pub timeline: GalorTimeline,
    /// Gradient `-k` of the overall fit, for reference.
    pub fitted_gradient: f64,
    pub boundaries: Vec<BoundaryComparison>,
}

fn gradient(points: &[Observation]) -> GradientStats {
    let line = reciprocal_line(points).expect("distinct years");
    GradientStats {
        first_year: points[0].year,
        last_year: points[points.len() - 1].year,
        slope: line.slope,
        slope_stderr: line.slope_stderr,
    }
}

fn compare_boundary(
    ts: &TimeSeries,
    boundary: i32,
    settings: &ComparisonSettings,
) -> BoundaryComparison {
    let n = settings.side_points.max(3);
    let points = ts.points();
    let before_end = points.partition_point(|p| p.year <= boundary);
    let after_start = points.partition_point(|p| p.year < boundary);
    if before_end < n || points.len() - after_start < n {
        return BoundaryComparison {
            boundary,
            verdict: TakeoffVerdict::Indeterminate,
            before: None,
            after: None,
            t_statistic: None,
        };
    }
    let before = gradient(&points[before_end - n..before_end]);
    let after = gradient(&points[after_start..after_start + n]);

    let diff = after.slope - before.slope;
    let stderr = before.slope_stderr.hypot(after.slope_stderr);
    let t_crit = t_critical(settings.alpha, 2 * n - 4);
    let significant = diff < -t_crit * stderr;
    let large_enough = -diff > settings.min_relative_steepening * before.slope.abs();
    let verdict = if significant && large_enough {
        TakeoffVerdict::TakeoffPresent
    } else {
        TakeoffVerdict::TakeoffAbsent
    };
    let t_statistic = if diff == 0.0 { 0.0 } else { diff / stderr };
    BoundaryComparison {
        boundary,
        verdict,
        before: Some(before),
        after: Some(after),
        t_statistic: Some(t_statistic),
    }
}

/// Tests each timeline boundary for a steepening of the reciprocal gradient.
///
/// The gradient over the nearest `side_points` observations at or before the
/// boundary is compared with the one at or after it. A takeoff needs the
/// later gradient to be more negative both significantly and by at least
/// `min_relative_steepening` of the earlier one. Boundaries without enough
/// data on either side are `Indeterminate`.
pub fn compare_with_galor(
    ts: &TimeSeries,
    fit: &HyperbolicFit,
    timeline: &GalorTimeline,
    settings: &ComparisonSettings,
) -> RegimeComparison {
    RegimeComparison {
        timeline: *timeline,
        fitted_gradient: -fit.params.k(),
        boundaries: timeline
            .boundaries()
            .into_iter()
            .map(|b| compare_boundary(ts, b, settings))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fitting::fit_hyperbolic;
    use crate::model::HyperbolicParams;
    use crate::synth::{generate_synthetic, SyntheticModel};

    fn we12() -> HyperbolicParams {
        HyperbolicParams::new(1.147e-1, 5.961e-5).unwrap()
    }

    fn window(a: i32, b: i32) -> FitWindow {
        FitWindow::new(a, b).unwrap()
    }

    #[test]
    fn constant_series_is_stagnant() {
        for level in [0.3, 7.0, 12345.0] {
            let ts =
                TimeSeries::from_pairs([(1, level), (1000, level), (1500, level), (1600, level)])
                    .unwrap();
            let c =
                classify_segment(&ts, window(1, 1600), &ClassifierThresholds::default()).unwrap();
            assert_eq!(c.label, RegimeLabel::StagnantLike);
            assert_eq!(c.slope_t_statistic, 0.0);
        }
    }

    #[test]
    fn noiseless_hyperbola_is_hyperbolic() {
        let years = [1, 1000, 1500, 1600, 1700, 1820, 1870, 1900];
        let ts = generate_synthetic(
            &SyntheticModel::Hyperbolic { params: we12() },
            &years,
            0.0,
            0,
        )
        .unwrap();
        let c = classify_segment(&ts, window(1, 1900), &ClassifierThresholds::default()).unwrap();
        assert_eq!(c.label, RegimeLabel::Hyperbolic);
        assert!(c.r2 > 1.0 - 1e-12);
    }

    #[test]
    fn classify_needs_four_points() {
        let ts = TimeSeries::from_pairs([(1, 1.0), (2, 2.0), (3, 3.0)]).unwrap();
        assert_eq!(
            classify_segment(&ts, window(1, 3), &ClassifierThresholds::default()).unwrap_err(),
            Error::InsufficientData {
                needed: 4,
                found: 3
            }
        );
    }

    #[test]
    fn declining_series_is_indeterminate() {
        let ts =
            TimeSeries::from_pairs([(1, 10.0), (2, 9.0), (3, 8.0), (4, 7.0), (5, 6.0)]).unwrap();
        let c = classify_segment(&ts, window(1, 5), &ClassifierThresholds::default()).unwrap();
        assert_eq!(c.label, RegimeLabel::Indeterminate);
        assert!(c.slope_t_statistic > 0.0);
    }

    #[test]
    fn pure_hyperbola_has_no_divergence() {
        let years: Vec<i32> = (0..=19).map(|i| 1 + 100 * i).collect();
        let ts = generate_synthetic(
            &SyntheticModel::Hyperbolic { params: we12() },
            &years,
            0.0,
            0,
        )
        .unwrap();
        let fit = fit_hyperbolic(&ts, window(1, 1001)).unwrap();
        let r = detect_divergence(&fit, &ts, &DivergenceSettings::default());
        assert_eq!(r.direction, Direction::None);
        assert_eq!(r.onset, None);
        assert_eq!(r.bypass_margin_years, None);
    }

    #[test]
    fn slowdown_onset_and_margin() {
        let mut years = vec![1, 1000, 1500, 1600, 1700];
        years.extend((1820..=2000).step_by(10));
        let model = SyntheticModel::HyperbolicWithSlowdown {
            params: we12(),
            onset: 1900,
            slowdown: 0.1,
        };
        let ts = generate_synthetic(&model, &years, 0.0, 0).unwrap();
        let fit = fit_hyperbolic(&ts, window(1500, 1870)).unwrap();
        let r = detect_divergence(&fit, &ts, &DivergenceSettings::default());
        assert_eq!(r.direction, Direction::Slower);
        assert_eq!(r.onset, Some(1900));
        let margin = r.bypass_margin_years.unwrap();
        assert!((margin - 24.17).abs() < 0.01, "{margin}");
    }

    #[test]
    fn faster_tail_is_detected() {
        let p = HyperbolicParams::new(0.5, 2e-4).unwrap();
        let years: Vec<i32> = (0..=20).map(|i| 1 + 50 * i).collect();
        let y0 = p.reciprocal_at(601.0);
        let ts = TimeSeries::from_pairs(years.iter().map(|&y| {
            let t = f64::from(y);
            let r = if y <= 601 {
                p.reciprocal_at(t)
            } else {
                y0 - 4.0 * p.k() * (t - 601.0)
            };
            (y, 1.0 / r)
        }))
        .unwrap();
        let fit = fit_hyperbolic(&ts, window(1, 601)).unwrap();
        let r = detect_divergence(&fit, &ts, &DivergenceSettings::default());
        assert_eq!(r.direction, Direction::Faster);
        assert_eq!(r.onset, Some(601));
        assert!(r.bypass_margin_years.is_some());
    }

    #[test]
    fn short_excursions_are_ignored() {
        let p = HyperbolicParams::new(0.5, 2e-4).unwrap();
        let years: Vec<i32> = (0..=20).map(|i| 1 + 50 * i).collect();
        let ts = TimeSeries::from_pairs(years.iter().map(|&y| {
            let v = p.eval(f64::from(y)).unwrap();
            // Two consecutive low points, then back on track.
            (y, if y == 701 || y == 751 { v * 0.5 } else { v })
        }))
        .unwrap();
        let fit = fit_hyperbolic(&ts, window(1, 601)).unwrap();
        let r = detect_divergence(&fit, &ts, &DivergenceSettings::default());
        assert_eq!(r.direction, Direction::None);
        let r = detect_divergence(&fit, &ts, &DivergenceSettings::new(0.05, 2).unwrap());
        assert_eq!(r.onset, Some(651));
    }

    #[test]
    fn divergence_settings_validation() {
        assert!(DivergenceSettings::new(-0.1, 3).is_err());
        assert!(DivergenceSettings::new(0.1, 0).is_err());
    }

    #[test]
    fn takeoff_is_found_and_hyperbola_is_not() {
        let years: Vec<i32> = (1500..=2000).step_by(50).collect();
        // Horizontal reciprocal until 1750, then a steep descent.
        let takeoff = TimeSeries::from_pairs(years.iter().map(|&y| {
            let r = if y <= 1750 {
                0.05
            } else {
                0.05 - 1.5e-4 * f64::from(y - 1750)
            };
            (y, 1.0 / r)
        }))
        .unwrap();
        let fit = fit_hyperbolic(&takeoff, window(1500, 2000)).unwrap();
        let cmp = compare_with_galor(
            &takeoff,
            &fit,
            &GalorTimeline::for_group(TimelineGroup::Developed),
            &ComparisonSettings::default(),
        );
        assert_eq!(cmp.boundaries[0].boundary, 1750);
        assert_eq!(cmp.boundaries[0].verdict, TakeoffVerdict::TakeoffPresent);
        // Both sides of 1870 lie on the same descending line.
        assert_eq!(cmp.boundaries[1].verdict, TakeoffVerdict::TakeoffAbsent);

        let p = HyperbolicParams::new(0.5, 2e-4).unwrap();
        let pure =
            generate_synthetic(&SyntheticModel::Hyperbolic { params: p }, &years, 0.0, 0).unwrap();
        let fit = fit_hyperbolic(&pure, window(1500, 2000)).unwrap();
        for b in &compare_with_galor(
            &pure,
            &fit,
            &GalorTimeline::for_group(TimelineGroup::Developed),
            &ComparisonSettings::default(),
        )
        .boundaries
        {
            assert_eq!(b.verdict, TakeoffVerdict::TakeoffAbsent);
        }
    }

    #[test]
    fn boundary_outside_data_is_indeterminate() {
        let p = HyperbolicParams::new(0.5, 2e-4).unwrap();
        let years: Vec<i32> = (1..=1500).step_by(100).collect();
        let ts =
            generate_synthetic(&SyntheticModel::Hyperbolic { params: p }, &years, 0.0, 0).unwrap();
        let fit = fit_hyperbolic(&ts, window(1, 1500)).unwrap();
        let cmp = compare_with_galor(
            &ts,
            &fit,
            &GalorTimeline::for_group(TimelineGroup::LessDeveloped),
            &ComparisonSettings::default(),
        );
        assert_eq!(cmp.boundaries.len(), 1);
        assert_eq!(cmp.boundaries[0].verdict, TakeoffVerdict::Indeterminate);
        assert!(cmp.boundaries[0].before.is_none());
    }

    #[test]
    fn timelines() {
        assert_eq!(
            GalorTimeline::for_group(TimelineGroup::Developed).boundaries(),
            vec![1750, 1870]
        );
        assert_eq!(
            GalorTimeline::for_group(TimelineGroup::LessDeveloped).boundaries(),
            vec![1900]
        );
        assert_eq!(
            "less-developed".parse::<TimelineGroup>().unwrap(),
            TimelineGroup::LessDeveloped
        );
        assert!("rich".parse::<TimelineGroup>().is_err());
    }
}
