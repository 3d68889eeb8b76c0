//! Per-region analysis: aggregation, fit, singularity, divergence,
//! classification and timeline comparison, plus text/CSV/JSON rendering.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fitting::{
    fit_hyperbolic, fit_piecewise, relative_deviation, FitWindow, HyperbolicFit, MIN_FIT_POINTS,
};
use crate::ingest::{aggregate, to_billions, Dataset, RegionSpec};
use crate::model::TimeSeries;
use crate::presets::{Preset, PresetCatalog};
use crate::regime::{
    classify_segment, compare_with_galor, detect_divergence, ClassifierThresholds,
    ComparisonSettings, DivergenceReport, DivergenceSettings, GalorTimeline, RegimeClassification,
    RegimeComparison, TimelineGroup,
};

/// Years at which deviations from the fitted curve are reported when observed.
pub const DEVIATION_YEARS: [i32; 2] = [1, 1000];

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisConfig {
    pub region: RegionSpec,
    pub window: FitWindow,
    pub segments: u8,
    pub min_points: usize,
    pub divergence: DivergenceSettings,
    pub classifier: ClassifierThresholds,
    pub comparison: ComparisonSettings,
    pub timeline: Option<TimelineGroup>,
}

impl AnalysisConfig {
    pub fn new(region: RegionSpec, window: FitWindow) -> Self {
        Self {
            region,
            window,
            segments: 1,
            min_points: MIN_FIT_POINTS,
            divergence: DivergenceSettings::default(),
            classifier: ClassifierThresholds::default(),
            comparison: ComparisonSettings::default(),
            timeline: None,
        }
    }

    pub fn from_preset(preset: &Preset) -> Self {
        Self {
            segments: preset.segments,
            timeline: Some(preset.timeline),
            ..Self::new(preset.region.clone(), preset.window)
        }
    }
}

/// What a `--region` argument names.
#[derive(Debug, Clone, PartialEq)]
pub enum RegionSelector<'a> {
    Preset(&'a Preset),
    Inline(RegionSpec),
}

/// Resolves `sum:A,B,...`, `total:NAME`, or a preset name.
pub fn resolve_region<'a>(
    selector: &str,
    catalog: &'a PresetCatalog,
) -> Result<RegionSelector<'a>> {
    if let Some(members) = selector.strip_prefix("sum:") {
        let members: Vec<String> = members
            .split(',')
            .map(str::trim)
            .filter(|m| !m.is_empty())
            .map(str::to_string)
            .collect();
        if members.is_empty() {
            return Err(Error::InvalidParams(format!(
                "region {selector:?} lists no members"
            )));
        }
        return Ok(RegionSelector::Inline(RegionSpec::sum(selector, members)));
    }
    if let Some(total) = selector.strip_prefix("total:") {
        let total = total.trim();
        if total.is_empty() {
            return Err(Error::InvalidParams(format!(
                "region {selector:?} names no total"
            )));
        }
        return Ok(RegionSelector::Inline(RegionSpec::prebuilt(total, total)));
    }
    catalog
        .get(selector)
        .map(RegionSelector::Preset)
        .ok_or_else(|| Error::UnknownPreset(selector.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmentReport {
    pub fit: HyperbolicFit,
    pub singularity: f64,
    pub singularity_year: i64,
}

impl From<HyperbolicFit> for SegmentReport {
    fn from(fit: HyperbolicFit) -> Self {
        Self {
            singularity: fit.params.singularity(),
            singularity_year: fit.params.singularity_year(),
            fit,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Deviation {
    pub year: i32,
    pub percent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionReport {
    pub region: String,
    pub window: FitWindow,
    /// Observations in the aggregated series (all years, not just the window).
    pub n_observations: usize,
    pub breakpoint: Option<i32>,
    /// One entry per fitted segment, in time order.
    pub segments: Vec<SegmentReport>,
    pub total_sse: f64,
    /// Singularity of the last segment.
    pub singularity: f64,
    pub singularity_year: i64,
    pub divergence: DivergenceReport,
    pub classification: Option<RegimeClassification>,
    pub regime_comparison: Option<RegimeComparison>,
    pub deviations: Vec<Deviation>,
}

impl RegionReport {
    /// The segment divergence is measured against.
    pub fn trailing(&self) -> &HyperbolicFit {
        &self.segments[self.segments.len() - 1].fit
    }
}

/// Aggregated series for the configured region, in billions.
pub fn region_series(ds: &Dataset, config: &AnalysisConfig) -> Result<TimeSeries> {
    aggregate(ds, &config.region).map(|ts| to_billions(&ts))
}

/// Runs the full analysis on a series already in billions.
pub fn analyze_series(
    name: &str,
    ts: &TimeSeries,
    config: &AnalysisConfig,
) -> Result<RegionReport> {
    let (breakpoint, fits, total_sse) = match config.segments {
        1 => {
            let fit = fit_hyperbolic(ts, config.window)?;
            (None, vec![fit], fit.sse_reciprocal)
        }
        2 => {
            let inside = config.window.observations(ts).to_vec();
            if inside.is_empty() {
                return Err(Error::InsufficientData {
                    needed: 2 * config.min_points,
                    found: 0,
                });
            }
            let seg = fit_piecewise(&TimeSeries::new(inside)?, config.min_points)?;
            (
                Some(seg.breakpoint),
                vec![seg.first, seg.second],
                seg.total_sse,
            )
        }
        n => {
            return Err(Error::InvalidParams(format!(
                "segments = {n}; expected 1 or 2"
            )))
        }
    };
    let trailing = fits[fits.len() - 1];

    let deviations = DEVIATION_YEARS
        .iter()
        .filter(|&&y| ts.value_at(y).is_some())
        .filter_map(|&year| {
            let fit = fits
                .iter()
                .find(|f| f.window.contains(year))
                .unwrap_or(&fits[0]);
            relative_deviation(fit, ts, year)
                .ok()
                .map(|percent| Deviation { year, percent })
        })
        .collect();

    let classification = classify_segment(ts, config.window, &config.classifier).ok();
    let regime_comparison = config.timeline.map(|group| {
        compare_with_galor(
            ts,
            &trailing,
            &GalorTimeline::for_group(group),
            &config.comparison,
        )
    });

    Ok(RegionReport {
        region: name.to_string(),
        window: config.window,
        n_observations: ts.len(),
        breakpoint,
        singularity: trailing.params.singularity(),
        singularity_year: trailing.params.singularity_year(),
        divergence: detect_divergence(&trailing, ts, &config.divergence),
        segments: fits.into_iter().map(SegmentReport::from).collect(),
        total_sse,
        classification,
        regime_comparison,
        deviations,
    })
}

pub fn analyze(ds: &Dataset, config: &AnalysisConfig) -> Result<RegionReport> {
    analyze_series(&config.region.name, &region_series(ds, config)?, config)
}

/// Four significant digits.
pub fn sig4(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if (-3..5).contains(&mag) {
        format!("{:.*}", (3 - mag).max(0) as usize, x)
    } else {
        format!("{x:.3e}")
    }
}

fn kebab<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

pub fn render_text(reports: &[RegionReport]) -> String {
    let mut out = String::new();
    for (i, r) in reports.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let _ = writeln!(
            out,
            "region {}  window {}  observations {}",
            r.region, r.window, r.n_observations
        );
        if let Some(b) = r.breakpoint {
            let _ = writeln!(out, "  breakpoint {b}");
        }
        for (j, s) in r.segments.iter().enumerate() {
            let f = &s.fit;
            let _ = writeln!(
                out,
                "  segment {}  {}  a = {:.3e}  k = {:.3e}  singularity {}  n = {}  R2 = {}",
                j + 1,
                f.window,
                f.params.a(),
                f.params.k(),
                s.singularity_year,
                f.n_points,
                sig4(f.r2_reciprocal),
            );
        }
        let d = &r.divergence;
        match (d.onset, d.bypass_margin_years) {
            (Some(onset), Some(margin)) => {
                let _ = writeln!(
                    out,
                    "  divergence {} from {onset}, bypass margin {} years",
                    kebab(&d.direction),
                    sig4(margin)
                );
            }
            _ => {
                let _ = writeln!(out, "  divergence none");
            }
        }
        for dev in &r.deviations {
            let sign = if dev.percent >= 0.0 { "+" } else { "" };
            let _ = writeln!(
                out,
                "  deviation AD {}: {sign}{}%",
                dev.year,
                sig4(dev.percent)
            );
        }
        if let Some(c) = &r.classification {
            let _ = writeln!(
                out,
                "  classification {}  t = {}  R2 = {}",
                kebab(&c.label),
                sig4(c.slope_t_statistic),
                sig4(c.r2)
            );
        }
        if let Some(cmp) = &r.regime_comparison {
            for b in &cmp.boundaries {
                let _ = writeln!(
                    out,
                    "  {} boundary {}: {}",
                    kebab(&cmp.timeline.group),
                    b.boundary,
                    kebab(&b.verdict)
                );
            }
        }
    }
    out
}

const CSV_COLUMNS: [&str; 22] = [
    "region",
    "window_start",
    "window_end",
    "n_observations",
    "breakpoint",
    "a",
    "k",
    "singularity",
    "singularity_year",
    "n_points",
    "sse_reciprocal",
    "r2_reciprocal",
    "first_a",
    "first_k",
    "first_singularity",
    "onset",
    "direction",
    "bypass_margin_years",
    "classification",
    "dev_ad1_percent",
    "dev_ad1000_percent",
    "takeoff",
];

/// One row per region; numbers at full precision.
pub fn render_csv(reports: &[RegionReport]) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(CSV_COLUMNS).expect("in-memory write");
    let opt = |v: Option<String>| v.unwrap_or_default();
    for r in reports {
        let last = r.trailing();
        let first = (r.segments.len() > 1).then(|| &r.segments[0]);
        let dev = |year| {
            r.deviations
                .iter()
                .find(|d| d.year == year)
                .map(|d| d.percent.to_string())
        };
        let takeoff = r
            .regime_comparison
            .as_ref()
            .map(|c| {
                c.boundaries
                    .iter()
                    .map(|b| format!("{}:{}", b.boundary, kebab(&b.verdict)))
                    .collect::<Vec<_>>()
                    .join(";")
            })
            .unwrap_or_default();
        let row = [
            r.region.clone(),
            r.window.start.to_string(),
            r.window.end.to_string(),
            r.n_observations.to_string(),
            opt(r.breakpoint.map(|b| b.to_string())),
            last.params.a().to_string(),
            last.params.k().to_string(),
            r.singularity.to_string(),
            r.singularity_year.to_string(),
            last.n_points.to_string(),
            r.total_sse.to_string(),
            last.r2_reciprocal.to_string(),
            opt(first.map(|s| s.fit.params.a().to_string())),
            opt(first.map(|s| s.fit.params.k().to_string())),
            opt(first.map(|s| s.singularity.to_string())),
            opt(r.divergence.onset.map(|y| y.to_string())),
            kebab(&r.divergence.direction),
            opt(r.divergence.bypass_margin_years.map(|m| m.to_string())),
            opt(r.classification.as_ref().map(|c| kebab(&c.label))),
            opt(dev(1)),
            opt(dev(1000)),
            takeoff,
        ];
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8")
}

pub fn render_json(reports: &[RegionReport]) -> String {
    let mut s = serde_json::to_string_pretty(reports).expect("reports serialize");
    s.push('\n');
    s
}

pub fn parse_json(text: &str) -> std::result::Result<Vec<RegionReport>, serde_json::Error> {
    serde_json::from_str(text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::Dataset;
    use crate::model::HyperbolicParams;
    use crate::synth::{generate_synthetic, SyntheticModel};

    fn dataset(name: &str, ts: TimeSeries) -> Dataset {
        let mut ds = Dataset::new();
        ds.insert(name, ts.map_values(|v| v * 1000.0)).unwrap();
        ds
    }

    fn slowdown_series() -> TimeSeries {
        let mut years = vec![1, 1000, 1500, 1600, 1700];
        years.extend((1820..=1990).step_by(10));
        let p = HyperbolicParams::new(1.147e-1, 5.961e-5).unwrap();
        let model = SyntheticModel::HyperbolicWithSlowdown {
            params: p,
            onset: 1900,
            slowdown: 0.1,
        };
        generate_synthetic(&model, &years, 0.0, 0).unwrap()
    }

    #[test]
    fn single_segment_report() {
        let ds = dataset("X", slowdown_series());
        let mut cfg = AnalysisConfig::new(
            RegionSpec::prebuilt("x", "X"),
            FitWindow::new(1500, 1900).unwrap(),
        );
        cfg.timeline = Some(TimelineGroup::Developed);
        let r = analyze(&ds, &cfg).unwrap();
        assert_eq!(r.segments.len(), 1);
        assert!((r.trailing().params.a() - 1.147e-1).abs() < 1e-12);
        assert_eq!(r.singularity_year, 1924);
        assert_eq!(r.divergence.onset, Some(1900));
        assert_eq!(r.deviations.len(), 2);
        assert!(r.deviations.iter().all(|d| d.percent.abs() < 1e-9));
        assert_eq!(r.regime_comparison.as_ref().unwrap().boundaries.len(), 2);

        let json = render_json(std::slice::from_ref(&r));
        assert_eq!(parse_json(&json).unwrap(), vec![r.clone()]);
        let text = render_text(std::slice::from_ref(&r));
        assert!(text.contains("a = 1.147e-1"), "{text}");
        assert!(text.contains("singularity 1924"), "{text}");
        let csv = render_csv(&[r]);
        assert_eq!(csv.lines().count(), 2);
    }

    #[test]
    fn two_segment_report() {
        let first = HyperbolicParams::new(0.4421, 2.093e-4).unwrap();
        let second = HyperbolicParams::new(1.570, 8.224e-4).unwrap();
        let years = [1, 500, 1000, 1500, 1600, 1700, 1750, 1820, 1850, 1870];
        let model = SyntheticModel::PiecewiseHyperbolic {
            first,
            second,
            breakpoint: 1600,
        };
        let ds = dataset("LA", generate_synthetic(&model, &years, 0.0, 0).unwrap());
        let mut cfg = AnalysisConfig::new(
            RegionSpec::prebuilt("la", "LA"),
            FitWindow::new(1, 1870).unwrap(),
        );
        cfg.segments = 2;
        let r = analyze(&ds, &cfg).unwrap();
        assert_eq!(r.breakpoint, Some(1600));
        assert_eq!(r.segments[0].singularity_year, 2112);
        assert_eq!(r.segments[1].singularity_year, 1909);
        let text = render_text(&[r]);
        assert!(text.contains("breakpoint 1600"));
    }

    #[test]
    fn selectors() {
        let cat = PresetCatalog::builtin().unwrap();
        assert!(matches!(
            resolve_region("we12", &cat),
            Ok(RegionSelector::Preset(_))
        ));
        match resolve_region("sum:A, B", &cat).unwrap() {
            RegionSelector::Inline(spec) => assert_eq!(spec.members, ["A", "B"]),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            resolve_region("total:Total Africa", &cat),
            Ok(RegionSelector::Inline(_))
        ));
        assert_eq!(
            resolve_region("mars", &cat).unwrap_err(),
            Error::UnknownPreset("mars".into())
        );
        assert!(resolve_region("sum:", &cat).is_err());
    }

    #[test]
    fn significant_digits() {
        assert_eq!(sig4(27.0412), "27.04");
        assert_eq!(sig4(-54.321), "-54.32");
        assert_eq!(sig4(0.98765), "0.9877");
        assert_eq!(sig4(1.147e-5), "1.147e-5");
        assert_eq!(sig4(123456.0), "1.235e5");
        assert_eq!(sig4(0.0), "0");
    }
}
