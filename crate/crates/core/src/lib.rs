//! Hyperbolic growth analysis for long-run economic time series.

pub mod error;
pub mod fitting;
pub mod ingest;
pub mod model;
mod ols;
pub mod plot;
pub mod presets;
pub mod regime;
pub mod report;
mod serde_float;
pub mod synth;

pub use error::{Error, Result};
pub use fitting::{
    fit_hyperbolic, fit_piecewise, relative_deviation, residuals_reciprocal, FitWindow,
    HyperbolicFit, Residual, SegmentedFit,
};
pub use ingest::{
    aggregate, parse_document, parse_long_csv, parse_wide_csv, to_billions, to_millions,
    write_long_csv, write_wide_csv, AggregationMode, Dataset, RegionSpec,
};
pub use model::{
    eval_hyperbolic, reciprocal_series, singularity, HyperbolicParams, Observation, TimeSeries,
    SINGULARITY_GUARD,
};
pub use ols::LineFit;
pub use plot::{CurvePoint, PlotData};
pub use presets::{Preset, PresetCatalog, PRESETS_ENV};
pub use regime::{
    classify_segment, compare_with_galor, detect_divergence, BoundaryComparison,
    ClassifierThresholds, ComparisonSettings, Direction, DivergenceReport, DivergenceSettings,
    GalorTimeline, GradientStats, RegimeClassification, RegimeComparison, RegimeLabel,
    TakeoffVerdict, TimelineGroup,
};
pub use report::{
    analyze, analyze_series, region_series, render_csv, render_json, render_text, resolve_region,
    AnalysisConfig, Deviation, RegionReport, RegionSelector, SegmentReport,
};
pub use synth::{
    generate_synthetic, parse_year_grid, SyntheticKind, SyntheticModel, MADDISON_BENCHMARK_YEARS,
};
