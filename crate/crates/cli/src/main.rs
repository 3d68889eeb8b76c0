//! `hypertrend`: fit hyperbolic growth to long-run GDP tables.
//!
//! Exit codes: 0 success, 2 data or input errors, 3 the series is not hyperbolic.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hypertrend::{
    analyze_series, generate_synthetic, parse_document, parse_year_grid, region_series, render_csv,
    render_json, render_text, resolve_region, to_millions, write_long_csv, AnalysisConfig,
    ClassifierThresholds, Dataset, DivergenceSettings, Error, FitWindow, PlotData, PresetCatalog,
    RegionReport, RegionSelector, SyntheticKind, SyntheticModel, TimeSeries, TimelineGroup,
    MADDISON_BENCHMARK_YEARS,
};

#[derive(Parser)]
#[command(
    name = "hypertrend",
    version,
    about = "Hyperbolic growth analysis of historical GDP series"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Timeline {
    Developed,
    LessDeveloped,
    None,
}

#[derive(clap::Args)]
struct RegionArgs {
    /// Data file: wide Maddison CSV or long `entity,year,gdp_millions` CSV, values in millions.
    #[arg(long)]
    data: PathBuf,
    /// 0-based index of the row holding entity names.
    #[arg(long, default_value_t = 0)]
    header_row: usize,
    /// Fit window `start:end`; defaults to the preset's window.
    #[arg(long)]
    window: Option<String>,
    /// Number of hyperbolic segments; defaults to the preset's value, else 1.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    segments: Option<u8>,
    /// Minimum observations per segment in the breakpoint search.
    #[arg(long, default_value_t = 3)]
    min_points: usize,
    /// Relative residual threshold for divergence onset.
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    /// Consecutive departing observations required for an onset.
    #[arg(long, default_value_t = 3)]
    consecutive: usize,
    /// Significance level of the stagnation classifier.
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Minimum reciprocal R² for the hyperbolic label.
    #[arg(long, default_value_t = 0.98)]
    r2_min: f64,
    /// Regime timeline to compare against; defaults to the preset's group.
    #[arg(long, value_enum)]
    timeline: Option<Timeline>,
}

#[derive(Subcommand)]
enum Command {
    /// Fit regions and print a report.
    Fit {
        /// Preset name, `sum:A,B,...` or `total:NAME`. Repeat for several regions.
        #[arg(long, required = true)]
        region: Vec<String>,
        #[command(flatten)]
        args: RegionArgs,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Write a seeded synthetic series as long-format CSV (values in millions).
    Synth {
        /// stagnation | hyperbolic | piecewise-hyperbolic | hyperbolic-with-slowdown
        #[arg(long)]
        kind: String,
        /// Comma-separated key=value parameters, in billions (e.g. `a=0.1147,k=5.961e-5`).
        #[arg(long)]
        params: String,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Log-normal noise level (standard deviation of the log multiplier).
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        /// Year grid, e.g. `1,1000,1500:1900:10`; defaults to Maddison benchmark years.
        #[arg(long)]
        years: Option<String>,
        #[arg(long, default_value = "synthetic")]
        entity: String,
    },
    /// Write plot-ready series and optionally an SVG for one region.
    Plot {
        #[arg(long)]
        region: String,
        #[command(flatten)]
        args: RegionArgs,
        /// Output path prefix; files `<prefix>_gdp.csv`, `_reciprocal.csv`, `_fit.csv`, `.svg`.
        #[arg(long)]
        out_prefix: PathBuf,
        #[arg(long)]
        svg: bool,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn data(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    fn from_error(context: &str, err: Error) -> Self {
        let code = if matches!(err, Error::NotHyperbolic { .. }) {
            3
        } else {
            2
        };
        Self {
            code,
            message: format!("{context}: {err}"),
        }
    }
}

type CliResult<T> = Result<T, Failure>;

fn load_dataset(path: &Path, header_row: usize) -> CliResult<Dataset> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::data(format!("cannot read data file {}: {e}", path.display())))?;
    parse_document(&text, header_row)
        .map_err(|e| Failure::from_error(&path.display().to_string(), e))
}

fn build_config(
    selector: &str,
    catalog: &PresetCatalog,
    args: &RegionArgs,
) -> CliResult<AnalysisConfig> {
    let ctx = format!("region {selector}");
    let window = args
        .window
        .as_deref()
        .map(str::parse::<FitWindow>)
        .transpose()
        .map_err(|e| Failure::from_error(&ctx, e))?;
    let mut config =
        match resolve_region(selector, catalog).map_err(|e| Failure::from_error(&ctx, e))? {
            RegionSelector::Preset(p) => {
                let mut c = AnalysisConfig::from_preset(p);
                if let Some(w) = window {
                    c.window = w;
                }
                c
            }
            RegionSelector::Inline(spec) => {
                let w = window
                    .ok_or_else(|| Failure::data(format!("{ctx}: inline regions need --window")))?;
                AnalysisConfig::new(spec, w)
            }
        };
    if let Some(s) = args.segments {
        config.segments = s;
    }
    config.min_points = args.min_points;
    config.divergence = DivergenceSettings::new(args.delta, args.consecutive)
        .map_err(|e| Failure::from_error(&ctx, e))?;
    config.classifier = ClassifierThresholds {
        alpha: args.alpha,
        r2_min: args.r2_min,
    };
    match args.timeline {
        Some(Timeline::Developed) => config.timeline = Some(TimelineGroup::Developed),
        Some(Timeline::LessDeveloped) => config.timeline = Some(TimelineGroup::LessDeveloped),
        Some(Timeline::None) => config.timeline = None,
        None => {}
    }
    Ok(config)
}

fn run_region(
    ds: &Dataset,
    selector: &str,
    config: &AnalysisConfig,
) -> CliResult<(TimeSeries, RegionReport)> {
    let ctx = format!("region {selector} (window {})", config.window);
    let ts = region_series(ds, config).map_err(|e| Failure::from_error(&ctx, e))?;
    let report = analyze_series(selector, &ts, config).map_err(|e| Failure::from_error(&ctx, e))?;
    Ok((ts, report))
}

fn catalog() -> CliResult<PresetCatalog> {
    PresetCatalog::from_env().map_err(|e| Failure::data(e.to_string()))
}

fn cmd_fit(regions: &[String], args: &RegionArgs, format: Format) -> CliResult<String> {
    let catalog = catalog()?;
    let ds = load_dataset(&args.data, args.header_row)?;
    let configs = regions
        .iter()
        .map(|r| build_config(r, &catalog, args))
        .collect::<CliResult<Vec<_>>>()?;

    // Regions run concurrently; output keeps the command-line order.
    let results: Vec<CliResult<RegionReport>> = std::thread::scope(|scope| {
        let handles: Vec<_> = regions
            .iter()
            .zip(&configs)
            .map(|(r, c)| {
                let ds = &ds;
                scope.spawn(move || run_region(ds, r, c).map(|(_, report)| report))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("analysis thread panicked"))
            .collect()
    });
    let reports = results.into_iter().collect::<CliResult<Vec<_>>>()?;

    Ok(match format {
        Format::Text => render_text(&reports),
        Format::Csv => render_csv(&reports),
        Format::Json => render_json(&reports),
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_synth(
    kind: &str,
    params: &str,
    seed: u64,
    out: &Path,
    noise: f64,
    years: Option<&str>,
    entity: &str,
) -> CliResult<String> {
    let synth = |e: Error| Failure::from_error("synth", e);
    let kind: SyntheticKind = kind.parse().map_err(synth)?;
    let model = SyntheticModel::from_params(kind, params).map_err(synth)?;
    let years = match years {
        Some(spec) => parse_year_grid(spec).map_err(synth)?,
        None => MADDISON_BENCHMARK_YEARS.to_vec(),
    };
    let ts = generate_synthetic(&model, &years, noise, seed).map_err(synth)?;
    let mut ds = Dataset::new();
    ds.insert(entity, to_millions(&ts)).map_err(synth)?;
    write_file(out, &write_long_csv(&ds))?;
    Ok(String::new())
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)
            .map_err(|e| Failure::data(format!("cannot create {}: {e}", dir.display())))?;
    }
    fs::write(path, contents)
        .map_err(|e| Failure::data(format!("cannot write {}: {e}", path.display())))
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn cmd_plot(region: &str, args: &RegionArgs, prefix: &Path, svg: bool) -> CliResult<String> {
    let catalog = catalog()?;
    let ds = load_dataset(&args.data, args.header_row)?;
    let config = build_config(region, &catalog, args)?;
    let (ts, report) = run_region(&ds, region, &config)?;
    let data = PlotData::new(&ts, &report);

    let mut files = vec![
        (with_suffix(prefix, "_gdp.csv"), data.gdp_csv()),
        (
            with_suffix(prefix, "_reciprocal.csv"),
            data.reciprocal_csv(),
        ),
        (with_suffix(prefix, "_fit.csv"), data.curve_csv()),
    ];
    if svg {
        files.push((with_suffix(prefix, ".svg"), data.svg()));
    }
    let mut listing = String::new();
    for (path, contents) in files {
        write_file(&path, &contents)?;
        listing.push_str(&format!("{}\n", path.display()));
    }
    Ok(listing)
}

fn run(cli: Cli) -> CliResult<String> {
    match cli.command {
        Command::Fit {
            region,
            args,
            format,
        } => cmd_fit(&region, &args, format),
        Command::Synth {
            kind,
            params,
            seed,
            out,
            noise,
            years,
            entity,
        } => cmd_synth(&kind, &params, seed, &out, noise, years.as_deref(), &entity),
        Command::Plot {
            region,
            args,
            out_prefix,
            svg,
        } => cmd_plot(&region, &args, &out_prefix, svg),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("hypertrend: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
