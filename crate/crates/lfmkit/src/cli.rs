//! Command-line surface: ingest → fit → project → emit as a reproducible
//! pipeline. The `lfmkit` binary is a thin wrapper around [`run`].
//!
//! Every command is deterministic: the same registry, inputs, and flags
//! produce byte-identical output files.

use crate::calibration::{self, ModelSpec, SearchGrid};
use crate::error::{Error, Result};
use crate::ingestion::{
    load_csv, save_csv, CompareTransform, DatasetKey, DatasetRegistry, Source, Variable,
};
use crate::models::{
    fit_phillips, lagged_from_calibration, FitMethod, GeneralizedModel, LaggedLinearModel, Model,
    PhillipsModel, TargetVariable,
};
use crate::projection::{forecast, resolve_model, InflationModel, ScenarioConfig};
use crate::regression::{lag_search, LagSearchResult, DEFAULT_MAX_LAG};
use crate::series::{AnnualSeries, Unit};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

#[derive(Debug, Parser)]
#[command(
    name = "lfmkit",
    about = "Labor-force driven inflation and unemployment modeling",
    version
)]
pub struct Cli {
    /// Registry directory (created on first ingest).
    #[arg(long, global = true, env = "LFMKIT_REGISTRY", default_value = "registry")]
    pub registry: PathBuf,

    #[command(subcommand)]
    pub command: Command,
}

/// `first:last` year window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowArg(pub i32, pub i32);

impl FromStr for WindowArg {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once(':')
            .ok_or_else(|| Error::Specification(format!("window '{s}' must be FIRST:LAST")))?;
        let first = a
            .trim()
            .parse()
            .map_err(|_| Error::Specification(format!("bad year '{a}'")))?;
        let last = b
            .trim()
            .parse()
            .map_err(|_| Error::Specification(format!("bad year '{b}'")))?;
        Ok(WindowArg(first, last))
    }
}

impl fmt::Display for WindowArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.0, self.1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Relation {
    Phillips,
    #[value(name = "inflation-lf")]
    InflationLf,
    #[value(name = "unemployment-lf")]
    UnemploymentLf,
    Generalized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Estimator {
    Ols,
    Cumulative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EmitTransform {
    None,
    #[value(name = "change-rate")]
    ChangeRate,
    Cumulative,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load, validate, and register a year,value CSV under a dataset key.
    Ingest {
        /// CSV file with a `year,value` header.
        file: PathBuf,
        #[arg(long)]
        variable: Variable,
        #[arg(long)]
        source: Source,
        /// Unit tag; defaults to the variable's natural unit.
        #[arg(long)]
        unit: Option<Unit>,
        /// Free-text label; defaults to "variable, source".
        #[arg(long)]
        label: Option<String>,
        /// Replace an existing dataset under the same key.
        #[arg(long)]
        overwrite: bool,
    },

    /// List registered datasets.
    List,

    /// Compare two registered datasets (levels or change rates).
    Compare {
        /// First dataset key, `variable,source`.
        a: DatasetKey,
        /// Second dataset key, `variable,source`.
        b: DatasetKey,
        /// Compare change rates instead of levels.
        #[arg(long)]
        change_rate: bool,
    },

    /// Fit one of the model relations and write a model file.
    Fit {
        #[arg(long, value_enum)]
        relation: Relation,
        /// Fit window, FIRST:LAST. Defaults to 1982:2006 for phillips and
        /// to the full overlap of the involved series otherwise.
        #[arg(long)]
        window: Option<WindowArg>,
        #[arg(long, default_value_t = DEFAULT_MAX_LAG)]
        max_lag: usize,
        #[arg(long, value_enum, default_value_t = Estimator::Ols)]
        estimator: Estimator,
        /// Source for every variable unless overridden per variable.
        #[arg(long, default_value = "user")]
        source: Source,
        #[arg(long)]
        lf_source: Option<Source>,
        #[arg(long)]
        inflation_source: Option<Source>,
        #[arg(long)]
        ue_source: Option<Source>,
        /// Inflation variable to fit against (cpi_inflation or gdp_deflator).
        #[arg(long, default_value = "cpi_inflation")]
        inflation_variable: Variable,
        /// First year of the cumulative sums (cumulative estimator only);
        /// defaults to the window start.
        #[arg(long)]
        cumulative_from: Option<i32>,
        /// Where to write the fitted model file.
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Run a projection scenario and write the forecast bundle.
    Project {
        /// Scenario file (key = value lines).
        scenario: PathBuf,
        /// Override the scenario's inflation model (`preset:NAME` or path).
        #[arg(long)]
        inflation_model: Option<String>,
        /// Override the scenario's unemployment model (`preset:NAME` or path).
        #[arg(long)]
        unemployment_model: Option<String>,
        /// Preset override routed by the preset's target variable.
        #[arg(long)]
        preset: Option<String>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        format: OutputFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Emit a registered series, a model file, or a forecast bundle.
    Emit {
        /// Registered dataset key, `variable,source`.
        #[arg(long, conflicts_with_all = ["model", "bundle"])]
        key: Option<DatasetKey>,
        /// Model file to print.
        #[arg(long, conflicts_with = "bundle")]
        model: Option<PathBuf>,
        /// Bundle CSV (as written by `project`) to re-emit.
        #[arg(long)]
        bundle: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = EmitTransform::None)]
        transform: EmitTransform,
        /// First year of the cumulative transform; defaults to the series start.
        #[arg(long)]
        cumulative_from: Option<i32>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        format: OutputFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Executes a parsed command. Errors propagate to the binary, which
/// reports them on stderr and exits nonzero.
pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Ingest {
            file,
            variable,
            source,
            unit,
            label,
            overwrite,
        } => cmd_ingest(&cli.registry, &file, variable, source, unit, label, overwrite),
        Command::List => cmd_list(&cli.registry),
        Command::Compare { a, b, change_rate } => cmd_compare(&cli.registry, a, b, change_rate),
        Command::Fit {
            relation,
            window,
            max_lag,
            estimator,
            source,
            lf_source,
            inflation_source,
            ue_source,
            inflation_variable,
            cumulative_from,
            out,
        } => cmd_fit(FitArgs {
            registry: cli.registry,
            relation,
            window,
            max_lag,
            estimator,
            source,
            lf_source,
            inflation_source,
            ue_source,
            inflation_variable,
            cumulative_from,
            out,
        }),
        Command::Project {
            scenario,
            inflation_model,
            unemployment_model,
            preset,
            format,
            out,
        } => cmd_project(
            &cli.registry,
            &scenario,
            inflation_model.as_deref(),
            unemployment_model.as_deref(),
            preset.as_deref(),
            format,
            out.as_deref(),
        ),
        Command::Emit {
            key,
            model,
            bundle,
            transform,
            cumulative_from,
            format,
            out,
        } => cmd_emit(EmitArgs {
            registry: cli.registry,
            key,
            model,
            bundle,
            transform,
            cumulative_from,
            format,
            out,
        }),
    }
}

fn cmd_ingest(
    registry_path: &Path,
    file: &Path,
    variable: Variable,
    source: Source,
    unit: Option<Unit>,
    label: Option<String>,
    overwrite: bool,
) -> Result<()> {
    let unit = unit.unwrap_or_else(|| variable.natural_unit());
    let label = label.unwrap_or_else(|| format!("{variable}, {source}"));
    let text = fs::read_to_string(file)?;
    let series = load_csv(std::io::Cursor::new(text), unit, label)?;

    let mut registry = DatasetRegistry::open_or_create(registry_path)?;
    let key = DatasetKey::new(variable, source);
    let findings = registry.register(key, series.clone(), overwrite)?;
    for finding in &findings {
        println!("{finding}");
    }
    println!(
        "registered {key}: {} values over {}:{}",
        series.len(),
        series.start_year(),
        series.end_year()
    );
    Ok(())
}

fn cmd_list(registry_path: &Path) -> Result<()> {
    let registry = DatasetRegistry::open(registry_path)?;
    for key in registry.keys() {
        let series = registry.get(key)?;
        println!(
            "{key}  {}:{}  {}  {}",
            series.start_year(),
            series.end_year(),
            series.unit(),
            series.label()
        );
    }
    Ok(())
}

fn cmd_compare(registry_path: &Path, a: DatasetKey, b: DatasetKey, change_rate: bool) -> Result<()> {
    let registry = DatasetRegistry::open(registry_path)?;
    let transform = if change_rate {
        CompareTransform::ChangeRate
    } else {
        CompareTransform::Levels
    };
    let report = registry.compare_sources(a, b, transform)?;
    println!("comparing {} vs {}", report.key_a, report.key_b);
    println!(
        "common window:  {}:{}",
        report.common_window.0, report.common_window.1
    );
    println!(
        "max |diff|:     {} (in {})",
        sig6(report.max_abs_diff),
        report.max_abs_diff_year
    );
    println!("mean |diff|:    {}", sig6(report.mean_abs_diff));
    println!("correlation:    {}", sig6(report.correlation));
    Ok(())
}

struct FitArgs {
    registry: PathBuf,
    relation: Relation,
    window: Option<WindowArg>,
    max_lag: usize,
    estimator: Estimator,
    source: Source,
    lf_source: Option<Source>,
    inflation_source: Option<Source>,
    ue_source: Option<Source>,
    inflation_variable: Variable,
    cumulative_from: Option<i32>,
    out: Option<PathBuf>,
}

fn cmd_fit(args: FitArgs) -> Result<()> {
    if !matches!(
        args.inflation_variable,
        Variable::CpiInflation | Variable::GdpDeflator
    ) {
        return Err(Error::Specification(format!(
            "--inflation-variable must be cpi_inflation or gdp_deflator, not {}",
            args.inflation_variable
        )));
    }
    let registry = DatasetRegistry::open(&args.registry)?;
    let lf_key = DatasetKey::new(Variable::LaborForce, args.lf_source.unwrap_or(args.source));
    let inflation_key = DatasetKey::new(
        args.inflation_variable,
        args.inflation_source.unwrap_or(args.source),
    );
    let ue_key = DatasetKey::new(Variable::Unemployment, args.ue_source.unwrap_or(args.source));

    let model = match args.relation {
        Relation::Phillips => {
            if args.estimator != Estimator::Ols {
                return Err(Error::Specification(
                    "the phillips relation is fitted by ols".to_string(),
                ));
            }
            let inflation = registry.get(inflation_key)?;
            let unemployment = registry.get(ue_key)?;
            let window = match args.window {
                Some(WindowArg(a, b)) => (a, b),
                None => (1982, 2006),
            };
            println!("relation: phillips ({ue_key} on {inflation_key})");
            println!("window:   {}:{}", window.0, window.1);

            let phillips = fit_phillips(inflation, unemployment, window, args.max_lag)?;
            let search = lag_search(
                &inflation.window(window.0, window.1)?,
                &unemployment.window(window.0, window.1)?,
                args.max_lag,
            )?;
            print_phillips_report(&phillips, &search);
            Model::Phillips(phillips)
        }
        Relation::InflationLf | Relation::UnemploymentLf => {
            let lf = registry.get(lf_key)?;
            let (target_key, target_variable) = if args.relation == Relation::InflationLf {
                (inflation_key, TargetVariable::Inflation)
            } else {
                (ue_key, TargetVariable::Unemployment)
            };
            let target = registry.get(target_key)?;
            let rate = lf.change_rate()?;
            let window = match args.window {
                Some(WindowArg(a, b)) => (a, b),
                None => overlap(&[&rate, target])?,
            };
            println!("relation: {target_key} on {lf_key}");
            println!("window:   {}:{}", window.0, window.1);

            // both estimators are always reported; --estimator picks
            // which one becomes the model file
            let search = lag_search(&rate, &target.window(window.0, window.1)?, args.max_lag)?;
            print_single_driver_ols(&search);

            let spec = ModelSpec::single_driver(&rate, target, window, args.cumulative_from)?;
            let grid = SearchGrid::default_for(calibration::ModelFamily::SingleDriver);
            let calibrated = calibration::calibrate(&spec, &grid, 0..=args.max_lag)?;
            print_single_driver_cumulative(&calibrated, &spec)?;

            match args.estimator {
                Estimator::Ols => Model::Lagged(LaggedLinearModel {
                    target: target_variable,
                    free_term: search.fit.intercept,
                    slope: search.fit.slope,
                    lag: search.best_lag,
                    fitted_by: FitMethod::Ols,
                    window: search.fit.period,
                    note: format!("r_squared {}", sig6(search.fit.r_squared)),
                }),
                Estimator::Cumulative => {
                    Model::Lagged(lagged_from_calibration(target_variable, &calibrated, &spec)?)
                }
            }
        }
        Relation::Generalized => {
            if args.estimator != Estimator::Cumulative {
                return Err(Error::Specification(
                    "the generalized relation is fitted by the cumulative estimator".to_string(),
                ));
            }
            let lf = registry.get(lf_key)?;
            let unemployment = registry.get(ue_key)?;
            let target = registry.get(inflation_key)?;
            let rate = lf.change_rate()?;
            let window = match args.window {
                Some(WindowArg(a, b)) => (a, b),
                None => overlap(&[&rate, unemployment, target])?,
            };
            println!("relation: generalized ({inflation_key} on {lf_key} + {ue_key})");
            println!("window:   {}:{}", window.0, window.1);

            let spec =
                ModelSpec::generalized(&rate, unemployment, target, window, args.cumulative_from)?;
            let grid = SearchGrid::default_for(calibration::ModelFamily::Generalized);
            let result = calibration::calibrate(&spec, &grid, 0..=0)?;
            let calibration::Coefficients::Generalized { d1, d2, d3 } = result.coefficients
            else {
                unreachable!("generalized spec produced single-driver coefficients");
            };
            println!("cumulative estimate:");
            println!("  d1 (change-rate slope)  = {}", sig6(d1));
            println!("  d2 (unemployment slope) = {}", sig6(d2));
            println!("  d3 (free term)          = {}", sig6(d3));
            println!("  cumulative RMS = {}", sig6(result.objective));
            let predicted = calibration::predict_series(&spec, &result.coefficients, 0)?;
            println!(
                "  annual RMS (diagnostic) = {}",
                sig6(calibration::annual_rms(&spec.observed(), &predicted)?)
            );
            Model::Generalized(GeneralizedModel {
                d1,
                d2,
                d3,
                window,
                cumulative_start: spec.cumulative_start(),
                note: format!("cumulative RMS {}", sig6(result.objective)),
            })
        }
    };

    if let Some(out) = &args.out {
        model.save(out)?;
        println!("model written to {}", out.display());
    } else {
        println!("-- model (pass --out to save) --");
        print!("{}", model.to_key_value());
    }
    Ok(())
}

fn print_phillips_report(model: &PhillipsModel, search: &LagSearchResult) {
    println!("ols estimate (lag search):");
    println!(
        "  slope      = {} (stderr {})",
        sig6(model.slope),
        sig6(model.fit.slope_stderr)
    );
    println!(
        "  intercept  = {} (stderr {})",
        sig6(model.intercept),
        sig6(model.fit.intercept_stderr)
    );
    println!("  lag        = {}", model.lag);
    println!("  r_squared  = {}", sig6(model.fit.r_squared));
    println!("  residual stdev = {}", sig6(model.fit.residual_stdev));
    println!("  n          = {}", model.fit.n);
    print_scan(search);
}

fn print_single_driver_ols(search: &LagSearchResult) {
    println!("ols estimate (lag search):");
    println!(
        "  free term  = {} (stderr {})",
        sig6(search.fit.intercept),
        sig6(search.fit.intercept_stderr)
    );
    println!(
        "  slope      = {} (stderr {})",
        sig6(search.fit.slope),
        sig6(search.fit.slope_stderr)
    );
    println!("  lag        = {}", search.best_lag);
    println!("  r_squared  = {}", sig6(search.fit.r_squared));
    println!("  residual stdev = {}", sig6(search.fit.residual_stdev));
    println!("  n          = {}", search.fit.n);
    print_scan(search);
}

fn print_scan(search: &LagSearchResult) {
    println!("  lag scan (lag, r_squared, n):");
    for entry in &search.scan {
        println!(
            "    {:>3}  {:<12}  {}",
            entry.lag,
            sig6(entry.r_squared),
            entry.n
        );
    }
    for w in &search.warnings {
        println!("    note: {w}");
    }
}

fn print_single_driver_cumulative(
    result: &calibration::CalibrationResult,
    spec: &ModelSpec,
) -> Result<()> {
    let calibration::Coefficients::SingleDriver { free, slope } = result.coefficients else {
        unreachable!("single-driver spec produced generalized coefficients");
    };
    println!("cumulative estimate:");
    println!("  free term  = {}", sig6(free));
    println!("  slope      = {}", sig6(slope));
    println!("  lag        = {}", result.lag);
    println!("  cumulative RMS = {}", sig6(result.objective));
    let predicted = calibration::predict_series(spec, &result.coefficients, result.lag)?;
    println!(
        "  annual RMS (diagnostic) = {}",
        sig6(calibration::annual_rms(&spec.observed(), &predicted)?)
    );
    for w in &result.warnings {
        println!("  note: {w}");
    }
    Ok(())
}

fn cmd_project(
    registry_path: &Path,
    scenario_path: &Path,
    inflation_override: Option<&str>,
    unemployment_override: Option<&str>,
    preset_override: Option<&str>,
    format: OutputFormat,
    out: Option<&Path>,
) -> Result<()> {
    let registry = DatasetRegistry::open(registry_path)?;
    let base_dir = scenario_path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."))
        .to_path_buf();
    let config = ScenarioConfig::load(scenario_path)?;
    let mut scenario = config.resolve(&registry, &base_dir)?;

    if let Some(reference) = inflation_override {
        scenario.inflation_model =
            InflationModel::from_model(resolve_model(reference, &base_dir)?)?;
    }
    if let Some(reference) = unemployment_override {
        match resolve_model(reference, &base_dir)? {
            Model::Lagged(m) if m.target == TargetVariable::Unemployment => {
                scenario.unemployment_model = m;
            }
            _ => {
                return Err(Error::Specification(
                    "--unemployment-model must reference a lagged unemployment model".to_string(),
                ))
            }
        }
    }
    if let Some(name) = preset_override {
        let model = crate::models::preset(name).ok_or_else(|| {
            Error::Specification(format!(
                "unknown preset '{name}' (available: {})",
                crate::models::PRESET_NAMES.join(", ")
            ))
        })?;
        match model {
            Model::Lagged(m) if m.target == TargetVariable::Unemployment => {
                scenario.unemployment_model = m;
            }
            other => scenario.inflation_model = InflationModel::from_model(other)?,
        }
    }

    let bundle = forecast(&scenario)?;
    for note in &bundle.provenance {
        println!("note: {note}");
    }

    let text = match format {
        OutputFormat::Csv => bundle_to_csv(&bundle),
        OutputFormat::Json => bundle_to_json(&bundle)?,
    };
    write_output(out, &text)?;
    println!(
        "forecast {}:{} written{}",
        bundle.labor_force.start_year(),
        bundle.labor_force.end_year(),
        out.map(|p| format!(" to {}", p.display()))
            .unwrap_or_default()
    );
    Ok(())
}

struct EmitArgs {
    registry: PathBuf,
    key: Option<DatasetKey>,
    model: Option<PathBuf>,
    bundle: Option<PathBuf>,
    transform: EmitTransform,
    cumulative_from: Option<i32>,
    format: OutputFormat,
    out: Option<PathBuf>,
}

fn cmd_emit(args: EmitArgs) -> Result<()> {
    match (args.key, &args.model, &args.bundle) {
        (Some(key), None, None) => {
            let registry = DatasetRegistry::open(&args.registry)?;
            let series = registry.get(key)?.clone();
            let series = match args.transform {
                EmitTransform::None => series,
                EmitTransform::ChangeRate => series.change_rate()?,
                EmitTransform::Cumulative => {
                    let from = args.cumulative_from.unwrap_or(series.start_year());
                    series.cumulative(from)?
                }
            };
            let text = match args.format {
                OutputFormat::Csv => series_to_csv(&series)?,
                OutputFormat::Json => to_pretty_json(&SeriesJson::from(&series))?,
            };
            write_output(args.out.as_deref(), &text)
        }
        (None, Some(path), None) => {
            if args.transform != EmitTransform::None {
                return Err(Error::Specification(
                    "transforms apply to series, not model files".to_string(),
                ));
            }
            let model = Model::load(path)?;
            write_output(args.out.as_deref(), &model.to_key_value())
        }
        (None, None, Some(path)) => {
            if args.transform != EmitTransform::None {
                return Err(Error::Specification(
                    "transforms apply to series, not bundles".to_string(),
                ));
            }
            let (lf, inflation, unemployment) = read_bundle_csv(path)?;
            let text = match args.format {
                OutputFormat::Csv => bundle_series_to_csv(&lf, &inflation, &unemployment, &[]),
                OutputFormat::Json => to_pretty_json(&[
                    SeriesJson::from(&lf),
                    SeriesJson::from(&inflation),
                    SeriesJson::from(&unemployment),
                ])?,
            };
            write_output(args.out.as_deref(), &text)
        }
        _ => Err(Error::Specification(
            "emit needs exactly one of --key, --model, --bundle".to_string(),
        )),
    }
}

// --- helpers -------------------------------------------------------------

/// Full overlap window of several series.
fn overlap(series: &[&AnnualSeries]) -> Result<(i32, i32)> {
    let first = series.iter().map(|s| s.start_year()).max().unwrap();
    let last = series.iter().map(|s| s.end_year()).min().unwrap();
    if first > last {
        return Err(Error::Specification(
            "the involved series share no years; pass --window".to_string(),
        ));
    }
    Ok((first, last))
}

/// Six significant digits for report text. Data files use full
/// round-trip precision instead.
pub fn sig6(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let magnitude = v.abs().log10().floor() as i32;
    if (-4..6).contains(&magnitude) {
        let decimals = (5 - magnitude).max(0) as usize;
        let text = format!("{v:.decimals$}");
        if text.contains('.') {
            text.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            text
        }
    } else {
        format!("{v:.5e}")
    }
}

#[derive(Serialize)]
struct SeriesJson<'a> {
    label: &'a str,
    unit: &'a str,
    start_year: i32,
    values: &'a [f64],
}

impl<'a> From<&'a AnnualSeries> for SeriesJson<'a> {
    fn from(series: &'a AnnualSeries) -> Self {
        SeriesJson {
            label: series.label(),
            unit: series.unit().as_str(),
            start_year: series.start_year(),
            values: series.values(),
        }
    }
}

fn to_pretty_json<T: Serialize>(value: &T) -> Result<String> {
    let mut json =
        serde_json::to_string_pretty(value).map_err(|e| Error::Data(e.to_string()))?;
    json.push('\n');
    Ok(json)
}

fn series_to_csv(series: &AnnualSeries) -> Result<String> {
    let mut buf = Vec::new();
    save_csv(&mut buf, series)?;
    String::from_utf8(buf).map_err(|e| Error::Data(e.to_string()))
}

fn bundle_to_csv(bundle: &crate::projection::ForecastBundle) -> String {
    bundle_series_to_csv(
        &bundle.labor_force,
        &bundle.inflation,
        &bundle.unemployment,
        &bundle.provenance,
    )
}

fn bundle_series_to_csv(
    lf: &AnnualSeries,
    inflation: &AnnualSeries,
    unemployment: &AnnualSeries,
    provenance: &[String],
) -> String {
    let mut out = String::new();
    for note in provenance {
        out.push_str(&format!("# {note}\n"));
    }
    out.push_str("year,labor_force,inflation,unemployment\n");
    for (year, lf_value) in lf.iter() {
        out.push_str(&format!(
            "{year},{lf_value},{},{}\n",
            inflation.value(year).unwrap_or(f64::NAN),
            unemployment.value(year).unwrap_or(f64::NAN)
        ));
    }
    out
}

fn bundle_to_json(bundle: &crate::projection::ForecastBundle) -> Result<String> {
    to_pretty_json(&[
        SeriesJson::from(&bundle.labor_force),
        SeriesJson::from(&bundle.inflation),
        SeriesJson::from(&bundle.unemployment),
    ])
}

/// Reads the `year,labor_force,inflation,unemployment` CSV written by
/// `project` back into three series.
fn read_bundle_csv(path: &Path) -> Result<(AnnualSeries, AnnualSeries, AnnualSeries)> {
    let text = fs::read_to_string(path)?;
    let mut rows: Vec<(i32, f64, f64, f64)> = Vec::new();
    let mut seen_header = false;
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.trim_end_matches('\r');
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        if !seen_header {
            if line.trim() != "year,labor_force,inflation,unemployment" {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!(
                        "expected header 'year,labor_force,inflation,unemployment', found '{line}'"
                    ),
                });
            }
            seen_header = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected 4 fields, found {}", fields.len()),
            });
        }
        let year: i32 = fields[0].trim().parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("invalid year '{}'", fields[0]),
        })?;
        let parse = |i: usize| -> Result<f64> {
            fields[i].trim().parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("invalid value '{}'", fields[i]),
            })
        };
        rows.push((year, parse(1)?, parse(2)?, parse(3)?));
    }
    if rows.is_empty() {
        return Err(Error::Parse {
            line: 0,
            message: "no data records found".to_string(),
        });
    }
    rows.sort_by_key(|r| r.0);
    let missing: Vec<i32> = rows
        .windows(2)
        .flat_map(|w| (w[0].0 + 1)..w[1].0)
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingYears { missing });
    }
    let start = rows[0].0;
    let lf = AnnualSeries::new(
        start,
        rows.iter().map(|r| r.1).collect(),
        Unit::Persons,
        "projected labor force",
    )?;
    let inflation = AnnualSeries::new(
        start,
        rows.iter().map(|r| r.2).collect(),
        Unit::RatePerYear,
        "projected inflation",
    )?;
    let unemployment = AnnualSeries::new(
        start,
        rows.iter().map(|r| r.3).collect(),
        Unit::RatePerYear,
        "projected unemployment",
    )?;
    Ok((lf, inflation, unemployment))
}

fn write_output(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, text)?;
            Ok(())
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_arg_parses() {
        let w: WindowArg = "1982:2006".parse().unwrap();
        assert_eq!(w, WindowArg(1982, 2006));
        assert!("1982".parse::<WindowArg>().is_err());
        assert!("a:b".parse::<WindowArg>().is_err());
    }

    #[test]
    fn sig6_formats_six_significant_digits() {
        assert_eq!(sig6(0.0), "0");
        assert_eq!(sig6(-0.941234567), "-0.941235");
        assert_eq!(sig6(0.045), "0.045");
        assert_eq!(sig6(1.31), "1.31");
        assert_eq!(sig6(123.4567891), "123.457");
        assert_eq!(sig6(67000000.0), "6.70000e7");
    }

    #[test]
    fn bundle_csv_round_trip() {
        let lf = AnnualSeries::new(2007, vec![1.0e7, 1.1e7], Unit::Persons, "lf").unwrap();
        let pi = AnnualSeries::new(2007, vec![0.01, -0.002], Unit::RatePerYear, "pi").unwrap();
        let ue = AnnualSeries::new(2007, vec![0.04, 0.05], Unit::RatePerYear, "ue").unwrap();
        let text = bundle_series_to_csv(&lf, &pi, &ue, &["a note".to_string()]);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bundle.csv");
        fs::write(&path, &text).unwrap();
        let (lf2, pi2, ue2) = read_bundle_csv(&path).unwrap();
        assert_eq!(lf2.values(), lf.values());
        assert_eq!(pi2.values(), pi.values());
        assert_eq!(ue2.values(), ue.values());
    }

    #[test]
    fn cli_parses_a_full_fit_command() {
        let cli = Cli::try_parse_from([
            "lfmkit",
            "--registry",
            "/tmp/reg",
            "fit",
            "--relation",
            "inflation-lf",
            "--window",
            "1982:2006",
            "--max-lag",
            "6",
            "--estimator",
            "cumulative",
        ])
        .unwrap();
        match cli.command {
            Command::Fit {
                relation,
                window,
                max_lag,
                estimator,
                ..
            } => {
                assert_eq!(relation, Relation::InflationLf);
                assert_eq!(window, Some(WindowArg(1982, 2006)));
                assert_eq!(max_lag, 6);
                assert_eq!(estimator, Estimator::Cumulative);
            }
            _ => panic!("wrong command"),
        }
    }
}
