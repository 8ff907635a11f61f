//! Named model constructors and evaluators binding the regression and
//! calibration machinery to the three relationships this crate ships:
//!
//! * an inflation/unemployment trade-off fitted by lag-searched OLS
//!   ([`PhillipsModel`]),
//! * single-driver lagged linear links from the labor-force change rate
//!   to inflation or unemployment ([`LaggedLinearModel`]),
//! * the generalized three-variable relation ([`GeneralizedModel`]).
//!
//! Published coefficient sets are available as named presets so the
//! projection pipeline runs without any fitted data.

use crate::calibration::{self, Coefficients, ModelSpec};
use crate::error::{Error, Result};
use crate::regression::{lag_search, LinearFitResult};
use crate::series::{align, AnnualSeries, Unit};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

/// Which variable a lagged linear model predicts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetVariable {
    Inflation,
    Unemployment,
}

impl fmt::Display for TargetVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TargetVariable::Inflation => "inflation",
            TargetVariable::Unemployment => "unemployment",
        })
    }
}

impl FromStr for TargetVariable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inflation" => Ok(TargetVariable::Inflation),
            "unemployment" => Ok(TargetVariable::Unemployment),
            other => Err(Error::Specification(format!("unknown target '{other}'"))),
        }
    }
}

/// How a lagged linear model's coefficients were estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitMethod {
    Ols,
    Cumulative,
}

impl fmt::Display for FitMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FitMethod::Ols => "ols",
            FitMethod::Cumulative => "cumulative",
        })
    }
}

impl FromStr for FitMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ols" => Ok(FitMethod::Ols),
            "cumulative" => Ok(FitMethod::Cumulative),
            other => Err(Error::Specification(format!(
                "unknown fit method '{other}'"
            ))),
        }
    }
}

/// Inflation/unemployment trade-off: `UE(t) = slope * π(t - lag) + intercept`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhillipsModel {
    pub slope: f64,
    pub intercept: f64,
    pub lag: usize,
    pub fit: LinearFitResult,
    /// Free-text provenance note (fit window, adjustments, ...).
    pub note: String,
}

impl PhillipsModel {
    /// Predicted unemployment from an inflation series over `window`.
    pub fn predict(&self, inflation: &AnnualSeries, window: (i32, i32)) -> Result<AnnualSeries> {
        let lag = self.lag as i32;
        let shifted = inflation.window(window.0 - lag, window.1 - lag)?;
        let values = shifted
            .values()
            .iter()
            .map(|p| self.slope * p + self.intercept)
            .collect();
        AnnualSeries::new(
            window.0,
            values,
            Unit::RatePerYear,
            "predicted unemployment (from inflation)",
        )
    }

    /// Returns a copy with the free term shifted by `delta`; the change
    /// is recorded in the provenance note rather than applied silently.
    pub fn intercept_adjust(&self, delta: f64) -> PhillipsModel {
        let mut adjusted = self.clone();
        adjusted.intercept += delta;
        adjusted.note = if self.note.is_empty() {
            format!("intercept adjusted by {delta}")
        } else {
            format!("{}; intercept adjusted by {delta}", self.note)
        };
        adjusted
    }
}

/// Single-driver lagged linear link:
/// `target(t) = free_term + slope * dLF(t-lag)/LF(t-lag)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaggedLinearModel {
    pub target: TargetVariable,
    /// Free term (the level in the absence of labor-force change).
    pub free_term: f64,
    /// Slope on the labor-force change rate.
    pub slope: f64,
    pub lag: usize,
    pub fitted_by: FitMethod,
    pub window: (i32, i32),
    pub note: String,
}

impl LaggedLinearModel {
    /// Predicted target over `window`. `labor_force` may be a level
    /// series (its change rate is taken) or an already-computed rate.
    pub fn predict(&self, labor_force: &AnnualSeries, window: (i32, i32)) -> Result<AnnualSeries> {
        let rate = match labor_force.unit() {
            Unit::RatePerYear => labor_force.clone(),
            _ => labor_force.change_rate()?,
        };
        let lag = self.lag as i32;
        let shifted = rate.window(window.0 - lag, window.1 - lag)?;
        let values = shifted
            .values()
            .iter()
            .map(|r| self.free_term + self.slope * r)
            .collect();
        AnnualSeries::new(
            window.0,
            values,
            Unit::RatePerYear,
            format!("predicted {} (from labor force)", self.target),
        )
    }
}

/// Generalized three-variable relation:
/// `π(t) = d1 * dLF(t)/LF(t) + d2 * UE(t) + d3`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedModel {
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    pub window: (i32, i32),
    pub cumulative_start: i32,
    pub note: String,
}

impl GeneralizedModel {
    pub fn predict(
        &self,
        labor_force: &AnnualSeries,
        unemployment: &AnnualSeries,
        window: (i32, i32),
    ) -> Result<AnnualSeries> {
        let rate = match labor_force.unit() {
            Unit::RatePerYear => labor_force.clone(),
            _ => labor_force.change_rate()?,
        };
        let r = rate.window(window.0, window.1)?;
        let u = unemployment.window(window.0, window.1)?;
        let values = r
            .values()
            .iter()
            .zip(u.values())
            .map(|(rv, uv)| self.d1 * rv + self.d2 * uv + self.d3)
            .collect();
        AnnualSeries::new(
            window.0,
            values,
            Unit::RatePerYear,
            "predicted inflation (generalized)",
        )
    }
}

/// Any of the three model kinds, for uniform evaluation, serialization,
/// and CLI handling.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Phillips(PhillipsModel),
    Lagged(LaggedLinearModel),
    Generalized(GeneralizedModel),
}

/// Input series evaluation may draw on; models pick what they need.
#[derive(Debug, Clone, Copy, Default)]
pub struct ModelInputs<'a> {
    pub inflation: Option<&'a AnnualSeries>,
    pub labor_force: Option<&'a AnnualSeries>,
    pub unemployment: Option<&'a AnnualSeries>,
}

/// Residual diagnostics of a prediction against an observed series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualSummary {
    /// Sample standard deviation of (observed - predicted).
    pub stdev: f64,
    pub max_abs: f64,
    pub n: usize,
}

/// Prediction plus optional residual diagnostics.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub predicted: AnnualSeries,
    pub residuals: Option<ResidualSummary>,
}

impl Model {
    pub fn kind(&self) -> &'static str {
        match self {
            Model::Phillips(_) => "phillips",
            Model::Lagged(_) => "lagged",
            Model::Generalized(_) => "generalized",
        }
    }

    pub fn note(&self) -> &str {
        match self {
            Model::Phillips(m) => &m.note,
            Model::Lagged(m) => &m.note,
            Model::Generalized(m) => &m.note,
        }
    }

    /// Evaluates the model over `window`, with residual diagnostics when
    /// an observed series is supplied.
    pub fn evaluate(
        &self,
        inputs: &ModelInputs,
        window: (i32, i32),
        observed: Option<&AnnualSeries>,
    ) -> Result<Evaluation> {
        let predicted = match self {
            Model::Phillips(m) => {
                let inflation = inputs.inflation.ok_or_else(|| {
                    Error::Specification("phillips model needs an inflation series".to_string())
                })?;
                m.predict(inflation, window)?
            }
            Model::Lagged(m) => {
                let lf = inputs.labor_force.ok_or_else(|| {
                    Error::Specification("lagged model needs a labor force series".to_string())
                })?;
                m.predict(lf, window)?
            }
            Model::Generalized(m) => {
                let lf = inputs.labor_force.ok_or_else(|| {
                    Error::Specification("generalized model needs a labor force series".to_string())
                })?;
                let ue = inputs.unemployment.ok_or_else(|| {
                    Error::Specification(
                        "generalized model needs an unemployment series".to_string(),
                    )
                })?;
                m.predict(lf, ue, window)?
            }
        };
        let residuals = match observed {
            Some(obs) => Some(residual_summary(obs, &predicted)?),
            None => None,
        };
        Ok(Evaluation {
            predicted,
            residuals,
        })
    }
}

/// Residual diagnostics of `observed - predicted` over their common window.
pub fn residual_summary(observed: &AnnualSeries, predicted: &AnnualSeries) -> Result<ResidualSummary> {
    let pair = align(observed, predicted)?;
    let diffs: Vec<f64> = pair
        .x
        .values()
        .iter()
        .zip(pair.y.values())
        .map(|(o, p)| o - p)
        .collect();
    let n = diffs.len();
    let mean = diffs.iter().sum::<f64>() / n as f64;
    let var = if n > 1 {
        diffs.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / (n as f64 - 1.0)
    } else {
        0.0
    };
    let max_abs = diffs.iter().fold(0.0f64, |acc, d| acc.max(d.abs()));
    Ok(ResidualSummary {
        stdev: var.sqrt(),
        max_abs,
        n,
    })
}

/// Fits the inflation/unemployment relation by lag-searched OLS of
/// unemployment on inflation over `window`.
pub fn fit_phillips(
    inflation: &AnnualSeries,
    unemployment: &AnnualSeries,
    window: (i32, i32),
    max_lag: usize,
) -> Result<PhillipsModel> {
    let inflation_w = inflation.window(window.0, window.1)?;
    let unemployment_w = unemployment.window(window.0, window.1)?;
    let search = lag_search(&inflation_w, &unemployment_w, max_lag)?;
    Ok(PhillipsModel {
        slope: search.fit.slope,
        intercept: search.fit.intercept,
        lag: search.best_lag,
        fit: search.fit.clone(),
        note: format!("fitted by lag-searched ols over {}:{}", window.0, window.1),
    })
}

/// Wraps a calibration result as a lagged linear model.
pub fn lagged_from_calibration(
    target: TargetVariable,
    result: &calibration::CalibrationResult,
    spec: &ModelSpec,
) -> Result<LaggedLinearModel> {
    let Coefficients::SingleDriver { free, slope } = result.coefficients else {
        return Err(Error::Specification(
            "calibration result is not single-driver".to_string(),
        ));
    };
    Ok(LaggedLinearModel {
        target,
        free_term: free,
        slope,
        lag: result.lag,
        fitted_by: FitMethod::Cumulative,
        window: spec.fit_window(),
        note: format!("cumulative RMS {:.6e}", result.objective),
    })
}

// --- presets -----------------------------------------------------------

/// Names accepted by [`preset`].
pub const PRESET_NAMES: [&str; 4] = [
    "paper-japan-cpi",
    "paper-japan-ue",
    "paper-japan-gen",
    "kitov-2006c",
];

/// Published coefficient sets for Japan, usable without any data access.
///
/// * `paper-japan-cpi` — inflation from labor-force change, A=0.0007,
///   B=1.31, lag 0, fitted on 1982-2006 by cumulative matching.
/// * `paper-japan-ue` — unemployment from labor-force change, free term
///   0.045, slope -1.5, lag 0, 1980-2006.
/// * `paper-japan-gen` — generalized relation, D1=2.8, D2=0.9,
///   D3=-0.0392, cumulative curves from 1981.
/// * `kitov-2006c` — earlier inflation link (slope 1.77, free term
///   -0.0035, 1981-2003) estimated against CPI including imputed rent;
///   kept as an alternative, not reconciled with `paper-japan-cpi`.
pub fn preset(name: &str) -> Option<Model> {
    match name {
        "paper-japan-cpi" => Some(Model::Lagged(LaggedLinearModel {
            target: TargetVariable::Inflation,
            free_term: 0.0007,
            slope: 1.31,
            lag: 0,
            fitted_by: FitMethod::Cumulative,
            window: (1982, 2006),
            note: "published Japan CPI coefficients".to_string(),
        })),
        "paper-japan-ue" => Some(Model::Lagged(LaggedLinearModel {
            target: TargetVariable::Unemployment,
            free_term: 0.045,
            slope: -1.5,
            lag: 0,
            fitted_by: FitMethod::Cumulative,
            window: (1980, 2006),
            note: "published Japan unemployment coefficients".to_string(),
        })),
        "paper-japan-gen" => Some(Model::Generalized(GeneralizedModel {
            d1: 2.8,
            d2: 0.9,
            d3: -0.0392,
            window: (1982, 2006),
            cumulative_start: 1981,
            note: "published Japan generalized coefficients".to_string(),
        })),
        "kitov-2006c" => Some(Model::Lagged(LaggedLinearModel {
            target: TargetVariable::Inflation,
            free_term: -0.0035,
            slope: 1.77,
            lag: 0,
            fitted_by: FitMethod::Cumulative,
            window: (1981, 2003),
            note: "alternative Japan CPI coefficients; estimated against CPI including imputed rent"
                .to_string(),
        })),
        _ => None,
    }
}

// --- plain-text serialization -------------------------------------------

impl Model {
    /// Serializes as `key = value` lines. Coefficients print in shortest
    /// round-trip form, so parsing the text back reproduces them exactly.
    pub fn to_key_value(&self) -> String {
        let mut out = String::new();
        let mut push = |k: &str, v: String| out.push_str(&format!("{k} = {v}\n"));
        match self {
            Model::Phillips(m) => {
                push("family", "phillips".to_string());
                push("slope", m.slope.to_string());
                push("intercept", m.intercept.to_string());
                push("lag", m.lag.to_string());
                // raw regression diagnostics; the model coefficients above
                // may carry an explicit intercept adjustment
                push("fit_slope", m.fit.slope.to_string());
                push("fit_intercept", m.fit.intercept.to_string());
                push("slope_stderr", m.fit.slope_stderr.to_string());
                push("intercept_stderr", m.fit.intercept_stderr.to_string());
                push("r_squared", m.fit.r_squared.to_string());
                push("residual_stdev", m.fit.residual_stdev.to_string());
                push("n", m.fit.n.to_string());
                push("window", format!("{}:{}", m.fit.period.0, m.fit.period.1));
                push("note", m.note.clone());
            }
            Model::Lagged(m) => {
                push("family", "lagged".to_string());
                push("target", m.target.to_string());
                push("free_term", m.free_term.to_string());
                push("slope", m.slope.to_string());
                push("lag", m.lag.to_string());
                push("fitted_by", m.fitted_by.to_string());
                push("window", format!("{}:{}", m.window.0, m.window.1));
                push("note", m.note.clone());
            }
            Model::Generalized(m) => {
                push("family", "generalized".to_string());
                push("d1", m.d1.to_string());
                push("d2", m.d2.to_string());
                push("d3", m.d3.to_string());
                push("window", format!("{}:{}", m.window.0, m.window.1));
                push("cumulative_start", m.cumulative_start.to_string());
                push("note", m.note.clone());
            }
        }
        out
    }

    /// Parses the `key = value` form produced by [`Model::to_key_value`].
    pub fn from_key_value(text: &str) -> Result<Model> {
        let mut fields = std::collections::BTreeMap::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: idx + 1,
                message: format!("expected 'key = value', found '{line}'"),
            })?;
            fields.insert(k.trim().to_string(), v.trim().to_string());
        }
        let get = |k: &str| -> Result<&String> {
            fields
                .get(k)
                .ok_or_else(|| Error::Specification(format!("model file lacks field '{k}'")))
        };
        let parse_f64 = |k: &str| -> Result<f64> {
            get(k)?
                .parse()
                .map_err(|_| Error::Specification(format!("field '{k}' is not a number")))
        };
        let parse_usize = |k: &str| -> Result<usize> {
            get(k)?
                .parse()
                .map_err(|_| Error::Specification(format!("field '{k}' is not an integer")))
        };
        let parse_window = |k: &str| -> Result<(i32, i32)> {
            let text = get(k)?;
            let (a, b) = text.split_once(':').ok_or_else(|| {
                Error::Specification(format!("field '{k}' must be 'first:last'"))
            })?;
            Ok((
                a.trim().parse().map_err(|_| {
                    Error::Specification(format!("bad year in '{k}'"))
                })?,
                b.trim().parse().map_err(|_| {
                    Error::Specification(format!("bad year in '{k}'"))
                })?,
            ))
        };
        let note = fields.get("note").cloned().unwrap_or_default();

        match get("family")?.as_str() {
            "phillips" => {
                let window = parse_window("window")?;
                let n = parse_usize("n")?;
                Ok(Model::Phillips(PhillipsModel {
                    slope: parse_f64("slope")?,
                    intercept: parse_f64("intercept")?,
                    lag: parse_usize("lag")?,
                    fit: LinearFitResult {
                        slope: parse_f64("fit_slope")?,
                        intercept: parse_f64("fit_intercept")?,
                        slope_stderr: parse_f64("slope_stderr")?,
                        intercept_stderr: parse_f64("intercept_stderr")?,
                        r_squared: parse_f64("r_squared")?,
                        residual_stdev: parse_f64("residual_stdev")?,
                        n,
                        period: window,
                    },
                    note,
                }))
            }
            "lagged" => Ok(Model::Lagged(LaggedLinearModel {
                target: get("target")?.parse()?,
                free_term: parse_f64("free_term")?,
                slope: parse_f64("slope")?,
                lag: parse_usize("lag")?,
                fitted_by: get("fitted_by")?.parse()?,
                window: parse_window("window")?,
                note,
            })),
            "generalized" => Ok(Model::Generalized(GeneralizedModel {
                d1: parse_f64("d1")?,
                d2: parse_f64("d2")?,
                d3: parse_f64("d3")?,
                window: parse_window("window")?,
                cumulative_start: parse_usize("cumulative_start")? as i32,
                note,
            })),
            other => Err(Error::Specification(format!(
                "unknown model family '{other}'"
            ))),
        }
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_key_value())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Model> {
        let text = std::fs::read_to_string(path)?;
        Model::from_key_value(&text)
    }
}
