//! Loading, validating, persisting, and reconciling annual series from
//! multiple statistical sources.
//!
//! Statistical agencies publish the "same" variable under different
//! definitions (national accounts vs. US definition, CPI vs. GDP
//! deflator), and those versions disagree enough to matter. This module
//! keeps each version as a separate dataset under a `(variable, source)`
//! key, screens incoming data for plausibility, and quantifies how far
//! two versions diverge.
//!
//! Storage is one CSV file per dataset plus a plain-text manifest, so a
//! registry directory is human-diffable and survives process restarts.

use crate::error::{Error, Result};
use crate::series::{align, AnnualSeries, Unit};
use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

/// Which economic variable a dataset measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Variable {
    LaborForce,
    CpiInflation,
    GdpDeflator,
    Unemployment,
    Population,
}

impl Variable {
    pub fn as_str(&self) -> &'static str {
        match self {
            Variable::LaborForce => "labor_force",
            Variable::CpiInflation => "cpi_inflation",
            Variable::GdpDeflator => "gdp_deflator",
            Variable::Unemployment => "unemployment",
            Variable::Population => "population",
        }
    }

    /// Unit this variable is measured in.
    pub fn natural_unit(&self) -> Unit {
        match self {
            Variable::LaborForce | Variable::Population => Unit::Persons,
            Variable::CpiInflation | Variable::GdpDeflator | Variable::Unemployment => {
                Unit::RatePerYear
            }
        }
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "labor_force" => Ok(Variable::LaborForce),
            "cpi_inflation" => Ok(Variable::CpiInflation),
            "gdp_deflator" => Ok(Variable::GdpDeflator),
            "unemployment" => Ok(Variable::Unemployment),
            "population" => Ok(Variable::Population),
            other => Err(Error::Specification(format!(
                "unknown variable '{other}'"
            ))),
        }
    }
}

/// Which agency or definition a dataset comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Source {
    Oecd,
    Eurostat,
    /// National accounts definition.
    Nac,
    /// US definition of the same variable.
    UsDef,
    /// National population institute projections.
    Ipss,
    User,
}

impl Source {
    pub fn as_str(&self) -> &'static str {
        match self {
            Source::Oecd => "oecd",
            Source::Eurostat => "eurostat",
            Source::Nac => "nac",
            Source::UsDef => "us_def",
            Source::Ipss => "ipss",
            Source::User => "user",
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Source {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "oecd" => Ok(Source::Oecd),
            "eurostat" => Ok(Source::Eurostat),
            "nac" => Ok(Source::Nac),
            "us_def" => Ok(Source::UsDef),
            "ipss" => Ok(Source::Ipss),
            "user" => Ok(Source::User),
            other => Err(Error::Specification(format!("unknown source '{other}'"))),
        }
    }
}

/// Registry key: one dataset per `(variable, source)` pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct DatasetKey {
    pub variable: Variable,
    pub source: Source,
}

impl DatasetKey {
    pub fn new(variable: Variable, source: Source) -> Self {
        Self { variable, source }
    }
}

impl fmt::Display for DatasetKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.variable, self.source)
    }
}

impl FromStr for DatasetKey {
    type Err = Error;

    /// Parses the `variable,source` text form used in manifests and
    /// scenario files.
    fn from_str(s: &str) -> Result<Self> {
        let (var, src) = s.split_once(',').ok_or_else(|| {
            Error::Specification(format!("dataset key '{s}' must be 'variable,source'"))
        })?;
        Ok(DatasetKey {
            variable: var.trim().parse()?,
            source: src.trim().parse()?,
        })
    }
}

/// Severity of a validation finding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Warning,
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Warning => "warning",
            Severity::Error => "error",
        })
    }
}

/// One validation finding, tied to the year that triggered it.
#[derive(Debug, Clone)]
pub struct Finding {
    pub severity: Severity,
    pub year: i32,
    pub message: String,
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}: {}", self.severity, self.year, self.message)
    }
}

/// Rates outside this band are flagged as implausible (likely a unit
/// mistake, e.g. 4 instead of 0.04).
pub const RATE_PLAUSIBILITY_BAND: f64 = 0.25;

/// A year-over-year move in a rate series larger than this is flagged as
/// a possible definitional break.
pub const RATE_JUMP_THRESHOLD: f64 = 0.10;

/// Plausibility screening. Returns findings instead of failing: warnings
/// flag suspicious values, errors mark data that must not be registered.
pub fn validate(series: &AnnualSeries) -> Vec<Finding> {
    let mut findings = Vec::new();
    let is_rate = series.unit() == Unit::RatePerYear;

    for (year, value) in series.iter() {
        if !value.is_finite() {
            findings.push(Finding {
                severity: Severity::Error,
                year,
                message: format!("non-finite value {value}"),
            });
            continue;
        }
        if is_rate && value.abs() > RATE_PLAUSIBILITY_BAND {
            findings.push(Finding {
                severity: Severity::Warning,
                year,
                message: format!(
                    "rate {value} outside plausibility band [-{RATE_PLAUSIBILITY_BAND}, {RATE_PLAUSIBILITY_BAND}]"
                ),
            });
        }
        if !is_rate && value <= 0.0 {
            findings.push(Finding {
                severity: Severity::Warning,
                year,
                message: format!("non-positive level {value}"),
            });
        }
    }

    if is_rate {
        let values = series.values();
        for i in 1..values.len() {
            let jump = values[i] - values[i - 1];
            if jump.abs() > RATE_JUMP_THRESHOLD {
                findings.push(Finding {
                    severity: Severity::Warning,
                    year: series.start_year() + i as i32,
                    message: format!(
                        "year-over-year jump {jump:.4} exceeds {RATE_JUMP_THRESHOLD}; possible series break"
                    ),
                });
            }
        }
    }

    findings
}

/// Parses `year,value` CSV text into a series.
///
/// Records may arrive unsorted; they are sorted by year before the
/// contiguity check. Lines starting with `#` are comments. The first
/// data line must be the `year,value` header.
pub fn load_csv<R: BufRead>(reader: R, unit: Unit, label: impl Into<String>) -> Result<AnnualSeries> {
    let mut rows: Vec<(i32, f64)> = Vec::new();
    let mut seen_header = false;

    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        if !seen_header {
            if line.trim() != "year,value" {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected header 'year,value', found '{line}'"),
                });
            }
            seen_header = true;
            continue;
        }

        let mut fields = line.split(',');
        let year_text = fields.next().unwrap_or("").trim();
        let value_text = fields.next().unwrap_or("").trim();
        if value_text.is_empty() || fields.next().is_some() {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected 'year,value', found '{line}'"),
            });
        }
        let year: i32 = year_text.parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("invalid year '{year_text}'"),
        })?;
        if !(1000..=9999).contains(&year) {
            return Err(Error::Parse {
                line: line_no,
                message: format!("year {year} is not a 4-digit calendar year"),
            });
        }
        let value: f64 = value_text.parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("invalid value '{value_text}'"),
        })?;
        if !value.is_finite() {
            return Err(Error::Parse {
                line: line_no,
                message: format!("non-finite value '{value_text}'"),
            });
        }
        if rows.iter().any(|&(y, _)| y == year) {
            return Err(Error::DuplicateYear { line: line_no, year });
        }
        rows.push((year, value));
    }

    if rows.is_empty() {
        return Err(Error::Parse {
            line: 0,
            message: "no data records found".to_string(),
        });
    }

    rows.sort_by_key(|&(y, _)| y);
    let start_year = rows[0].0;
    let missing: Vec<i32> = rows
        .windows(2)
        .flat_map(|w| (w[0].0 + 1)..w[1].0)
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingYears { missing });
    }

    let values = rows.into_iter().map(|(_, v)| v).collect();
    AnnualSeries::new(start_year, values, unit, label)
}

/// Writes a series as `year,value` CSV with unit/label comment headers.
///
/// Values print in shortest round-trip form, so loading the output
/// reproduces the same f64 values bit-exactly.
pub fn save_csv<W: Write>(mut writer: W, series: &AnnualSeries) -> Result<()> {
    writeln!(writer, "# unit: {}", series.unit())?;
    writeln!(writer, "# label: {}", series.label())?;
    writeln!(writer, "year,value")?;
    for (year, value) in series.iter() {
        writeln!(writer, "{year},{value}")?;
    }
    Ok(())
}

/// Divergence statistics between two dataset versions over their common
/// window.
#[derive(Debug, Clone)]
pub struct DivergenceReport {
    pub key_a: DatasetKey,
    pub key_b: DatasetKey,
    pub max_abs_diff: f64,
    /// Year where the largest absolute difference occurs.
    pub max_abs_diff_year: i32,
    pub mean_abs_diff: f64,
    /// Pearson correlation over the common window; defined as 1 for
    /// identical constant series and 0 for differing constants.
    pub correlation: f64,
    pub common_window: (i32, i32),
}

/// Optional transform applied to both series before comparing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompareTransform {
    Levels,
    ChangeRate,
}

/// Persistent map from [`DatasetKey`] to validated series.
///
/// On disk: a directory holding `manifest.txt` (one `variable,source,
/// relative_path` line per entry) and one CSV file per dataset. Reads are
/// safe concurrently; writes require exclusive access.
#[derive(Debug)]
pub struct DatasetRegistry {
    root: PathBuf,
    entries: BTreeMap<DatasetKey, AnnualSeries>,
}

const MANIFEST_NAME: &str = "manifest.txt";

impl DatasetRegistry {
    /// Creates an empty registry directory (and its manifest).
    pub fn create(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        fs::create_dir_all(&root)?;
        let registry = Self {
            root,
            entries: BTreeMap::new(),
        };
        registry.write_manifest()?;
        Ok(registry)
    }

    /// Opens an existing registry, loading every dataset listed in the
    /// manifest.
    pub fn open(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        let manifest = root.join(MANIFEST_NAME);
        let text = fs::read_to_string(&manifest)?;
        let mut entries = BTreeMap::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parts: Vec<&str> = line.splitn(3, ',').collect();
            if parts.len() != 3 {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: format!("manifest line '{line}' must be 'variable,source,path'"),
                });
            }
            let key = DatasetKey {
                variable: parts[0].trim().parse()?,
                source: parts[1].trim().parse()?,
            };
            let path = root.join(parts[2].trim());
            let series = load_registry_file(&path, key)?;
            entries.insert(key, series);
        }
        Ok(Self { root, entries })
    }

    /// Opens the registry if a manifest exists, otherwise creates it.
    pub fn open_or_create(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        if root.join(MANIFEST_NAME).exists() {
            Self::open(root)
        } else {
            Self::create(root)
        }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn manifest_path(&self) -> PathBuf {
        self.root.join(MANIFEST_NAME)
    }

    /// Validates and persists a series under `key`.
    ///
    /// Returns the validation findings (warnings included). A finding of
    /// error severity rejects the registration; an existing key without
    /// `overwrite` is a conflict.
    pub fn register(
        &mut self,
        key: DatasetKey,
        series: AnnualSeries,
        overwrite: bool,
    ) -> Result<Vec<Finding>> {
        if self.entries.contains_key(&key) && !overwrite {
            return Err(Error::KeyConflict {
                key: key.to_string(),
            });
        }
        let findings = validate(&series);
        if let Some(first) = findings.iter().find(|f| f.severity == Severity::Error) {
            return Err(Error::ValidationFailed {
                label: series.label().to_string(),
                message: first.to_string(),
            });
        }

        let filename = format!("{}_{}.csv", key.variable, key.source);
        let mut file = fs::File::create(self.root.join(&filename))?;
        save_csv(&mut file, &series)?;
        file.flush()?;

        self.entries.insert(key, series);
        self.write_manifest()?;
        Ok(findings)
    }

    /// Returns the registered series for `key`.
    pub fn get(&self, key: DatasetKey) -> Result<&AnnualSeries> {
        self.entries.get(&key).ok_or_else(|| Error::UnknownKey {
            key: key.to_string(),
        })
    }

    /// Registered keys in sorted order.
    pub fn keys(&self) -> impl Iterator<Item = DatasetKey> + '_ {
        self.entries.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Quantifies how far two registered datasets diverge over their
    /// common years, optionally comparing change rates instead of levels.
    pub fn compare_sources(
        &self,
        a: DatasetKey,
        b: DatasetKey,
        transform: CompareTransform,
    ) -> Result<DivergenceReport> {
        let series_a = self.get(a)?.clone();
        let series_b = self.get(b)?.clone();
        let (series_a, series_b) = match transform {
            CompareTransform::Levels => (series_a, series_b),
            CompareTransform::ChangeRate => (series_a.change_rate()?, series_b.change_rate()?),
        };
        let pair = align(&series_a, &series_b)?;
        let n = pair.x.len();

        let mut max_abs = 0.0f64;
        let mut max_year = pair.common_window.0;
        let mut sum_abs = 0.0f64;
        for ((year, va), (_, vb)) in pair.x.iter().zip(pair.y.iter()) {
            let d = (va - vb).abs();
            sum_abs += d;
            if d > max_abs {
                max_abs = d;
                max_year = year;
            }
        }

        Ok(DivergenceReport {
            key_a: a,
            key_b: b,
            max_abs_diff: max_abs,
            max_abs_diff_year: max_year,
            mean_abs_diff: sum_abs / n as f64,
            correlation: pearson(pair.x.values(), pair.y.values(), max_abs),
            common_window: pair.common_window,
        })
    }

    fn write_manifest(&self) -> Result<()> {
        let mut text = String::new();
        for key in self.entries.keys() {
            text.push_str(&format!(
                "{},{},{}_{}.csv\n",
                key.variable, key.source, key.variable, key.source
            ));
        }
        fs::write(self.manifest_path(), text)?;
        Ok(())
    }
}

fn pearson(xs: &[f64], ys: &[f64], max_abs_diff: f64) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for i in 0..xs.len() {
        let dx = xs[i] - mx;
        let dy = ys[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        // constant series: perfectly correlated when identical
        return if max_abs_diff == 0.0 { 1.0 } else { 0.0 };
    }
    (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0)
}

/// Reads a registry CSV, taking unit and label from its comment headers.
fn load_registry_file(path: &Path, key: DatasetKey) -> Result<AnnualSeries> {
    let text = fs::read_to_string(path)?;
    let mut unit = None;
    let mut label = None;
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix("# unit:") {
            unit = Some(rest.trim().parse::<Unit>()?);
        } else if let Some(rest) = line.strip_prefix("# label:") {
            label = Some(rest.trim().to_string());
        } else if !line.starts_with('#') {
            break;
        }
    }
    let unit = unit.unwrap_or_else(|| key.variable.natural_unit());
    let label = label.unwrap_or_else(|| key.to_string());
    load_csv(std::io::Cursor::new(text), unit, label)
}
