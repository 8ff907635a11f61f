//! Annual time-series value type and its algebra.
//!
//! [`AnnualSeries`] is the universal carrier for labor force levels,
//! inflation rates, unemployment rates, and population: a contiguous
//! year-indexed run of finite values with a unit tag and a label. All
//! operations are pure; a series is never mutated after construction.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Unit tag carried by every series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Unit {
    /// Dimensionless fraction per year (0.04 means 4%/yr). Inflation,
    /// unemployment, and change rates are stored this way.
    #[serde(rename = "fraction-per-year-rate")]
    RatePerYear,
    /// Head counts: labor force and population levels.
    #[serde(rename = "persons")]
    Persons,
    /// Generic index level (price index, cumulative sums, ...).
    #[serde(rename = "index-level")]
    IndexLevel,
}

impl Unit {
    pub fn as_str(&self) -> &'static str {
        match self {
            Unit::RatePerYear => "fraction-per-year-rate",
            Unit::Persons => "persons",
            Unit::IndexLevel => "index-level",
        }
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Unit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fraction-per-year-rate" | "rate" => Ok(Unit::RatePerYear),
            "persons" => Ok(Unit::Persons),
            "index-level" | "index" => Ok(Unit::IndexLevel),
            other => Err(Error::Specification(format!(
                "unknown unit '{other}' (expected fraction-per-year-rate, persons, or index-level)"
            ))),
        }
    }
}

/// A contiguous year-indexed sequence of finite real values.
///
/// Value `i` belongs to year `start_year + i`; there are no gaps. The
/// constructor rejects empty and non-finite input, so every reachable
/// series satisfies the invariants.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnualSeries {
    start_year: i32,
    values: Vec<f64>,
    unit: Unit,
    label: String,
}

impl AnnualSeries {
    /// Builds a series from consecutive values starting at `start_year`.
    pub fn new(
        start_year: i32,
        values: Vec<f64>,
        unit: Unit,
        label: impl Into<String>,
    ) -> Result<Self> {
        let label = label.into();
        if values.is_empty() {
            return Err(Error::EmptySeries { label });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                label,
                year: start_year + i as i32,
            });
        }
        Ok(Self {
            start_year,
            values,
            unit,
            label,
        })
    }

    pub fn start_year(&self) -> i32 {
        self.start_year
    }

    /// Last year covered (inclusive).
    pub fn end_year(&self) -> i32 {
        self.start_year + (self.values.len() as i32 - 1)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false: the constructor rejects empty input.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn unit(&self) -> Unit {
        self.unit
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Returns a copy with a different label; values are untouched.
    pub fn with_label(&self, label: impl Into<String>) -> AnnualSeries {
        AnnualSeries {
            label: label.into(),
            ..self.clone()
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value for `year`, if covered.
    pub fn value(&self, year: i32) -> Option<f64> {
        if year < self.start_year || year > self.end_year() {
            return None;
        }
        Some(self.values[(year - self.start_year) as usize])
    }

    /// Iterates `(year, value)` pairs in year order.
    pub fn iter(&self) -> impl Iterator<Item = (i32, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| (self.start_year + i as i32, v))
    }

    /// Relative year-over-year change of a level series.
    ///
    /// `result[t] = (s[t] - s[t-1]) / s[t-1]` (backward difference), so the
    /// result starts one year after the input and carries the
    /// fraction-per-year unit. Levels must be strictly positive.
    pub fn change_rate(&self) -> Result<AnnualSeries> {
        if self.len() < 2 {
            return Err(Error::InsufficientData {
                needed: 2,
                got: self.len(),
            });
        }
        if let Some((year, value)) = self.iter().find(|&(_, v)| v <= 0.0) {
            return Err(Error::NonPositiveLevel {
                label: self.label.clone(),
                year,
                value,
            });
        }
        let rates: Vec<f64> = self
            .values
            .windows(2)
            .map(|w| (w[1] - w[0]) / w[0])
            .collect();
        AnnualSeries::new(
            self.start_year + 1,
            rates,
            Unit::RatePerYear,
            format!("change rate of {}", self.label),
        )
    }

    /// Shifts year labels forward by `k` years; values are untouched.
    ///
    /// A value measured in year `y` is afterwards aligned against year
    /// `y + k`, which is how a lagged regressor `x(t - k)` is built.
    /// Negative lags are ruled out by the unsigned parameter.
    pub fn lag_shift(&self, k: usize) -> AnnualSeries {
        AnnualSeries {
            start_year: self.start_year + k as i32,
            ..self.clone()
        }
    }

    /// Restricts to the inclusive year window `[first, last]`.
    pub fn window(&self, first: i32, last: i32) -> Result<AnnualSeries> {
        if first > last {
            return Err(Error::InvalidWindow { first, last });
        }
        if first < self.start_year || last > self.end_year() {
            return Err(Error::WindowOutOfRange {
                first,
                last,
                have_first: self.start_year,
                have_last: self.end_year(),
            });
        }
        let a = (first - self.start_year) as usize;
        let b = (last - self.start_year) as usize;
        AnnualSeries::new(
            first,
            self.values[a..=b].to_vec(),
            self.unit,
            self.label.clone(),
        )
    }

    /// Running sum starting at `from_year`: `result[t] = sum over
    /// from_year..=t`. The first value equals the value at `from_year`.
    pub fn cumulative(&self, from_year: i32) -> Result<AnnualSeries> {
        if from_year < self.start_year || from_year > self.end_year() {
            return Err(Error::YearOutOfRange {
                year: from_year,
                have_first: self.start_year,
                have_last: self.end_year(),
            });
        }
        let offset = (from_year - self.start_year) as usize;
        let mut total = 0.0;
        let sums: Vec<f64> = self.values[offset..]
            .iter()
            .map(|v| {
                total += v;
                total
            })
            .collect();
        AnnualSeries::new(
            from_year,
            sums,
            self.unit,
            format!("cumulative {}", self.label),
        )
    }
}

/// Two series restricted to their common year window.
#[derive(Debug, Clone)]
pub struct SeriesPair {
    pub x: AnnualSeries,
    pub y: AnnualSeries,
    pub common_window: (i32, i32),
}

/// Windows both series to the intersection of their year ranges.
pub fn align(x: &AnnualSeries, y: &AnnualSeries) -> Result<SeriesPair> {
    let first = x.start_year().max(y.start_year());
    let last = x.end_year().min(y.end_year());
    if first > last {
        return Err(Error::NoOverlap {
            a: x.label().to_string(),
            a_first: x.start_year(),
            a_last: x.end_year(),
            b: y.label().to_string(),
            b_first: y.start_year(),
            b_last: y.end_year(),
        });
    }
    Ok(SeriesPair {
        x: x.window(first, last)?,
        y: y.window(first, last)?,
        common_window: (first, last),
    })
}
