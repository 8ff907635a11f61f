//! Coefficient estimation by cumulative-curve matching.
//!
//! Instead of minimizing annual residuals, coefficients are chosen to
//! minimize the RMS deviation between the *running sums* of the observed
//! and predicted series. Short-term oscillations and uncorrelated
//! measurement noise largely cancel in the running sums, while any true
//! mismatch in the coefficients accumulates, so the cumulative objective
//! is far more sensitive to the coefficients than the annual one.
//!
//! The search is deterministic: an exhaustive coarse grid over the given
//! bounds, then coordinate descent around the best node with step
//! halving down to a configurable floor. Identical inputs produce
//! bit-identical results.

use crate::error::{Error, Result};
use crate::series::{AnnualSeries, Unit};

/// Which functional form is being calibrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelFamily {
    /// `y(t) = A + B * r(t - t0)` driven by the labor-force change rate.
    SingleDriver,
    /// `y(t) = D1 * r(t) + D2 * u(t) + D3` with the unemployment rate as
    /// a second regressor.
    Generalized,
}

impl ModelFamily {
    /// Number of free coefficients.
    pub fn arity(&self) -> usize {
        match self {
            ModelFamily::SingleDriver => 2,
            ModelFamily::Generalized => 3,
        }
    }
}

/// Coefficients for one of the two families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coefficients {
    /// Free term `A` and slope `B` of the single-driver form.
    SingleDriver { free: f64, slope: f64 },
    /// `D1` (change-rate slope), `D2` (unemployment slope), `D3` (free
    /// term) of the generalized form.
    Generalized { d1: f64, d2: f64, d3: f64 },
}

impl Coefficients {
    pub fn family(&self) -> ModelFamily {
        match self {
            Coefficients::SingleDriver { .. } => ModelFamily::SingleDriver,
            Coefficients::Generalized { .. } => ModelFamily::Generalized,
        }
    }

    fn from_slice(family: ModelFamily, v: &[f64]) -> Coefficients {
        match family {
            ModelFamily::SingleDriver => Coefficients::SingleDriver {
                free: v[0],
                slope: v[1],
            },
            ModelFamily::Generalized => Coefficients::Generalized {
                d1: v[0],
                d2: v[1],
                d3: v[2],
            },
        }
    }

    fn to_vec(self) -> Vec<f64> {
        match self {
            Coefficients::SingleDriver { free, slope } => vec![free, slope],
            Coefficients::Generalized { d1, d2, d3 } => vec![d1, d2, d3],
        }
    }
}

/// Everything a calibration needs: the driver series (as a change rate),
/// the optional second regressor, the observed target, and the windows.
#[derive(Debug, Clone)]
pub struct ModelSpec {
    family: ModelFamily,
    driver_rate: AnnualSeries,
    unemployment: Option<AnnualSeries>,
    target: AnnualSeries,
    fit_window: (i32, i32),
    cumulative_start: i32,
}

impl ModelSpec {
    /// Single-driver spec. `driver` may be a level series (persons), in
    /// which case its change rate is taken, or an already-computed rate.
    pub fn single_driver(
        driver: &AnnualSeries,
        target: &AnnualSeries,
        fit_window: (i32, i32),
        cumulative_start: Option<i32>,
    ) -> Result<Self> {
        Self::build(driver, None, target, fit_window, cumulative_start, ModelFamily::SingleDriver)
    }

    /// Generalized spec with the unemployment rate as second regressor.
    pub fn generalized(
        driver: &AnnualSeries,
        unemployment: &AnnualSeries,
        target: &AnnualSeries,
        fit_window: (i32, i32),
        cumulative_start: Option<i32>,
    ) -> Result<Self> {
        Self::build(
            driver,
            Some(unemployment),
            target,
            fit_window,
            cumulative_start,
            ModelFamily::Generalized,
        )
    }

    fn build(
        driver: &AnnualSeries,
        unemployment: Option<&AnnualSeries>,
        target: &AnnualSeries,
        fit_window: (i32, i32),
        cumulative_start: Option<i32>,
        family: ModelFamily,
    ) -> Result<Self> {
        let (first, last) = fit_window;
        if first > last {
            return Err(Error::InvalidWindow { first, last });
        }
        let driver_rate = match driver.unit() {
            Unit::RatePerYear => driver.clone(),
            _ => driver.change_rate()?,
        };
        // the target must cover the whole window; driver coverage is
        // checked per lag at prediction time
        target.window(first, last)?;
        if let Some(u) = unemployment {
            u.window(first, last)?;
        }
        let cumulative_start = cumulative_start.unwrap_or(first);
        if cumulative_start < first || cumulative_start > last {
            return Err(Error::Specification(format!(
                "cumulative start {cumulative_start} outside fit window {first}:{last}"
            )));
        }
        Ok(Self {
            family,
            driver_rate,
            unemployment: unemployment.cloned(),
            target: target.clone(),
            fit_window,
            cumulative_start,
        })
    }

    pub fn family(&self) -> ModelFamily {
        self.family
    }

    pub fn fit_window(&self) -> (i32, i32) {
        self.fit_window
    }

    pub fn cumulative_start(&self) -> i32 {
        self.cumulative_start
    }

    pub fn driver_rate(&self) -> &AnnualSeries {
        &self.driver_rate
    }

    pub fn target(&self) -> &AnnualSeries {
        &self.target
    }

    /// Observed target restricted to the fit window.
    pub fn observed(&self) -> AnnualSeries {
        self.target
            .window(self.fit_window.0, self.fit_window.1)
            .expect("checked at construction")
    }
}

/// Evaluates the model pointwise over the fit window.
///
/// Single driver: `y(t) = A + B * r(t - lag)`. Generalized: `y(t) =
/// D1 * r(t) + D2 * u(t) + D3` (lag must be 0). Fails if the driver does
/// not cover the window at the requested lag.
pub fn predict_series(spec: &ModelSpec, coefficients: &Coefficients, lag: usize) -> Result<AnnualSeries> {
    if coefficients.family() != spec.family {
        return Err(Error::Specification(format!(
            "coefficient arity {} does not match model family arity {}",
            coefficients.family().arity(),
            spec.family.arity()
        )));
    }
    let (first, last) = spec.fit_window;
    let values = match *coefficients {
        Coefficients::SingleDriver { free, slope } => {
            let lag = lag as i32;
            let shifted = spec.driver_rate.window(first - lag, last - lag)?;
            shifted.values().iter().map(|r| free + slope * r).collect::<Vec<_>>()
        }
        Coefficients::Generalized { d1, d2, d3 } => {
            if lag != 0 {
                return Err(Error::Specification(
                    "generalized family takes no lag".to_string(),
                ));
            }
            let r = spec.driver_rate.window(first, last)?;
            let u = spec
                .unemployment
                .as_ref()
                .ok_or_else(|| {
                    Error::Specification("generalized spec lacks unemployment series".to_string())
                })?
                .window(first, last)?;
            r.values()
                .iter()
                .zip(u.values())
                .map(|(rv, uv)| d1 * rv + d2 * uv + d3)
                .collect()
        }
    };
    AnnualSeries::new(
        first,
        values,
        spec.target.unit(),
        format!("predicted {}", spec.target.label()),
    )
}

/// RMS deviation between the running sums of two series, both summed
/// from `from_year`. The series must cover identical year ranges.
pub fn cumulative_rms(observed: &AnnualSeries, predicted: &AnnualSeries, from_year: i32) -> Result<f64> {
    if observed.start_year() != predicted.start_year() || observed.len() != predicted.len() {
        return Err(Error::Specification(format!(
            "cumulative RMS needs identical windows, got {}:{} vs {}:{}",
            observed.start_year(),
            observed.end_year(),
            predicted.start_year(),
            predicted.end_year()
        )));
    }
    let c_obs = observed.cumulative(from_year)?;
    let c_pred = predicted.cumulative(from_year)?;
    let n = c_obs.len() as f64;
    let sum_sq: f64 = c_obs
        .values()
        .iter()
        .zip(c_pred.values())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok((sum_sq / n).sqrt())
}

/// RMS of the plain annual differences; a diagnostic companion to the
/// cumulative objective, never the thing being minimized.
pub fn annual_rms(observed: &AnnualSeries, predicted: &AnnualSeries) -> Result<f64> {
    if observed.start_year() != predicted.start_year() || observed.len() != predicted.len() {
        return Err(Error::Specification(
            "annual RMS needs identical windows".to_string(),
        ));
    }
    let n = observed.len() as f64;
    let sum_sq: f64 = observed
        .values()
        .iter()
        .zip(predicted.values())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok((sum_sq / n).sqrt())
}

/// Inclusive bounds and coarse step for one coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientRange {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl CoefficientRange {
    pub fn new(min: f64, max: f64, step: f64) -> Self {
        Self { min, max, step }
    }

    fn node_count(&self) -> usize {
        ((self.max - self.min) / self.step + 1e-9).floor() as usize + 1
    }
}

/// Default bounds for slope coefficients (B, D1, D2).
pub const SLOPE_RANGE: CoefficientRange = CoefficientRange {
    min: -5.0,
    max: 5.0,
    step: 0.1,
};

/// Default bounds for free terms (A, D3).
pub const FREE_TERM_RANGE: CoefficientRange = CoefficientRange {
    min: -0.1,
    max: 0.1,
    step: 0.005,
};

/// Search specification: per-coefficient ranges (same order as
/// [`Coefficients`] fields) plus the refinement step floor.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchGrid {
    pub ranges: Vec<CoefficientRange>,
    /// Step halving stops once every step is below this. The default is
    /// small enough that planted noiseless models are recovered to
    /// better than 1e-4 per coefficient with a cumulative RMS below 1e-8.
    pub step_floor: f64,
}

pub const DEFAULT_STEP_FLOOR: f64 = 1e-10;

impl SearchGrid {
    pub fn new(ranges: Vec<CoefficientRange>) -> Self {
        Self {
            ranges,
            step_floor: DEFAULT_STEP_FLOOR,
        }
    }

    /// Default coarse grid for a family: slopes scan [-5, 5] in 0.1
    /// steps, free terms [-0.1, 0.1] in 0.005 steps.
    pub fn default_for(family: ModelFamily) -> Self {
        match family {
            ModelFamily::SingleDriver => Self::new(vec![FREE_TERM_RANGE, SLOPE_RANGE]),
            ModelFamily::Generalized => Self::new(vec![SLOPE_RANGE, SLOPE_RANGE, FREE_TERM_RANGE]),
        }
    }
}

/// One accepted step of the search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEntry {
    pub coefficients: Coefficients,
    pub lag: usize,
    pub objective: f64,
}

/// Outcome of [`calibrate`].
#[derive(Debug, Clone)]
pub struct CalibrationResult {
    pub coefficients: Coefficients,
    /// Chosen lag (always 0 for the generalized family).
    pub lag: usize,
    /// Final cumulative RMS.
    pub objective: f64,
    /// Every accepted improvement, in order; the last entry is the
    /// returned optimum.
    pub trace: Vec<TraceEntry>,
    /// The search specification that produced this result.
    pub grid: SearchGrid,
    /// Lags that could not be evaluated (driver coverage).
    pub warnings: Vec<String>,
}

/// Finds the coefficients (and lag, for the single-driver family)
/// minimizing the cumulative RMS deviation over the fit window.
///
/// Per lag: (1) exhaustive scan of the coarse grid; (2) coordinate
/// descent from the best node, halving every step once a full sweep
/// stops improving, until all steps drop below `grid.step_floor`.
/// Trial points outside the grid bounds are not evaluated. Ties prefer
/// the earlier-visited point and the smaller lag, so the result is
/// deterministic.
pub fn calibrate(
    spec: &ModelSpec,
    grid: &SearchGrid,
    lag_range: std::ops::RangeInclusive<usize>,
) -> Result<CalibrationResult> {
    if grid.ranges.len() != spec.family.arity() {
        return Err(Error::Specification(format!(
            "search grid has {} ranges but family needs {}",
            grid.ranges.len(),
            spec.family.arity()
        )));
    }
    for r in &grid.ranges {
        if !(r.min.is_finite() && r.max.is_finite()) || r.min > r.max {
            return Err(Error::Specification(format!(
                "invalid coefficient range {}..{}",
                r.min, r.max
            )));
        }
        if !r.step.is_finite() || r.step <= 0.0 {
            return Err(Error::Specification(format!(
                "coefficient step {} must be positive",
                r.step
            )));
        }
    }
    if !grid.step_floor.is_finite() || grid.step_floor <= 0.0 {
        return Err(Error::Specification(
            "step floor must be positive".to_string(),
        ));
    }
    let lags: Vec<usize> = if spec.family == ModelFamily::Generalized {
        vec![0]
    } else {
        lag_range.collect()
    };
    if lags.is_empty() {
        return Err(Error::Specification("empty lag range".to_string()));
    }

    let (first, last) = spec.fit_window;
    let window_len = (last - first + 1) as usize;
    let offset = (spec.cumulative_start - first) as usize;
    let observed = spec.observed();
    let obs_cum: Vec<f64> = observed.cumulative(spec.cumulative_start)?.values().to_vec();
    let n_objective = obs_cum.len() as f64;
    let unemployment_window: Option<Vec<f64>> = match &spec.unemployment {
        Some(u) => Some(u.window(first, last)?.values().to_vec()),
        None => None,
    };

    // Hot path of the search. Performs the exact floating-point
    // operations of predict_series + cumulative_rms in the same order,
    // so its result is bit-identical to the public route; it only skips
    // the intermediate allocations.
    let evaluate = |coeffs: &Coefficients, driver: &[f64]| -> f64 {
        let mut running = 0.0f64;
        let mut sum_sq = 0.0f64;
        match *coeffs {
            Coefficients::SingleDriver { free, slope } => {
                for i in offset..window_len {
                    let predicted = free + slope * driver[i];
                    running += predicted;
                    let d = obs_cum[i - offset] - running;
                    sum_sq += d * d;
                }
            }
            Coefficients::Generalized { d1, d2, d3 } => {
                let u = unemployment_window
                    .as_deref()
                    .expect("generalized spec carries unemployment");
                for i in offset..window_len {
                    let predicted = d1 * driver[i] + d2 * u[i] + d3;
                    running += predicted;
                    let d = obs_cum[i - offset] - running;
                    sum_sq += d * d;
                }
            }
        }
        (sum_sq / n_objective).sqrt()
    };

    let mut trace: Vec<TraceEntry> = Vec::new();
    let mut warnings: Vec<String> = Vec::new();
    let mut best: Option<(f64, Coefficients, usize)> = None;
    let mut evaluated_any_finite = false;

    for &lag in &lags {
        // driver slice covering (first - lag ..= last - lag); a coverage
        // gap skips the whole lag
        let shifted_first = first - lag as i32;
        let shifted_last = last - lag as i32;
        if shifted_first < spec.driver_rate.start_year()
            || shifted_last > spec.driver_rate.end_year()
        {
            warnings.push(format!(
                "lag {lag} skipped: requested window {shifted_first}:{shifted_last} is outside the available span {}:{}",
                spec.driver_rate.start_year(),
                spec.driver_rate.end_year()
            ));
            continue;
        }
        let start_index = (shifted_first - spec.driver_rate.start_year()) as usize;
        let driver = &spec.driver_rate.values()[start_index..start_index + window_len];
        let objective = |coeffs: &Coefficients| evaluate(coeffs, driver);

        // stage 1: exhaustive coarse grid, lexicographic node order
        let counts: Vec<usize> = grid.ranges.iter().map(|r| r.node_count()).collect();
        let mut index = vec![0usize; counts.len()];
        let mut point = vec![0f64; counts.len()];
        loop {
            for (i, r) in grid.ranges.iter().enumerate() {
                point[i] = r.min + index[i] as f64 * r.step;
            }
            let coeffs = Coefficients::from_slice(spec.family, &point);
            let obj = objective(&coeffs);
            if obj.is_finite() {
                evaluated_any_finite = true;
                let improved = match &best {
                    None => true,
                    Some((b, _, _)) => obj < *b,
                };
                if improved {
                    best = Some((obj, coeffs, lag));
                    trace.push(TraceEntry {
                        coefficients: coeffs,
                        lag,
                        objective: obj,
                    });
                }
            }
            // odometer increment
            let mut d = counts.len();
            loop {
                if d == 0 {
                    break;
                }
                d -= 1;
                index[d] += 1;
                if index[d] < counts[d] {
                    break;
                }
                index[d] = 0;
                if d == 0 {
                    break;
                }
            }
            if index.iter().all(|&i| i == 0) {
                break;
            }
        }

        // stage 2 runs only if this lag currently holds the optimum
        let Some((mut best_obj, best_coeffs, best_lag)) = best else {
            continue;
        };
        if best_lag != lag {
            continue;
        }

        let mut current = best_coeffs.to_vec();
        let mut steps: Vec<f64> = grid.ranges.iter().map(|r| r.step).collect();
        while steps.iter().any(|&s| s >= grid.step_floor) {
            let mut improved = true;
            while improved {
                improved = false;
                for ci in 0..current.len() {
                    for sign in [1.0f64, -1.0] {
                        let candidate = current[ci] + sign * steps[ci];
                        if candidate < grid.ranges[ci].min || candidate > grid.ranges[ci].max {
                            continue;
                        }
                        let mut trial = current.clone();
                        trial[ci] = candidate;
                        let coeffs = Coefficients::from_slice(spec.family, &trial);
                        let obj = objective(&coeffs);
                        if obj.is_finite() && obj < best_obj {
                            best_obj = obj;
                            current = trial;
                            trace.push(TraceEntry {
                                coefficients: coeffs,
                                lag,
                                objective: obj,
                            });
                            improved = true;
                            break;
                        }
                    }
                }
            }
            for s in steps.iter_mut() {
                *s /= 2.0;
            }
        }
        best = Some((best_obj, Coefficients::from_slice(spec.family, &current), lag));
    }

    match best {
        Some((objective, coefficients, lag)) => Ok(CalibrationResult {
            coefficients,
            lag,
            objective,
            trace,
            grid: grid.clone(),
            warnings,
        }),
        None => {
            if evaluated_any_finite {
                unreachable!("finite evaluation without a best point");
            } else if warnings.is_empty() {
                Err(Error::Data(
                    "objective was non-finite at every grid node".to_string(),
                ))
            } else {
                Err(Error::Data(format!(
                    "no lag could be evaluated: {}",
                    warnings.join("; ")
                )))
            }
        }
    }
}
