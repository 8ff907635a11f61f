//! Ordinary least squares with classical diagnostics, plus an integer-lag
//! grid search for picking the best time shift between two annual series.

use crate::error::{Error, Result};
use crate::series::{align, AnnualSeries};

/// Default upper bound for lag scans; larger shifts are implausible for
/// the relationships this crate models.
pub const DEFAULT_MAX_LAG: usize = 6;

/// Slope/intercept fit of `y = intercept + slope * x` with the classical
/// OLS error estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFitResult {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub intercept_stderr: f64,
    /// Coefficient of determination, clamped into [0, 1].
    pub r_squared: f64,
    /// sqrt(SSR / (n - 2)).
    pub residual_stdev: f64,
    pub n: usize,
    /// First and last target year of the fitted window.
    pub period: (i32, i32),
}

/// One evaluated lag in a [`lag_search`] scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LagScanEntry {
    pub lag: usize,
    pub r_squared: f64,
    /// Observations in the lag-dependent overlap window.
    pub n: usize,
}

/// Outcome of a lag grid search.
#[derive(Debug, Clone)]
pub struct LagSearchResult {
    pub best_lag: usize,
    /// Fit at the best lag.
    pub fit: LinearFitResult,
    /// Every lag that could be fitted, in lag order.
    pub scan: Vec<LagScanEntry>,
    /// Lags that had to be skipped (window too short, degenerate regressor).
    pub warnings: Vec<String>,
}

/// Least-squares fit of `y` on `x` over their common year window.
///
/// Requires at least 3 overlapping observations and a non-constant
/// regressor. R-squared is `1 - SSR/SST`; standard errors follow the
/// classical homoskedastic formulas.
pub fn ols(x: &AnnualSeries, y: &AnnualSeries) -> Result<LinearFitResult> {
    let pair = align(x, y)?;
    let n = pair.x.len();
    if n < 3 {
        return Err(Error::InsufficientData { needed: 3, got: n });
    }
    let nf = n as f64;
    let xs = pair.x.values();
    let ys = pair.y.values();

    let x_mean = xs.iter().sum::<f64>() / nf;
    let y_mean = ys.iter().sum::<f64>() / nf;

    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for i in 0..n {
        let dx = xs[i] - x_mean;
        let dy = ys[i] - y_mean;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::DegenerateRegressor {
            label: pair.x.label().to_string(),
        });
    }

    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;

    let ssr: f64 = (0..n)
        .map(|i| {
            let e = ys[i] - intercept - slope * xs[i];
            e * e
        })
        .sum();

    // A constant target is fitted exactly by slope 0; define R^2 = 1 there.
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (1.0 - ssr / syy).clamp(0.0, 1.0)
    };

    let residual_variance = ssr / (nf - 2.0);
    let residual_stdev = residual_variance.sqrt();
    let slope_stderr = (residual_variance / sxx).sqrt();
    let intercept_stderr = (residual_variance * (1.0 / nf + x_mean * x_mean / sxx)).sqrt();

    Ok(LinearFitResult {
        slope,
        intercept,
        slope_stderr,
        intercept_stderr,
        r_squared,
        residual_stdev,
        n,
        period: pair.common_window,
    })
}

/// Regresses `y(t)` on `x(t - k)` for every lag `k` in `0..=max_lag` and
/// keeps the lag with the highest R-squared, ties going to the smallest
/// lag. Lags whose overlap is too short are skipped with a warning; if
/// every lag is skipped the search fails.
pub fn lag_search(x: &AnnualSeries, y: &AnnualSeries, max_lag: usize) -> Result<LagSearchResult> {
    let mut scan = Vec::new();
    let mut warnings = Vec::new();
    let mut best: Option<(usize, LinearFitResult)> = None;

    for lag in 0..=max_lag {
        let shifted = x.lag_shift(lag);
        match ols(&shifted, y) {
            Ok(fit) => {
                scan.push(LagScanEntry {
                    lag,
                    r_squared: fit.r_squared,
                    n: fit.n,
                });
                let better = match &best {
                    None => true,
                    Some((_, b)) => fit.r_squared > b.r_squared,
                };
                if better {
                    best = Some((lag, fit));
                }
            }
            Err(
                e @ (Error::InsufficientData { .. }
                | Error::NoOverlap { .. }
                | Error::DegenerateRegressor { .. }),
            ) => {
                warnings.push(format!("lag {lag} skipped: {e}"));
            }
            Err(e) => return Err(e),
        }
    }

    match best {
        Some((best_lag, fit)) => Ok(LagSearchResult {
            best_lag,
            fit,
            scan,
            warnings,
        }),
        None => Err(Error::InsufficientData { needed: 3, got: 0 }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::Unit;
    use proptest::prelude::*;

    fn series(start: i32, values: &[f64]) -> AnnualSeries {
        AnnualSeries::new(start, values.to_vec(), Unit::RatePerYear, "s").unwrap()
    }

    /// Independent route: solve the raw normal equations
    /// [n, Σx; Σx, Σx²][a; b] = [Σy; Σxy] by Cramer's rule.
    fn normal_equations_oracle(xs: &[f64], ys: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let sx: f64 = xs.iter().sum();
        let sxx: f64 = xs.iter().map(|v| v * v).sum();
        let sy: f64 = ys.iter().sum();
        let sxy: f64 = xs.iter().zip(ys).map(|(a, b)| a * b).sum();
        let det = n * sxx - sx * sx;
        let intercept = (sy * sxx - sx * sxy) / det;
        let slope = (n * sxy - sx * sy) / det;
        (intercept, slope)
    }

    #[test]
    fn exact_line_recovers_coefficients() {
        let x = series(2000, &[1.0, 2.0, 3.0, 4.0, 5.0]);
        let y = series(2000, &[3.0, 5.0, 7.0, 9.0, 11.0]); // y = 2x + 1
        let fit = ols(&x, &y).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!((fit.intercept - 1.0).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert!(fit.residual_stdev < 1e-12);
        assert_eq!(fit.n, 5);
        assert_eq!(fit.period, (2000, 2004));
    }

    #[test]
    fn matches_normal_equations_oracle() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys = [1.0, 3.0, 2.0, 5.0];
        let x = series(2000, &xs);
        let y = series(2000, &ys);
        let fit = ols(&x, &y).unwrap();
        let (a, b) = normal_equations_oracle(&xs, &ys);
        assert!((fit.intercept - a).abs() <= 1e-12 * a.abs().max(1.0));
        assert!((fit.slope - b).abs() <= 1e-12 * b.abs().max(1.0));
    }

    #[test]
    fn rejects_degenerate_and_short_input() {
        let x = series(2000, &[2.0, 2.0, 2.0, 2.0]);
        let y = series(2000, &[1.0, 2.0, 3.0, 4.0]);
        assert!(matches!(ols(&x, &y), Err(Error::DegenerateRegressor { .. })));

        let x = series(2000, &[1.0, 2.0]);
        let y = series(2000, &[1.0, 2.0]);
        assert!(matches!(
            ols(&x, &y),
            Err(Error::InsufficientData { needed: 3, got: 2 })
        ));
    }

    #[test]
    fn misaligned_series_use_overlap() {
        let x = series(1998, &[9.0, 9.0, 1.0, 2.0, 3.0, 4.0]); // 1998-2003
        let y = series(2000, &[1.0, 2.0, 3.0, 4.0]); // 2000-2003, equals x there
        let fit = ols(&x, &y).unwrap();
        assert_eq!(fit.period, (2000, 2003));
        assert!((fit.slope - 1.0).abs() < 1e-12);
        assert!(fit.intercept.abs() < 1e-12);
    }

    #[test]
    fn lag_search_recovers_planted_shift() {
        // y(t) = x(t - 2), random-ish walk so no other lag fits exactly
        let xs: Vec<f64> = (0..30)
            .map(|i| (i as f64 * 0.7).sin() + 0.1 * i as f64)
            .collect();
        let x = series(1970, &xs);
        let y = series(1972, &xs);
        let result = lag_search(&x, &y, 6).unwrap();
        assert_eq!(result.best_lag, 2);
        assert!((result.fit.r_squared - 1.0).abs() < 1e-12);
        assert_eq!(result.scan.len(), 7);
        assert!(result.warnings.is_empty());
    }

    #[test]
    fn lag_search_zero_max_lag_equals_plain_ols() {
        let x = series(2000, &[1.0, 2.0, 4.0, 3.0, 5.0]);
        let y = series(2000, &[2.0, 3.0, 5.0, 6.0, 7.0]);
        let result = lag_search(&x, &y, 0).unwrap();
        let plain = ols(&x, &y).unwrap();
        assert_eq!(result.best_lag, 0);
        assert_eq!(result.fit, plain);
        assert_eq!(result.scan.len(), 1);
    }

    #[test]
    fn lag_search_skips_short_windows() {
        let x = series(2000, &[1.0, 2.0, 4.0, 3.0]); // 2000-2003
        let y = series(2000, &[2.0, 3.0, 5.0, 6.0]); // 2000-2003
        // at lag 2 only two years overlap, at lag 3 just one, at 4 none
        let result = lag_search(&x, &y, 4).unwrap();
        assert_eq!(result.scan.len(), 2); // lags 0 and 1
        assert_eq!(result.warnings.len(), 3);
        // all lags skipped -> error
        let err = lag_search(&x.lag_shift(30), &y, 2).unwrap_err();
        assert!(matches!(err, Error::InsufficientData { .. }));
    }

    #[test]
    fn stderr_shrinks_with_sample_size() {
        // fixed-amplitude deterministic noise, growing n, x spread fixed
        let noise = |i: usize| 0.05 * ((i * 2654435761) % 1000) as f64 / 1000.0 - 0.025;
        let mut stderrs = Vec::new();
        for &n in &[10usize, 40, 160] {
            let xs: Vec<f64> = (0..n).map(|i| i as f64 / n as f64).collect();
            let ys: Vec<f64> = (0..n).map(|i| 1.0 + 2.0 * xs[i] + noise(i)).collect();
            let fit = ols(&series(1900, &xs), &series(1900, &ys)).unwrap();
            stderrs.push(fit.slope_stderr);
        }
        assert!(stderrs[0] > stderrs[1] && stderrs[1] > stderrs[2]);
    }

    proptest! {
        #[test]
        fn r_squared_is_affine_invariant(
            seed in 0u64..1000,
            alpha in prop::sample::select(vec![-3.0, -0.5, 0.7, 2.0, 10.0]),
            beta in -5.0..5.0f64,
        ) {
            // deterministic pseudo-noise from the seed
            let n = 20;
            let xs: Vec<f64> = (0..n).map(|i| i as f64 + ((seed + i as u64) as f64 * 0.37).sin()).collect();
            let ys: Vec<f64> = (0..n)
                .map(|i| 0.5 * xs[i] - 1.0 + ((seed * 7 + i as u64) as f64 * 0.91).cos())
                .collect();
            let x = series(2000, &xs);
            let y = series(2000, &ys);
            let xt = AnnualSeries::new(
                2000,
                xs.iter().map(|v| alpha * v + beta).collect(),
                Unit::RatePerYear,
                "xt",
            ).unwrap();
            let r1 = ols(&x, &y).unwrap().r_squared;
            let r2 = ols(&xt, &y).unwrap().r_squared;
            prop_assert!((r1 - r2).abs() <= 1e-10);
        }

        #[test]
        fn r_squared_stays_in_unit_interval(
            xs in prop::collection::vec(-100.0..100.0f64, 3..30),
            seed in 0u64..100,
        ) {
            let ys: Vec<f64> = xs
                .iter()
                .enumerate()
                .map(|(i, v)| v * 0.3 + ((seed + i as u64) as f64 * 1.3).sin() * 10.0)
                .collect();
            let x = AnnualSeries::new(2000, xs.clone(), Unit::RatePerYear, "x").unwrap();
            let y = AnnualSeries::new(2000, ys, Unit::RatePerYear, "y").unwrap();
            if let Ok(fit) = ols(&x, &y) {
                prop_assert!((0.0..=1.0).contains(&fit.r_squared));
                prop_assert!(fit.residual_stdev >= 0.0);
            }
        }
    }
}
