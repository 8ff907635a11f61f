//! Integer-lag grid search: scan time shifts between two series and keep
//! the one with the highest R-squared.
//!
//! Run with: `cargo run -p lfmkit --example lag_search`

use lfmkit::regression::lag_search;
use lfmkit::{AnnualSeries, Unit};

fn main() -> lfmkit::Result<()> {
    // driver: a wiggly but non-periodic series
    let driver_values: Vec<f64> = (0..40)
        .map(|i| 0.01 * (0.7 * i as f64).sin() + 0.0004 * i as f64)
        .collect();
    let driver = AnnualSeries::new(1967, driver_values.clone(), Unit::RatePerYear, "driver")?;

    // response is the driver three years earlier, scaled and shifted
    let planted_lag = 3usize;
    let response_values: Vec<f64> = driver_values.iter().map(|v| 0.5 * v + 0.01).collect();
    let response = AnnualSeries::new(
        1967 + planted_lag as i32,
        response_values,
        Unit::RatePerYear,
        "response",
    )?;

    let result = lag_search(&driver, &response, 6)?;
    println!("planted lag: {planted_lag}");
    println!("best lag:    {} (r_squared {:.12})", result.best_lag, result.fit.r_squared);
    println!(
        "fit:         response = {:.4} + {:.4} * driver(t - {})",
        result.fit.intercept, result.fit.slope, result.best_lag
    );
    println!("\nscan:");
    println!("  lag  r_squared      n");
    for entry in &result.scan {
        println!("  {:>3}  {:<12.6}  {}", entry.lag, entry.r_squared, entry.n);
    }
    for warning in &result.warnings {
        println!("  note: {warning}");
    }
    Ok(())
}
