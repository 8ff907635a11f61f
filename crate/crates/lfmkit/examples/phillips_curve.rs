//! Fit the inflation/unemployment trade-off on the demo data, inspect
//! the diagnostics, and apply an explicit intercept adjustment.
//!
//! Run with: `cargo run -p lfmkit --example phillips_curve`

use lfmkit::ingestion::load_csv;
use lfmkit::models::{fit_phillips, Model, ModelInputs};
use lfmkit::Unit;
use std::fs;
use std::path::Path;

fn main() -> lfmkit::Result<()> {
    let demo = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/demo");
    let inflation = load_csv(
        std::io::Cursor::new(fs::read_to_string(demo.join("cpi_inflation_user.csv"))?),
        Unit::RatePerYear,
        "CPI inflation, demo",
    )?;
    let unemployment = load_csv(
        std::io::Cursor::new(fs::read_to_string(demo.join("unemployment_nac.csv"))?),
        Unit::RatePerYear,
        "unemployment, demo",
    )?;

    let window = (1982, 2006);
    let model = fit_phillips(&inflation, &unemployment, window, 6)?;
    println!("unemployment = {:.4} * inflation + {:.4}", model.slope, model.intercept);
    println!("lag {},  r_squared {:.4},  residual stdev {:.5}", model.lag, model.fit.r_squared, model.fit.residual_stdev);
    println!(
        "stderr: slope {:.4}, intercept {:.5}",
        model.fit.slope_stderr, model.fit.intercept_stderr
    );

    // residuals of the fitted model against the observed series
    let evaluation = Model::Phillips(model.clone()).evaluate(
        &ModelInputs {
            inflation: Some(&inflation),
            ..Default::default()
        },
        window,
        Some(&unemployment),
    )?;
    let residuals = evaluation.residuals.unwrap();
    println!(
        "residuals: stdev {:.5}, max |res| {:.5} over {} years",
        residuals.stdev, residuals.max_abs, residuals.n
    );

    // a deliberate free-term elevation stays on the record
    let adjusted = model.intercept_adjust(0.004);
    println!(
        "\nadjusted intercept {:.4} (note: \"{}\")",
        adjusted.intercept, adjusted.note
    );

    Ok(())
}
