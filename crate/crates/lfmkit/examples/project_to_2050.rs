//! Project inflation and unemployment to 2050: population path × fixed
//! participation rate → labor force → change rate → model evaluation.
//!
//! Run with: `cargo run -p lfmkit --example project_to_2050`

use lfmkit::ingestion::load_csv;
use lfmkit::models::{preset, Model};
use lfmkit::projection::{forecast, InflationModel, Participation, ProjectionScenario};
use lfmkit::Unit;
use std::fs;
use std::path::Path;

fn main() -> lfmkit::Result<()> {
    let demo = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/demo");
    let population = load_csv(
        std::io::Cursor::new(fs::read_to_string(demo.join("population_ipss.csv"))?),
        Unit::Persons,
        "population, demo",
    )?;
    let labor_force = load_csv(
        std::io::Cursor::new(fs::read_to_string(demo.join("labor_force_nac.csv"))?),
        Unit::Persons,
        "labor force, demo",
    )?;

    // splice the projection onto the last observed labor-force level
    let horizon = (2007, 2050);
    let anchor_year = horizon.0 - 1;
    let anchor_level = labor_force.value(anchor_year).unwrap();

    let scenario = ProjectionScenario {
        population,
        participation: Participation::Constant(0.521),
        horizon,
        inflation_model: InflationModel::from_model(preset("paper-japan-cpi").unwrap())?,
        unemployment_model: match preset("paper-japan-ue").unwrap() {
            Model::Lagged(m) => m,
            _ => unreachable!(),
        },
        anchor: (anchor_year, anchor_level),
    };

    let bundle = forecast(&scenario)?;
    for note in &bundle.provenance {
        println!("note: {note}");
    }

    println!("\n year   labor force   inflation   unemployment");
    for year in [2007, 2010, 2015, 2020, 2025, 2030, 2035, 2040, 2045, 2050] {
        println!(
            " {year}   {:>11.0}   {:>+8.4}%   {:>9.4}%",
            bundle.labor_force.value(year).unwrap(),
            100.0 * bundle.inflation.value(year).unwrap(),
            100.0 * bundle.unemployment.value(year).unwrap(),
        );
    }

    let first_deflation = bundle
        .inflation
        .iter()
        .find(|&(_, v)| v < 0.0)
        .map(|(year, _)| year);
    if let Some(year) = first_deflation {
        println!("\nfirst deflationary year of the projection: {year}");
    }

    // the same scenario with the generalized inflation model
    let mut alternative = scenario.clone();
    alternative.inflation_model = InflationModel::from_model(preset("paper-japan-gen").unwrap())?;
    let alt_bundle = forecast(&alternative)?;
    println!(
        "generalized-model inflation in 2050: {:+.4}% (single-driver: {:+.4}%)",
        100.0 * alt_bundle.inflation.value(2050).unwrap(),
        100.0 * bundle.inflation.value(2050).unwrap()
    );

    Ok(())
}
