//! Build a dataset registry from the bundled demo CSVs and see the
//! plausibility screening in action.
//!
//! Run with: `cargo run -p lfmkit --example ingest_and_validate`

use lfmkit::ingestion::{
    load_csv, validate, DatasetKey, DatasetRegistry, Source, Variable,
};
use lfmkit::{AnnualSeries, Unit};
use std::fs;
use std::path::Path;

fn main() -> lfmkit::Result<()> {
    let demo = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/demo");
    let registry_dir = std::env::temp_dir().join("lfmkit_example_registry");
    let _ = fs::remove_dir_all(&registry_dir);
    let mut registry = DatasetRegistry::create(&registry_dir)?;

    let datasets = [
        ("labor_force_nac.csv", Variable::LaborForce, Source::Nac),
        ("cpi_inflation_user.csv", Variable::CpiInflation, Source::User),
        ("unemployment_nac.csv", Variable::Unemployment, Source::Nac),
        ("population_ipss.csv", Variable::Population, Source::Ipss),
    ];
    for (file, variable, source) in datasets {
        let text = fs::read_to_string(demo.join(file))?;
        let series = load_csv(
            std::io::Cursor::new(text),
            variable.natural_unit(),
            format!("{variable}, demo"),
        )?;
        let findings = registry.register(DatasetKey::new(variable, source), series, false)?;
        println!("{variable},{source}: {} findings", findings.len());
    }

    println!("\nregistry at {}", registry.root().display());
    for key in registry.keys() {
        let s = registry.get(key)?;
        println!("  {key}  {}:{}  {}", s.start_year(), s.end_year(), s.unit());
    }

    // validation finds what clean demo data doesn't show: a rate far out
    // of band (unit mistake) and a suspicious year-over-year jump
    let suspicious = AnnualSeries::new(
        2000,
        vec![0.02, 0.35, 0.03, 0.15],
        Unit::RatePerYear,
        "suspicious rate",
    )?;
    println!("\nfindings for a suspicious series:");
    for finding in validate(&suspicious) {
        println!("  {finding}");
    }

    Ok(())
}
