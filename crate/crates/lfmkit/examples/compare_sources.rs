//! Quantify how far two versions of the "same" statistic diverge:
//! national-accounts vs US-definition labor force, two unemployment
//! definitions, and CPI vs GDP deflator.
//!
//! Run with: `cargo run -p lfmkit --example compare_sources`

use lfmkit::ingestion::{
    load_csv, CompareTransform, DatasetKey, DatasetRegistry, DivergenceReport, Source, Variable,
};
use std::fs;
use std::path::Path;

fn print_report(title: &str, report: &DivergenceReport) {
    println!("{title}");
    println!(
        "  window {}:{}  max |diff| {:.5} (in {})  mean |diff| {:.5}  corr {:.4}",
        report.common_window.0,
        report.common_window.1,
        report.max_abs_diff,
        report.max_abs_diff_year,
        report.mean_abs_diff,
        report.correlation
    );
}

fn main() -> lfmkit::Result<()> {
    let demo = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/demo");
    let registry_dir = std::env::temp_dir().join("lfmkit_example_compare");
    let _ = fs::remove_dir_all(&registry_dir);
    let mut registry = DatasetRegistry::create(&registry_dir)?;

    let datasets = [
        ("labor_force_nac.csv", Variable::LaborForce, Source::Nac),
        ("labor_force_us_def.csv", Variable::LaborForce, Source::UsDef),
        ("unemployment_nac.csv", Variable::Unemployment, Source::Nac),
        ("unemployment_us_def.csv", Variable::Unemployment, Source::UsDef),
        ("cpi_inflation_user.csv", Variable::CpiInflation, Source::User),
        ("gdp_deflator_oecd.csv", Variable::GdpDeflator, Source::Oecd),
    ];
    for (file, variable, source) in datasets {
        let text = fs::read_to_string(demo.join(file))?;
        let series = load_csv(
            std::io::Cursor::new(text),
            variable.natural_unit(),
            format!("{variable}, demo {source}"),
        )?;
        registry.register(DatasetKey::new(variable, source), series, false)?;
    }

    let lf_nac = DatasetKey::new(Variable::LaborForce, Source::Nac);
    let lf_us = DatasetKey::new(Variable::LaborForce, Source::UsDef);
    print_report(
        "labor force levels, NAC vs US definition:",
        &registry.compare_sources(lf_nac, lf_us, CompareTransform::Levels)?,
    );
    print_report(
        "labor force change rates, NAC vs US definition:",
        &registry.compare_sources(lf_nac, lf_us, CompareTransform::ChangeRate)?,
    );

    let ue_nac = DatasetKey::new(Variable::Unemployment, Source::Nac);
    let ue_us = DatasetKey::new(Variable::Unemployment, Source::UsDef);
    print_report(
        "unemployment, two definitions:",
        &registry.compare_sources(ue_nac, ue_us, CompareTransform::Levels)?,
    );

    let cpi = DatasetKey::new(Variable::CpiInflation, Source::User);
    let deflator = DatasetKey::new(Variable::GdpDeflator, Source::Oecd);
    print_report(
        "CPI inflation vs GDP deflator:",
        &registry.compare_sources(cpi, deflator, CompareTransform::Levels)?,
    );

    Ok(())
}
