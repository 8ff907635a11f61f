//! The full pipeline on the bundled demo data: ingest into a registry,
//! fit every relation, write model files, and project to 2050 with the
//! freshly fitted models instead of the presets.
//!
//! The same flow is available from the command line; see the README.
//!
//! Run with: `cargo run -p lfmkit --example replication_pipeline`

use lfmkit::calibration::{calibrate, ModelFamily, ModelSpec, SearchGrid};
use lfmkit::ingestion::{load_csv, DatasetKey, DatasetRegistry, Source, Variable};
use lfmkit::models::{
    fit_phillips, lagged_from_calibration, Model, TargetVariable,
};
use lfmkit::projection::{forecast, InflationModel, Participation, ProjectionScenario};
use std::fs;
use std::path::Path;

fn main() -> lfmkit::Result<()> {
    let demo = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/demo");
    let work_dir = std::env::temp_dir().join("lfmkit_example_pipeline");
    let _ = fs::remove_dir_all(&work_dir);
    fs::create_dir_all(&work_dir)?;

    // 1. ingest
    let mut registry = DatasetRegistry::create(work_dir.join("registry"))?;
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
        registry.register(DatasetKey::new(variable, source), series, false)?;
    }
    println!("ingested {} datasets", registry.len());

    let labor_force = registry.get(DatasetKey::new(Variable::LaborForce, Source::Nac))?;
    let inflation = registry.get(DatasetKey::new(Variable::CpiInflation, Source::User))?;
    let unemployment = registry.get(DatasetKey::new(Variable::Unemployment, Source::Nac))?;
    let population = registry.get(DatasetKey::new(Variable::Population, Source::Ipss))?;
    let rate = labor_force.change_rate()?;
    let window = (1982, 2006);

    // 2. fit the three relations (cumulative matching for the links,
    //    lag-searched OLS for the trade-off)
    let phillips = fit_phillips(inflation, unemployment, window, 6)?;
    println!(
        "phillips:       UE = {:.4} * inflation + {:.4}   (r_squared {:.3})",
        phillips.slope, phillips.intercept, phillips.fit.r_squared
    );

    let cpi_spec = ModelSpec::single_driver(&rate, inflation, window, None)?;
    let cpi_fit = calibrate(
        &cpi_spec,
        &SearchGrid::default_for(ModelFamily::SingleDriver),
        0..=1,
    )?;
    let cpi_model = lagged_from_calibration(TargetVariable::Inflation, &cpi_fit, &cpi_spec)?;
    println!(
        "inflation-lf:   pi = {:.5} + {:.4} * dLF/LF (lag {})",
        cpi_model.free_term, cpi_model.slope, cpi_model.lag
    );

    let ue_spec = ModelSpec::single_driver(&rate, unemployment, window, None)?;
    let ue_fit = calibrate(
        &ue_spec,
        &SearchGrid::default_for(ModelFamily::SingleDriver),
        0..=1,
    )?;
    let ue_model = lagged_from_calibration(TargetVariable::Unemployment, &ue_fit, &ue_spec)?;
    println!(
        "unemployment-lf: UE = {:.5} + {:.4} * dLF/LF (lag {})",
        ue_model.free_term, ue_model.slope, ue_model.lag
    );

    let gen_spec = ModelSpec::generalized(&rate, unemployment, inflation, window, None)?;
    let gen_fit = calibrate(
        &gen_spec,
        &SearchGrid::default_for(ModelFamily::Generalized),
        0..=0,
    )?;
    println!(
        "generalized:    cumulative RMS {:.3e} at {:?}",
        gen_fit.objective, gen_fit.coefficients
    );

    // 3. persist the fitted models
    let cpi_path = work_dir.join("inflation_lf.model");
    Model::Lagged(cpi_model.clone()).save(&cpi_path)?;
    Model::Lagged(ue_model.clone()).save(work_dir.join("unemployment_lf.model"))?;
    Model::Phillips(phillips).save(work_dir.join("phillips.model"))?;
    println!("model files in {}", work_dir.display());

    // 4. project with the fitted models
    let anchor_year = 2006;
    let scenario = ProjectionScenario {
        population: population.clone(),
        participation: Participation::Constant(0.521),
        horizon: (2007, 2050),
        inflation_model: InflationModel::Lagged(cpi_model),
        unemployment_model: ue_model,
        anchor: (anchor_year, labor_force.value(anchor_year).unwrap()),
    };
    let bundle = forecast(&scenario)?;
    println!(
        "\nforecast with fitted models: inflation {:+.3}% -> {:+.3}%, unemployment {:.2}% -> {:.2}%",
        100.0 * bundle.inflation.value(2010).unwrap(),
        100.0 * bundle.inflation.value(2050).unwrap(),
        100.0 * bundle.unemployment.value(2010).unwrap(),
        100.0 * bundle.unemployment.value(2050).unwrap(),
    );

    Ok(())
}
