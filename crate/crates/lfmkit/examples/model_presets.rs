//! Published coefficient sets ship as named presets, so predictions and
//! projections run without fitting anything. Models serialize to a
//! plain-text key = value format that round-trips coefficients exactly.
//!
//! Run with: `cargo run -p lfmkit --example model_presets`

use lfmkit::models::{preset, Model, ModelInputs, PRESET_NAMES};
use lfmkit::{AnnualSeries, Unit};

fn main() -> lfmkit::Result<()> {
    println!("available presets:");
    for name in PRESET_NAMES {
        let model = preset(name).unwrap();
        println!("  {name:<16} {}  ({})", model.kind(), model.note());
    }

    // hand evaluation of the generalized preset at a single point
    let model = preset("paper-japan-gen").unwrap();
    let rate = AnnualSeries::new(2000, vec![0.01], Unit::RatePerYear, "dLF/LF")?;
    let unemployment = AnnualSeries::new(2000, vec![0.04], Unit::RatePerYear, "UE")?;
    let evaluation = model.evaluate(
        &ModelInputs {
            labor_force: Some(&rate),
            unemployment: Some(&unemployment),
            ..Default::default()
        },
        (2000, 2000),
        None,
    )?;
    println!(
        "\npaper-japan-gen at r = 0.01, UE = 0.04:  inflation = {}",
        evaluation.predicted.values()[0]
    );

    // plain-text serialization round trip
    let text = model.to_key_value();
    println!("\nserialized form:\n{text}");
    let reloaded = Model::from_key_value(&text)?;
    assert_eq!(reloaded, model);
    println!("parse of serialized text reproduces the model exactly");

    Ok(())
}
