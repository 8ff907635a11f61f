//! Annual series basics: change rates, lags, windows, cumulative sums.
//!
//! Run with: `cargo run -p lfmkit --example series_algebra`

use lfmkit::{align, AnnualSeries, Unit};

fn main() -> lfmkit::Result<()> {
    // a small labor-force level series
    let lf = AnnualSeries::new(
        2000,
        vec![66.0e6, 66.5e6, 66.2e6, 66.9e6, 67.1e6],
        Unit::Persons,
        "labor force (example)",
    )?;
    println!("levels          {:?}", lf.values());

    // relative year-over-year change: starts one year later
    let rate = lf.change_rate()?;
    println!(
        "change rate     {:?}  (starts {})",
        rate.values()
            .iter()
            .map(|v| (v * 1e4).round() / 1e4)
            .collect::<Vec<_>>(),
        rate.start_year()
    );

    // lag_shift moves year labels only: x(t) becomes a regressor x(t - k)
    let lagged = rate.lag_shift(2);
    println!(
        "lagged by 2     same values, years {}:{}",
        lagged.start_year(),
        lagged.end_year()
    );

    // windows restrict, cumulative sums accumulate
    let window = rate.window(2002, 2004)?;
    let cumulative = window.cumulative(2002)?;
    println!("window 2002:04  {:?}", window.values());
    println!("cumulative      {:?}", cumulative.values());

    // align two series with different coverage
    let inflation = AnnualSeries::new(
        1998,
        vec![0.005, 0.002, -0.001, -0.003, -0.009, -0.003, 0.0],
        Unit::RatePerYear,
        "inflation (example)",
    )?;
    let pair = align(&rate, &inflation)?;
    println!(
        "aligned         {}:{} ({} overlapping years)",
        pair.common_window.0,
        pair.common_window.1,
        pair.x.len()
    );

    Ok(())
}
