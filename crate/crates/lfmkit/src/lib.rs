//! lfmkit: labor-force driven inflation and unemployment modeling.
//!
//! The toolkit fits lagged linear links between the change rate of the
//! labor-force level, inflation, and unemployment; calibrates
//! coefficients by matching cumulative curves; and projects inflation
//! and unemployment decades ahead from population projections and a
//! participation rate.
//!
//! Modules follow the pipeline:
//!
//! * [`series`] — annual time-series type and its algebra,
//! * [`ingestion`] — CSV loading, plausibility screening, the multi-source
//!   dataset registry, and source-divergence reports,
//! * [`regression`] — OLS with diagnostics and integer-lag search,
//! * [`calibration`] — cumulative-curve RMS matching (grid + coordinate
//!   descent),
//! * [`models`] — the named relationships, published presets, and the
//!   plain-text model format,
//! * [`projection`] — population × participation → labor force →
//!   inflation/unemployment forecasts,
//! * [`cli`] — the `lfmkit` command-line pipeline.
//!
//! The `examples/` directory walks through each capability; start with
//! `series_algebra` and end with `replication_pipeline`.

pub mod calibration;
pub mod cli;
pub mod error;
pub mod ingestion;
pub mod models;
pub mod projection;
pub mod regression;
pub mod series;

pub use error::{Error, Result};
pub use series::{align, AnnualSeries, SeriesPair, Unit};
