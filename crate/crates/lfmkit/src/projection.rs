//! Forward simulation: population projection × participation rate →
//! labor-force path → change rate → inflation and unemployment forecasts.
//!
//! The projected labor force is spliced onto the last observed level
//! (the anchor) so the first projected change rate measures the step
//! from history into the projection instead of a spurious jump.

use crate::error::{Error, Result};
use crate::ingestion::{DatasetKey, DatasetRegistry};
use crate::models::{GeneralizedModel, LaggedLinearModel, Model, TargetVariable};
use crate::series::{AnnualSeries, Unit};
use std::path::Path;

/// Labor-force participation: a single constant rate or a per-year path.
#[derive(Debug, Clone, PartialEq)]
pub enum Participation {
    Constant(f64),
    Path(AnnualSeries),
}

impl Participation {
    fn rate_for(&self, year: i32) -> Result<f64> {
        match self {
            Participation::Constant(r) => Ok(*r),
            Participation::Path(series) => series.value(year).ok_or(Error::YearOutOfRange {
                year,
                have_first: series.start_year(),
                have_last: series.end_year(),
            }),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Participation::Constant(r) => {
                if !(*r > 0.0 && *r <= 1.0) {
                    return Err(Error::ParticipationRange { rate: *r });
                }
            }
            Participation::Path(series) => {
                for (_, v) in series.iter() {
                    if !(v > 0.0 && v <= 1.0) {
                        return Err(Error::ParticipationRange { rate: v });
                    }
                }
            }
        }
        Ok(())
    }
}

/// Model producing the inflation path.
#[derive(Debug, Clone, PartialEq)]
pub enum InflationModel {
    Lagged(LaggedLinearModel),
    Generalized(GeneralizedModel),
}

impl InflationModel {
    fn lag(&self) -> usize {
        match self {
            InflationModel::Lagged(m) => m.lag,
            InflationModel::Generalized(_) => 0,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            InflationModel::Lagged(m) => format!(
                "inflation = {} + {} * dLF/LF (lag {})",
                m.free_term, m.slope, m.lag
            ),
            InflationModel::Generalized(m) => format!(
                "inflation = {} * dLF/LF + {} * UE + {}",
                m.d1, m.d2, m.d3
            ),
        }
    }

    /// Accepts only model kinds that can produce inflation.
    pub fn from_model(model: Model) -> Result<InflationModel> {
        match model {
            Model::Lagged(m) if m.target == TargetVariable::Inflation => {
                Ok(InflationModel::Lagged(m))
            }
            Model::Lagged(m) => Err(Error::Specification(format!(
                "lagged model targets {}, not inflation",
                m.target
            ))),
            Model::Generalized(m) => Ok(InflationModel::Generalized(m)),
            Model::Phillips(_) => Err(Error::Specification(
                "phillips models predict unemployment from inflation; they cannot drive the inflation forecast"
                    .to_string(),
            )),
        }
    }
}

/// Everything needed to run one forecast.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionScenario {
    pub population: AnnualSeries,
    pub participation: Participation,
    /// First and last forecast year (inclusive).
    pub horizon: (i32, i32),
    pub inflation_model: InflationModel,
    pub unemployment_model: LaggedLinearModel,
    /// Last observed labor-force level, dated `horizon.0 - 1`.
    pub anchor: (i32, f64),
}

impl ProjectionScenario {
    pub fn validate(&self) -> Result<()> {
        let (first, last) = self.horizon;
        if first > last {
            return Err(Error::InvalidWindow { first, last });
        }
        self.participation.validate()?;
        if self.anchor.0 != first - 1 {
            return Err(Error::Specification(format!(
                "anchor year {} must be the year before the horizon start {first}",
                self.anchor.0
            )));
        }
        if !self.anchor.1.is_finite() || self.anchor.1 <= 0.0 {
            return Err(Error::Specification(format!(
                "anchor labor force level {} must be positive",
                self.anchor.1
            )));
        }
        if self.unemployment_model.target != TargetVariable::Unemployment {
            return Err(Error::Specification(
                "unemployment model must target unemployment".to_string(),
            ));
        }
        // population must cover the horizon plus lag headroom
        let max_lag = self.inflation_model.lag().max(self.unemployment_model.lag) as i32;
        let needed_first = first - 1 - max_lag;
        let have = (self.population.start_year(), self.population.end_year());
        if needed_first < have.0 || last > have.1 {
            return Err(Error::WindowOutOfRange {
                first: needed_first,
                last,
                have_first: have.0,
                have_last: have.1,
            });
        }
        Ok(())
    }
}

/// Labor-force path over the horizon: `LF(t) = participation(t) × population(t)`.
pub fn project_labor_force(
    population: &AnnualSeries,
    participation: &Participation,
    horizon: (i32, i32),
) -> Result<AnnualSeries> {
    participation.validate()?;
    let pop = population.window(horizon.0, horizon.1)?;
    if let Some((year, v)) = pop.iter().find(|&(_, v)| v <= 0.0) {
        return Err(Error::NonPositiveLevel {
            label: population.label().to_string(),
            year,
            value: v,
        });
    }
    let mut values = Vec::with_capacity(pop.len());
    for (year, p) in pop.iter() {
        values.push(participation.rate_for(year)? * p);
    }
    AnnualSeries::new(horizon.0, values, Unit::Persons, "projected labor force")
}

/// Forecast output: three series sharing the horizon, plus the scenario
/// that generated them and free-text provenance notes.
#[derive(Debug, Clone)]
pub struct ForecastBundle {
    pub labor_force: AnnualSeries,
    pub inflation: AnnualSeries,
    pub unemployment: AnnualSeries,
    pub scenario: ProjectionScenario,
    pub provenance: Vec<String>,
}

/// Runs the scenario: projects the labor force, splices it onto the
/// anchor, and evaluates the unemployment and inflation models on the
/// resulting change rate. Unemployment is clamped into [0, 1]; any
/// clamping is recorded as a provenance note, never silent.
pub fn forecast(scenario: &ProjectionScenario) -> Result<ForecastBundle> {
    scenario.validate()?;
    let (first, last) = scenario.horizon;
    let anchor_year = first - 1;
    let max_lag = scenario
        .inflation_model
        .lag()
        .max(scenario.unemployment_model.lag) as i32;

    // labor force extended back far enough for the largest lag; the
    // anchor overrides the projection at the splice year
    let ext_first = anchor_year - max_lag;
    let mut ext_values = Vec::with_capacity((last - ext_first + 1) as usize);
    for year in ext_first..=last {
        let level = if year == anchor_year {
            scenario.anchor.1
        } else {
            let pop = scenario.population.value(year).ok_or(Error::YearOutOfRange {
                year,
                have_first: scenario.population.start_year(),
                have_last: scenario.population.end_year(),
            })?;
            scenario.participation.rate_for(year)? * pop
        };
        ext_values.push(level);
    }
    let ext_lf = AnnualSeries::new(ext_first, ext_values, Unit::Persons, "labor force, spliced")?;

    let mut provenance = vec![
        format!("unemployment model: {} + {} * dLF/LF (lag {})",
            scenario.unemployment_model.free_term,
            scenario.unemployment_model.slope,
            scenario.unemployment_model.lag),
        format!("inflation model: {}", scenario.inflation_model.describe()),
        match &scenario.participation {
            Participation::Constant(r) => format!("participation rate: constant {r}"),
            Participation::Path(p) => format!(
                "participation rate: path {}:{}",
                p.start_year(),
                p.end_year()
            ),
        },
        format!("anchor: labor force {} in {}", scenario.anchor.1, scenario.anchor.0),
    ];

    let ue_raw = scenario
        .unemployment_model
        .predict(&ext_lf, scenario.horizon)?;
    let mut clamped_years = Vec::new();
    let ue_values: Vec<f64> = ue_raw
        .iter()
        .map(|(year, v)| {
            if !(0.0..=1.0).contains(&v) {
                clamped_years.push(year);
                v.clamp(0.0, 1.0)
            } else {
                v
            }
        })
        .collect();
    if !clamped_years.is_empty() {
        provenance.push(format!(
            "unemployment clamped into [0, 1] in {} year(s), first in {}",
            clamped_years.len(),
            clamped_years[0]
        ));
    }
    let unemployment = AnnualSeries::new(
        first,
        ue_values,
        Unit::RatePerYear,
        "projected unemployment",
    )?;

    let inflation = match &scenario.inflation_model {
        InflationModel::Lagged(m) => m.predict(&ext_lf, scenario.horizon)?,
        InflationModel::Generalized(m) => m.predict(&ext_lf, &unemployment, scenario.horizon)?,
    }
    .with_label("projected inflation");

    let labor_force = ext_lf
        .window(first, last)?
        .with_label("projected labor force");

    Ok(ForecastBundle {
        labor_force,
        inflation,
        unemployment,
        scenario: scenario.clone(),
        provenance,
    })
}

// --- scenario files ------------------------------------------------------

/// Parsed scenario file, before registry keys and model references are
/// resolved.
///
/// Format: `key = value` lines, `#` comments. Keys: `population`
/// (dataset key), `participation` (rate) or `participation_file` (CSV
/// path), `horizon` (`first:last`), `inflation_model` /
/// `unemployment_model` (`preset:NAME` or a model file path), and either
/// `anchor_from` (dataset key; value taken at the year before the
/// horizon) or `anchor_year` + `anchor_level`.
#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub population: DatasetKey,
    pub participation: Option<f64>,
    pub participation_file: Option<String>,
    pub horizon: (i32, i32),
    pub inflation_model: String,
    pub unemployment_model: String,
    pub anchor_from: Option<DatasetKey>,
    pub anchor: Option<(i32, f64)>,
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<ScenarioConfig> {
        let mut fields = std::collections::BTreeMap::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: idx + 1,
                message: format!("expected 'key = value', found '{line}'"),
            })?;
            fields.insert(k.trim().to_string(), v.trim().to_string());
        }
        let get = |k: &str| -> Result<&String> {
            fields
                .get(k)
                .ok_or_else(|| Error::Specification(format!("scenario lacks field '{k}'")))
        };

        let horizon_text = get("horizon")?;
        let (a, b) = horizon_text.split_once(':').ok_or_else(|| {
            Error::Specification("horizon must be 'first:last'".to_string())
        })?;
        let horizon = (
            a.trim()
                .parse()
                .map_err(|_| Error::Specification("bad horizon start".to_string()))?,
            b.trim()
                .parse()
                .map_err(|_| Error::Specification("bad horizon end".to_string()))?,
        );

        let participation = match fields.get("participation") {
            Some(v) => Some(v.parse().map_err(|_| {
                Error::Specification(format!("participation '{v}' is not a number"))
            })?),
            None => None,
        };
        let participation_file = fields.get("participation_file").cloned();
        if participation.is_none() && participation_file.is_none() {
            return Err(Error::Specification(
                "scenario needs 'participation' or 'participation_file'".to_string(),
            ));
        }

        let anchor_from = match fields.get("anchor_from") {
            Some(v) => Some(v.parse()?),
            None => None,
        };
        let anchor = match (fields.get("anchor_year"), fields.get("anchor_level")) {
            (Some(y), Some(l)) => Some((
                y.parse()
                    .map_err(|_| Error::Specification("bad anchor_year".to_string()))?,
                l.parse()
                    .map_err(|_| Error::Specification("bad anchor_level".to_string()))?,
            )),
            (None, None) => None,
            _ => {
                return Err(Error::Specification(
                    "anchor_year and anchor_level must be given together".to_string(),
                ))
            }
        };
        if anchor_from.is_none() && anchor.is_none() {
            return Err(Error::Specification(
                "scenario needs 'anchor_from' or 'anchor_year'/'anchor_level'".to_string(),
            ));
        }

        Ok(ScenarioConfig {
            population: get("population")?.parse()?,
            participation,
            participation_file,
            horizon,
            inflation_model: get("inflation_model")?.clone(),
            unemployment_model: get("unemployment_model")?.clone(),
            anchor_from,
            anchor,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<ScenarioConfig> {
        let text = std::fs::read_to_string(path)?;
        ScenarioConfig::parse(&text)
    }

    /// Resolves dataset keys against `registry` and model references
    /// (`preset:NAME` or file paths relative to `base_dir`).
    pub fn resolve(
        &self,
        registry: &DatasetRegistry,
        base_dir: &Path,
    ) -> Result<ProjectionScenario> {
        let population = registry.get(self.population)?.clone();

        let participation = match (&self.participation, &self.participation_file) {
            (Some(rate), _) => Participation::Constant(*rate),
            (None, Some(file)) => {
                let path = base_dir.join(file);
                let text = std::fs::read_to_string(path)?;
                let series = crate::ingestion::load_csv(
                    std::io::Cursor::new(text),
                    Unit::RatePerYear,
                    "participation path",
                )?;
                Participation::Path(series)
            }
            (None, None) => unreachable!("checked at parse time"),
        };

        let inflation_model =
            InflationModel::from_model(resolve_model(&self.inflation_model, base_dir)?)?;
        let unemployment_model = match resolve_model(&self.unemployment_model, base_dir)? {
            Model::Lagged(m) if m.target == TargetVariable::Unemployment => m,
            _ => {
                return Err(Error::Specification(
                    "unemployment_model must be a lagged model targeting unemployment".to_string(),
                ))
            }
        };

        let anchor = match (self.anchor, self.anchor_from) {
            (Some(pair), _) => pair,
            (None, Some(key)) => {
                let series = registry.get(key)?;
                let year = self.horizon.0 - 1;
                let level = series.value(year).ok_or(Error::YearOutOfRange {
                    year,
                    have_first: series.start_year(),
                    have_last: series.end_year(),
                })?;
                (year, level)
            }
            (None, None) => unreachable!("checked at parse time"),
        };

        Ok(ProjectionScenario {
            population,
            participation,
            horizon: self.horizon,
            inflation_model,
            unemployment_model,
            anchor,
        })
    }
}

/// `preset:NAME` or a model file path (relative paths resolve against
/// `base_dir`).
pub fn resolve_model(reference: &str, base_dir: &Path) -> Result<Model> {
    if let Some(name) = reference.strip_prefix("preset:") {
        return crate::models::preset(name).ok_or_else(|| {
            Error::Specification(format!(
                "unknown preset '{name}' (available: {})",
                crate::models::PRESET_NAMES.join(", ")
            ))
        });
    }
    let raw = reference.strip_prefix("file:").unwrap_or(reference);
    let path = Path::new(raw);
    let full = if path.is_absolute() {
        path.to_path_buf()
    } else {
        base_dir.join(path)
    };
    Model::load(full)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::preset;

    fn flat_population(level: f64) -> AnnualSeries {
        AnnualSeries::new(2000, vec![level; 51], Unit::Persons, "population").unwrap()
    }

    fn ue_preset() -> LaggedLinearModel {
        match preset("paper-japan-ue").unwrap() {
            Model::Lagged(m) => m,
            _ => unreachable!(),
        }
    }

    fn cpi_preset() -> InflationModel {
        InflationModel::from_model(preset("paper-japan-cpi").unwrap()).unwrap()
    }

    #[test]
    fn labor_force_projection_scales_population() {
        let pop = flat_population(100_000_000.0);
        let lf =
            project_labor_force(&pop, &Participation::Constant(0.5), (2010, 2020)).unwrap();
        assert_eq!(lf.start_year(), 2010);
        assert_eq!(lf.len(), 11);
        assert!(lf.values().iter().all(|&v| v == 50_000_000.0));
    }

    #[test]
    fn labor_force_projection_published_magnitude() {
        // 128.6M persons at participation 0.521 is about 67M
        let pop = AnnualSeries::new(2010, vec![128.6e6], Unit::Persons, "pop").unwrap();
        let lf = project_labor_force(&pop, &Participation::Constant(0.521), (2010, 2010)).unwrap();
        assert!((lf.values()[0] - 67.0e6).abs() < 0.1e6);
    }

    #[test]
    fn labor_force_projection_rejects_bad_rate() {
        let pop = flat_population(1.0e8);
        for rate in [0.0, -0.1, 1.5] {
            let err =
                project_labor_force(&pop, &Participation::Constant(rate), (2010, 2020)).unwrap_err();
            assert!(matches!(err, Error::ParticipationRange { .. }));
        }
    }

    #[test]
    fn labor_force_projection_linear_population_keeps_relative_slope() {
        let pop_values: Vec<f64> = (0..11).map(|i| 1.0e8 - 1.0e6 * i as f64).collect();
        let pop = AnnualSeries::new(2010, pop_values, Unit::Persons, "pop").unwrap();
        let lf = project_labor_force(&pop, &Participation::Constant(0.5), (2010, 2020)).unwrap();
        let pop_rate = pop.change_rate().unwrap();
        let lf_rate = lf.change_rate().unwrap();
        for (a, b) in pop_rate.values().iter().zip(lf_rate.values()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_driver_forecast_reproduces_free_terms() {
        // flat population and a matching anchor: change rate is identically 0,
        // so the forecasts sit at the free terms of the presets
        let pop = flat_population(100_000_000.0);
        let scenario = ProjectionScenario {
            population: pop,
            participation: Participation::Constant(0.5),
            horizon: (2007, 2050),
            inflation_model: cpi_preset(),
            unemployment_model: ue_preset(),
            anchor: (2006, 50_000_000.0),
        };
        let bundle = forecast(&scenario).unwrap();
        assert!(bundle.unemployment.values().iter().all(|&v| v == 0.045));
        assert!(bundle.inflation.values().iter().all(|&v| v == 0.0007));
        assert!(bundle.labor_force.values().iter().all(|&v| v == 50_000_000.0));

        // bit stability across runs
        let again = forecast(&scenario).unwrap();
        for (a, b) in bundle.inflation.values().iter().zip(again.inflation.values()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn splice_continuity_no_artificial_jump() {
        // population consistent with the anchor: the first projected rate
        // equals the underlying population growth rate
        let g: f64 = -0.002;
        let pop_values: Vec<f64> = (0..51).map(|i| 1.0e8 * (1.0 + g).powi(i)).collect();
        let pop = AnnualSeries::new(2000, pop_values, Unit::Persons, "pop").unwrap();
        let anchor_level = 0.5 * pop.value(2006).unwrap();
        let scenario = ProjectionScenario {
            population: pop,
            participation: Participation::Constant(0.5),
            horizon: (2007, 2040),
            inflation_model: cpi_preset(),
            unemployment_model: ue_preset(),
            anchor: (2006, anchor_level),
        };
        let bundle = forecast(&scenario).unwrap();
        // UE(2007) = 0.045 - 1.5 * g, no first-year artifact
        let expected = 0.045 - 1.5 * g;
        assert!((bundle.unemployment.values()[0] - expected).abs() < 1e-12);
    }

    #[test]
    fn faster_labor_force_decline_raises_unemployment() {
        let mk = |decline: f64| {
            let pop_values: Vec<f64> = (0..51).map(|i| 1.0e8 * (1.0 - decline).powi(i)).collect();
            let pop = AnnualSeries::new(2000, pop_values, Unit::Persons, "pop").unwrap();
            let anchor_level = 0.5 * pop.value(2006).unwrap();
            ProjectionScenario {
                population: pop,
                participation: Participation::Constant(0.5),
                horizon: (2007, 2050),
                inflation_model: cpi_preset(),
                unemployment_model: ue_preset(),
                anchor: (2006, anchor_level),
            }
        };
        let slow = forecast(&mk(0.001)).unwrap();
        let fast = forecast(&mk(0.004)).unwrap();
        for (a, b) in slow.unemployment.values().iter().zip(fast.unemployment.values()) {
            assert!(b >= a);
        }
    }

    #[test]
    fn generalized_inflation_model_uses_unemployment_path() {
        let pop = flat_population(100_000_000.0);
        let gen = match preset("paper-japan-gen").unwrap() {
            Model::Generalized(m) => m,
            _ => unreachable!(),
        };
        let scenario = ProjectionScenario {
            population: pop,
            participation: Participation::Constant(0.5),
            horizon: (2007, 2010),
            inflation_model: InflationModel::Generalized(gen),
            unemployment_model: ue_preset(),
            anchor: (2006, 50_000_000.0),
        };
        let bundle = forecast(&scenario).unwrap();
        // r = 0, UE = 0.045 -> pi = 0.9 * 0.045 - 0.0392 = 0.00130
        let expected = 0.9 * 0.045 - 0.0392;
        for &v in bundle.inflation.values() {
            assert!((v - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn participation_path_overrides_constant_rate() {
        let pop = flat_population(100_000_000.0);
        // participation drifting down 0.521 -> 0.48 over the horizon
        let path_values: Vec<f64> = (0..45)
            .map(|i| 0.521 - 0.041 * i as f64 / 44.0)
            .collect();
        let path = AnnualSeries::new(2006, path_values, Unit::RatePerYear, "participation").unwrap();
        let lf = project_labor_force(&pop, &Participation::Path(path.clone()), (2007, 2050)).unwrap();
        assert!((lf.value(2007).unwrap() - 0.521 * 1.0e8).abs() < 0.002 * 1.0e8);
        assert!(lf.value(2050).unwrap() < lf.value(2007).unwrap());

        // a declining participation path lowers the labor force even with
        // flat population, so unemployment rises under the negative slope
        let scenario = ProjectionScenario {
            population: pop,
            participation: Participation::Path(path),
            horizon: (2007, 2050),
            inflation_model: cpi_preset(),
            unemployment_model: ue_preset(),
            anchor: (2006, 0.521 * 1.0e8),
        };
        let bundle = forecast(&scenario).unwrap();
        assert!(bundle.unemployment.value(2050).unwrap() > 0.045);
    }

    #[test]
    fn scenario_validation_catches_mistakes() {
        let pop = flat_population(1.0e8);
        let good = ProjectionScenario {
            population: pop.clone(),
            participation: Participation::Constant(0.5),
            horizon: (2007, 2050),
            inflation_model: cpi_preset(),
            unemployment_model: ue_preset(),
            anchor: (2006, 5.0e7),
        };
        assert!(good.validate().is_ok());

        let mut wrong_anchor = good.clone();
        wrong_anchor.anchor = (2000, 5.0e7);
        assert!(wrong_anchor.validate().is_err());

        let mut beyond_population = good.clone();
        beyond_population.horizon = (2007, 2051);
        assert!(matches!(
            beyond_population.validate(),
            Err(Error::WindowOutOfRange { .. })
        ));

        let mut wrong_ue_target = good.clone();
        wrong_ue_target.unemployment_model = match preset("paper-japan-cpi").unwrap() {
            Model::Lagged(m) => m,
            _ => unreachable!(),
        };
        assert!(wrong_ue_target.validate().is_err());
    }

    #[test]
    fn scenario_config_parses_and_reports_missing_fields() {
        let text = "\
# demo scenario
population = population,ipss
participation = 0.521
horizon = 2007:2050
inflation_model = preset:paper-japan-cpi
unemployment_model = preset:paper-japan-ue
anchor_year = 2006
anchor_level = 66500000
";
        let config = ScenarioConfig::parse(text).unwrap();
        assert_eq!(config.horizon, (2007, 2050));
        assert_eq!(config.participation, Some(0.521));
        assert_eq!(config.anchor, Some((2006, 66_500_000.0)));

        let missing = "population = population,ipss\nhorizon = 2007:2050\n";
        assert!(ScenarioConfig::parse(missing).is_err());
    }
}
