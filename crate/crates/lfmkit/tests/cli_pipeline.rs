//! Command-level integration tests: exit codes, error channels, and
//! round trips between `ingest`, `emit`, and the series operations.

use lfmkit::ingestion::load_csv;
use lfmkit::Unit;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Output;

struct Cli {
    registry: PathBuf,
    _dir: tempfile::TempDir,
}

impl Cli {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        Cli {
            registry: dir.path().join("registry"),
            _dir: dir,
        }
    }

    fn run(&self, args: &[&str]) -> Output {
        std::process::Command::new(env!("CARGO_BIN_EXE_lfmkit"))
            .args(args)
            .env("LFMKIT_REGISTRY", &self.registry)
            .output()
            .expect("failed to launch lfmkit")
    }

    fn workdir(&self) -> &Path {
        self._dir.path()
    }
}

fn write_csv(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

#[test]
fn ingest_then_list_shows_dataset() {
    let cli = Cli::new();
    let file = write_csv(
        cli.workdir(),
        "inflation.csv",
        "year,value\n2000,0.01\n2001,0.02\n2002,0.015\n",
    );
    let output = cli.run(&["ingest", &file, "--variable", "cpi_inflation", "--source", "user"]);
    assert!(output.status.success(), "stderr: {}", stderr(&output));
    assert!(stdout(&output).contains("registered cpi_inflation,user"));

    let output = cli.run(&["list"]);
    assert!(output.status.success());
    assert!(stdout(&output).contains("cpi_inflation,user  2000:2002"));
}

#[test]
fn ingest_gap_year_fails_naming_missing_year() {
    let cli = Cli::new();
    let file = write_csv(
        cli.workdir(),
        "gappy.csv",
        "year,value\n2000,0.01\n2002,0.03\n",
    );
    let output = cli.run(&["ingest", &file, "--variable", "cpi_inflation", "--source", "user"]);
    assert!(!output.status.success());
    assert!(
        stderr(&output).contains("2001"),
        "stderr does not name the missing year: {}",
        stderr(&output)
    );
}

#[test]
fn ingest_duplicate_key_requires_overwrite() {
    let cli = Cli::new();
    let file = write_csv(
        cli.workdir(),
        "ue.csv",
        "year,value\n2000,0.04\n2001,0.041\n",
    );
    let args = ["ingest", file.as_str(), "--variable", "unemployment", "--source", "nac"];
    assert!(cli.run(&args).status.success());

    let output = cli.run(&args);
    assert!(!output.status.success());
    assert!(stderr(&output).contains("already registered"));

    let mut with_overwrite: Vec<&str> = args.to_vec();
    with_overwrite.push("--overwrite");
    assert!(cli.run(&with_overwrite).status.success());
}

#[test]
fn ingest_malformed_line_reports_line_number() {
    let cli = Cli::new();
    let file = write_csv(
        cli.workdir(),
        "bad.csv",
        "year,value\n2000,0.01\n2001,oops\n",
    );
    let output = cli.run(&["ingest", &file, "--variable", "cpi_inflation", "--source", "user"]);
    assert!(!output.status.success());
    assert!(stderr(&output).contains("line 3"));
}

#[test]
fn emit_round_trips_through_ingest() {
    let cli = Cli::new();
    let file = write_csv(
        cli.workdir(),
        "lf.csv",
        "year,value\n2000,66000000\n2001,66300000\n2002,66100000\n",
    );
    assert!(cli
        .run(&["ingest", &file, "--variable", "labor_force", "--source", "nac"])
        .status
        .success());

    let emitted = cli.workdir().join("emitted.csv").to_string_lossy().into_owned();
    assert!(cli
        .run(&["emit", "--key", "labor_force,nac", "--out", &emitted])
        .status
        .success());

    // a second registry ingests the emitted file and produces the same series
    let cli2 = Cli::new();
    assert!(cli2
        .run(&["ingest", &emitted, "--variable", "labor_force", "--source", "nac"])
        .status
        .success());
    let reemitted = cli2.workdir().join("again.csv").to_string_lossy().into_owned();
    assert!(cli2
        .run(&["emit", "--key", "labor_force,nac", "--out", &reemitted])
        .status
        .success());
    assert_eq!(fs::read(&emitted).unwrap(), fs::read(&reemitted).unwrap());
}

#[test]
fn emit_json_and_csv_encode_identical_numbers() {
    let cli = Cli::new();
    let file = write_csv(
        cli.workdir(),
        "pi.csv",
        "year,value\n2000,0.0123456789012345\n2001,-0.00434\n2002,0.0007\n",
    );
    assert!(cli
        .run(&["ingest", &file, "--variable", "cpi_inflation", "--source", "user"])
        .status
        .success());

    let csv_out = cli.run(&["emit", "--key", "cpi_inflation,user"]);
    let json_out = cli.run(&["emit", "--key", "cpi_inflation,user", "--format", "json"]);
    assert!(csv_out.status.success() && json_out.status.success());

    let from_csv = load_csv(
        stdout(&csv_out).as_bytes(),
        Unit::RatePerYear,
        "from csv",
    )
    .unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&json_out)).unwrap();
    let from_json: Vec<f64> = parsed["values"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    assert_eq!(parsed["start_year"], 2000);
    assert_eq!(from_csv.values().len(), from_json.len());
    for (a, b) in from_csv.values().iter().zip(&from_json) {
        assert_eq!(a.to_bits(), b.to_bits());
    }
}

#[test]
fn emit_cumulative_matches_series_operation() {
    let cli = Cli::new();
    let body = "year,value\n2000,0.01\n2001,0.02\n2002,-0.01\n";
    let file = write_csv(cli.workdir(), "pi.csv", body);
    assert!(cli
        .run(&["ingest", &file, "--variable", "cpi_inflation", "--source", "user"])
        .status
        .success());

    let output = cli.run(&[
        "emit",
        "--key",
        "cpi_inflation,user",
        "--transform",
        "cumulative",
    ]);
    assert!(output.status.success());
    let emitted = load_csv(stdout(&output).as_bytes(), Unit::RatePerYear, "emitted").unwrap();

    let source = load_csv(body.as_bytes(), Unit::RatePerYear, "source").unwrap();
    let expected = source.cumulative(2000).unwrap();
    assert_eq!(emitted.start_year(), expected.start_year());
    for (a, b) in emitted.values().iter().zip(expected.values()) {
        assert_eq!(a.to_bits(), b.to_bits());
    }
}

#[test]
fn fit_on_planted_dataset_reports_planted_coefficients() {
    let cli = Cli::new();
    // labor force with known change rates, target built as 0.002 + 1.2 * r
    let mut lf = vec![(2000i32, 60_000_000.0f64)];
    let rates = [0.01, -0.004, 0.007, 0.002, -0.006, 0.009, 0.001, -0.003, 0.005, 0.004];
    for (i, r) in rates.iter().enumerate() {
        let prev = lf[i].1;
        lf.push((2001 + i as i32, prev * (1.0 + r)));
    }
    let lf_csv = format!(
        "year,value\n{}",
        lf.iter()
            .map(|(y, v)| format!("{y},{v}"))
            .collect::<Vec<_>>()
            .join("\n")
    );
    let target_csv = format!(
        "year,value\n{}",
        rates
            .iter()
            .enumerate()
            .map(|(i, r)| format!("{},{}", 2001 + i as i32, 0.002 + 1.2 * r))
            .collect::<Vec<_>>()
            .join("\n")
    );
    let lf_file = write_csv(cli.workdir(), "lf.csv", &lf_csv);
    let pi_file = write_csv(cli.workdir(), "pi.csv", &target_csv);
    assert!(cli
        .run(&["ingest", &lf_file, "--variable", "labor_force", "--source", "user"])
        .status
        .success());
    assert!(cli
        .run(&["ingest", &pi_file, "--variable", "cpi_inflation", "--source", "user"])
        .status
        .success());

    let model_path = cli.workdir().join("planted.model").to_string_lossy().into_owned();
    let output = cli.run(&[
        "fit",
        "--relation",
        "inflation-lf",
        "--max-lag",
        "2",
        "--out",
        &model_path,
    ]);
    assert!(output.status.success(), "stderr: {}", stderr(&output));

    let text = fs::read_to_string(&model_path).unwrap();
    let model = lfmkit::models::Model::from_key_value(&text).unwrap();
    let lfmkit::models::Model::Lagged(lagged) = model else {
        panic!("expected lagged model, got {text}");
    };
    assert!((lagged.slope - 1.2).abs() < 1e-9, "slope {}", lagged.slope);
    assert!((lagged.free_term - 0.002).abs() < 1e-9, "free {}", lagged.free_term);
    assert_eq!(lagged.lag, 0);
}

#[test]
fn fit_generalized_writes_three_coefficients() {
    let cli = Cli::new();
    // plant pi = 1.9 r + 0.4 ue - 0.01 on wiggly inputs
    let n = 20usize;
    let rates: Vec<f64> = (0..n)
        .map(|i| 0.012 * (0.9 * i as f64).sin() + 0.004 * (2.3 * i as f64).cos() - 0.002)
        .collect();
    let ue: Vec<f64> = (0..n)
        .map(|i| 0.035 + 0.010 * (0.45 * i as f64 + 1.0).sin())
        .collect();
    let mut lf = vec![60.0e6];
    for r in &rates {
        let prev = *lf.last().unwrap();
        lf.push(prev * (1.0 + r));
    }
    let to_csv = |start: i32, values: &[f64]| {
        format!(
            "year,value\n{}",
            values
                .iter()
                .enumerate()
                .map(|(i, v)| format!("{},{v}", start + i as i32))
                .collect::<Vec<_>>()
                .join("\n")
        )
    };
    let pi: Vec<f64> = rates
        .iter()
        .zip(&ue)
        .map(|(r, u)| 1.9 * r + 0.4 * u - 0.01)
        .collect();
    let lf_file = write_csv(cli.workdir(), "lf.csv", &to_csv(2000, &lf));
    let ue_file = write_csv(cli.workdir(), "ue.csv", &to_csv(2001, &ue));
    let pi_file = write_csv(cli.workdir(), "pi.csv", &to_csv(2001, &pi));
    for (file, variable) in [
        (&lf_file, "labor_force"),
        (&ue_file, "unemployment"),
        (&pi_file, "cpi_inflation"),
    ] {
        assert!(cli
            .run(&["ingest", file, "--variable", variable, "--source", "user"])
            .status
            .success());
    }

    let model_path = cli.workdir().join("gen.model").to_string_lossy().into_owned();
    let output = cli.run(&[
        "fit",
        "--relation",
        "generalized",
        "--estimator",
        "cumulative",
        "--out",
        &model_path,
    ]);
    assert!(output.status.success(), "stderr: {}", stderr(&output));

    let text = fs::read_to_string(&model_path).unwrap();
    assert!(text.contains("family = generalized"));
    let lfmkit::models::Model::Generalized(gen) =
        lfmkit::models::Model::from_key_value(&text).unwrap()
    else {
        panic!("expected generalized model");
    };
    assert!((gen.d1 - 1.9).abs() < 1e-3, "d1 {}", gen.d1);
    assert!((gen.d2 - 0.4).abs() < 1e-3, "d2 {}", gen.d2);
    assert!((gen.d3 + 0.01).abs() < 1e-4, "d3 {}", gen.d3);

    // ols is not defined for the three-coefficient relation
    let output = cli.run(&["fit", "--relation", "generalized", "--estimator", "ols"]);
    assert!(!output.status.success());
}

#[test]
fn project_with_preset_override() {
    let cli = Cli::new();
    let demo = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/demo");
    for (file, variable, source) in [
        ("labor_force_nac.csv", "labor_force", "nac"),
        ("population_ipss.csv", "population", "ipss"),
    ] {
        let path = demo.join(file).to_string_lossy().into_owned();
        assert!(cli
            .run(&["ingest", &path, "--variable", variable, "--source", source])
            .status
            .success());
    }
    let scenario = demo.join("japan_demo.scenario").to_string_lossy().into_owned();

    let default_out = cli.workdir().join("default.csv").to_string_lossy().into_owned();
    assert!(cli
        .run(&["project", &scenario, "--out", &default_out])
        .status
        .success());

    let gen_out = cli.workdir().join("gen.csv").to_string_lossy().into_owned();
    let output = cli.run(&[
        "project",
        &scenario,
        "--preset",
        "paper-japan-gen",
        "--out",
        &gen_out,
    ]);
    assert!(output.status.success(), "stderr: {}", stderr(&output));

    let default_text = fs::read_to_string(&default_out).unwrap();
    let gen_text = fs::read_to_string(&gen_out).unwrap();
    assert!(default_text.contains("year,labor_force,inflation,unemployment"));
    assert_ne!(default_text, gen_text, "preset override had no effect");

    // unknown preset is rejected loudly
    let output = cli.run(&["project", &scenario, "--preset", "nope"]);
    assert!(!output.status.success());
    assert!(stderr(&output).contains("unknown preset"));
}

#[test]
fn warnings_do_not_fail_ingest() {
    let cli = Cli::new();
    // 0.30 is outside the plausibility band: warning severity, exit 0
    let file = write_csv(
        cli.workdir(),
        "noisy.csv",
        "year,value\n2000,0.30\n2001,0.29\n",
    );
    let output = cli.run(&["ingest", &file, "--variable", "unemployment", "--source", "user"]);
    assert!(output.status.success());
    assert!(stdout(&output).contains("warning"));
    assert!(stdout(&output).contains("plausibility band"));
}

#[test]
fn scenario_with_participation_path_file() {
    let cli = Cli::new();
    let demo = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/demo");
    for (file, variable, source) in [
        ("labor_force_nac.csv", "labor_force", "nac"),
        ("population_ipss.csv", "population", "ipss"),
    ] {
        let path = demo.join(file).to_string_lossy().into_owned();
        assert!(cli
            .run(&["ingest", &path, "--variable", variable, "--source", source])
            .status
            .success());
    }

    // per-year participation path declining from the constant default
    let path_rows: String = (2006..=2050)
        .map(|y| format!("{y},{}\n", 0.521 - 0.0008 * (y - 2006) as f64))
        .collect();
    write_csv(
        cli.workdir(),
        "participation.csv",
        &format!("year,value\n{path_rows}"),
    );
    let scenario_text = "\
population = population,ipss
participation_file = participation.csv
horizon = 2007:2050
inflation_model = preset:paper-japan-cpi
unemployment_model = preset:paper-japan-ue
anchor_from = labor_force,nac
";
    let scenario = write_csv(cli.workdir(), "path.scenario", scenario_text);

    let out_path = cli.workdir().join("path.csv").to_string_lossy().into_owned();
    let output = cli.run(&["project", &scenario, "--out", &out_path]);
    assert!(output.status.success(), "stderr: {}", stderr(&output));
    let text = fs::read_to_string(&out_path).unwrap();
    assert!(text.contains("participation rate: path 2006:2050"));
}

#[test]
fn missing_registry_is_an_error() {
    let cli = Cli::new();
    let output = cli.run(&["list"]);
    assert!(!output.status.success());
}
