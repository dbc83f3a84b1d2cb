//! End-to-end tests of the `fuzzycast` binary: every subcommand against the
//! bundled sample dataset, plus exit-code and idempotency contracts.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .parent()
        .unwrap()
        .parent()
        .unwrap()
        .to_path_buf()
}

fn sample_data() -> PathBuf {
    workspace_root().join("data/sample_faostat.csv")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fuzzycast"))
        .args(args)
        .current_dir(workspace_root())
        .output()
        .expect("binary runs")
}

fn run_ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "command {args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn read(path: &Path) -> String {
    fs::read_to_string(path).unwrap_or_else(|e| panic!("read {}: {e}", path.display()))
}

struct TempOut {
    dir: tempfile::TempDir,
}

impl TempOut {
    fn new() -> Self {
        Self {
            dir: tempfile::TempDir::new().unwrap(),
        }
    }

    fn path(&self) -> &Path {
        self.dir.path()
    }

    fn arg(&self) -> String {
        self.path().to_str().unwrap().to_string()
    }

    fn join(&self, name: &str) -> PathBuf {
        self.path().join(name)
    }
}

fn data_arg() -> String {
    sample_data().to_str().unwrap().to_string()
}

#[test]
fn ingest_writes_series_table_and_is_idempotent() {
    let out = TempOut::new();
    let stdout = run_ok(&["ingest", "--data", &data_arg(), "--out", &out.arg()]);
    assert!(stdout.contains("1961-2017"));
    let first = read(&out.join("series.csv"));
    assert!(first.starts_with("year,agri_losses,agri_production,"));
    assert_eq!(first.lines().count(), 58);

    run_ok(&["ingest", "--data", &data_arg(), "--out", &out.arg()]);
    let second = read(&out.join("series.csv"));
    assert_eq!(first, second, "re-run must be byte-identical");
}

#[test]
fn ingest_rejects_missing_column_with_its_name() {
    let out = TempOut::new();
    let bad_csv = out.join("bad.csv");
    fs::write(&bad_csv, "Area,Item,Year,Value\nX,Wheat,2000,1\n").unwrap();
    let result = run(&[
        "ingest",
        "--data",
        bad_csv.to_str().unwrap(),
        "--out",
        &out.arg(),
    ]);
    assert!(!result.status.success());
    let stderr = String::from_utf8_lossy(&result.stderr);
    assert!(stderr.contains("Element"), "stderr: {stderr}");
}

#[test]
fn train_is_deterministic_and_validates_config() {
    let out_a = TempOut::new();
    let out_b = TempOut::new();
    let common = [
        "train",
        "--data",
        &data_arg(),
        "--seed",
        "7",
        "--epochs",
        "10",
        "--model",
        "anfis",
    ];
    run_ok(&[&common[..], &["--out", &out_a.arg()]].concat());
    run_ok(&[&common[..], &["--out", &out_b.arg()]].concat());
    assert_eq!(
        read(&out_a.join("models.json")),
        read(&out_b.join("models.json"))
    );
    assert_eq!(
        read(&out_a.join("train_history.csv")),
        read(&out_b.join("train_history.csv"))
    );

    let bad = run(&[
        "train",
        "--data",
        &data_arg(),
        "--out",
        &out_a.arg(),
        "--split-ratio",
        "1.5",
    ]);
    assert!(!bad.status.success());
    assert!(String::from_utf8_lossy(&bad.stderr).contains("split_ratio"));
}

#[test]
fn evaluate_report_cross_checks_with_dumped_predictions() {
    let out = TempOut::new();
    run_ok(&[
        "train",
        "--data",
        &data_arg(),
        "--out",
        &out.arg(),
        "--epochs",
        "20",
    ]);
    run_ok(&[
        "evaluate",
        "--data",
        &data_arg(),
        "--out",
        &out.arg(),
        "--epochs",
        "20",
    ]);

    let report = read(&out.join("eval_report.csv"));
    assert_eq!(
        report.lines().next().unwrap(),
        "target,phase,n,rmse,r2_paper,r2_standard"
    );

    let predictions = read(&out.join("predictions.csv"));
    assert_eq!(
        predictions.lines().next().unwrap(),
        "target,year,actual,predicted"
    );

    // Recompute RMSE per target from the dumped predictions and compare.
    for line in report.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        let (target, n, rmse): (&str, usize, f64) = (
            fields[0],
            fields[2].parse().unwrap(),
            fields[3].parse().unwrap(),
        );
        let mut sse = 0.0;
        let mut count = 0usize;
        for row in predictions.lines().skip(1) {
            let cells: Vec<&str> = row.split(',').collect();
            if cells[0] == target {
                let actual: f64 = cells[2].parse().unwrap();
                let predicted: f64 = cells[3].parse().unwrap();
                sse += (actual - predicted) * (actual - predicted);
                count += 1;
            }
        }
        assert_eq!(count, n);
        let recomputed = (sse / n as f64).sqrt();
        assert!(
            (recomputed - rmse).abs() <= 1e-9 * rmse.max(1.0),
            "{target}: report {rmse} vs recomputed {recomputed}"
        );
    }
}

#[test]
fn evaluate_train_phase_on_reachable_data_reports_near_perfect_r2() {
    // In exogenous mode the consequent solve interpolates the training rows
    // (more coefficients than samples), so the train-phase fit is exact up
    // to numerics.
    let out = TempOut::new();
    run_ok(&[
        "train",
        "--data",
        &data_arg(),
        "--out",
        &out.arg(),
        "--epochs",
        "10",
    ]);
    run_ok(&[
        "evaluate",
        "--data",
        &data_arg(),
        "--out",
        &out.arg(),
        "--epochs",
        "10",
        "--phase",
        "train",
    ]);
    let report = read(&out.join("eval_report.csv"));
    for line in report.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields[1], "train");
        let r2_paper: f64 = fields[4].parse().unwrap();
        assert!(r2_paper > 0.999999, "{line}");
    }
}

#[test]
fn sweep_emits_four_tables_with_protocol_row_structure() {
    let out = TempOut::new();
    run_ok(&[
        "sweep",
        "--data",
        &data_arg(),
        "--out",
        &out.arg(),
        "--epochs",
        "8",
        "--seed",
        "5",
    ]);

    for (file, setting, values) in [
        ("sweep_mlp_train.csv", "neurons", ["10", "14", "18"]),
        ("sweep_mlp_test.csv", "neurons", ["10", "14", "18"]),
        (
            "sweep_anfis_train.csv",
            "mf_type",
            ["triangular", "trapezoidal", "gbell"],
        ),
        (
            "sweep_anfis_test.csv",
            "mf_type",
            ["triangular", "trapezoidal", "gbell"],
        ),
    ] {
        let table = read(&out.join(file));
        let lines: Vec<&str> = table.lines().collect();
        assert_eq!(lines[0], format!("target,{setting},rmse,best"), "{file}");
        // Three settings per target, two targets.
        assert_eq!(lines.len(), 1 + 6, "{file}");
        for target in ["livestock_production", "agri_production"] {
            let rows: Vec<&&str> = lines[1..]
                .iter()
                .filter(|l| l.starts_with(target))
                .collect();
            assert_eq!(rows.len(), 3, "{file} {target}");
            for (row, value) in rows.iter().zip(values) {
                assert_eq!(row.split(',').nth(1).unwrap(), value);
            }
            // Winner flag marks exactly the minimum-RMSE row.
            let best_rows: Vec<&&&str> = rows.iter().filter(|r| r.ends_with("true")).collect();
            assert_eq!(best_rows.len(), 1, "{file} {target}");
            let min_rmse = rows
                .iter()
                .map(|r| r.split(',').nth(2).unwrap().parse::<f64>().unwrap())
                .fold(f64::INFINITY, f64::min);
            let flagged: f64 = best_rows[0].split(',').nth(2).unwrap().parse().unwrap();
            assert_eq!(flagged, min_rmse, "{file} {target}");
        }
    }
}

#[test]
fn sweep_parallel_and_serial_agree_row_for_row() {
    let parallel = TempOut::new();
    let serial = TempOut::new();
    run_ok(&[
        "sweep",
        "--data",
        &data_arg(),
        "--out",
        &parallel.arg(),
        "--epochs",
        "6",
    ]);
    run_ok(&[
        "sweep",
        "--serial",
        "--data",
        &data_arg(),
        "--out",
        &serial.arg(),
        "--epochs",
        "6",
    ]);
    for file in [
        "sweep_mlp_train.csv",
        "sweep_mlp_test.csv",
        "sweep_anfis_train.csv",
        "sweep_anfis_test.csv",
    ] {
        assert_eq!(
            read(&parallel.join(file)),
            read(&serial.join(file)),
            "{file}"
        );
    }
}

#[test]
fn forecast_labels_thirteen_years_after_the_data() {
    let out = TempOut::new();
    run_ok(&[
        "train",
        "--data",
        &data_arg(),
        "--out",
        &out.arg(),
        "--epochs",
        "10",
        "--feature-mode",
        "autoregressive",
        "--mfs-per-input",
        "1",
    ]);
    run_ok(&[
        "forecast",
        "--data",
        &data_arg(),
        "--out",
        &out.arg(),
        "--horizon",
        "13",
        "--feature-mode",
        "autoregressive",
        "--mfs-per-input",
        "1",
    ]);
    let forecast = read(&out.join("forecast.csv"));
    let lines: Vec<&str> = forecast.lines().collect();
    assert_eq!(lines[0], "year,target,value,model,mf_or_neurons,seed");
    for target in ["livestock_production", "agri_production"] {
        let rows: Vec<&&str> = lines[1..]
            .iter()
            .filter(|l| l.split(',').nth(1) == Some(target))
            .collect();
        assert_eq!(rows.len(), 13, "{target}");
        let years: Vec<i32> = rows
            .iter()
            .map(|r| r.split(',').next().unwrap().parse().unwrap())
            .collect();
        assert_eq!(years, (2018..=2030).collect::<Vec<_>>(), "{target}");
        for row in rows {
            let value: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
            assert!(value.is_finite());
        }
    }
}

#[test]
fn forecast_refuses_exogenous_bundles() {
    let out = TempOut::new();
    run_ok(&[
        "train",
        "--data",
        &data_arg(),
        "--out",
        &out.arg(),
        "--epochs",
        "5",
        "--feature-mode",
        "exogenous",
    ]);
    let result = run(&["forecast", "--data", &data_arg(), "--out", &out.arg()]);
    assert!(!result.status.success());
    let stderr = String::from_utf8_lossy(&result.stderr);
    assert!(stderr.contains("autoregressive"), "stderr: {stderr}");
}

#[test]
fn plot_emits_wellformed_svg_with_one_polyline_per_series() {
    let out = TempOut::new();
    run_ok(&[
        "train",
        "--data",
        &data_arg(),
        "--out",
        &out.arg(),
        "--epochs",
        "10",
        "--feature-mode",
        "autoregressive",
        "--mfs-per-input",
        "1",
    ]);
    run_ok(&[
        "forecast",
        "--data",
        &data_arg(),
        "--out",
        &out.arg(),
        "--feature-mode",
        "autoregressive",
        "--mfs-per-input",
        "1",
    ]);
    let forecast_csv = out.join("forecast.csv");
    run_ok(&["plot", forecast_csv.to_str().unwrap()]);

    let svg_text = read(&out.join("forecast.svg"));
    let doc = roxmltree::Document::parse(&svg_text).expect("well-formed XML");
    let polylines: Vec<_> = doc
        .descendants()
        .filter(|n| n.has_tag_name("polyline"))
        .collect();
    // One per target series.
    assert_eq!(polylines.len(), 2);

    // Each polyline carries one point per forecast year.
    for node in polylines {
        let points = node.attribute("points").unwrap();
        assert_eq!(points.split(' ').count(), 13);
    }
}

#[test]
fn plot_rejects_unknown_csv_layout() {
    let out = TempOut::new();
    let weird = out.join("weird.csv");
    fs::write(&weird, "a,b\n1,2\n").unwrap();
    let result = run(&["plot", weird.to_str().unwrap()]);
    assert!(!result.status.success());
}

#[test]
fn config_file_drives_a_full_run() {
    let out = TempOut::new();
    let config_path = out.join("run.conf");
    fs::write(
        &config_path,
        format!(
            "data = {}\nout = {}\nseed = 3\nepochs = 8\nmodel = mlp\nneurons = 12\n",
            data_arg(),
            out.arg()
        ),
    )
    .unwrap();
    run_ok(&["train", "--config", config_path.to_str().unwrap()]);
    let bundle = read(&out.join("models.json"));
    assert!(bundle.contains("\"Mlp\""));

    // A flag overrides the same-named config key.
    run_ok(&[
        "train",
        "--config",
        config_path.to_str().unwrap(),
        "--model",
        "anfis",
        "--epochs",
        "5",
    ]);
    let bundle = read(&out.join("models.json"));
    assert!(bundle.contains("\"Anfis\""));
}
