use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use scrkernel::data::{load_csv, ColumnSelector};

fn scrkernel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scrkernel"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn out_arg(dir: &Path) -> String {
    dir.to_str().unwrap().to_string()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn motifs_for_three_units() {
    let dir = tempfile::tempdir().unwrap();
    let o = scrkernel(&[
        "motifs",
        "--n",
        "3",
        "--rho",
        "1",
        "--out",
        &out_arg(dir.path()),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );

    let text = fs::read_to_string(dir.path().join("motifs.csv")).unwrap();
    let mut lines = text.lines();
    let config = lines.next().unwrap();
    assert!(config.starts_with("# {") && config.contains("\"command\":\"motifs\""));
    let weights: Vec<f64> = lines
        .next()
        .unwrap()
        .split(',')
        .map(|x| x.parse().unwrap())
        .collect();
    assert_eq!(weights.len(), 3);
    for (w, e) in weights.iter().zip([4.0, 4.0, 1.0]) {
        assert!((w - e).abs() < 1e-12);
    }
    assert_eq!(lines.count(), 3);
    assert!(dir.path().join("motifs_fft.csv").exists());
}

#[test]
fn single_unit_motif() {
    let dir = tempfile::tempdir().unwrap();
    let o = scrkernel(&["motifs", "--n", "1", "--out", &out_arg(dir.path())]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(dir.path().join("motifs.csv")).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1].parse::<f64>().unwrap().abs(), 1.0);
}

#[test]
fn missing_output_directory_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope");
    let o = scrkernel(&["motifs", "--n", "3", "--out", &out_arg(&missing)]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn verify_defaults_pass() {
    let dir = tempfile::tempdir().unwrap();
    let o = scrkernel(&["verify", "--out", &out_arg(dir.path())]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let v = json(&dir.path().join("verify.json"));
    assert_eq!(v["result"]["passed"], true);
    assert_eq!(v["run"]["n"], 97);
    assert_eq!(v["run"]["version"], scrkernel::VERSION);
    for c in v["result"]["checks"].as_array().unwrap() {
        assert!(c["status"] != "fail", "{c}");
    }
}

#[test]
fn verify_below_unit_radius_is_informational() {
    let dir = tempfile::tempdir().unwrap();
    let o = scrkernel(&[
        "verify",
        "--n",
        "4",
        "--rho",
        "0.5",
        "--out",
        &out_arg(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&dir.path().join("verify.json"));
    let checks = v["result"]["checks"].as_array().unwrap();
    let toeplitz = checks.iter().find(|c| c["name"] == "q-toeplitz").unwrap();
    assert_eq!(toeplitz["status"], "expected-fail");
}

#[test]
fn verify_rejects_empty_reservoir() {
    let o = scrkernel(&["verify", "--n", "0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = scrkernel(&["verify", "--rho", "1.5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn area_sweep_rows_follow_the_grid() {
    let dir = tempfile::tempdir().unwrap();
    let o = scrkernel(&[
        "area-sweep",
        "--n",
        "97",
        "--rho-grid",
        "0.9,0.9812798473475446,1.0,1.0",
        "--out",
        &out_arg(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let path = dir.path().join("area.csv");
    let area = load_csv(&path, &ColumnSelector::from("area")).unwrap();
    assert_eq!(area.len(), 4);
    assert!(area[1] > area[0] && area[1] > area[2]);
    assert_eq!(area[2], area[3]);

    let o = scrkernel(&[
        "area-sweep",
        "--n",
        "5",
        "--rho-grid",
        "0.7",
        "--out",
        &out_arg(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        load_csv(&path, &ColumnSelector::from("area"))
            .unwrap()
            .len(),
        1
    );
}

#[test]
fn area_sweep_with_random_baseline() {
    let dir = tempfile::tempdir().unwrap();
    let o = scrkernel(&[
        "area-sweep",
        "--n",
        "11",
        "--rho-grid",
        "0.9,1",
        "--mode",
        "both",
        "--dump-coefficients",
        "--out",
        &out_arg(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let random = load_csv(
        &dir.path().join("area.csv"),
        &ColumnSelector::from("random_area"),
    )
    .unwrap();
    assert_eq!(random.len(), 2);
    let re = load_csv(
        &dir.path().join("area_coefficients.csv"),
        &ColumnSelector::from("re"),
    )
    .unwrap();
    assert!(!re.is_empty());
}

#[test]
fn forecast_on_synthetic_series() {
    let dir = tempfile::tempdir().unwrap();
    let o = scrkernel(&[
        "forecast",
        "--tau",
        "97",
        "--horizon",
        "24",
        "--length",
        "2000",
        "--seed",
        "5",
        "--dump-predictions",
        "--out",
        &out_arg(dir.path()),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let v = json(&dir.path().join("forecast.json"));
    let models = v["result"]["models"].as_array().unwrap();
    assert_eq!(models.len(), 3);
    let mse = |label: &str| {
        models.iter().find(|m| m["label"] == label).unwrap()["test_mse"]
            .as_f64()
            .unwrap()
    };
    let (a, b) = (mse("rmm-scr"), mse("rmm-fourier"));
    assert!((a - b).abs() <= 1e-8 * a.max(b));
    assert_eq!(v["run"]["tau"], 97);
    assert_eq!(v["result"]["config"]["seed"], 5);
    assert!(dir.path().join("predictions.csv").exists());
    assert!(dir.path().join("dataset.json").exists());

    // Same configuration, same bytes.
    let first = fs::read(dir.path().join("forecast.json")).unwrap();
    let again = tempfile::tempdir().unwrap();
    let o = scrkernel(&[
        "forecast",
        "--tau",
        "97",
        "--horizon",
        "24",
        "--length",
        "2000",
        "--seed",
        "5",
        "--out",
        &out_arg(again.path()),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let second = json(&again.path().join("forecast.json"));
    let first: serde_json::Value = serde_json::from_slice(&first).unwrap();
    assert_eq!(first["result"], second["result"]);
}

#[test]
fn forecast_on_csv_with_preset() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("ett.csv");
    let mut text = String::from("date,HUFL,OT\n");
    for i in 0..600 {
        let t = i as f64;
        text.push_str(&format!(
            "{i},{},{}\n",
            t.cos(),
            (t / 24.0 * std::f64::consts::TAU).sin() + 0.01 * (t * 1.3).sin()
        ));
    }
    fs::write(&data, text).unwrap();
    let o = scrkernel(&[
        "forecast",
        "--data",
        data.to_str().unwrap(),
        "--column",
        "OT",
        "--preset",
        "ett-12-4-4",
        "--n",
        "12",
        "--tau",
        "24",
        "--horizon",
        "12",
        "--out",
        &out_arg(dir.path()),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let v = json(&dir.path().join("forecast.json"));
    assert_eq!(v["run"]["preset"], "ett-12-4-4");
    assert_eq!(v["result"]["dataset"]["train"]["end"], 360);

    let o = scrkernel(&[
        "forecast",
        "--data",
        data.to_str().unwrap(),
        "--column",
        "XX",
        "--out",
        &out_arg(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("HUFL"));
}

#[test]
fn forecast_errors() {
    let dir = tempfile::tempdir().unwrap();
    let o = scrkernel(&[
        "forecast",
        "--data",
        "/nonexistent.csv",
        "--column",
        "OT",
        "--out",
        &out_arg(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(3));

    let o = scrkernel(&["forecast", "--length", "300", "--out", &out_arg(dir.path())]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("362"));

    let o = scrkernel(&[
        "forecast",
        "--models",
        "lstm",
        "--out",
        &out_arg(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn fourier_basis_at_any_sample_count() {
    let dir = tempfile::tempdir().unwrap();
    let o = scrkernel(&[
        "fourier-basis",
        "--tau",
        "500",
        "--n",
        "3",
        "--out",
        &out_arg(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let path = dir.path().join("fourier_basis.csv");
    let c = load_csv(&path, &ColumnSelector::from("cos_1")).unwrap();
    assert_eq!(c.len(), 500);
    let norm: f64 = c.iter().map(|x| x * x).sum();
    assert!((norm - 1.0).abs() < 1e-12);
}
