use std::fs;
use std::path::Path;
use std::process::Command;

use serde_json::Value;

fn waveqed(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("waveqed").chain(args.iter().copied());
    let code = waveqed_cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

/// Data rows of a CSV file, skipping `#` lines and the column header.
fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(str::to_string).collect();
    let rows = lines
        .map(|l| l.split(',').map(|v| v.parse::<f64>().unwrap()).collect())
        .collect();
    (header, rows)
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap()
}

#[test]
fn mode_table_for_default_guide() {
    let (code, out, _) = waveqed(&["modes", "--a", "1.5", "--modes-max", "11"]);
    assert_eq!(code, 0);
    let (header, rows) = csv_rows(&out);
    assert_eq!(header, ["j", "m", "n", "cutoff"]);
    let cutoffs: Vec<f64> = rows.iter().map(|r| r[3]).collect();
    for (got, want) in cutoffs.iter().zip([3.78, 7.02, 9.65, 10.93]) {
        assert!((got - want).abs() < 0.01, "{got} vs {want}");
    }
    assert_eq!(rows.len(), 4);
}

#[test]
fn empty_mode_table_warns() {
    let (code, out, err) = waveqed(&["modes", "--modes-max", "3"]);
    assert_eq!(code, 0);
    assert!(csv_rows(&out).1.is_empty());
    assert!(err.contains("warning"));
}

#[test]
fn bad_geometry_is_a_config_error() {
    let (code, _, err) = waveqed(&["modes", "--a", "-1"]);
    assert_eq!(code, 2);
    assert!(err.contains("geometry"));
}

#[test]
fn unreachable_channel_is_a_domain_error() {
    let (code, _, _) = waveqed(&["spectrum", "--band", "1", "--input", "sms:2", "--omega-points", "7"]);
    assert_eq!(code, 3);
    let (code, _, _) = waveqed(&["spectrum", "--band", "1", "--input", "dark", "--omega-points", "7"]);
    assert_eq!(code, 3);
}

#[test]
fn fig2d_writes_four_spectra() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let (code, _, err) = waveqed(&["spectrum", "--preset", "fig2d", "--omega-points", "201", "--out", out]);
    assert_eq!(code, 0, "{err}");
    let mut names: Vec<_> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(
        names,
        ["fig2d_rabi0.csv", "fig2d_rabi1.5.csv", "fig2d_rabi1.csv", "fig2d_rabi2.csv"]
    );
    let text = fs::read_to_string(dir.path().join("fig2d_rabi1.csv")).unwrap();
    assert!(text.contains("\"rabi\":1.0"));
    assert!(text.contains("\"detuning\":0.5"));
    let (header, rows) = csv_rows(&text);
    assert_eq!(header, ["omega", "R_total", "T_total", "ReG", "ImG", "R_1", "T_1"]);
    assert_eq!(rows.len(), 201);
    for row in &rows {
        assert!((row[1] + row[2] - 1.0).abs() < 1e-12);
    }
}

#[test]
fn fig3a_dark_state_file_is_transparent() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let (code, _, err) = waveqed(&["spectrum", "--preset", "fig3a", "--omega-points", "301", "--out", out]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 5);
    let (header, rows) = csv_rows(&fs::read_to_string(dir.path().join("fig3a_dark.csv")).unwrap());
    let r = column(&header, "R_total");
    assert!(rows.iter().all(|row| row[r] < 1e-12));
    assert_eq!(header.len(), 5 + 4);
}

#[test]
fn multi_series_preset_needs_directory() {
    let (code, _, err) = waveqed(&["spectrum", "--preset", "fig3b"]);
    assert_eq!(code, 2);
    assert!(err.contains("--out"));
}

#[test]
fn identical_runs_are_byte_identical() {
    let args = [
        "spectrum",
        "--band",
        "2",
        "--rabi",
        "0.5",
        "--input",
        "equal",
        "--omega-points",
        "101",
        "--threads",
        "2",
    ];
    let (code, first, _) = waveqed(&args);
    assert_eq!(code, 0);
    let (_, second, _) = waveqed(&args);
    assert_eq!(first, second);
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(
        &cfg,
        r#"{"command": "spectrum", "band": 2, "rabi": 1.0, "input": "custom:1,1i", "omega_points": 11}"#,
    )
    .unwrap();
    let (code, out, err) = waveqed(&["spectrum", "--config", cfg.to_str().unwrap(), "--rabi", "0.5", "--format", "json"]);
    assert_eq!(code, 0, "{err}");
    let doc: Value = serde_json::from_str(&out).unwrap();
    let echo = &doc["metadata"]["config"];
    assert_eq!(echo["rabi"], 0.5);
    assert_eq!(echo["band"], 2);
    assert_eq!(echo["omega_points"], 11);
    let input = echo["input"].as_str().unwrap();
    assert!(input.starts_with("custom:0.7071067811865475"), "{input}");
    assert_eq!(doc["rows"].as_array().unwrap().len(), 11);
    assert_eq!(doc["metadata"]["version"], env!("CARGO_PKG_VERSION"));
    assert!(doc["metadata"]["truncation"]["modes"].is_array());
    assert!(doc["metadata"]["ctp"].is_array());
}

#[test]
fn config_file_typo_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"command": "spectrum", "rabbi": 1.0}"#).unwrap();
    let (code, _, _) = waveqed(&["spectrum", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 2);
    fs::write(&cfg, r#"{"command": "spectrum", "input": "custom:0,0"}"#).unwrap();
    let (code, _, _) = waveqed(&["spectrum", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 2);
}

#[test]
fn json_metadata_reports_exact_ctp() {
    let (code, out, _) = waveqed(&[
        "spectrum", "--rabi", "1", "--detuning", "0.5", "--omega-points", "21", "--format", "json",
    ]);
    assert_eq!(code, 0);
    let doc: Value = serde_json::from_str(&out).unwrap();
    let omega_e = doc["metadata"]["resolved"]["omega_e"].as_f64().unwrap();
    assert_eq!(doc["metadata"]["ctp"][0].as_f64().unwrap(), omega_e - 0.5);
}

#[test]
fn single_cell_phase_map() {
    let (code, out, _) = waveqed(&[
        "phase-map",
        "--rabi-min",
        "1",
        "--rabi-max",
        "1",
        "--rabi-points",
        "1",
        "--detuning-min",
        "0.5",
        "--detuning-max",
        "0.5",
        "--detuning-points",
        "1",
        "--format",
        "json",
    ]);
    assert_eq!(code, 0);
    let doc: Value = serde_json::from_str(&out).unwrap();
    let cells = doc["cells"].as_array().unwrap();
    assert_eq!(cells.len(), 1);
    assert_eq!(cells[0].as_array().unwrap().len(), 1);
    assert_eq!(cells[0][0]["ctp"], 1);
    assert_eq!(cells[0][0]["crp"], 2);
}

#[test]
fn fig2a_phase_structure() {
    let (code, out, err) = waveqed(&["phase-map", "--preset", "fig2a", "--rabi-points", "9", "--detuning-points", "21"]);
    assert_eq!(code, 0, "{err}");
    let (header, rows) = csv_rows(&out);
    let (rabi, delta, ctp, crp) = (
        column(&header, "rabi"),
        column(&header, "detuning"),
        column(&header, "ctp"),
        column(&header, "crp"),
    );
    let pi = std::f64::consts::PI;
    let (w1, w2) = (pi * (1.0f64 / 2.25 + 1.0).sqrt(), pi * 5f64.sqrt());
    let omega_e = 0.5 * (w1 + w2);
    assert_eq!(rows.len(), 9 * 21);
    for row in &rows {
        let inside = row[delta] > omega_e - w2 && row[delta] < omega_e - w1;
        let expected = if row[rabi] > 0.0 && inside { 1.0 } else { 0.0 };
        assert_eq!(row[ctp], expected, "{row:?}");
        if row[rabi] == 0.0 {
            assert!(row[crp] <= 1.0);
        }
        assert_eq!(row[crp], row[column(&header, "predicted_crp")]);
    }
}

#[test]
fn dressed_reports_levels_and_peaks() {
    let (code, out, _) = waveqed(&["dressed", "--rabi", "1", "--detuning", "0.5", "--format", "json"]);
    assert_eq!(code, 0);
    let doc: Value = serde_json::from_str(&out).unwrap();
    let omega_e = doc["metadata"]["resolved"]["omega_e"].as_f64().unwrap();
    let nu_plus = doc["dressed"]["nu_plus"].as_f64().unwrap();
    assert!((nu_plus - (omega_e + (-0.5 + 4.25f64.sqrt()) / 2.0)).abs() < 1e-12);
    assert_eq!(doc["peaks"]["crp_count"], 2);
}

#[test]
fn validate_passes_and_fault_fails() {
    let (code, out, _) = waveqed(&["validate", "--samples", "40"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("PASS unitarity"));
    let (code, out, _) = waveqed(&["validate", "--samples", "40", "--inject-fault", "flip-decay-sign"]);
    assert_eq!(code, 1);
    assert!(out.contains("FAIL unitarity"));
}

#[test]
fn tighter_quadrature_still_matches_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("tight.json");
    fs::write(&cfg, r#"{"command": "validate", "quad": {"abs_tol": 1e-10, "rel_tol": 1e-12, "max_subdivisions": 400}}"#)
        .unwrap();
    let (code, out, _) = waveqed(&["validate", "--config", cfg.to_str().unwrap(), "--samples", "20", "--format", "json"]);
    assert_eq!(code, 0);
    let doc: Value = serde_json::from_str(&out).unwrap();
    let pv = doc["report"]["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "pv-oracle")
        .unwrap();
    assert!(pv["worst"].as_f64().unwrap() < 1e-6);
    assert_eq!(doc["config"]["quad"]["abs_tol"], 1e-10);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_waveqed");
    let status = Command::new(bin).args(["modes"]).output().unwrap();
    assert_eq!(status.status.code(), Some(0));
    let status = Command::new(bin).args(["modes", "--a", "0"]).output().unwrap();
    assert_eq!(status.status.code(), Some(2));
    let status = Command::new(bin).args(["frobnicate"]).output().unwrap();
    assert_eq!(status.status.code(), Some(2));
    assert!(!Path::new("frobnicate").exists());
}
