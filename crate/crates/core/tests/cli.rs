use std::fs;
use std::path::Path;
use std::process::Command;

use dynsync::cli::{list_presets, preset, run_experiment, validate_schema, ExperimentConfig, PRESET_NAMES};
use dynsync::Error;
use serde_json::{json, Value};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dynsync"))
}

fn small_dense() -> Value {
    json!({
        "name": "small",
        "model": { "kind": "spin1", "n_sites": 2, "omegas": [1.0, 1.0], "anisotropy": 0.5, "dephasing_rate": 1.0 },
        "initial_state": { "random_product": { "seed": 3 } },
        "grid": { "t_start": 0.0, "t_end": 10.0, "n_steps": 200 },
        "observables": [{ "name": "sx2" }, { "name": "sz", "sites": [1] }],
        "analyses": [
            { "kind": "pearson", "window": 2.0 },
            { "kind": "witnesses" },
            { "kind": "fourier", "observable": "sx2_0" }
        ],
        "seed": 3
    })
}

fn write_config(dir: &Path, v: &Value) -> std::path::PathBuf {
    let p = dir.join("config.json");
    fs::write(&p, serde_json::to_string_pretty(v).unwrap()).unwrap();
    p
}

#[test]
fn presets_round_trip_through_the_schema() {
    assert_eq!(list_presets().len(), PRESET_NAMES.len());
    for name in PRESET_NAMES {
        let p = preset(name).unwrap().unwrap();
        let v = serde_json::to_value(&p.config).unwrap();
        validate_schema(&v).unwrap_or_else(|e| panic!("{name}: {e}"));
        let back = ExperimentConfig::from_value(v).unwrap();
        assert_eq!(back, p.config, "{name}");
    }
    assert!(preset("nope").is_none());
}

#[test]
fn schema_rejects_unknown_fields() {
    let mut v = small_dense();
    v["colour"] = json!("blue");
    assert!(matches!(ExperimentConfig::from_value(v), Err(Error::Schema(_))));
    let mut v = small_dense();
    v["observables"][1]["sites"] = json!([5]);
    assert!(matches!(ExperimentConfig::from_value(v), Err(Error::Schema(_))));
    let mut v = small_dense();
    v["model"]["kind"] = json!("ising");
    assert!(matches!(ExperimentConfig::from_value(v), Err(Error::Schema(_))));
}

#[test]
fn empty_config_writes_only_the_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig::from_value(json!({
        "model": { "kind": "spin1", "n_sites": 2, "omegas": [1.0, 1.0], "anisotropy": 0.5, "dephasing_rate": 1.0 }
    }))
    .unwrap();
    let r = run_experiment(&cfg, dir.path(), None).unwrap();
    assert!(r.summary.is_none());
    let names: Vec<String> = fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    assert_eq!(names, vec!["manifest.json".to_string()]);
    let manifest: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], json!(0));
    assert!(manifest["code_version"].is_string());
}

#[test]
fn runs_are_byte_reproducible() {
    let cfg = ExperimentConfig::from_value(small_dense()).unwrap();
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let ra = run_experiment(&cfg, a.path(), None).unwrap();
    run_experiment(&cfg, b.path(), None).unwrap();
    let csvs: Vec<&String> = ra.files.iter().filter(|f| f.ends_with(".csv")).collect();
    assert!(csvs.len() >= 4);
    for f in csvs {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
    let header = fs::read_to_string(a.path().join("timeseries.csv")).unwrap();
    assert!(header.lines().next().unwrap().contains("sx2_0"));
    assert!(header.lines().next().unwrap().contains("sz_1"));
}

#[test]
fn trajectory_runs_report_stderr() {
    let mut v = small_dense();
    v["model"] = json!({
        "kind": "hubbard", "n_sites": 2, "interaction": 1.0, "omegas": [1.5, 1.5],
        "chem_potentials": [0.0, 0.0], "dephasing_rate": 2.5
    });
    v["randomize"] = json!([{ "field": "chem_potentials", "low": -1.0, "high": 1.0 }]);
    v["initial_state"] = json!({ "labels": ["left", "up"] });
    v["method"] = json!({ "kind": "trajectories", "n_traj": 16 });
    v["observables"] = json!([{ "name": "sx" }]);
    v["analyses"] = json!([]);
    let cfg = ExperimentConfig::from_value(v).unwrap();
    let (model, draws) = cfg.resolved_model();
    assert_eq!(draws.len(), 1);
    assert_eq!(draws[0].offsets.len(), 2);
    assert_ne!(model, cfg.model);
    let dir = tempfile::tempdir().unwrap();
    run_experiment(&cfg, dir.path(), None).unwrap();
    let ts = fs::read_to_string(dir.path().join("timeseries.csv")).unwrap();
    assert!(ts.lines().next().unwrap().contains("stderr"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = write_config(dir.path(), &small_dense());
    let st = bin().args(["validate", good.to_str().unwrap()]).output().unwrap();
    assert_eq!(st.status.code(), Some(0));

    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{ "model": { "kind": "spin1" }, "extra": 1 }"#).unwrap();
    assert_eq!(bin().args(["validate", bad.to_str().unwrap()]).status().unwrap().code(), Some(2));
    assert_eq!(bin().args(["run", bad.to_str().unwrap()]).status().unwrap().code(), Some(2));
    assert_eq!(bin().arg("frobnicate").status().unwrap().code(), Some(2));
    assert_eq!(bin().args(["preset", "nope"]).status().unwrap().code(), Some(2));
    let missing = dir.path().join("missing.json");
    assert_eq!(bin().args(["validate", missing.to_str().unwrap()]).status().unwrap().code(), Some(1));

    let out = dir.path().join("capped");
    let st = bin()
        .env("DYNSYNC_DENSE_CAP", "2")
        .args(["run", good.to_str().unwrap(), "--out", out.to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(3));

    let st = bin().args(["run", good.to_str().unwrap(), "--out", out.to_str().unwrap()]).status().unwrap();
    assert_eq!(st.code(), Some(0));
    assert!(out.join("manifest.json").exists());
    assert!(out.join("pearson.csv").exists());
}

#[test]
fn list_presets_output() {
    let out = bin().arg("list-presets").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in PRESET_NAMES {
        assert!(text.contains(name));
    }
    let fig7 = text.lines().skip_while(|l| !l.starts_with("fig7_smallN")).nth(1).unwrap();
    assert!(fig7.contains("reduced-scale substitute"));
    let fig6 = text.lines().find(|l| l.starts_with("fig6")).unwrap();
    assert!(fig6.contains("[0.0, 0.01, …, 0.1]"));
}

#[test]
fn preset_run_records_the_preset() {
    let dir = tempfile::tempdir().unwrap();
    let st = bin().args(["preset", "fig2a", "--out", dir.path().to_str().unwrap(), "--seed", "11"]).status().unwrap();
    assert_eq!(st.code(), Some(0));
    let manifest: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], json!(11));
    assert_eq!(manifest["preset"]["name"], json!("fig2a"));
    let summary: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["n_zero_modes"], json!(8));
    assert_eq!(summary["n_imaginary_modes"], json!(6));
}
