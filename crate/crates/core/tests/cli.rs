mod common;

use std::fs;
use std::path::{Path, PathBuf};

use common::{load_schema, validate};
use serde_json::{json, Value};
use tempfile::TempDir;
use thopf::cli::{main_with_args, read_field_csv, write_field_csv};
use thopf::presets;
use thopf::unfolding::{unfold, MIXED_MODE_THRESHOLD};
use thopf::ModelParams;

fn model_json(p: &ModelParams) -> Value {
    json!({ "d1": p.d1, "d2": p.d2, "a": p.a, "b": p.b, "l": p.l, "r": p.r, "tau": p.tau })
}

fn write_config(dir: &Path, name: &str, doc: &Value) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, serde_json::to_string_pretty(doc).unwrap()).unwrap();
    path
}

fn run(args: &[&str]) -> i32 {
    let mut all = vec!["thopf"];
    all.extend_from_slice(args);
    main_with_args(all)
}

fn run_cmd(cmd: &str, config: &Path, out: &Path, extra: &[&str]) -> i32 {
    let mut args = vec![cmd, "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args)
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn check_schema(kind: &str, path: &Path) -> Value {
    let doc = read_json(path);
    validate(&load_schema(kind), &doc, "$").unwrap_or_else(|e| panic!("{kind}: {e}"));
    assert_eq!(doc["schema_version"], "v1");
    assert_eq!(doc["kind"], kind);
    doc
}

fn baseline_config(dir: &Path) -> PathBuf {
    write_config(
        dir,
        "baseline.json",
        &json!({
            "model": model_json(&presets::baseline()),
            "sweep": { "r_range": [0.3, 0.6], "tau_range": [0.0, 8.0], "grid": [7, 9] }
        }),
    )
}

#[test]
fn analyze_baseline_report() {
    let tmp = TempDir::new().unwrap();
    let cfg = baseline_config(tmp.path());
    assert_eq!(run_cmd("analyze", &cfg, tmp.path(), &["--format", "csv"]), 0);
    assert!(tmp.path().join("turing.csv").exists() && tmp.path().join("hopf.csv").exists());
    assert_eq!(run_cmd("analyze", &cfg, tmp.path(), &[]), 0);
    let doc = check_schema("analyze", &tmp.path().join("analyze.json"));
    let rep = &doc["report"];
    assert_eq!(rep["turing"]["n_t"], 2);
    assert!((rep["turing"]["r_star"].as_f64().unwrap() - 0.4268).abs() < 5e-4);
    assert!((rep["bt"]["tau0"].as_f64().unwrap() - 6.5248).abs() < 5e-4);
    assert_eq!(doc["generated"]["tool"], "thopf");
}

#[test]
fn condition_failure_exits_two_and_still_reports() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "swap.json",
        &json!({ "model": model_json(&ModelParams::new(8.0, 0.5, 1.0, 0.1, 5.0, 1.0, 0.0)) }),
    );
    assert_eq!(run_cmd("analyze", &cfg, tmp.path(), &[]), 2);
    let doc = check_schema("analyze", &tmp.path().join("analyze.json"));
    assert_eq!(doc["report"]["a6"]["holds"], false);
    assert_eq!(doc["report"]["a6"]["d2_gt_d1"], false);
    assert!(doc["report"]["turing"].is_null());
}

#[test]
fn config_errors_exit_one() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    let mut model = model_json(&presets::baseline());
    model.as_object_mut().unwrap().remove("l");
    let missing = write_config(dir, "missing.json", &json!({ "model": model }));
    assert_eq!(run_cmd("analyze", &missing, dir, &[]), 1);

    let mut extra = model_json(&presets::baseline());
    extra["gamma"] = json!(1.0);
    let unknown = write_config(dir, "unknown.json", &json!({ "model": extra }));
    assert_eq!(run_cmd("analyze", &unknown, dir, &[]), 1);

    let empty = write_config(
        dir,
        "empty.json",
        &json!({
            "model": model_json(&presets::baseline()),
            "sweep": { "r_range": [0.3, 0.6], "tau_range": [0.0, 8.0], "grid": [0, 5] }
        }),
    );
    assert_eq!(run_cmd("sweep", &empty, dir, &[]), 1);
    assert_eq!(run_cmd("analyze", &dir.join("nope.json"), dir, &[]), 1);
    assert_eq!(run(&["analyze"]), 1, "--config is required");
    assert_eq!(run(&["--help"]), 0);
}

#[test]
fn degenerate_normal_form_exits_three() {
    let tmp = TempDir::new().unwrap();
    // critical Hopf wave number is 1 here
    let cfg = write_config(
        tmp.path(),
        "nh1.json",
        &json!({ "model": model_json(&ModelParams::new(0.1, 5.0, 1.0, 0.2, 5.0, 1.0, 0.0)) }),
    );
    assert_eq!(run_cmd("normalform", &cfg, tmp.path(), &[]), 3);
}

#[test]
fn normalform_and_classify_reports() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    let cfg = write_config(dir, "g1.json", &json!({ "model": model_json(&presets::mode_two()) }));
    assert_eq!(run_cmd("normalform", &cfg, dir, &["--format", "json"]), 0);
    let doc = check_schema("normalform", &dir.join("normalform.json"));
    let planar = &doc["report"]["planar"];
    assert!((planar["b0"].as_f64().unwrap() + 0.1257).abs() < 2e-3);
    assert!((planar["c0"].as_f64().unwrap() + 1.3132).abs() < 2e-3);
    assert_eq!(planar["case_tag"], "IVa");

    assert_eq!(
        run_cmd("classify", &cfg, dir, &["--alpha1", "-0.05", "--alpha2", "-0.05"]),
        0
    );
    let doc = check_schema("classify", &dir.join("classify.json"));
    assert_eq!(doc["report"]["classification"]["region"], "D2");
    assert_eq!(doc["report"]["classification"]["predicted"], json!(["nonconstant-SS"]));
}

#[test]
fn sweep_contains_critical_curves() {
    let tmp = TempDir::new().unwrap();
    let cfg = baseline_config(tmp.path());
    assert_eq!(run_cmd("sweep", &cfg, tmp.path(), &["--jobs", "2"]), 0);
    let doc = check_schema("sweep", &tmp.path().join("sweep.json"));
    let rep = &doc["report"];
    assert!((rep["turing_line"]["r"].as_f64().unwrap() - 0.4268).abs() < 5e-4);
    let bt = rep["bt_point"].as_array().unwrap();
    assert!((bt[0].as_f64().unwrap() - 0.4268).abs() < 5e-4);
    assert!((bt[1].as_f64().unwrap() - 6.5248).abs() < 5e-4);
    assert!((rep["turing_hopf_point"]["tau"].as_f64().unwrap() - 0.7014).abs() < 5e-4);
    assert!(!rep["hopf_curves"].as_array().unwrap().is_empty());

    let mut reader = csv::Reader::from_path(tmp.path().join("sweep.csv")).unwrap();
    assert_eq!(reader.headers().unwrap(), vec!["r", "tau", "label", "status"]);
    assert_eq!(reader.records().count(), 7 * 9);

    assert_eq!(run_cmd("sweep", &cfg, tmp.path(), &["--format", "csv"]), 0);
    let curves = fs::read_to_string(tmp.path().join("curves.csv")).unwrap();
    assert!(curves.lines().any(|l| l.starts_with("turing,0.426")));
    assert!(curves.lines().any(|l| l.starts_with("bt,0.426") && l.contains(",6.524")));
}

#[test]
fn outputs_are_byte_identical_across_runs_and_job_counts() {
    let tmp = TempDir::new().unwrap();
    let cfg = baseline_config(tmp.path());
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for (out, jobs) in [(&a, "1"), (&b, "3")] {
        for cmd in ["analyze", "normalform", "sweep"] {
            assert_eq!(run_cmd(cmd, &cfg, out, &["--jobs", jobs]), 0, "{cmd}");
        }
        assert_eq!(run_cmd("analyze", &cfg, out, &["--format", "csv"]), 0);
    }
    for name in ["analyze.json", "normalform.json", "sweep.json", "sweep.csv", "turing.csv", "hopf.csv"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
}

#[test]
fn simulate_d2_reports_mode_two() {
    let (_, pu) = unfold(&presets::mode_two(), MIXED_MODE_THRESHOLD).unwrap();
    let crit = pu.critical.unwrap();
    let p = presets::mode_two()
        .with_r(crit.r_star - 0.05)
        .with_tau(crit.tau_star - 0.05);
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "d2.json",
        &json!({
            "model": model_json(&p),
            "sim": {
                "nx": 50,
                "t_end": 600.0,
                "init": { "kind": "equilibrium-offset-sine", "amplitude": 0.01, "wavenumber": 0.1, "sign": 1.0 }
            }
        }),
    );
    assert_eq!(run_cmd("simulate", &cfg, tmp.path(), &[]), 0);
    let doc = check_schema("simulate", &tmp.path().join("simulate.json"));
    let diag = &doc["report"]["diagnostics"];
    assert_eq!(diag["dominant_mode"], 2);

    let (x, t, u) = read_field_csv(&tmp.path().join("u.csv")).unwrap();
    assert_eq!(x.len(), 50);
    assert_eq!(u.len(), t.len());
    let dt = doc["report"]["plan"]["dt"].as_f64().unwrap();
    assert!((t.last().unwrap() - 600.0).abs() <= 0.5 * dt + 1e-9);
}

#[test]
fn field_csv_round_trip() {
    let tmp = TempDir::new().unwrap();
    let path = tmp.path().join("f.csv");
    let x = vec![0.1, 0.35, 1.0 / 3.0];
    let t = vec![0.0, 0.25, 1e-9];
    let field = vec![vec![1.0, 2.5e-7, 0.1 + 0.2], vec![3.0, -0.0, 7.125], vec![f64::MIN_POSITIVE, 1e300, 2.0]];
    write_field_csv(&path, &x, &t, &field).unwrap();
    let (x2, t2, f2) = read_field_csv(&path).unwrap();
    assert_eq!((x, t, field), (x2, t2, f2));
}

#[test]
fn shipped_configs_load() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/configs");
    let cases = [
        ("baseline.json", None),
        ("mode_two.json", Some((presets::mode_two(), [-0.05, -0.05]))),
        ("mixed_modes.json", Some((presets::mixed_modes(), [-0.05, -0.02]))),
    ];
    for (name, shifted) in cases {
        let cfg = thopf::cli::RunConfig::load(&dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"));
        if let Some((p, alpha)) = shifted {
            let crit = unfold(&p, MIXED_MODE_THRESHOLD).unwrap().1.critical.unwrap();
            assert!((cfg.model.r - crit.r_star - alpha[0]).abs() < 1e-6, "{name}");
            assert!((cfg.model.tau - crit.tau_star - alpha[1]).abs() < 1e-6, "{name}");
            assert!(cfg.sim.is_some());
        }
    }
}
