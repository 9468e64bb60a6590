//! End-to-end checks of the command-line interface and its exit codes.

use std::process::Command;

fn spinkick() -> Command {
    Command::new(env!("CARGO_BIN_EXE_spinkick"))
}

fn tiny_config(dir: &std::path::Path) -> std::path::PathBuf {
    let text = format!(
        r#"{{
        "network": {{"builder": "power_law_chain", "n_sites": 4, "j0t": 0.2, "alpha": 1.51}},
        "partition": "half",
        "protocol": {{"eps_a": 0.03, "eps_b": 0.9}},
        "disorder": {{"wt": 6.283185307179586}},
        "schedule": {{"n_periods": 10}},
        "ensemble": {{"n_realizations": 2, "master_seed": 5}},
        "output": {{"dir": {:?}}}
    }}"#,
        dir.join("out")
    );
    let path = dir.join("config.json");
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn presets_lists_known_names() {
    let output = spinkick().arg("presets").output().unwrap();
    assert!(output.status.success());
    let text = String::from_utf8(output.stdout).unwrap();
    for name in ["fig1b-weak", "fig4-a151", "s5-ladder-rails"] {
        assert!(text.contains(name), "missing {name}");
    }
}

#[test]
fn run_writes_outputs_and_plot_script() {
    let dir = tempfile::tempdir().unwrap();
    let config = tiny_config(dir.path());
    let output = spinkick().args(["run", "--config"]).arg(&config).output().unwrap();
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    let out = dir.path().join("out");
    assert!(out.join("trace.csv").is_file());
    assert!(out.join("manifest.json").is_file());

    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["config"]["ensemble"]["n_realizations"], 2);
    assert_eq!(manifest["derived_seeds"].as_array().unwrap().len(), 2);

    let plot = spinkick().arg("plot").arg(&out).output().unwrap();
    assert!(plot.status.success());
    let script = std::fs::read_to_string(out.join("plot.gp")).unwrap();
    assert!(script.contains("M_A"));
}

#[test]
fn run_overrides_apply() {
    let dir = tempfile::tempdir().unwrap();
    let config = tiny_config(dir.path());
    let out = dir.path().join("override");
    let output = spinkick()
        .args(["run", "--config"])
        .arg(&config)
        .args(["--realizations", "3", "--periods", "4", "--seed", "9", "--jobs", "2", "--out"])
        .arg(&out)
        .args(["--store-realizations"])
        .output()
        .unwrap();
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["config"]["ensemble"]["master_seed"], 9);
    assert_eq!(manifest["derived_seeds"].as_array().unwrap().len(), 3);
    assert!(out.join("realizations/r0002.csv").is_file());
    // 4 periods at stride 1: initial record + 4
    let csv = std::fs::read_to_string(out.join("trace.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 5);
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"network": {}}"#).unwrap();
    let output = spinkick().args(["run", "--config"]).arg(&path).output().unwrap();
    assert_eq!(output.status.code(), Some(2));

    let output = spinkick().args(["run", "--preset", "no-such-preset"]).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
    let text = String::from_utf8(output.stderr).unwrap();
    assert!(text.contains("available"), "{text}");
}

#[test]
fn missing_config_file_exits_4() {
    let output = spinkick().args(["run", "--config", "/nonexistent/config.json"]).output().unwrap();
    assert_eq!(output.status.code(), Some(4));
}

#[test]
fn validate_eff_reports_json() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"{
        "network": {"builder": "power_law_chain", "n_sites": 4, "j0t": 0.072, "alpha": 1.51},
        "partition": "half",
        "protocol": {"eps_a": 0.03, "eps_b": 1.0},
        "disorder": {"wt": 6.283185307179586},
        "schedule": {"n_periods": 10},
        "ensemble": {"n_realizations": 1, "master_seed": 5}
    }"#;
    let path = dir.path().join("config.json");
    std::fs::write(&path, text).unwrap();
    let output = spinkick()
        .args(["validate-eff", "--config"])
        .arg(&path)
        .args(["--horizon", "20"])
        .output()
        .unwrap();
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    let report: serde_json::Value =
        serde_json::from_slice(&output.stdout).unwrap();
    assert!(report["operator_distance"].as_f64().unwrap() >= 0.0);
    assert!(report["commutators"]["h_b"].as_f64().unwrap() < 1e-12);
}

#[test]
fn validate_eff_requires_eps_b_one() {
    // fig1b presets have eps_b = 0.9; the full effective Hamiltonian
    // assumes eps_b = 1, so this is a configuration error.
    let output =
        spinkick().args(["validate-eff", "--preset", "fig1b-strong"]).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn jobs_flag_does_not_change_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let config = tiny_config(dir.path());
    let out1 = dir.path().join("j1");
    let out2 = dir.path().join("j4");
    for (out, jobs) in [(&out1, "1"), (&out2, "4")] {
        let status = spinkick()
            .args(["run", "--config"])
            .arg(&config)
            .args(["--jobs", jobs, "--out"])
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success());
    }
    let a = std::fs::read(out1.join("trace.csv")).unwrap();
    let b = std::fs::read(out2.join("trace.csv")).unwrap();
    assert_eq!(a, b);
}
