use std::path::Path;
use std::process::{Command, Output};

fn qtoric(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qtoric"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn value_after(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(key).map(|r| r.split_whitespace().next().unwrap().parse().unwrap()))
        .unwrap_or_else(|| panic!("no {key} in {text}"))
}

#[test]
fn gap_prints_closed_form_and_exact() {
    let o = qtoric(&["gap", "--d", "3", "--k", "2"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!((value_after(&s, "theoretical_gap ") - 3.0).abs() < 1e-9);
    assert!((value_after(&s, "exact_gap ") - 3.0).abs() < 1e-9);
}

#[test]
fn crossover_for_qutrits() {
    let o = qtoric(&["crossover", "--d", "3"]);
    assert!(o.status.success());
    let t = value_after(&stdout(&o), "T_c ");
    assert!((t - 1.0 / (4.0f64 / 3.0).ln()).abs() < 1e-10);
    let none = qtoric(&["crossover", "--d", "4"]);
    assert!(none.status.success());
    assert!(stdout(&none).contains("no crossover"));
}

#[test]
fn exit_codes() {
    assert_eq!(qtoric(&["decay", "--d", "1", "--k", "2", "--beta", "1"]).status.code(), Some(2));
    assert_eq!(qtoric(&["decay", "--k", "2", "--beta", "1"]).status.code(), Some(2));
    assert_eq!(qtoric(&["gap", "--d", "3", "--foo"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let exact = qtoric(&["decay", "--d", "3", "--k", "2", "--beta", "1", "--engine", "exact", "--out", out]);
    assert_eq!(exact.status.code(), Some(4));
    let reduced = qtoric(&["decay", "--d", "3", "--k", "3", "--beta", "1", "--out", out]);
    assert_eq!(reduced.status.code(), Some(4));
    let msg = String::from_utf8_lossy(&reduced.stderr);
    assert!(msg.contains("4096") && msg.contains("Monte Carlo"), "{msg}");
}

fn run_decay(out: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["decay", "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    qtoric(&args)
}

#[test]
fn decay_is_byte_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["--d", "3", "--k", "3", "--beta", "1", "--engine", "mc", "--trials", "3000", "--seed", "5"];
    assert!(run_decay(a.path(), &args).status.success());
    assert!(run_decay(b.path(), &args).status.success());
    let name = "decay_d3_k3_mc.csv";
    let x = std::fs::read(a.path().join(name)).unwrap();
    let y = std::fs::read(b.path().join(name)).unwrap();
    assert_eq!(x, y);
    let c = tempfile::tempdir().unwrap();
    let other = ["--d", "3", "--k", "3", "--beta", "1", "--engine", "mc", "--trials", "3000", "--seed", "6"];
    assert!(run_decay(c.path(), &other).status.success());
    assert_ne!(x, std::fs::read(c.path().join(name)).unwrap());
}

#[test]
fn manifest_echoes_effective_config() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_decay(dir.path(), &["--d", "3", "--k", "2", "--beta", "1", "--engine", "reduced"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!((value_after(&s, "ratio ") - 1.0).abs() < 0.02, "{s}");
    let text = std::fs::read_to_string(dir.path().join("decay_d3_k2_reduced.json")).unwrap();
    let m: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(m["d"], 3);
    assert_eq!(m["k"], 2);
    assert_eq!(m["engine"], "reduced");
    assert_eq!(m["rates"]["0"], 1.0);
    assert!(m["git_describe"].is_string());
    assert!(m["timestamp"].is_string());
    let cfg = &m["config"];
    for key in ["d", "k", "beta", "rates", "engine", "trials", "times", "seed", "loop", "output_dir"] {
        assert!(!cfg[key].is_null(), "missing {key}");
    }
    assert_eq!(cfg["times"]["count"], 25);
    assert!(cfg["times"]["stop"].as_f64().unwrap() > 0.0);
    let csv = std::fs::read_to_string(dir.path().join("decay_d3_k2_reduced.csv")).unwrap();
    assert!(csv.starts_with("t,re_mean,im_mean,stderr\n"));
    assert_eq!(csv.lines().count(), 26);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let out = dir.path().join("out");
    let body = format!(
        r#"{{"d": 2, "k": 2, "beta": 0.5, "engine": "exact", "times": {{"start": 0.0, "stop": 0.1, "count": 9, "spacing": "linear"}}, "output_dir": {:?}}}"#,
        out.to_str().unwrap()
    );
    std::fs::write(&cfg, body).unwrap();
    let o = qtoric(&["decay", "--config", cfg.to_str().unwrap(), "--beta", "0.7"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let m: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("decay_d2_k2_exact.json")).unwrap()).unwrap();
    assert_eq!(m["beta"], 0.7);
    assert_eq!(m["config"]["times"]["count"], 9);
    std::fs::write(&cfg, r#"{"d": 2, "k": 2, "beta": 0.5, "engine": "slow"}"#).unwrap();
    assert_eq!(qtoric(&["decay", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn sweep_records_failed_rows() {
    let dir = tempfile::tempdir().unwrap();
    let o = qtoric(&[
        "sweep", "--axis", "k", "--values", "2,3", "--d", "3", "--beta", "1", "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let csv = std::fs::read_to_string(dir.path().join("sweep_k.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "k,gamma_fit,gamma_closed,stderr,error");
    assert!(rows[1].starts_with("2,") && rows[1].ends_with(','));
    assert!(rows[2].starts_with("3,,,,") && rows[2].contains("cap"));
}

#[test]
fn beta_sweep_curves_cross_near_the_predicted_temperature() {
    let dir = tempfile::tempdir().unwrap();
    let tc = 1.0 / (4.0f64 / 3.0).ln();
    let betas = [0.8 / tc, 0.9 / tc, 1.1 / tc, 1.2 / tc];
    let values = betas.map(|b| b.to_string()).join(",");
    let mut gamma = Vec::new();
    for d in ["2", "3"] {
        let out = dir.path().join(d);
        let o = qtoric(&[
            "sweep", "--axis", "beta", "--values", &values, "--d", d, "--k", "2", "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success());
        let csv = std::fs::read_to_string(out.join("sweep_beta.csv")).unwrap();
        let closed: Vec<f64> = csv.lines().skip(1).map(|l| l.split(',').nth(2).unwrap().parse().unwrap()).collect();
        gamma.push(closed);
    }
    // Below T_c qutrits decay faster; above it qubits do.
    for i in 0..4 {
        let qutrit_faster = gamma[1][i] > gamma[0][i];
        assert_eq!(qutrit_faster, betas[i] > 1.0 / tc, "row {i}");
    }
}

#[test]
fn verify_algebra_reports_json_lines() {
    let o = qtoric(&["verify", "algebra"]);
    assert!(o.status.success());
    let lines: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert!(lines.len() >= 11);
    for l in &lines {
        assert_eq!(l["passed"], true, "{l}");
        assert!(l["residual"].is_number() && l["tolerance"].is_number());
    }
    assert!(lines.iter().any(|l| l["check"] == "algebra.character_d12"));
}

#[test]
fn threads_env_is_validated() {
    let o = Command::new(env!("CARGO_BIN_EXE_qtoric"))
        .args(["gap", "--d", "2"])
        .env("QTORIC_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let ok = Command::new(env!("CARGO_BIN_EXE_qtoric"))
        .args(["gap", "--d", "2"])
        .env("QTORIC_THREADS", "2")
        .output()
        .unwrap();
    assert!(ok.status.success());
}
