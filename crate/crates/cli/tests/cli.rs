use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn tfwd(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tfwd"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn verify_passes_and_reports_checks() {
    let dir = tempfile::tempdir().unwrap();
    let o = tfwd(dir.path(), &["verify"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let report = json(&dir.path().join("verify_report.json"));
    let checks = report["checks"].as_array().unwrap();
    assert!(checks.len() >= 12);
    assert!(checks.iter().all(|c| c["passed"] == true && c["statement"].is_string()));
    assert!(dir.path().join("manifest.json").exists());
}

#[test]
fn injected_fault_fails_named_check() {
    let dir = tempfile::tempdir().unwrap();
    let o = tfwd(dir.path(), &["verify", "--inject-fault", "tfls_lower_bound"]);
    assert_eq!(o.status.code(), Some(1));
    let report = json(&dir.path().join("verify_report.json"));
    let failed: Vec<&str> = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["passed"] == false)
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert_eq!(failed, ["tfls_lower_bound"]);
}

#[test]
fn sweep_is_deterministic_across_job_counts() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = ["sweep", "--kappa", "1", "--Z-range", "20:100:20"];
    assert_eq!(tfwd(a.path(), &[&args[..], &["--jobs", "1"]].concat()).status.code(), Some(0));
    assert_eq!(tfwd(b.path(), &[&args[..], &["--jobs", "3"]].concat()).status.code(), Some(0));
    let csv_a = std::fs::read(a.path().join("sweep.csv")).unwrap();
    assert_eq!(csv_a, std::fs::read(b.path().join("sweep.csv")).unwrap());
    let header = String::from_utf8(csv_a).unwrap();
    assert!(header.starts_with("Z,kappa,upper,lower,E_TF,upper_gap_over_Z2,lower_gap_over_Z2,s0,lemma_l_gap,errors\n"));
    assert_eq!(header.lines().count(), 6);
    let s = json(&a.path().join("sweep.json"));
    let slope = s["fit"]["loglog_slope"].as_f64().unwrap();
    assert!(slope > 2.3 && slope < 2.5, "{slope}");
}

#[test]
fn sweep_single_charge_and_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(tfwd(dir.path(), &["sweep", "--kappa", "0.5", "--Z", "30"]).status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
    assert_eq!(tfwd(dir.path(), &["sweep", "--Z", "30"]).status.code(), Some(2));
    assert_eq!(tfwd(dir.path(), &["sweep", "--kappa", "1", "--Z-range", "5:1:1"]).status.code(), Some(2));
    assert_eq!(tfwd(dir.path(), &["frobnicate"]).status.code(), Some(2));
    assert_eq!(tfwd(dir.path(), &["tf-solve", "--Z", "-3"]).status.code(), Some(2));
}

fn stability(dir: &Path, nuclei: Value) -> (Output, Option<Value>) {
    let input = dir.join("nuclei.json");
    std::fs::write(&input, nuclei.to_string()).unwrap();
    let o = tfwd(dir, &["stability", "--nuclei", input.to_str().unwrap()]);
    let out = dir.join("stability.json");
    let cert = out.exists().then(|| json(&out));
    (o, cert)
}

#[test]
fn stability_certificates() {
    let dir = tempfile::tempdir().unwrap();
    let (o, _) = stability(dir.path(), serde_json::json!({ "centers": [], "charges": [], "c": 137.037, "N": 0 }));
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no nuclei"));

    let dir = tempfile::tempdir().unwrap();
    let (o, cert) = stability(dir.path(), serde_json::json!({ "centers": [[0, 0, 0]], "charges": [1], "c": 137.037, "N": 1 }));
    assert_eq!(o.status.code(), Some(0));
    let cert = cert.unwrap();
    assert_eq!(cert["feasible"], true);
    assert!((cert["z_max_paper"].as_f64().unwrap() - 229.9029613).abs() < 1e-6);

    let dir = tempfile::tempdir().unwrap();
    let (_, cert) = stability(dir.path(), serde_json::json!({ "centers": [[0, 0, 0]], "charges": [500], "c": 137.037, "N": 500 }));
    let cert = cert.unwrap();
    assert_eq!(cert["feasible"], false);
    assert!(!cert["violated"].as_array().unwrap().is_empty());
}

#[test]
fn specfun_table_columns() {
    let dir = tempfile::tempdir().unwrap();
    let o = tfwd(dir.path(), &["specfun-table", "--points", "11"]);
    assert_eq!(o.status.code(), Some(0));
    let table = std::fs::read_to_string(dir.path().join("specfun_table.csv")).unwrap();
    let mut lines = table.lines();
    assert_eq!(lines.next(), Some("t,f_sq,F,tf,X"));
    assert_eq!(lines.count(), 11);
    let manifest = json(&dir.path().join("manifest.json"));
    assert_eq!(manifest["config"]["command"], "specfun-table");
    assert!(manifest["outputs"].as_array().unwrap().iter().any(|p| p.as_str().unwrap().ends_with("specfun_table.csv")));
}

#[test]
fn solver_outputs_and_energy_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(tfwd(dir.path(), &["tfw-solve", "--Z", "10"]).status.code(), Some(0));
    let density = dir.path().join("tfw_density.csv");
    assert!(density.exists());
    let solve = json(&dir.path().join("tfw_solve.json"));
    assert_eq!(tfwd(dir.path(), &["energy", "--Z", "10", "--density", density.to_str().unwrap()]).status.code(), Some(0));
    let e = json(&dir.path().join("energy.json"));
    assert!(e.to_string().contains("total"));
    assert!(solve.is_object());

    assert_eq!(tfwd(dir.path(), &["tf-solve", "--Z", "10"]).status.code(), Some(0));
    let tf = json(&dir.path().join("tf_solve.json"));
    assert!(tf.to_string().contains("0.7687"));
}

#[test]
fn config_file_fills_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"Z": 12, "kappa": 0.5}"#).unwrap();
    let o = tfwd(dir.path(), &["sweep", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let manifest = json(&dir.path().join("manifest.json"));
    assert_eq!(manifest["config"]["Z"], 12.0);
    std::fs::write(&cfg, r#"{"Zed": 12}"#).unwrap();
    assert_eq!(tfwd(dir.path(), &["sweep", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}
