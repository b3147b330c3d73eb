use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn harcontam(args: &[&str], cache: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_harcontam"))
        .args(args)
        .env("HARCONTAM_CACHE", cache)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn simulate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let first = json(&harcontam(&["simulate", "--spec", "M1", "-T", "200", "--seed", "4", "-o", a.to_str().unwrap()], dir.path()));
    json(&harcontam(&["simulate", "--spec", "m1", "--T", "200", "--seed", "4", "-o", b.to_str().unwrap()], dir.path()));
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(fs::read_to_string(&a).unwrap().lines().count(), 201);
    assert_eq!(first["T"], 200);
    assert_eq!(first["regime_means"].as_array().unwrap().len(), 2);
    assert!(first["d_star_true"].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn simulate_accepts_a_json_spec() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    fs::write(
        &spec,
        r#"{"label":"shift","regimes":[
            {"lambda_lo":0.0,"lambda_hi":0.5,"mean":{"form":"const","value":0.0},"ar":{"form":"const","value":0.0},"sigma":{"form":"const","value":1.0}},
            {"lambda_lo":0.5,"lambda_hi":1.0,"mean":{"form":"const","value":2.0},"ar":{"form":"const","value":0.0},"sigma":{"form":"const","value":1.0}}],
            "outliers":null}"#,
    )
    .unwrap();
    let out = dir.path().join("y.csv");
    let v = json(&harcontam(&["simulate", "--spec", spec.to_str().unwrap(), "-T", "100", "-o", out.to_str().unwrap()], dir.path()));
    assert!((v["d_star_true"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn unknown_model_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = harcontam(&["simulate", "--spec", "M9", "-T", "100", "-o", "/dev/null"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("M1"), "lists valid names: {msg}");
    assert_eq!(harcontam(&["lrv"], dir.path()).status.code(), Some(2));
}

#[test]
fn diagnose_writes_data_and_scripts() {
    let dir = tempfile::tempdir().unwrap();
    let y = dir.path().join("y.csv");
    json(&harcontam(&["simulate", "--spec", "M1", "-T", "200", "--seed", "1", "-o", y.to_str().unwrap()], dir.path()));
    let out = dir.path().join("diag");
    let v = json(&harcontam(
        &["diagnose", "-i", y.to_str().unwrap(), "-o", out.to_str().unwrap(), "--breaks", "0.1", "--u", "0.25,0.75"],
        dir.path(),
    ));
    for f in ["acf.csv", "periodogram.csv", "local_periodogram_u0.25.csv", "local_periodogram_u0.75.csv", "acf.gp", "periodogram.gp", "local_periodogram.gp"] {
        assert!(out.join(f).exists(), "{f} missing");
    }
    let acf = fs::read_to_string(out.join("acf.csv")).unwrap();
    assert!(acf.starts_with("lag,global,dk,corrected\n"));
    assert_eq!(acf.lines().count(), 22);
    assert_eq!(v["n_T"], 24);
    assert!(v["contamination"]["d_hat"].as_f64().unwrap() >= 0.0);
}

#[test]
fn lrv_reports_bandwidths() {
    let dir = tempfile::tempdir().unwrap();
    let y = dir.path().join("y.csv");
    json(&harcontam(&["simulate", "--spec", "M2", "-T", "200", "-o", y.to_str().unwrap()], dir.path()));
    let v = json(&harcontam(&["lrv", "-i", y.to_str().unwrap(), "--method", "dk"], dir.path()));
    for key in ["value", "method", "b1", "b2", "n_T", "diagnostics"] {
        assert!(v.get(key).is_some(), "{key} missing");
    }
    assert_eq!(v["method"], "dk");
    assert!(v["value"].as_f64().unwrap() > 0.0);
    let bad = harcontam(&["lrv", "-i", y.to_str().unwrap(), "--method", "parzen"], dir.path());
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn constant_series_is_a_numeric_failure() {
    let dir = tempfile::tempdir().unwrap();
    let y = dir.path().join("c.csv");
    fs::write(&y, format!("v\n{}", "1.5\n".repeat(120))).unwrap();
    let out = harcontam(&["ttest", "-i", y.to_str().unwrap(), "--method", "kvb"], dir.path());
    assert_eq!(out.status.code(), Some(4), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn malformed_input_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let y = dir.path().join("bad.csv");
    fs::write(&y, "v\n1.0\nabc\n2.0\n").unwrap();
    let out = harcontam(&["lrv", "-i", y.to_str().unwrap(), "--method", "a91"], dir.path());
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn dmtest_reads_loss_files() {
    let dir = tempfile::tempdir().unwrap();
    let losses = dir.path().join("l.csv");
    let mut body = String::from("model1,model2\n");
    for t in 0..80 {
        let a = ((t * 7919) % 13) as f64 / 13.0;
        body.push_str(&format!("{a},{}\n", a + 0.5 + ((t * 31) % 5) as f64 / 10.0));
    }
    fs::write(&losses, body).unwrap();
    let v = json(&harcontam(&["dmtest", "--losses", losses.to_str().unwrap(), "--method", "a91"], dir.path()));
    assert_eq!(v["T_n"], 80);
    assert_eq!(v["reject"], true);
    let sim = json(&harcontam(&["dmtest", "--design", "DM1", "--delta", "2", "--seed", "1", "--method", "nw87"], dir.path()));
    assert_eq!(sim["T_n"], 99);
}

#[test]
fn mc_writes_a_full_grid_and_comparison() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t2.csv");
    let cmp = dir.path().join("t2.json");
    let v = json(&harcontam(
        &[
            "mc", "--table", "table2", "--reps", "100", "--seed", "3", "--workers", "2",
            "--methods", "dk,a91,nw87", "-o", out.to_str().unwrap(),
        ],
        dir.path(),
    ));
    assert_eq!(v["reps"], 100);
    let csv = fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with("table,method,delta,reject_rate,mc_se,reps,base_seed\n"));
    assert_eq!(csv.lines().count(), 1 + 3 * 7);

    let v = json(&harcontam(
        &["mc", "--table", "table2", "--reps", "100", "-o", out.to_str().unwrap(), "--compare", cmp.to_str().unwrap()],
        dir.path(),
    ));
    assert_eq!(v["cells"], 49);
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(&cmp).unwrap()).unwrap();
    assert_eq!(report["cells"].as_array().unwrap().len(), 49);
    assert!(dir.path().join("fixed_b_cv_v1.csv").exists());

    let json_out = dir.path().join("t1.json");
    let v = json(&harcontam(
        &["mc", "--table", "table1", "--reps", "50", "--format", "json", "-o", json_out.to_str().unwrap()],
        dir.path(),
    ));
    assert_eq!(v["table"], "table1");
    let t1: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json_out).unwrap()).unwrap();
    assert_eq!(t1["rows"].as_array().unwrap().len(), 5);
}
