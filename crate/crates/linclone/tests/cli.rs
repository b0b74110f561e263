use std::process::Command;

use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["linclone"];
    argv.extend_from_slice(args);
    let code = linclone::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn report(args: &[&str]) -> Value {
    let (code, out, err) = run(args);
    assert_eq!(code, 0, "{err}");
    serde_json::from_str(&out).unwrap()
}

fn validator() -> jsonschema::Validator {
    let schema: Value = serde_json::from_str(linclone::report::SCHEMA).unwrap();
    jsonschema::validator_for(&schema).unwrap()
}

#[test]
fn coherent_clone_report() {
    let r = report(&["clone", "--coherent", "1+0i", "--eta", "1"]);
    let f = r["fidelities"]["clone1"].as_f64().unwrap();
    assert!((f - 2.0 / 3.0).abs() < 1e-12);
    assert_eq!(r["config"]["g"], 1.0);
    assert_eq!(r["seed"], Value::Null);
    assert_eq!(r["timing"], Value::Null);
}

#[test]
fn thermal_and_squeezed_clone_reports() {
    let r = report(&["clone", "--thermal", "1"]);
    assert!((r["fidelities"]["clone1"].as_f64().unwrap() - 0.977732).abs() < 1e-6);
    let r = report(&["clone", "--squeezed", "1", "--eta", "0.5"]);
    let expected = linclone_core::squeezed_clone_fidelity(1.0, 0.5).unwrap().value();
    assert!((r["fidelities"]["clone2"].as_f64().unwrap() - expected).abs() < 1e-12);
}

#[test]
fn every_report_matches_schema() {
    let v = validator();
    let cases: &[&[&str]] = &[
        &["clone", "--vacuum"],
        &["clone", "--squeezed", "0.4", "--squeeze-phase", "1", "--alpha", "0.3-0.2i", "--tau1", "0.3", "--tau2", "0.7", "--g", "0.9"],
        &["--timing", "clone", "--thermal", "0.5", "--eta", "0.6", "--prop", "paper"],
        &["average", "--ensemble", "amplitude", "--width", "2"],
        &["average", "--ensemble", "squeezing", "--width", "0.5", "--squeezing-weight", "printed"],
        &["average", "--ensemble", "tophat", "--width", "1"],
        &["average", "--ensemble", "halfgauss", "--width", "1", "--eta", "0.75"],
        &["optimize-gain", "--sigma-a2", "3"],
        &["optimize-gain", "--sigma-a2", "3", "--tau1", "0.5", "--eta", "0.8"],
        &["mc", "--coherent", "0.5", "--n", "3000", "--seed", "1"],
        &["verify"],
    ];
    for args in cases {
        let r = report(args);
        let errors: Vec<String> = v.iter_errors(&r).map(|e| format!("{e} at {}", e.instance_path)).collect();
        assert!(errors.is_empty(), "{args:?}: {errors:?}");
    }
}

#[test]
fn schema_rejects_missing_keys() {
    let mut r = report(&["clone", "--vacuum"]);
    r.as_object_mut().unwrap().remove("fidelities");
    assert!(!validator().is_valid(&r));
}

#[test]
fn optimal_gain_branch_two() {
    let r = report(&["optimize-gain", "--sigma-a2", "1", "--eta", "1"]);
    let f = r["optimum"]["fidelity"].as_f64().unwrap();
    assert!((f - 2.0 / (5.0 - 2.0 * 2f64.sqrt())).abs() < 1e-9);
    assert!((f - 0.920997).abs() < 1e-5);
}

#[test]
fn monte_carlo_is_reproducible_across_thread_counts() {
    let a = run(&["mc", "--coherent", "1", "--n", "20000", "--seed", "7"]);
    let b = run(&["--threads", "1", "mc", "--coherent", "1", "--n", "20000", "--seed", "7"]);
    let c = run(&["--threads", "3", "mc", "--coherent", "1", "--n", "20000", "--seed", "7"]);
    assert_eq!(a.0, 0);
    assert_eq!(a.1, b.1);
    assert_eq!(a.1, c.1);
    let d = run(&["mc", "--coherent", "1", "--n", "20000", "--seed", "8"]);
    assert_ne!(a.1, d.1);
}

#[test]
fn mc_rejects_linear_gain_rule() {
    assert_eq!(run(&["mc", "--vacuum", "--n", "10", "--prop", "paper"]).0, 2);
}

#[test]
fn sweep_is_byte_identical_across_runs_and_threads() {
    let args = ["sweep", "--quantity", "sigma_s", "--lo", "0.05", "--hi", "2", "--steps", "9"];
    let a = run(&args);
    let mut threaded = vec!["--threads", "1"];
    threaded.extend_from_slice(&args);
    let b = run(&threaded);
    assert_eq!(a.0, 0);
    assert_eq!(a.1, b.1);
    assert_eq!(a.1, run(&args).1);
    assert!(a.1.starts_with("sigma_s,F_eta_1,F_eta_0.75,F_eta_0.5\n"));
    assert!(!a.1.contains('\r'));
    assert_eq!(a.1.lines().count(), 10);
}

#[test]
fn sweep_cells_carry_nine_significant_digits() {
    let (_, out, _) = run(&["sweep", "--quantity", "mu_N", "--lo", "0.1", "--hi", "3", "--steps", "4"]);
    for line in out.lines().skip(1) {
        for cell in line.split(',') {
            let digits = cell.trim_start_matches(['-', '0', '.']).chars().filter(char::is_ascii_digit).count();
            assert_eq!(digits, 9, "{cell}");
        }
    }
}

#[test]
fn sweep_writes_to_output_and_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a/b.csv");
    let p = path.to_str().unwrap();
    let (code, out, _) = run(&["sweep", "--quantity", "N", "--lo", "0", "--hi", "1", "--steps", "3", "--output", p]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    assert!(std::fs::read_to_string(&path).unwrap().starts_with("N,"));
    let d = dir.path().to_str().unwrap();
    run(&["sweep", "--quantity", "bigN", "--lo", "0.1", "--hi", "1", "--steps", "3", "--out-dir", d]);
    assert!(dir.path().join("sweep_bigN.csv").exists());
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# defaults\neta = 0.5\nprop = paper\ntau2=0.6\n").unwrap();
    let c = cfg.to_str().unwrap();
    let r = report(&["--config", c, "clone", "--vacuum", "--eta", "0.75"]);
    assert_eq!(r["config"]["eta"], 0.75);
    assert_eq!(r["config"]["prop"], "paper");
    assert_eq!(r["config"]["tau2"], 0.6);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["clone"]).0, 2);
    assert_eq!(run(&["clone", "--vacuum", "--thermal", "1"]).0, 2);
    assert_eq!(run(&["clone", "--coherent", "1", "--alpha", "1"]).0, 2);
    assert_eq!(run(&["sweep", "--quantity", "N", "--lo", "1", "--hi", "0"]).0, 2);
    assert_eq!(run(&["clone", "--vacuum", "--eta", "0"]).0, 3);
    assert_eq!(run(&["clone", "--thermal=-1"]).0, 3);
    assert_eq!(run(&["average", "--ensemble", "tophat", "--width", "1", "--g", "0.5"]).0, 3);
    assert_eq!(run(&["--config", "/nonexistent/linclone.cfg", "clone", "--vacuum"]).0, 4);
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "").unwrap();
    let bad = blocker.join("x.json");
    assert_eq!(run(&["--output", bad.to_str().unwrap(), "clone", "--vacuum"]).0, 4);
    assert_eq!(run(&["--help"]).0, 0);
}

#[test]
fn binary_honours_out_dir_variable() {
    let dir = tempfile::tempdir().unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_linclone"))
        .args(["sweep", "--quantity", "xi", "--lo", "0", "--hi", "1", "--steps", "2"])
        .env("LINCLONE_OUT_DIR", dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(dir.path().join("sweep_xi.csv")).unwrap();
    assert!(text.starts_with("xi,F_eta_1,"));
}

#[test]
fn binary_exit_code_on_domain_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_linclone"))
        .args(["clone", "--vacuum", "--tau1", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("tau1"));
}
