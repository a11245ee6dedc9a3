//! End-to-end tests of the `splitrec` binary: determinism, formats,
//! config-file layering and exit codes.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_splitrec"))
}

fn run_ok(args: &[&str]) -> String {
    let out = bin().args(args).output().expect("binary runs");
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf8 output")
}

#[test]
fn generate_is_deterministic() {
    let args = ["generate", "--model", "bst", "--n", "1000", "--seed", "7"];
    let a = run_ok(&args);
    let b = run_ok(&args);
    assert_eq!(a, b);
    assert!(a.starts_with("splittree v1 b=2 s=1 s0=1 s1=0 n=1000 seed=7"));
    // the payload parses back into a valid tree
    let tree = splitrec::tree::SplitTree::from_text(a.as_bytes()).unwrap();
    assert_eq!(tree.n(), 1000);
    assert!(tree.validate().is_empty());
    // a different seed gives a different tree
    let c = run_ok(&["generate", "--model", "bst", "--n", "1000", "--seed", "8"]);
    assert_ne!(a, c);
}

#[test]
fn constants_bst_json() {
    let text = run_ok(&["constants", "--model", "bst", "--seed", "3"]);
    let json: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(json["model"], "bst");
    assert_eq!(json["mu"], 0.5);
    assert_eq!(json["sigma2"], 0.25);
    assert_eq!(json["alpha"], 1.0);
    assert_eq!(json["provenance"]["mu"], "analytic");
    assert_eq!(json["config"]["seed"], 3);
}

#[test]
fn limit_cdf_table_is_monotone() {
    let text = run_ok(&[
        "limit", "--model", "bst", "--emit", "cdf", "--range", "-20:60", "--points", "81",
    ]);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with('#'));
    assert_eq!(lines.next().unwrap(), "x,cdf,pdf");
    let mut prev = -1.0f64;
    let mut first = f64::NAN;
    let mut last = f64::NAN;
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        let cdf: f64 = fields[1].parse().unwrap();
        let pdf: f64 = fields[2].parse().unwrap();
        assert!(cdf >= prev - 1e-9, "cdf not monotone at {line}");
        assert!(pdf >= 0.0);
        if first.is_nan() {
            first = cdf;
        }
        last = cdf;
        prev = cdf;
    }
    assert!(first < 1e-3, "cdf(-20) = {first}");
    assert!(last > 0.9, "cdf(60) = {last}");
}

#[test]
fn usage_errors_exit_2() {
    let out = bin().arg("frobnicate").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["generate", "--bogus-flag"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin()
        .args(["generate", "--model", "nonsense", "--n", "10"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("unknown model"), "stderr: {err}");
}

#[test]
fn runtime_errors_exit_1() {
    // lattice model: the limit law is undefined
    let out = bin()
        .args(["limit", "--model", "symmetric:2", "--emit", "dist"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("lattice"), "stderr: {err}");
}

#[test]
fn seed_env_override() {
    let with_env = |seed: &str| {
        let out = bin()
            .args(["generate", "--model", "bst", "--n", "64"])
            .env("SPLITREC_SEED", seed)
            .output()
            .unwrap();
        assert!(out.status.success());
        String::from_utf8(out.stdout).unwrap()
    };
    let a = with_env("11");
    let b = with_env("11");
    let c = with_env("12");
    assert_eq!(a, b);
    assert_ne!(a, c);
    // explicit flag beats the environment
    let out = bin()
        .args(["generate", "--model", "bst", "--n", "64", "--seed", "12"])
        .env("SPLITREC_SEED", "11")
        .output()
        .unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), c);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("config.json");
    std::fs::write(&path, r#"{"model": "mary:3", "n": 50, "seed": 9}"#).unwrap();
    let cfg = path.to_str().unwrap();
    let a = run_ok(&["generate", "--config", cfg]);
    assert!(a.starts_with("splittree v1 b=3 s=2 s0=2 s1=0 n=50 seed=9"), "{a}");
    let b = run_ok(&["generate", "--config", cfg, "--n", "70"]);
    assert!(b.starts_with("splittree v1 b=3 s=2 s0=2 s1=0 n=70 seed=9"), "{b}");
}

#[test]
fn custom_model_via_config() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("custom.json");
    std::fs::write(
        &path,
        r#"{"custom_model": {"vectors": [[0.6, 0.4], [0.5, 0.5]], "weights": [0.5, 0.5]}}"#,
    )
    .unwrap();
    let text = run_ok(&[
        "generate",
        "--config",
        path.to_str().unwrap(),
        "--n",
        "200",
        "--seed",
        "4",
    ]);
    assert!(text.starts_with("splittree v1 b=2 s=1 s0=0 s1=0 n=200 seed=4"), "{text}");
    let tree = splitrec::tree::SplitTree::from_text(text.as_bytes()).unwrap();
    assert!(tree.validate().is_empty());
}

#[test]
fn records_csv_layout() {
    let text = run_ok(&[
        "records", "--model", "bst", "--n", "100", "--reps", "5", "--seed", "2", "--format",
        "csv",
    ]);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# splitrec"));
    assert_eq!(lines.next().unwrap(), "n,replicate,target,value");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 5);
    assert!(rows[0].starts_with("100,0,records_v,"));
}

#[test]
fn cuts_trace_csv() {
    let text = run_ok(&[
        "cuts", "--model", "bst", "--n", "50", "--seed", "2", "--trace", "--variant", "edge",
    ]);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# splitrec"));
    assert_eq!(lines.next().unwrap(), "step,kind,node_index");
    assert!(lines.next().unwrap().starts_with("1,edge,"));
}

#[test]
fn compare_report_is_deterministic() {
    let args = [
        "compare", "--model", "bst", "--grid", "64,128", "--reps", "10", "--seed", "6",
        "--targets", "records_v,cuts_v",
    ];
    let parse = |text: &str| {
        let mut json: serde_json::Value = serde_json::from_str(text).unwrap();
        json["report"]["wall_clock_secs"] = serde_json::json!(0);
        json
    };
    let a = parse(&run_ok(&args));
    let b = parse(&run_ok(&args));
    assert_eq!(a, b);
    assert_eq!(a["report"]["results"][0]["samples"]["records_v"].as_array().unwrap().len(), 10);
    // BST constants are attached automatically, so the limit comparison ran
    assert!(a["report"]["results"][0]["ks_vs_limit"]["records_v"].is_number());
}

#[test]
fn depths_diagnostics_json() {
    let text = run_ok(&[
        "depths", "--model", "bst", "--n", "4096", "--reps", "200", "--seed", "5",
    ]);
    let json: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert!(json["diagnostics"]["ks_vs_normal"].is_number());
    let mean = json["diagnostics"]["mean_depth"].as_f64().unwrap();
    let expect = json["expected_mean"].as_f64().unwrap();
    assert!((mean - expect).abs() / expect < 0.2, "mean {mean} vs {expect}");
}

#[test]
fn renewal_table_csv() {
    let text = run_ok(&[
        "renewal", "--model", "bst", "--t-max", "5", "--points", "5", "--format", "csv",
    ]);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# splitrec"));
    assert_eq!(
        lines.next().unwrap(),
        "t,u,scaled,w,truncation_depth,tail_bound"
    );
    let last = lines.last().unwrap();
    let fields: Vec<&str> = last.split(',').collect();
    let t: f64 = fields[0].parse().unwrap();
    let u: f64 = fields[1].parse().unwrap();
    assert_eq!(t, 5.0);
    let expect = 2.0 * (5f64.exp() - 1.0);
    assert!((u - expect).abs() / expect < 0.01, "U(5) = {u}");
}
