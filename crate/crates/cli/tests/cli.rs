use std::process::{Command, Output};

fn verify(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_verify")).args(args).output().expect("binary runs")
}

fn report(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("json report on stdout")
}

fn checks(v: &serde_json::Value) -> Vec<(String, String)> {
    v["verdicts"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| (x["check"].as_str().unwrap().to_string(), x["status"].as_str().unwrap().to_string()))
        .collect()
}

#[test]
fn a2_all_suites_pass() {
    let out = verify(&["--type", "A", "--rank", "2", "--suite", "all"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = report(&out);
    assert_eq!(v["passed"], true);
    let names: Vec<String> = checks(&v).into_iter().map(|c| c.0).collect();
    for needed in [
        "resolution_exact",
        "resolution_selfdual",
        "HH^2",
        "HH_0_equals_p",
        "d4_star_injective",
        "pairing_nondegenerate",
        "euler_identity_computed",
        "nk_case_formula",
        "rs_factorization",
        "theta_surjective",
    ] {
        assert!(names.iter().any(|n| n == needed), "missing {needed}");
    }
    let table = String::from_utf8_lossy(&out.stderr);
    assert!(table.contains("checks passed"));
}

#[test]
fn e8_cyclic_is_series_only() {
    let dir = std::env::temp_dir().join(format!("verify-e8-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("ledger.tsv");
    let out = verify(&[
        "--type", "E", "--rank", "8", "--suite", "cyclic", "--order", "60", "--format", "tsv", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let tsv = std::fs::read_to_string(&path).unwrap();
    let rows: Vec<Vec<&str>> = tsv.lines().skip(1).map(|l| l.split('\t').collect()).collect();
    assert!(rows.len() >= 6);
    assert!(rows.iter().all(|r| r[4] == "PASS" && r[2] == "E8"));
    assert!(rows.iter().any(|r| r[1] == "nk_product" && r[3] == "60"));

    let out = verify(&["--type", "E", "--rank", "8", "--suite", "cyclic", "--order", "60"]);
    assert!(report(&out)["algebra"].is_null());
}

#[test]
fn random_weight_gives_same_verdicts() {
    let rho = verify(&["--type", "A", "--rank", "2", "--suite", "hochschild", "--suite", "cyclic"]);
    let rnd = verify(&[
        "--type", "A", "--rank", "2", "--suite", "hochschild", "--suite", "cyclic", "--weight", "random:42",
    ]);
    assert_eq!(rho.status.code(), Some(0));
    assert_eq!(rnd.status.code(), Some(0));
    let (a, b) = (report(&rho), report(&rnd));
    assert_eq!(checks(&a), checks(&b));
    assert_ne!(a["mu"], b["mu"]);
    assert_eq!(a["algebra"]["degree_dims"], b["algebra"]["degree_dims"]);
}

#[test]
fn configuration_errors_exit_with_two() {
    assert_eq!(verify(&["--type", "E", "--rank", "6"]).status.code(), Some(2));
    assert_eq!(verify(&["--type", "A", "--rank", "2", "--weight", "sigma"]).status.code(), Some(2));
    assert_eq!(verify(&["--type", "A", "--rank", "2", "--degree-cap", "1"]).status.code(), Some(2));
    assert_eq!(verify(&["--type", "A", "--rank", "0"]).status.code(), Some(2));
}

#[test]
fn timeout_keeps_partial_report() {
    let out = verify(&["--type", "A", "--rank", "3", "--suite", "deformation", "--timeout", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let v = report(&out);
    let rows = checks(&v);
    assert_eq!(rows.first().unwrap(), &("filtered_zero_params".to_string(), "pass".to_string()));
    assert_eq!(rows.last().unwrap(), &("suite_timeout".to_string(), "timeout".to_string()));
}
