use std::process::{Command, Output};

use serde_json::Value;

fn qsv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsv"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = qsv(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn code(args: &[&str]) -> i32 {
    qsv(args).status.code().unwrap()
}

#[test]
fn adversarial_homogeneous_plan() {
    let v = json(&[
        "plan", "--scenario", "adversarial", "--epsilon", "0.1", "--delta", "0.1", "--lambda",
        "0.5",
    ]);
    assert_eq!(v["n_exact"], 62);
    assert_eq!(v["n_lower"], 57);
    assert_eq!(v["n_upper"], 64);
}

#[test]
fn nonadversarial_plan() {
    let v = json(&[
        "plan", "--scenario", "nonadversarial", "--epsilon", "0.01", "--delta", "0.01", "--beta",
        "0.5",
    ]);
    assert_eq!(v["n_exact"], 919);
    assert_eq!(v["n_upper"], 922);
}

#[test]
fn fidelity_example() {
    let v = json(&["fidelity", "--n", "2", "--delta", "0.8", "--lambda", "0.5"]);
    assert!((v["fidelity"].as_f64().unwrap() - 0.75).abs() < 1e-12);
    assert_eq!(v["general_bound_saturated"], true);
}

#[test]
fn scientific_notation_is_accepted() {
    let v = json(&[
        "plan", "--scenario", "adversarial", "--epsilon", "1e-3", "--delta", "1e-9", "--lambda",
        "0.5",
    ]);
    assert!(v["n_exact"].as_u64().unwrap() > 1000);
}

#[test]
fn auto_hedge_repairs_singular_strategies() {
    for source in [["--beta", "0.5"], ["--lambda", "0"], ["--spectrum", "1:1,0.3:2,0:1"]] {
        let mut args = vec![
            "plan", "--scenario", "adversarial", "--epsilon", "0.05", "--delta", "0.01",
            "--hedge", "auto",
        ];
        args.extend(source);
        let v = json(&args);
        assert_eq!(v["hedge"]["tau_free_guarantee"], true, "{source:?}");
        assert!(v["hedge"]["n_bound"].as_f64().unwrap().is_finite());
        assert!(v["hedged_strategy"]["tau"].as_f64().unwrap() > 0.0);
    }
}

#[test]
fn hedged_homogeneous_plan_has_exact_count_below_bound() {
    let v = json(&[
        "plan", "--scenario", "adversarial", "--epsilon", "0.01", "--delta", "0.01", "--lambda",
        "0", "--hedge", "auto",
    ]);
    let n = v["n_exact"].as_u64().unwrap() as f64;
    assert!(n < v["hedge"]["n_bound"].as_f64().unwrap());
}

#[test]
fn explicit_hedge_outside_guarantee_is_flagged() {
    let v = json(&[
        "plan", "--scenario", "adversarial", "--epsilon", "0.1", "--delta", "0.1", "--beta",
        "0.5", "--tau", "0.1", "--hedge", "p=0.9",
    ]);
    assert_eq!(v["hedge"]["tau_free_guarantee"], false);
    assert!(v["hedge"]["n_bound_secondary"].is_null());
}

#[test]
fn unknown_flag_exits_2_and_names_it() {
    let out = qsv(&["plan", "--bogus-flag", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--bogus-flag"));
}

#[test]
fn strategy_source_errors_exit_2() {
    let base = ["fidelity", "--n", "3", "--delta", "0.5"];
    let with = |extra: &[&str]| {
        let mut a = base.to_vec();
        a.extend(extra);
        code(&a)
    };
    assert_eq!(with(&["--lambda", "0.5", "--beta", "0.4"]), 2);
    assert_eq!(with(&["--lambda", "0.5", "--spectrum", "1:1,0.5:1"]), 2);
    assert_eq!(with(&["--spectrum", "1:1,0.5:1", "--operator", "x.json"]), 2);
    assert_eq!(with(&["--tau", "0.1"]), 2);
    assert_eq!(with(&[]), 2);
    assert_eq!(with(&["--lambda", "1.5"]), 2);
    assert_eq!(with(&["--spectrum", "1:2,0.5:1"]), 2);
}

#[test]
fn invalid_values_exit_2() {
    assert_eq!(
        code(&["plan", "--scenario", "adversarial", "--epsilon", "0", "--delta", "0.1", "--lambda", "0.5"]),
        2
    );
    assert_eq!(
        code(&["plan", "--scenario", "adversarial", "--epsilon", "0.1", "--delta", "0.1", "--lambda", "0.5", "--hedge", "sometimes"]),
        2
    );
    assert_eq!(code(&["hedge", "--nu", "0.5", "--tau", "0.9"]), 2);
}

#[test]
fn oracle_guard_exits_3() {
    assert_eq!(
        code(&["oracle", "--n", "31", "--delta", "0.1", "--lambda", "0.5"]),
        3
    );
    assert_eq!(
        code(&["oracle", "--n", "9", "--delta", "0.1", "--spectrum", "1:1,0.5:1,0.2:1"]),
        3
    );
}

#[test]
fn oracle_matches_fidelity() {
    let o = json(&["oracle", "--n", "2", "--delta", "0.8", "--lambda", "0.5"]);
    let f = json(&["fidelity", "--n", "2", "--delta", "0.8", "--lambda", "0.5"]);
    let diff = o["min_fidelity"].as_f64().unwrap() - f["fidelity"].as_f64().unwrap();
    assert!(diff.abs() < 1e-9);
}

#[test]
fn hedge_command() {
    let v = json(&["hedge", "--nu", "1", "--tau", "0"]);
    let inv_e = (-1.0f64).exp();
    assert!((v["p_star"].as_f64().unwrap() - inv_e).abs() < 1e-10);
    assert!((v["nu_h"].as_f64().unwrap() - std::f64::consts::E).abs() < 1e-12);

    let v = json(&["hedge", "--nu", "1", "--epsilon", "0.1", "--delta", "0.1"]);
    assert!((v["report"]["ratio_bound"].as_f64().unwrap() - 2.995).abs() < 1e-3);
}

#[test]
fn json_numbers_round_trip_bit_exactly() {
    let out = qsv(&["hedge", "--nu", "0.3", "--tau", "0.2", "--p", "0.1"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    let again = serde_json::to_string_pretty(&v).unwrap();
    assert_eq!(text.trim_end(), again);
    let h = v["h_at_p"].as_f64().unwrap();
    assert_eq!(h.to_string().parse::<f64>().unwrap().to_bits(), h.to_bits());
}

#[test]
fn text_format_lists_fields() {
    let out = qsv(&["fidelity", "--n", "2", "--delta", "0.8", "--lambda", "0.5", "--format", "text"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("fidelity: 0.75")));
    assert!(text.lines().any(|l| l == "n: 2"));
}

#[test]
fn simulate_is_deterministic_across_thread_counts() {
    let args = [
        "simulate", "--mode", "adversary", "--n", "2", "--delta", "0.8", "--lambda", "0.5",
        "--trials", "20000", "--seed", "11",
    ];
    let run = |threads: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_qsv"))
            .args(args)
            .env("QSV_THREADS", threads)
            .output()
            .unwrap();
        assert!(out.status.success());
        out.stdout
    };
    assert_eq!(run("1"), run("3"));
    assert_eq!(run("1"), run("0"));

    let v = json(&[
        "simulate", "--mode", "iid", "--infidelities", "0.1,0.2,0.05", "--beta", "0.5",
        "--trials", "20000",
    ]);
    assert!(v["z_score"].as_f64().unwrap().abs() < 5.0);
    assert_eq!(code(&["simulate", "--mode", "iid", "--lambda", "0.5"]), 2);
}

#[test]
fn bad_thread_count_exits_2() {
    let out = Command::new(env!("CARGO_BIN_EXE_qsv"))
        .args(["hedge", "--nu", "0.5"])
        .env("QSV_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig1.csv");
    let v = json(&["sweep", "--figure", "1", "--out", path.to_str().unwrap()]);
    let csv = std::fs::read_to_string(&path).unwrap();
    assert!(csv.starts_with("lambda,epsilon,delta,n_exact,n_lower,n_upper,n_approx\n"));
    assert_eq!(v["rows"].as_u64().unwrap() as usize, csv.lines().count() - 1);

    let out = qsv(&["sweep", "--figure", "2", "--out", "-", "--params", "1", "--epsilons", "0.1", "--deltas", "0.1"]);
    let csv = String::from_utf8(out.stdout).unwrap();
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert!((row[4].parse::<f64>().unwrap() - 2.995).abs() < 1e-3);

    assert_eq!(code(&["sweep", "--figure", "3", "--out", "-"]), 2);
}

#[test]
fn spectrum_from_operator_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("op.json");
    // Two tests on a qubit: projector onto |0⟩ and the identity.
    std::fs::write(
        &path,
        r#"{"dimension": 2, "target_state": [[1,0],[0,0]],
            "tests": [{"probability": 0.5, "matrix": [[[1,0],[0,0]],[[0,0],[0,0]]]},
                      {"probability": 0.5, "matrix": [[[1,0],[0,0]],[[0,0],[1,0]]]}]}"#,
    )
    .unwrap();
    let p = path.to_str().unwrap();
    let v = json(&["spectrum", "--operator", p]);
    assert_eq!(v["dim"], 2);
    assert!((v["entries"][1][0].as_f64().unwrap() - 0.5).abs() < 1e-12);

    let plan = json(&[
        "plan", "--scenario", "adversarial", "--epsilon", "0.1", "--delta", "0.1", "--operator", p,
    ]);
    assert_eq!(plan["n_exact"], 62);

    std::fs::write(&path, "{not json").unwrap();
    assert_eq!(code(&["spectrum", "--operator", p]), 2);
    assert_eq!(code(&["spectrum", "--operator", "/nonexistent/op.json"]), 2);
}
