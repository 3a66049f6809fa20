use std::process::{Command, Output};

use serde_json::Value;

fn qrc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qrc"))
        .args(args)
        .env_remove("QRC_SEED")
        .output()
        .expect("qrc runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

fn without_timing(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("elapsed_ms");
    v
}

#[test]
fn teleport_unitary_passes_with_exact_ledger() {
    let out = qrc(&["teleport-unitary", "--seed", "7", "--trials", "100"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["name"], "teleport-unitary");
    assert_eq!(r["seed"], 7);
    assert_eq!(r["trials"], 100);
    assert_eq!(r["ledger"]["ebits"], 2);
    assert_eq!(r["ledger"]["cbits_a_to_b"], 2);
    assert_eq!(r["ledger"]["cbits_b_to_a"], 2);
    assert!(r["fidelity_min"].as_f64().unwrap() >= 1.0 - 1e-9);
    for c in r["bound_checks"].as_array().unwrap() {
        assert_eq!(c["passed"], true, "{c}");
    }
}

#[test]
fn report_fields_are_in_schema_order() {
    let out = qrc(&["nogo-trivial-g1", "--trials", "3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let keys = [
        "name",
        "seed",
        "trials",
        "ledger",
        "fidelity_min",
        "entropies",
        "bound_checks",
        "elapsed_ms",
    ];
    let mut last = 0;
    for k in keys {
        let at = text.find(&format!("\"{k}\"")).unwrap_or_else(|| panic!("missing {k}"));
        assert!(at >= last, "{k} out of order");
        last = at;
    }
    let r: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(r["entropies"], serde_json::json!({}));
    assert!(r["fidelity_min"].is_null());
    let check = &r["bound_checks"][0];
    let fields: Vec<&String> = check.as_object().unwrap().keys().collect();
    assert_eq!(fields.len(), 4);
    for f in ["name", "measured", "bound", "passed"] {
        assert!(check.get(f).is_some());
    }
}

#[test]
fn dense_coding_reports_every_decoded_value() {
    let out = qrc(&["dense-coding"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    let checks = r["bound_checks"].as_array().unwrap();
    for mu in 0..4 {
        let c = checks
            .iter()
            .find(|c| c["name"] == format!("decoded_mu_{mu}"))
            .unwrap();
        assert_eq!(c["measured"].as_f64(), Some(mu as f64));
        assert_eq!(c["passed"], true);
    }
}

#[test]
fn ebit_bound_lists_entropy_per_branch() {
    let out = qrc(&["ebit-bound"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    let entropies = r["entropies"].as_object().unwrap();
    assert_eq!(entropies.len(), 16);
    for e in entropies.values() {
        assert!(e.as_f64().unwrap() >= 2.0 - 1e-9);
    }
}

#[test]
fn same_seed_same_report() {
    for scenario in ["teleport-state", "orthogonality-witness", "independence"] {
        let a = qrc(&[scenario, "--seed", "11", "--trials", "9"]);
        let b = qrc(&[scenario, "--seed", "11", "--trials", "9"]);
        assert_eq!(without_timing(json(&a)), without_timing(json(&b)), "{scenario}");
    }
    let a = qrc(&["decompose", "--seed", "1", "--trials", "5"]);
    let b = qrc(&["decompose", "--seed", "2", "--trials", "5"]);
    assert_ne!(json(&a)["bound_checks"], json(&b)["bound_checks"]);
}

#[test]
fn env_seed_overrides_flag() {
    let out = Command::new(env!("CARGO_BIN_EXE_qrc"))
        .args(["g1-transfer", "--seed", "3", "--trials", "2"])
        .env("QRC_SEED", "99")
        .output()
        .unwrap();
    assert_eq!(json(&out)["seed"], 99);

    let out = Command::new(env!("CARGO_BIN_EXE_qrc"))
        .args(["g1-transfer"])
        .env("QRC_SEED", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_arguments_exit_2() {
    for args in [
        &["unknown-scenario"][..],
        &["decompose", "--trials", "0"],
        &["decompose", "--trials", "1000001"],
        &["decompose", "--tolerance", "0"],
        &["decompose", "--format", "xml"],
        &[],
    ] {
        assert_eq!(qrc(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn failed_fidelity_gate_exits_1() {
    // 1 - 1e-300 rounds to 1, so any rounding loss in the fidelity fails
    // the gate while every bound check still passes.
    let out = qrc(&["teleport-unitary", "--seed", "7", "--trials", "20", "--tolerance", "1e-300"]);
    let r = json(&out);
    assert!(r["fidelity_min"].as_f64().unwrap() < 1.0);
    assert_eq!(out.status.code(), Some(1));
    assert!(r["bound_checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
}

#[test]
fn unwritable_output_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("missing").join("report.json");
    let out = qrc(&["decompose", "--trials", "2", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn csv_to_file_has_one_row_per_check_plus_summary() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.csv");
    let out = qrc(&[
        "control-teleport",
        "--trials",
        "2",
        "--format",
        "csv",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());

    let mut reader = csv::Reader::from_path(&path).unwrap();
    let headers = reader.headers().unwrap().clone();
    assert_eq!(
        headers.iter().collect::<Vec<_>>(),
        ["kind", "name", "measured", "bound", "passed", "elapsed_ms"]
    );
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    let json_out = qrc(&["control-teleport", "--trials", "2"]);
    let checks = json(&json_out)["bound_checks"].as_array().unwrap().len();
    assert_eq!(rows.len(), checks + 1);
    assert!(rows[..checks].iter().all(|r| &r[0] == "check"));
    assert_eq!(&rows[checks][0], "summary");
    assert_eq!(&rows[checks][4], "true");
}

#[test]
fn verbose_writes_json_lines_to_stderr() {
    let out = qrc(&["teleport-unitary", "--trials", "2", "--verbose"]);
    assert_eq!(out.status.code(), Some(0));
    let err = String::from_utf8(out.stderr.clone()).unwrap();
    let lines: Vec<Value> = err.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert!(lines.iter().any(|l| l["op"] == "measure_local"));
    assert_eq!(lines.iter().filter(|l| l["event"] == "trial").count(), 2);
    json(&out);
}

#[test]
fn every_scenario_passes_by_default() {
    for scenario in [
        "teleport-state",
        "teleport-unitary",
        "control-teleport",
        "dense-coding",
        "ebit-bound",
        "nogo-trivial-g1",
        "g1-transfer",
        "independence",
        "orthogonality-witness",
        "decompose",
    ] {
        let out = qrc(&[scenario, "--trials", "4"]);
        assert_eq!(out.status.code(), Some(0), "{scenario}: {}", String::from_utf8_lossy(&out.stdout));
    }
}
