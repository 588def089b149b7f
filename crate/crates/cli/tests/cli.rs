use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_cliffpert"));
    c.env_remove("CLIFFPERT_MAX_TERMS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn err_json(out: &Output) -> Value {
    assert!(!out.status.success());
    let line = String::from_utf8_lossy(&out.stderr);
    serde_json::from_str(line.trim()).unwrap_or_else(|e| panic!("stderr is not JSON ({e}): {line}"))
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Rows after the `#` line and the header, split on commas.
fn csv_rows(text: &str) -> (String, String, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let comment = lines.next().unwrap().to_string();
    let header = lines.next().unwrap().to_string();
    let rows = lines.map(|l| l.split(',').map(str::to_string).collect()).collect();
    (comment, header, rows)
}

const SINGLE: &str = r#"{"n":1,"gates":[{"kind":"rot","axis":"X","theta":0.3}]}"#;

#[test]
fn single_rotation_reports_cosine() {
    let dir = TempDir::new().unwrap();
    let c = write(&dir, "c.json", SINGLE);
    let doc: Value = serde_json::from_str(&ok(&["expval", "--circuit", s(&c), "--observable", "Z"])).unwrap();
    let keys: Vec<&str> = doc.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys, ["cumulative", "expval", "per_order", "terms_per_order", "total_terms"]);
    assert!((doc["expval"].as_f64().unwrap() - 0.3f64.cos()).abs() < 1e-15);
    assert_eq!(doc["per_order"][1].as_f64().unwrap(), 0.0);
    assert_eq!(doc["total_terms"].as_u64().unwrap(), 2);

    let csv = ok(&["expval", "--circuit", s(&c), "--observable", "Z1", "--order", "0", "--csv"]);
    let (_, header, rows) = csv_rows(&csv);
    assert_eq!(header, "k,per_order,cumulative,terms_per_order,cumulative_terms");
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0], "0");
    assert!((rows[0][2].parse::<f64>().unwrap() - 0.3f64.cos()).abs() < 1e-15);
}

#[test]
fn oracle_and_expval_agree_with_damping_closed_form() {
    // a damping channel at the measurement end maps Z to (1-λ)Z + λI
    let dir = TempDir::new().unwrap();
    let c = write(&dir, "c.json", SINGLE);
    let noise = write(&dir, "n.json", r#"[{"kind":"amplitude_damping","q":0,"lambda":0.25,"after":0}]"#);
    let want = 0.75 * 0.3f64.cos() + 0.25;
    let e: Value = serde_json::from_str(&ok(&[
        "expval", "--circuit", s(&c), "--observable", "Z", "--noise", s(&noise),
    ]))
    .unwrap();
    assert!((e["expval"].as_f64().unwrap() - want).abs() < 1e-14);
    let o: Value = serde_json::from_str(&ok(&[
        "oracle", "--circuit", s(&c), "--observable", "Z", "--noise", s(&noise),
    ]))
    .unwrap();
    assert_eq!(o["method"], "density_matrix");
    assert!((o["expval"].as_f64().unwrap() - want).abs() < 1e-12);
}

#[test]
fn oracle_matches_full_order_on_mixed_circuit() {
    let dir = TempDir::new().unwrap();
    let c = write(
        &dir,
        "c.json",
        r#"{"n":3,"gates":[
            {"kind":"h","qubits":[0]},
            {"kind":"cx","qubits":[0,1]},
            {"kind":"rot","axis":"XYZ","theta":0.7},
            {"kind":"s","qubits":[2]},
            {"kind":"rot","axis":"ZZI","theta":-1.9},
            {"kind":"rot","axis":"IXX","theta":2.4}
        ]}"#,
    );
    for obs in ["ZZI", "X1Y3", "YIX"] {
        let e: Value = serde_json::from_str(&ok(&["expval", "--circuit", s(&c), "--observable", obs])).unwrap();
        let o: Value = serde_json::from_str(&ok(&["oracle", "--circuit", s(&c), "--observable", obs])).unwrap();
        assert_eq!(o["method"], "statevector");
        let (a, b) = (e["expval"].as_f64().unwrap(), o["expval"].as_f64().unwrap());
        assert!((a - b).abs() < 1e-12, "{obs}: {a} vs {b}");
    }
}

#[test]
fn compile_writes_program() {
    let dir = TempDir::new().unwrap();
    let c = write(&dir, "c.json", r#"{"n":2,"gates":[{"kind":"rot","axis":"XZ","theta":3.0}]}"#);
    let out = dir.path().join("g.json");
    let printed = ok(&["compile", "--circuit", s(&c), "--observable", "ZZ"]);
    ok(&["compile", "--circuit", s(&c), "--observable", "ZZ", "--out", s(&out)]);
    assert_eq!(std::fs::read_to_string(&out).unwrap(), printed);
    let doc: Value = serde_json::from_str(&printed).unwrap();
    assert_eq!(doc["n"], 2);
    assert!(doc["sign"] == 1 || doc["sign"] == -1);
    let theta = doc["gates"][0]["theta"].as_f64().unwrap();
    assert!(theta.abs() <= std::f64::consts::FRAC_PI_4 + 1e-12);
}

#[test]
fn orderbound_columns_are_monotone() {
    let csv = ok(&["orderbound", "--theta", "0.2", "--delta-list", "0.01,0.05", "--n-range", "1:120"]);
    let (comment, header, rows) = csv_rows(&csv);
    assert_eq!(comment, "# theta=0.2");
    assert_eq!(
        header,
        "n,kmin_delta_0.01,kmin_delta_0.05,m_cumulative_delta_0.01,m_cumulative_delta_0.05"
    );
    assert_eq!(rows.len(), 120);
    let col = |r: &Vec<String>, i: usize| r[i].parse::<f64>().unwrap();
    for w in rows.windows(2) {
        assert!(col(&w[1], 1) >= col(&w[0], 1));
        assert!(col(&w[1], 2) >= col(&w[0], 2));
    }
    for r in &rows {
        assert!(col(r, 1) >= col(r, 2), "tighter δ needs at least as many orders");
    }
}

#[test]
fn qaoa_landscape_shape_and_determinism() {
    let args = [
        "qaoa", "--n", "12", "--D", "3", "--seed", "7", "--gamma-grid", "-0.7:0.7:5", "--order", "1,2,full",
    ];
    let one = ok(&[&args[..], &["--threads", "1"]].concat());
    let three = ok(&[&args[..], &["--threads", "3"]].concat());
    assert_eq!(one, three);
    let (comment, header, rows) = csv_rows(&one);
    assert!(comment.starts_with("# seed=7 n=12 D=3 "), "{comment}");
    assert_eq!(header, "gamma,cost_k1,cost_k2,cost_full");
    assert_eq!(rows.len(), 5);
    for r in &rows {
        let v: Vec<f64> = r.iter().map(|x| x.parse().unwrap()).collect();
        // γ within (-π/4, π/4] keeps first order exact
        assert!((v[1] - v[3]).abs() < 1e-12 && (v[2] - v[3]).abs() < 1e-12, "{r:?}");
    }
    let timed = ok(&[&args[..], &["--timing"]].concat());
    assert!(timed.lines().nth(1).unwrap().ends_with(",seconds"));
}

#[test]
fn qaoa_orders_histogram_counts_runs() {
    let csv = ok(&["qaoa-orders", "--n", "15", "--D", "2,3", "--runs", "4", "--seed", "11"]);
    let (comment, header, rows) = csv_rows(&csv);
    assert_eq!(comment, "# seed=11 n=15 runs=4");
    assert_eq!(header, "D,max_order,count");
    for d in ["2", "3"] {
        let total: u64 = rows.iter().filter(|r| r[0] == d).map(|r| r[2].parse::<u64>().unwrap()).sum();
        assert_eq!(total, 4);
    }
}

#[test]
fn layers_reference_closes_at_full_order() {
    let csv = ok(&[
        "layers", "--n", "8", "--p", "2", "--seed", "3", "--runs", "2", "--dtheta-grid", "-0.1,0.1",
        "--order-grid", "0,1,40", "--observable", "Z1Z5",
    ]);
    let (comment, header, rows) = csv_rows(&csv);
    assert!(comment.starts_with("# seed=3 runs=2 n=8 p=2 observable=Z1Z5"));
    assert_eq!(header, "seed,dtheta,k,expval,reference,abs_error,terms_per_order,cumulative_terms");
    assert_eq!(rows.len(), 2 * 2 * 3);
    for r in rows.iter().filter(|r| r[2] == "40") {
        assert!(r[5].parse::<f64>().unwrap() < 1e-12, "{r:?}");
        assert_eq!(r[6], "0");
    }
    let plain = ok(&[
        "layers", "--n", "8", "--p", "2", "--seed", "3", "--dtheta-grid", "0.1", "--order-grid", "1",
        "--observable", "Z1Z5", "--reference", "none",
    ]);
    let (_, _, rows) = csv_rows(&plain);
    assert_eq!(rows[0][4], "");
    assert_eq!(rows[0][5], "");
}

#[test]
fn errors_are_json_on_stderr() {
    let dir = TempDir::new().unwrap();
    let c = write(&dir, "c.json", SINGLE);

    let missing = run(&["expval", "--circuit", "/definitely/missing.json", "--observable", "Z"]);
    assert_eq!(missing.status.code(), Some(1));
    let e = err_json(&missing);
    assert_eq!(e["error"], "io");
    assert_eq!(e["path"], "/definitely/missing.json");

    let usage = run(&["expval", "--circuit", s(&c), "--observable", "Z", "--frobnicate"]);
    assert_eq!(usage.status.code(), Some(2));
    assert_eq!(err_json(&usage)["error"], "usage");

    let bad = write(&dir, "bad.json", r#"{"n":1,"gates":[{"kind":"rot","axis":"X"}]}"#);
    let e = err_json(&run(&["expval", "--circuit", s(&bad), "--observable", "Z"]));
    assert_eq!(e["error"], "schema");
    assert!(e["message"].as_str().unwrap().contains("gates[0]"));

    let syntax = write(&dir, "syntax.json", "{\"n\":1,\n\"gates\":[,]}");
    let e = err_json(&run(&["expval", "--circuit", s(&syntax), "--observable", "Z"]));
    assert_eq!(e["error"], "schema");
    assert!(e["message"].as_str().unwrap().contains("line 2"));

    let e = err_json(&run(&["expval", "--circuit", s(&c), "--observable", "Q"]));
    assert_eq!(e["error"], "invalid_pauli_char");
    let e = err_json(&run(&["expval", "--circuit", s(&c), "--observable", "ZZ"]));
    assert_eq!(e["error"], "dimension");

    let noise = write(&dir, "n.json", r#"[{"kind":"phase_damping","q":0,"lambda":0.1,"after":5}]"#);
    let e = err_json(&run(&["expval", "--circuit", s(&c), "--observable", "Z", "--noise", s(&noise)]));
    assert_eq!(e["error"], "noise_location");

    let e = err_json(&run(&["layers", "--n", "7", "--p", "1", "--observable", "Z1"]));
    assert_eq!(e["error"], "invalid_model");
}

#[test]
fn term_limit_from_environment() {
    let dir = TempDir::new().unwrap();
    let c = write(
        &dir,
        "c.json",
        r#"{"n":2,"gates":[{"kind":"rot","axis":"XI","theta":0.3},{"kind":"rot","axis":"IX","theta":0.3}]}"#,
    );
    let out = bin()
        .env("CLIFFPERT_MAX_TERMS", "2")
        .args(["expval", "--circuit", s(&c), "--observable", "ZZ"])
        .output()
        .unwrap();
    let e = err_json(&out);
    assert_eq!(e["error"], "term_limit");
    // the flag wins over the environment
    let out = bin()
        .env("CLIFFPERT_MAX_TERMS", "2")
        .args(["expval", "--circuit", s(&c), "--observable", "ZZ", "--max-terms", "10"])
        .output()
        .unwrap();
    assert!(out.status.success());
}
