use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn xprod(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xprod"))
        .args(args)
        .env_remove("XPROD_TOL")
        .output()
        .expect("binary runs")
}

fn schema() -> jsonschema::Validator {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("report.schema.json");
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&schema).expect("schema compiles")
}

/// Runs with `--json`, checks the report against the schema and returns
/// `(exit code, report)`.
fn report(args: &[&str]) -> (i32, Value) {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let out = xprod(&full);
    let text = String::from_utf8(out.stdout).unwrap();
    let json: Value = serde_json::from_str(&text).unwrap_or_else(|e| panic!("{args:?}: {e}\n{text}"));
    let errors: Vec<String> = schema().iter_errors(&json).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{args:?} report violates schema: {errors:?}");
    (out.status.code().unwrap(), json)
}

fn system_file(dir: &Path, body: &str) -> String {
    let p = dir.join("system.json");
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn fixture_catalog() {
    let (code, r) = report(&["fixtures"]);
    assert_eq!(code, 0);
    let list = r["fixtures"].as_array().unwrap();
    assert_eq!(list.len(), 4);
    assert!(list.iter().all(|f| f["expected_representable"].is_boolean()));
    let smx = list.iter().find(|f| f["name"] == "SMx").unwrap();
    assert!(smx["notes"].as_str().unwrap().contains("L_1(m, l) = (0, m11)"));
}

#[test]
fn sneg_verdict_and_expectation() {
    let (code, r) = report(&["check-system", "--fixture", "SNeg"]);
    assert_eq!(code, 0);
    assert_eq!(r["verdict"], "NotFinelyRepresentable");
    assert_eq!(r["witness_text"], "hereditary fails at x=1");
    assert_eq!(r["witness"]["kind"], "hereditary_fails");
    assert_eq!(r["witness"]["x"], serde_json::json!([1]));

    let (code, r) = report(&["check-system", "--fixture", "SNeg", "--expect", "representable"]);
    assert_eq!(code, 1);
    assert_eq!(r["passed"], false);

    let (code, _) = report(&["check-system", "--fixture", "SNeg", "--expect", "not-representable"]);
    assert_eq!(code, 0);
    for name in ["S2", "SAut", "SMx"] {
        let (code, r) = report(&["check-system", "--fixture", name, "--expect", "representable"]);
        assert_eq!(code, 0, "{name}");
        assert!(r["diagnostics"].as_array().unwrap().iter().all(|c| c["passed"] == true));
    }
}

#[test]
fn norm_of_u1_in_s2() {
    let (code, r) = report(&["norm", "--fixture", "S2", "--element", "u1", "--kmax", "10"]);
    assert_eq!(code, 0);
    let lo = r["interval"][0].as_f64().unwrap();
    let hi = r["interval"][1].as_f64().unwrap();
    assert!(1.0 - 1e-12 <= lo && lo <= hi && hi <= 1.08, "[{lo}, {hi}]");
    assert_eq!(r["k"].as_array().unwrap().len(), 10);
    assert_eq!(r["lower"].as_array().unwrap().len(), 10);
    assert_eq!(r["upper"].as_array().unwrap().len(), 10);
}

#[test]
fn products_of_isometries_in_s2() {
    // u1* u1 = L_1(alpha_1(1)) = P_1 = (0, 1) and u1 u1* = alpha_1(1) = (1, 0)
    let (code, r) = report(&["mul", "--fixture", "S2", "--a", "u1*", "--b", "u1"]);
    assert_eq!(code, 0);
    assert_eq!(
        r["product"],
        serde_json::json!({"coeffs": [{"g": [0], "value": [[[0.0]], [[1.0]]]}]})
    );
    let (_, r) = report(&["mul", "--fixture", "S2", "--a", "u1", "--b", "u1*"]);
    assert_eq!(
        r["product"],
        serde_json::json!({"coeffs": [{"g": [0], "value": [[[1.0]], [[0.0]]]}]})
    );
    // alpha_2 = 0 on S2, so u2 = 0
    let (_, r) = report(&["mul", "--fixture", "S2", "--a", "u1", "--b", "u2"]);
    assert_eq!(r["product"], serde_json::json!({"coeffs": []}));
}

#[test]
fn smx_transfer_matrix() {
    let (code, r) = report(&["transfer", "--fixture", "SMx", "--x", "1"]);
    assert_eq!(code, 0);
    // L_1(m, l) = (0, m11): only the m11 column is nonzero, and it lands on l
    let m = r["matrix"].as_array().unwrap();
    assert_eq!(m.len(), 5);
    for (i, row) in m.iter().enumerate() {
        for (j, v) in row.as_array().unwrap().iter().enumerate() {
            let want = if (i, j) == (4, 0) { 1.0 } else { 0.0 };
            assert!((v.as_f64().unwrap() - want).abs() < 1e-12, "L_1[{i},{j}] = {v}");
        }
    }
    assert_eq!(r["projection_mask"], serde_json::json!([false, true]));
}

#[test]
fn regrep_dims_and_checks() {
    let (code, r) = report(&["regrep", "--fixture", "SMx", "--window", "3", "--gens", "1"]);
    assert_eq!(code, 0);
    let dims: Vec<u64> = r["dims"].as_array().unwrap().iter().map(|d| d["dim"].as_u64().unwrap()).collect();
    assert_eq!(dims, vec![0, 0, 2, 5, 2, 0, 0]);
    assert!(!r["checks"].as_array().unwrap().is_empty());
}

#[test]
fn selftest_passes() {
    let (code, r) = report(&["selftest", "--seed", "7"]);
    assert_eq!(code, 0, "{r:#}");
    assert_eq!(r["seed"], 7);
}

#[test]
fn same_seed_same_report() {
    for args in [
        &["selftest", "--seed", "11"][..],
        &["regrep", "--fixture", "SAut", "--window", "6", "--gens", "1,2", "--seed", "3"][..],
        &["check-system", "--fixture", "SMx", "--seed", "5"][..],
    ] {
        let a = xprod(&[&["--json"], args].concat());
        let b = xprod(&[&["--json"], args].concat());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn configuration_errors_exit_2() {
    for args in [
        &["check-system", "--fixture", "Nope"][..],
        &["norm", "--system", "/nonexistent/system.json", "--element", "u1"][..],
        &["mul", "--fixture", "S2", "--a", "v1", "--b", "u1"][..],
        &["regrep", "--fixture", "S2", "--window", "1", "--gens", "3"][..],
        &["regrep", "--fixture", "S2", "--gens", "-1"][..],
        &["norm", "--fixture", "S2", "--element", "u1", "--tol", "-1"][..],
    ] {
        let out = xprod(&[&["--json"], args].concat());
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
    // usage errors from the argument parser
    assert_eq!(xprod(&["norm", "--fixture", "S2"]).status.code(), Some(2));
    assert_eq!(xprod(&["check-system"]).status.code(), Some(2));
    assert_eq!(
        xprod(&["check-system", "--fixture", "S2", "--system", "x.json"]).status.code(),
        Some(2)
    );

    let (code, r) = report(&["check-system", "--fixture", "Nope"]);
    assert_eq!(code, 2);
    assert_eq!(r["error"]["kind"], "config");
}

#[test]
fn module_failures_exit_1() {
    let (code, r) = report(&["transfer", "--fixture", "SNeg"]);
    assert_eq!(code, 1);
    assert_eq!(r["error"]["kind"], "module");
    assert!(r["error"]["message"].as_str().unwrap().contains("hereditary fails at x=1"));

    let (code, r) = report(&[
        "norm", "--fixture", "SAut", "--element", "u1 + u1* + u2", "--support-cap", "10",
    ]);
    assert_eq!(code, 1);
    assert!(r["error"]["message"].as_str().unwrap().contains("cap"));
}

#[test]
fn system_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = system_file(
        dir.path(),
        r#"{"name": "shift", "shape": {"commutative": 2}, "commutative_map": [1, null]}"#,
    );
    let (code, r) = report(&["check-system", "--system", &path, "--expect", "representable"]);
    assert_eq!(code, 0);
    assert_eq!(r["system"]["name"], "shift");
    assert_eq!(r["system"]["shape"], serde_json::json!([1, 1]));

    let bad = system_file(dir.path(), r#"{"shape": [1], "commutative_map": [0], "group_dim": 2}"#);
    let (code, r) = report(&["check-system", "--system", &bad]);
    assert_eq!(code, 2);
    assert_eq!(r["error"]["kind"], "system_load");

    let bad = system_file(dir.path(), "not json");
    assert_eq!(report(&["check-system", "--system", &bad]).0, 2);
}

#[test]
fn elements_from_json() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("a.json");
    std::fs::write(&p, r#"{"coeffs": [{"g": [1], "value": [[[2]], [[0]]]}]}"#).unwrap();
    let spec = format!("@{}", p.display());
    let (code, r) = report(&["norm", "--fixture", "S2", "--element", &spec, "--kmax", "4"]);
    assert_eq!(code, 0);
    assert!((r["interval"][0].as_f64().unwrap() - 2.0).abs() < 1e-12);

    // off-corner coefficient: rejected unless projection is requested
    let off = r#"{"coeffs": [{"g": [1], "value": [[[1]], [[1]]]}]}"#;
    assert_eq!(report(&["norm", "--fixture", "S2", "--element", off]).0, 2);
    let (code, r) = report(&["norm", "--fixture", "S2", "--element", off, "--project"]);
    assert_eq!(code, 0);
    assert!((r["interval"][1].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn output_file_and_tolerance_env() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("report.json");
    let out = Command::new(env!("CARGO_BIN_EXE_xprod"))
        .args(["--json", "--output", out_path.to_str().unwrap(), "norm", "--fixture", "SAut", "--element", "u1+u1*"])
        .env("XPROD_TOL", "1e-7")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let written = std::fs::read_to_string(&out_path).unwrap();
    assert_eq!(written.as_bytes(), out.stdout.as_slice());
    let r: Value = serde_json::from_str(&written).unwrap();
    assert_eq!(r["system"]["tol"], 1e-7);
    assert!(schema().is_valid(&r));
}

#[test]
fn config_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"command": "norm", "fixture": "S2", "element": "u1", "kmax": 3, "seed": 4}"#,
    )
    .unwrap();
    let (code, r) = report(&["run", cfg.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(r["seed"], 4);
    assert_eq!(r["k"], serde_json::json!([1, 2, 3]));

    // the report's config reproduces the run
    std::fs::write(&cfg, serde_json::to_string(&r["config"]).unwrap()).unwrap();
    let (_, again) = report(&["run", cfg.to_str().unwrap()]);
    assert_eq!(again, r);

    std::fs::write(&cfg, r#"{"command": "norm", "element": "u1"}"#).unwrap();
    assert_eq!(xprod(&["run", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn schema_rejects_broken_reports() {
    let (_, good) = report(&["norm", "--fixture", "S2", "--element", "u1", "--kmax", "2"]);
    let v = schema();
    for key in ["checks", "passed", "schema_version", "interval"] {
        let mut bad = good.clone();
        bad.as_object_mut().unwrap().remove(key);
        assert!(!v.is_valid(&bad), "report without {key} accepted");
    }
    let mut bad = good.clone();
    bad["checks"][0]["residual"] = Value::String("small".into());
    assert!(!v.is_valid(&bad));
    let mut bad = good;
    bad["error"] = serde_json::json!({"kind": "module", "message": "x"});
    assert!(!v.is_valid(&bad), "error report must not claim to pass");
}
