use std::process::Command;

use serde_json::Value;

fn data(file: &str) -> String {
    format!("{}/examples/data/{file}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> (i32, Option<Value>, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_emduality"))
        .args(args)
        .env_remove("EMDUALITY_SEED")
        .output()
        .unwrap();
    let stdout = String::from_utf8(out.stdout).unwrap();
    (out.status.code().unwrap(), serde_json::from_str(&stdout).ok(), stdout)
}

#[test]
fn stabilizer_axio_dilaton() {
    let (code, rep, _) = run(&["stabilizer", "--model", "axio-dilaton"]);
    let rep = rep.unwrap();
    assert_eq!(code, 0);
    assert_eq!(rep["data"]["dim_stab_sp"], 1);
    assert_eq!(rep["schema_version"], 1);
}

#[test]
fn uduality_t3() {
    let (code, rep, _) = run(&["uduality", "--model", "t3"]);
    let rep = rep.unwrap();
    assert_eq!(code, 0);
    let d = &rep["data"];
    assert_eq!((d["dim_u"].as_u64(), d["dim_stab_sp"].as_u64(), d["dim_iso_pr"].as_u64()), (Some(3), Some(0), Some(3)));
    assert_eq!(d["exactness_gap"], 0);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["models", "show", "unknown"]).0, 2);
    assert_eq!(run(&["no-such-command"]).0, 2);
    assert_eq!(run(&["residuals", "--config", "/nonexistent/config.json"]).0, 3);
    let (code, rep, _) = run(&["pair-check", "--model", "identity-tau", "--f", "translate:1", "--A", &data("not_symplectic.json")]);
    assert_eq!(code, 1);
    assert_eq!(rep.unwrap()["checks"][0]["pass"], false);
}

#[test]
fn reports_are_byte_identical() {
    let args = ["transport", "--config", &data("identity_tau.json"), "--f", "translate:1", "--A", &data("translate.json")];
    let (c1, _, a) = run(&args);
    let (c2, _, b) = run(&args);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(a, b);
}

#[test]
fn seed_is_recorded() {
    let out = Command::new(env!("CARGO_BIN_EXE_emduality"))
        .args(["models", "list"])
        .env("EMDUALITY_SEED", "42")
        .output()
        .unwrap();
    let rep: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rep["seed"], 42);
}

#[test]
fn file_inputs() {
    assert_eq!(run(&["residuals", "--config", &data("vacuum.json"), "--require-solution", "1e-12"]).0, 0);
    assert_eq!(run(&["selfdual", "--config", &data("axio_dilaton.json")]).0, 0);
    let (code, rep, _) = run(&["centralizer", "--bundle", &data("trivial_bundle.json"), "--taming", &data("standard_taming.json")]);
    assert_eq!(code, 0);
    assert_eq!(rep.unwrap()["data"]["dim"], 4);
    assert_eq!(run(&["invariants", "--bundle", &data("torus_bundle.json"), "--maxlen", "3"]).0, 0);
    assert_eq!(run(&["invariants", "--bundle", &data("torus_bundle.json"), "--maxlen", "9"]).0, 2);
    assert_eq!(run(&["models", "show", &data("identity_tau.model")]).0, 0);
}

#[test]
fn spinor_commands() {
    assert_eq!(run(&["spinor-check", "--frame", "minkowski", "--lambda", "0"]).0, 0);
    assert_eq!(run(&["spinor-check", "--frame", "ads4-poincare", "--lambda", "1"]).0, 0);
    assert_eq!(run(&["thm53", "--frame", "ads4-poincare", "--lambda", "1"]).0, 0);
    assert_eq!(run(&["thm53", "--frame", "de-sitter", "--lambda", "1"]).0, 2);
}
