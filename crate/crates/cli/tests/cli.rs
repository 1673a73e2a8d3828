use std::path::Path;
use std::process::Command;

use serde_json::Value;

fn vbloch(args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_vbloch")).arg("--json").args(args).output().unwrap();
    let v = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap(), v)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn perfect_forms_budget_and_resume() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("forms.json");
    let (code, v) = vbloch(&["perfect-forms", "--dim", "5", "--budget", "1", "--out", s(&out)]);
    assert_eq!(code, 3);
    assert_eq!(v["result"]["complete"], false);
    let (code, v) = vbloch(&["perfect-forms", "--dim", "5", "--out", s(&out)]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["classes"], 3);
    let (code, v) = vbloch(&["perfect-forms", "--dim", "5", "--out", s(&out)]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["cached"], true);
}

#[test]
fn gaussian_pipeline_until_bloch() {
    let dir = tempfile::tempdir().unwrap();
    let field = dir.path().join("f.json");
    std::fs::write(&field, r#"{"min_poly": ["1", "0", "1"]}"#).unwrap();
    let out = dir.path().join("run");
    let (code, v) = vbloch(&["verify", "--field", s(&field), "--out-dir", s(&out), "--until", "bloch"]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["status"], "pass");

    // a damaged artifact is reported by field name, not silently recomputed
    let bloch = out.join("bloch.json");
    let text = std::fs::read_to_string(&bloch).unwrap().replacen("\"h3_rank\": 1", "\"h3_rank\": \"one\"", 1);
    std::fs::write(&bloch, text).unwrap();
    let (code, v) = vbloch(&["verify", "--field", s(&field), "--out-dir", s(&out), "--until", "bloch"]);
    assert_eq!(code, 4);
    assert_eq!(v["field"], "payload.h3_rank");
}

#[test]
fn bad_field_names_the_entry() {
    let dir = tempfile::tempdir().unwrap();
    let field = dir.path().join("f.json");
    std::fs::write(&field, r#"{"min_poly": ["1", "x", "1"]}"#).unwrap();
    let (code, v) = vbloch(&["tperfect", "--field", s(&field), "--out", s(&dir.path().join("o.json"))]);
    assert_eq!(code, 4);
    assert!(v["error"].as_str().unwrap().contains("min_poly[1]"), "{v}");
}

#[test]
fn usage_error() {
    let (code, _) = vbloch(&["complex", "--nonsense"]);
    assert_eq!(code, 4);
}
