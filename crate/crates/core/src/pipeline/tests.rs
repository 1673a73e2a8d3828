use super::*;

fn strip_timing(path: &Path) -> Value {
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    v.as_object_mut().unwrap().remove("timing");
    v
}

fn config(dir: &Path) -> PipelineConfig {
    let mut c = PipelineConfig::new(FieldSpec::gaussian(), dir.to_path_buf());
    c.until = Stage::Bloch;
    c
}

#[test]
fn rerun_hits_cache_and_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let s1 = run_pipeline(&config(a.path())).unwrap();
    assert_eq!(s1.status, Verdict::Pass, "{s1:?}");
    assert!(s1.stages.iter().all(|s| !s.cached));
    let s2 = run_pipeline(&config(a.path())).unwrap();
    assert!(s2.stages.iter().all(|s| s.cached));
    run_pipeline(&config(b.path())).unwrap();
    for name in ["forms.json", "complex.json", "bloch.json"] {
        assert_eq!(strip_timing(&a.path().join(name)), strip_timing(&b.path().join(name)), "{name}");
    }
}

#[test]
fn corrupted_artifact_names_the_field() {
    let d = tempfile::tempdir().unwrap();
    run_pipeline(&config(d.path())).unwrap();
    let p = d.path().join("bloch.json");
    let text = std::fs::read_to_string(&p).unwrap().replacen("\"h3_rank\": 1", "\"h3_rank\": \"one\"", 1);
    std::fs::write(&p, text).unwrap();
    match run_pipeline(&config(d.path())) {
        Err(Error::Schema { field, .. }) => assert_eq!(field, "payload.h3_rank"),
        other => panic!("expected a schema error, got {other:?}"),
    }
}

#[test]
fn budget_exhaustion_and_resume() {
    let d = tempfile::tempdir().unwrap();
    let out = d.path().join("q5.json");
    let mut p = FormsParams { field: FieldSpec::from_i64(&[0, 1]), m: 5, group: "gl-z".into(), order: "fifo".into(), budget: Some(1) };
    let first = run_forms(&p, &out).unwrap();
    assert!(!first.artifact.payload.complete);
    p.budget = None;
    let second = run_forms(&p, &out).unwrap();
    assert!(second.artifact.payload.complete);
    assert_eq!(second.artifact.payload.class_count, 3);
    assert!(run_forms(&p, &out).unwrap().cached);
}

#[test]
fn field_json_errors_name_the_field() {
    match FieldSpec::from_json_str(r#"{"min_poly": ["1", "x", "1"]}"#) {
        Err(Error::Schema { field, .. }) => assert_eq!(field, "min_poly[1]"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn exit_codes() {
    assert_eq!(exit_code(Verdict::Pass), 0);
    assert_eq!(exit_code(Verdict::Fail), 1);
    assert_eq!(exit_code(Verdict::Inconclusive), 2);
    assert_eq!(error_exit_code(&Error::Budget("x".into())), 3);
}
