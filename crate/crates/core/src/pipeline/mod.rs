//! Stage orchestration: perfect forms → cell complex → Bloch element →
//! regulator report, each stage persisted as a content-hashed artifact.

pub mod artifact;

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bloch::{bloch_from_cycle, torsion_generator, verify_bloch, Certificate, Nu, PreBloch, TermJson, TorsionData};
use crate::complex::{build_complex, NPolicy, VoronoiComplex};
use crate::error::{Error, Result};
use crate::field::spec::FieldSpec;
use crate::field::NumberField;
use crate::regulator::{index_report, IndexReport, RegulatorMatrix, ReportInput, Verdict};
use crate::voronoi::{Engine, VoronoiGraph};

pub use artifact::Artifact;

pub const FORMS: &str = "perfect_forms";
pub const COMPLEX: &str = "complex";
pub const BLOCH: &str = "bloch";
pub const REPORT: &str = "regulator_report";

pub struct Outcome<T> {
    pub artifact: Artifact<T>,
    pub cached: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FormsPayload {
    pub field: FieldSpec,
    pub m: usize,
    pub group: String,
    pub order: String,
    pub complete: bool,
    pub class_count: usize,
    pub graph: VoronoiGraph,
}

#[derive(Clone, Debug)]
pub struct FormsParams {
    pub field: FieldSpec,
    pub m: usize,
    pub group: String,
    pub order: String,
    /// Class-count limit for this run.
    pub budget: Option<usize>,
}

/// Enumerates perfect (or T-perfect) classes, resuming from an incomplete
/// artifact with the same inputs at `out`.
pub fn run_forms(p: &FormsParams, out: &Path) -> Result<Outcome<FormsPayload>> {
    if p.budget == Some(0) {
        return Err(Error::Invalid("budget must be positive".into()));
    }
    let inputs = json!({"stage": FORMS, "field": p.field, "m": p.m, "group": p.group, "order": p.order});
    let prev = artifact::cached::<FormsPayload>(out, FORMS, &inputs)?;
    if let Some(a) = &prev {
        if a.payload.complete {
            return Ok(Outcome { artifact: a.clone(), cached: true });
        }
    }
    let f = p.field.build()?;
    let e = Engine::new(&f, p.m, &p.group, &p.order)?;
    let t0 = Instant::now();
    let (mut graph, before) = match prev {
        Some(a) => (a.payload.graph, a.timing.seconds),
        None => (e.new_graph(&e.start_form()?)?, 0.0),
    };
    let complete = e.enumerate(&mut graph, p.budget)?;
    let payload = FormsPayload {
        field: p.field.clone(),
        m: p.m,
        group: p.group.clone(),
        order: p.order.clone(),
        complete,
        class_count: graph.classes.len(),
        graph,
    };
    let a = Artifact::new(FORMS, &inputs, payload, before + t0.elapsed().as_secs_f64());
    a.write(out)?;
    Ok(Outcome { artifact: a, cached: false })
}

#[derive(Clone, Debug)]
pub struct ComplexParams {
    pub vertex_order: String,
    pub n_policy: NPolicy,
}

impl Default for ComplexParams {
    fn default() -> Self {
        ComplexParams { vertex_order: "lex".into(), n_policy: NPolicy::Observed }
    }
}

fn policy_name(p: NPolicy) -> &'static str {
    match p {
        NPolicy::Observed => "observed",
        NPolicy::Bound => "bound",
    }
}

pub fn parse_policy(s: &str) -> Result<NPolicy> {
    match s {
        "observed" => Ok(NPolicy::Observed),
        "bound" => Ok(NPolicy::Bound),
        _ => Err(Error::Invalid(format!("unknown N policy `{s}` (known: observed, bound)"))),
    }
}

fn check_field(have: &FieldSpec, want: &FieldSpec, what: &str) -> Result<()> {
    if have.build()?.spec() != want.build()?.spec() {
        return Err(Error::Invalid(format!("{what} was computed over a different field")));
    }
    Ok(())
}

pub fn run_complex(field: &FieldSpec, forms: &Artifact<FormsPayload>, p: &ComplexParams, out: &Path) -> Result<Outcome<VoronoiComplex>> {
    check_field(&forms.payload.field, field, "the perfect-form artifact")?;
    if !forms.payload.complete {
        return Err(Error::Budget("the perfect-form enumeration is incomplete; rerun it with a larger budget".into()));
    }
    let inputs = json!({"stage": COMPLEX, "field": field, "forms": forms.payload_hash(), "vertex_order": p.vertex_order, "n_policy": policy_name(p.n_policy)});
    if let Some(a) = artifact::cached(out, COMPLEX, &inputs)? {
        return Ok(Outcome { artifact: a, cached: true });
    }
    let f = field.build()?;
    let t0 = Instant::now();
    let c = build_complex(&f, &forms.payload.graph, &p.vertex_order, p.n_policy)?;
    let a = Artifact::new(COMPLEX, &inputs, c, t0.elapsed().as_secs_f64());
    a.write(out)?;
    Ok(Outcome { artifact: a, cached: false })
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct BlochElementJson {
    /// Index of the H₃ generator it came from.
    pub cycle: usize,
    pub terms: Vec<TermJson>,
    pub certificates: Vec<Certificate>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct BlochPayload {
    pub field: FieldSpec,
    pub n: u64,
    pub r2: usize,
    pub h3_rank: usize,
    pub elements: Vec<BlochElementJson>,
    pub torsion: Vec<TorsionData>,
}

impl BlochPayload {
    /// Whether every element passed modulo ±1.
    pub fn verified(&self) -> bool {
        self.elements.iter().all(|e| e.certificates.iter().filter(|c| c.nu == Nu::PlusMinusOne).all(|c| c.passed))
    }
}

pub fn run_bloch(cx: &Artifact<VoronoiComplex>, out: &Path) -> Result<Outcome<BlochPayload>> {
    let inputs = json!({"stage": BLOCH, "complex": cx.payload_hash()});
    if let Some(a) = artifact::cached(out, BLOCH, &inputs)? {
        return Ok(Outcome { artifact: a, cached: true });
    }
    let c = &cx.payload;
    let f = c.field.build()?;
    let t0 = Instant::now();
    let beta = bloch_from_cycle(&f, c)?;
    let certificates = [Nu::PlusMinusOne, Nu::RootsOfUnity].iter().map(|&nu| verify_bloch(&f, &beta, nu)).collect::<Result<_>>()?;
    let torsion = [2, 3].iter().map(|&p| torsion_generator(&f, p)).collect::<Result<_>>()?;
    let payload = BlochPayload {
        field: c.field.clone(),
        n: c.n,
        r2: f.r2,
        h3_rank: c.homology.betti.get(3).copied().unwrap_or(0),
        elements: vec![BlochElementJson { cycle: 0, terms: beta.to_json(), certificates }],
        torsion,
    };
    let a = Artifact::new(BLOCH, &inputs, payload, t0.elapsed().as_secs_f64());
    a.write(out)?;
    Ok(Outcome { artifact: a, cached: false })
}

#[derive(Clone, Debug)]
pub struct RegulatorParams {
    pub k2: u64,
    pub k3tor: u64,
    pub precision: u32,
    pub tolerance: f64,
    pub euler_cap: u64,
}

impl Default for RegulatorParams {
    fn default() -> Self {
        RegulatorParams { k2: 1, k3tor: 24, precision: 60, tolerance: 1e-6, euler_cap: 1 << 22 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ReportPayload {
    pub field: FieldSpec,
    pub report: IndexReport,
}

pub fn run_regulator(field: &FieldSpec, bl: &Artifact<BlochPayload>, p: &RegulatorParams, out: &Path) -> Result<Outcome<ReportPayload>> {
    check_field(&bl.payload.field, field, "the Bloch artifact")?;
    if p.precision < 16 || p.euler_cap < 2 || p.k2 == 0 || p.k3tor == 0 || !(p.tolerance > 0.0) {
        return Err(Error::Invalid("precision ≥ 16, euler bound ≥ 2, positive k2, k3tor and tolerance are required".into()));
    }
    let inputs = json!({
        "stage": REPORT, "field": field, "bloch": bl.payload_hash(), "k2": p.k2, "k3tor": p.k3tor,
        "precision": p.precision, "tolerance": p.tolerance, "euler_cap": p.euler_cap,
    });
    if let Some(a) = artifact::cached(out, REPORT, &inputs)? {
        return Ok(Outcome { artifact: a, cached: true });
    }
    let f = field.build()?;
    let t0 = Instant::now();
    let betas = bl.payload.elements.iter().map(|e| PreBloch::from_json(&f, &e.terms)).collect::<Result<Vec<_>>>()?;
    let m = RegulatorMatrix::new(&f, &betas, p.precision)?;
    let inp = ReportInput { n: bl.payload.n, k2: p.k2, k3tor: p.k3tor, precision: p.precision, tolerance: p.tolerance, euler_cap: p.euler_cap };
    let report = index_report(&f, &m, &inp)?;
    let a = Artifact::new(REPORT, &inputs, ReportPayload { field: field.clone(), report }, t0.elapsed().as_secs_f64());
    a.write(out)?;
    Ok(Outcome { artifact: a, cached: false })
}

/// |K₂O_F| for the fields where it is known to be trivial; other fields
/// need the value supplied.
pub fn default_k2(f: &NumberField) -> Option<u64> {
    if !f.is_imaginary_quadratic() {
        return None;
    }
    let d = f.discriminant.to_string();
    matches!(d.as_str(), "-3" | "-4").then_some(1)
}

/// |K₃(O_F)_tors| is 24 for every imaginary quadratic field.
pub fn default_k3tor(f: &NumberField) -> Option<u64> {
    f.is_imaginary_quadratic().then_some(24)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Forms,
    Complex,
    Bloch,
    Regulator,
}

impl Stage {
    pub fn parse(s: &str) -> Result<Stage> {
        match s {
            "tperfect" | "forms" => Ok(Stage::Forms),
            "complex" => Ok(Stage::Complex),
            "bloch" => Ok(Stage::Bloch),
            "regulator" => Ok(Stage::Regulator),
            _ => Err(Error::Invalid(format!("unknown stage `{s}` (known: tperfect, complex, bloch, regulator)"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct PipelineConfig {
    pub field: FieldSpec,
    pub out_dir: PathBuf,
    /// Last stage to run; the stages before it always run.
    pub until: Stage,
    pub class_budget: Option<usize>,
    pub order: String,
    pub complex: ComplexParams,
    pub k2: Option<u64>,
    pub k3tor: Option<u64>,
    pub precision: u32,
    pub tolerance: f64,
    pub euler_cap: u64,
}

impl PipelineConfig {
    pub fn new(field: FieldSpec, out_dir: PathBuf) -> Self {
        let r = RegulatorParams::default();
        PipelineConfig {
            field,
            out_dir,
            until: Stage::Regulator,
            class_budget: None,
            order: "fifo".into(),
            complex: ComplexParams::default(),
            k2: None,
            k3tor: None,
            precision: r.precision,
            tolerance: r.tolerance,
            euler_cap: r.euler_cap,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct StageRecord {
    pub stage: String,
    pub path: String,
    pub cached: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Check {
    pub name: String,
    pub status: Verdict,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Summary {
    pub field: FieldSpec,
    pub stages: Vec<StageRecord>,
    pub checks: Vec<Check>,
    pub status: Verdict,
    /// Which constant |det M|/(2π)^{r₂} matches, when the regulator ran.
    pub constant: Option<String>,
}

fn check(name: &str, ok: bool, detail: String) -> Check {
    Check { name: name.into(), status: if ok { Verdict::Pass } else { Verdict::Fail }, detail }
}

fn overall(checks: &[Check]) -> Verdict {
    if checks.iter().any(|c| c.status == Verdict::Fail) {
        Verdict::Fail
    } else if checks.iter().any(|c| c.status == Verdict::Inconclusive) {
        Verdict::Inconclusive
    } else {
        Verdict::Pass
    }
}

/// Runs the stages in order, reusing artifacts whose inputs are unchanged.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<Summary> {
    let f = cfg.field.build()?;
    let path = |name: &str| cfg.out_dir.join(name);
    let rec = |stage: &str, p: &Path, cached: bool| StageRecord { stage: stage.into(), path: p.display().to_string(), cached };
    let mut stages = Vec::new();
    let mut checks = Vec::new();
    let fp = FormsParams {
        field: cfg.field.clone(),
        m: 2,
        group: if f.is_rational() { "gl-z".into() } else { "gl-of".into() },
        order: cfg.order.clone(),
        budget: cfg.class_budget,
    };
    let forms = run_forms(&fp, &path("forms.json"))?;
    stages.push(rec("tperfect", &path("forms.json"), forms.cached));
    let fpl = &forms.artifact.payload;
    checks.push(check("enumeration complete", fpl.complete, format!("{} classes", fpl.class_count)));
    let finish = |stages, checks: Vec<Check>, constant| Summary { field: cfg.field.clone(), stages, status: overall(&checks), checks, constant };
    if !fpl.complete {
        return Err(Error::Budget(format!("class budget reached after {} classes", fpl.class_count)));
    }
    if cfg.until == Stage::Forms {
        return Ok(finish(stages, checks, None));
    }
    let cx = run_complex(&cfg.field, &forms.artifact, &cfg.complex, &path("complex.json"))?;
    stages.push(rec("complex", &path("complex.json"), cx.cached));
    let c = &cx.artifact.payload;
    checks.push(check("d∘d = 0", true, format!("{} boundary maps checked", c.boundary.len())));
    let h3 = c.homology.betti.get(3).copied().unwrap_or(0);
    checks.push(check("H3 rank = r2", h3 == f.r2, format!("H3 rank {h3}, r2 = {}", f.r2)));
    if cfg.until == Stage::Complex {
        return Ok(finish(stages, checks, None));
    }
    let bl = run_bloch(&cx.artifact, &path("bloch.json"))?;
    stages.push(rec("bloch", &path("bloch.json"), bl.cached));
    let bp = &bl.artifact.payload;
    let regimes: Vec<String> = bp.elements.iter().flat_map(|e| e.certificates.iter().map(|c| format!("{:?}: {} ({})", c.nu, c.passed, c.regime))).collect();
    checks.push(check("beta in the Bloch group", bp.verified(), regimes.join("; ")));
    if cfg.until == Stage::Bloch {
        return Ok(finish(stages, checks, None));
    }
    let k2 = cfg.k2.or_else(|| default_k2(&f)).ok_or_else(|| Error::Invalid("k2 is required for this field".into()))?;
    let k3tor = cfg.k3tor.or_else(|| default_k3tor(&f)).ok_or_else(|| Error::Invalid("k3tor is required for this field".into()))?;
    let rp = RegulatorParams { k2, k3tor, precision: cfg.precision, tolerance: cfg.tolerance, euler_cap: cfg.euler_cap };
    let rep = run_regulator(&cfg.field, &bl.artifact, &rp, &path("report.json"))?;
    stages.push(rec("regulator", &path("report.json"), rep.cached));
    let r = &rep.artifact.payload.report;
    checks.push(Check {
        name: "|det M| = (2N)^r2 vol".into(),
        status: r.status(),
        detail: format!("det {} ± {}, target {} ± {}, relative gap ≤ {:.2e}", r.det_m.mid, r.det_m.rad, r.volume_target.mid, r.volume_target.rad, r.volume_gap.1),
    });
    let constant = format!(
        "|det M|/(2π)^r2 = {} matches: {}; after dividing by R2 from ζ_F(2): {} (2^(1+r2) N^r2 k2/k3tor = {}, k2 = {})",
        r.raw_constant.mid, r.raw_matches, r.normalized_matches, r.full_index, r.k2_index
    );
    Ok(finish(stages, checks, Some(constant)))
}

/// Exit status for a verdict: 0 pass, 1 fail, 2 inconclusive.
pub fn exit_code(v: Verdict) -> i32 {
    match v {
        Verdict::Pass => 0,
        Verdict::Fail => 1,
        Verdict::Inconclusive => 2,
    }
}

/// Exit status for an error: internal identity failures count as falsified,
/// exhausted budgets get 3, bad input 4.
pub fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::Inconsistent(_) => 1,
        Error::Budget(_) => 3,
        _ => 4,
    }
}

pub fn load_field(path: &Path) -> Result<FieldSpec> {
    FieldSpec::from_json_str(&std::fs::read_to_string(path)?)
}

/// The payload as a JSON value, for `--json` output.
pub fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

#[cfg(test)]
mod tests;
