use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use voronoi_bloch::complex::VoronoiComplex;
use voronoi_bloch::field::spec::FieldSpec;
use voronoi_bloch::pipeline::{self, artifact, BlochPayload, ComplexParams, FormsPayload, FormsParams, PipelineConfig, RegulatorParams, Stage};
use voronoi_bloch::regulator::Verdict;
use voronoi_bloch::Error;

#[derive(Parser)]
#[command(name = "vbloch", version, about = "Perfect forms, Voronoi complexes and Bloch-group regulators")]
struct Cli {
    /// Machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Log progress to stderr (repeat for more).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Perfect forms over ℚ up to GL_m(ℤ).
    PerfectForms {
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value = "fifo")]
        order: String,
        /// Stop after this many classes; rerun with the same --out to resume.
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// T-perfect forms over a number field.
    Tperfect {
        #[arg(long)]
        field: PathBuf,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value = "gl-of")]
        group: String,
        #[arg(long, default_value = "fifo")]
        order: String,
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Cell complex, boundary maps and homology from a complete enumeration.
    Complex {
        #[arg(long)]
        field: PathBuf,
        #[arg(long)]
        classes: PathBuf,
        #[arg(long, default_value = "lex")]
        vertex_order: String,
        /// `observed` (lcm of stabilizer orders) or `bound`.
        #[arg(long, default_value = "observed")]
        n_policy: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Bloch element from the top cycle, with exact verification.
    Bloch {
        #[arg(long)]
        complex: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Regulator matrix, Borel volume and index report.
    Regulator {
        #[arg(long)]
        bloch: PathBuf,
        #[arg(long)]
        field: PathBuf,
        #[arg(long, default_value_t = 1)]
        k2: u64,
        #[arg(long, default_value_t = 24)]
        k3tor: u64,
        #[arg(long, default_value_t = 60)]
        precision: u32,
        #[arg(long, default_value_t = 1e-6)]
        tolerance: f64,
        /// Largest prime bound for the Euler product of ζ_F(2).
        #[arg(long, default_value_t = 1 << 22)]
        euler_bound: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Every stage in order, reusing unchanged artifacts.
    Verify {
        #[arg(long)]
        field: PathBuf,
        #[arg(long, default_value = "vbloch-out")]
        out_dir: PathBuf,
        /// Last stage to run: tperfect, complex, bloch or regulator.
        #[arg(long, default_value = "regulator")]
        until: String,
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long, default_value = "fifo")]
        order: String,
        #[arg(long, default_value = "lex")]
        vertex_order: String,
        #[arg(long, default_value = "observed")]
        n_policy: String,
        #[arg(long)]
        k2: Option<u64>,
        #[arg(long)]
        k3tor: Option<u64>,
        #[arg(long, default_value_t = 60)]
        precision: u32,
        #[arg(long, default_value_t = 1e-6)]
        tolerance: f64,
        #[arg(long, default_value_t = 1 << 22)]
        euler_bound: u64,
    },
}

struct Output {
    status: Verdict,
    budget_exhausted: bool,
    value: Value,
    text: String,
}

fn run(cmd: Cmd) -> Result<Output, Error> {
    match cmd {
        Cmd::PerfectForms { dim, order, budget, out } => {
            let p = FormsParams { field: FieldSpec::from_i64(&[0, 1]), m: dim, group: "gl-z".into(), order, budget };
            forms(&p, &out)
        }
        Cmd::Tperfect { field, dim, group, order, budget, out } => {
            let p = FormsParams { field: pipeline::load_field(&field)?, m: dim, group, order, budget };
            forms(&p, &out)
        }
        Cmd::Complex { field, classes, vertex_order, n_policy, out } => {
            let spec = pipeline::load_field(&field)?;
            let forms: artifact::Artifact<FormsPayload> = artifact::read(&classes, pipeline::FORMS)?;
            let p = ComplexParams { vertex_order, n_policy: pipeline::parse_policy(&n_policy)? };
            let o = pipeline::run_complex(&spec, &forms, &p, &out)?;
            let c: &VoronoiComplex = &o.artifact.payload;
            let cells: Vec<usize> = c.cells.iter().map(|l| l.len()).collect();
            let value = json!({"cached": o.cached, "cells": cells, "homology": c.homology, "n": c.n, "warnings": c.warnings});
            let text = format!(
                "cells per dimension {cells:?}\nbetti {:?}, torsion {:?}\nN = {} (observed {}, bound {:?})\n{}",
                c.homology.betti,
                c.homology.torsion,
                c.n,
                c.n_observed,
                c.n_bound.value,
                c.warnings.join("\n")
            );
            let f = spec.build()?;
            let h3 = c.homology.betti.get(3).copied().unwrap_or(0);
            Ok(Output { status: if h3 == f.r2 { Verdict::Pass } else { Verdict::Fail }, budget_exhausted: false, value, text })
        }
        Cmd::Bloch { complex, out } => {
            let cx: artifact::Artifact<VoronoiComplex> = artifact::read(&complex, pipeline::COMPLEX)?;
            let o = pipeline::run_bloch(&cx, &out)?;
            let b: &BlochPayload = &o.artifact.payload;
            let certs: Vec<_> = b.elements.iter().flat_map(|e| e.certificates.clone()).collect();
            let text = certs.iter().map(|c| format!("{:?} [{}]: {} ({})", c.nu, c.regime, if c.passed { "pass" } else { "FAIL" }, c.note)).collect::<Vec<_>>().join("\n");
            let value = json!({"cached": o.cached, "terms": b.elements.iter().map(|e| e.terms.len()).sum::<usize>(), "certificates": certs});
            Ok(Output { status: if b.verified() { Verdict::Pass } else { Verdict::Fail }, budget_exhausted: false, value, text })
        }
        Cmd::Regulator { bloch, field, k2, k3tor, precision, tolerance, euler_bound, out } => {
            let spec = pipeline::load_field(&field)?;
            let bl: artifact::Artifact<BlochPayload> = artifact::read(&bloch, pipeline::BLOCH)?;
            let p = RegulatorParams { k2, k3tor, precision, tolerance, euler_cap: euler_bound };
            let o = pipeline::run_regulator(&spec, &bl, &p, &out)?;
            let r = &o.artifact.payload.report;
            let text = format!(
                "det M = {} ± {}\nvol = {} ± {}\n(2N)^r2 vol = {} ± {}: {:?}\n|det M|/(2π)^r2 = {} matches {}; R2-normalized matches {}",
                r.det_m.mid, r.det_m.rad, r.volume.mid, r.volume.rad, r.volume_target.mid, r.volume_target.rad, r.volume_verdict, r.raw_constant.mid, r.raw_matches, r.normalized_matches
            );
            Ok(Output { status: r.status(), budget_exhausted: false, value: pipeline::to_value(r), text })
        }
        Cmd::Verify { field, out_dir, until, budget, order, vertex_order, n_policy, k2, k3tor, precision, tolerance, euler_bound } => {
            let mut cfg = PipelineConfig::new(pipeline::load_field(&field)?, out_dir);
            cfg.until = Stage::parse(&until)?;
            cfg.class_budget = budget;
            cfg.order = order;
            cfg.complex = ComplexParams { vertex_order, n_policy: pipeline::parse_policy(&n_policy)? };
            cfg.k2 = k2;
            cfg.k3tor = k3tor;
            cfg.precision = precision;
            cfg.tolerance = tolerance;
            cfg.euler_cap = euler_bound;
            let s = pipeline::run_pipeline(&cfg)?;
            let mut text: Vec<String> = s.stages.iter().map(|st| format!("{:<10} {}{}", st.stage, st.path, if st.cached { " (cached)" } else { "" })).collect();
            text.extend(s.checks.iter().map(|c| format!("[{:?}] {}: {}", c.status, c.name, c.detail)));
            if let Some(c) = &s.constant {
                text.push(c.clone());
            }
            Ok(Output { status: s.status, budget_exhausted: false, value: pipeline::to_value(&s), text: text.join("\n") })
        }
    }
}

fn forms(p: &FormsParams, out: &std::path::Path) -> Result<Output, Error> {
    let o = pipeline::run_forms(p, out)?;
    let g = &o.artifact.payload;
    let keys: Vec<String> = g.graph.classes.iter().map(|c| c.key.clone()).collect();
    let text = format!(
        "{} classes ({}){}\n{}",
        g.class_count,
        if g.complete { "complete" } else { "budget exhausted; rerun to resume" },
        if o.cached { ", cached" } else { "" },
        keys.join("\n")
    );
    let value = json!({"cached": o.cached, "complete": g.complete, "classes": g.class_count, "keys": keys, "seconds": o.artifact.timing.seconds});
    Ok(Output { status: Verdict::Pass, budget_exhausted: !g.complete, value, text })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 4 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    let json = cli.json;
    match run(cli.cmd) {
        Ok(o) => {
            let code = if o.budget_exhausted { 3 } else { pipeline::exit_code(o.status) };
            if json {
                println!("{}", json!({"status": o.status, "exit_code": code, "result": o.value}));
            } else {
                println!("{}", o.text);
            }
            ExitCode::from(code as u8)
        }
        Err(e) => {
            let code = pipeline::error_exit_code(&e);
            if json {
                let mut v = json!({"status": "error", "exit_code": code, "error": e.to_string()});
                if let Error::Schema { artifact, field, .. } = &e {
                    v["artifact"] = json!(artifact);
                    v["field"] = json!(field);
                }
                println!("{v}");
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(code as u8)
        }
    }
}
