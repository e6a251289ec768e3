use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use wvctx::bounds::{bound_template2, required_cs_general, RequiredCs};
use wvctx::onticmodels::{
    audit_model, audit_psi_complete, build_full_disturbance_model, build_minimal_disturbance_model,
    build_psi_complete_model, extract_operational_data, weak_value_scenario, AuditReport, DEFAULT_BINS,
};
use wvctx::polytope::{
    format_rational, lemma1_pipeline, lemma2_pipeline, max_p_minus, parse_rational, rational::to_f64, Constraint, HRep,
    Rational, ScenarioParams,
};
use wvctx::schemes::{noisy_postselection, SchemeKind};

use crate::config::ExperimentConfig;
use crate::report::{csv_rows, run_point, sig12, PointReport, CSV_HEADER};
use crate::CliError;

pub const THREADS_ENV: &str = "WVCTX_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Pipeline {
    Lemma1,
    Lemma2,
}

/// Writes to `path`, or stdout when absent.
fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|e| CliError::input(format!("cannot write {}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| CliError::input(format!("stdout: {e}"))),
    }
}

fn json<T: Serialize + ?Sized>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut out = serde_json::to_vec_pretty(value).map_err(|e| CliError::Internal(e.to_string()))?;
    out.push(b'\n');
    Ok(out)
}

fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::input(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?;
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| CliError::Internal(e.to_string()))
}

pub fn simulate(config: &Path, out: Option<&Path>, format: Format) -> Result<(), CliError> {
    let exp = ExperimentConfig::load(config)?.experiment()?;
    let reports: Vec<PointReport> =
        thread_pool()?.install(|| exp.points.par_iter().map(|spec| run_point(&exp, spec)).collect::<Result<_, _>>())?;
    let bytes = match format {
        Format::Json => json(&reports)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| CliError::Internal(e.to_string());
            w.write_record(CSV_HEADER).map_err(io)?;
            for r in &reports {
                for row in csv_rows(r) {
                    w.write_record(&row).map_err(io)?;
                }
            }
            w.into_inner().map_err(|e| CliError::Internal(e.to_string()))?
        }
    };
    emit(out, &bytes)?;
    for r in &reports {
        for note in &r.notes {
            eprintln!("{}={}: {note}", r.parameter, sig12(r.value));
        }
    }
    Ok(())
}

pub struct AssessArgs {
    pub p_minus: f64,
    pub p_f: f64,
    pub p_d: f64,
    pub q_star: f64,
    pub p_tilde: Option<f64>,
    pub p_m: Option<f64>,
}

pub fn assess(a: &AssessArgs) -> Result<RequiredCs, CliError> {
    let p_tilde = match (a.p_tilde, a.p_m) {
        (Some(_), Some(_)) => return Err(CliError::input("give at most one of --ptilde and --pm")),
        (Some(t), None) => t,
        (None, Some(m)) => {
            if !(0.0..=1.0).contains(&m) {
                return Err(CliError::input(format!("--pm must lie in [0, 1], got {m}")));
            }
            (1.0 + m) / 2.0
        }
        (None, None) => 0.5,
    };
    let r = required_cs_general(a.p_minus, a.p_f, a.p_d, p_tilde, a.q_star)?;
    println!("required C_S > {}", sig12(r.value));
    println!(
        "{}",
        if r.feasible {
            "feasible: a sharp enough postselection certifies contextuality"
        } else {
            "infeasible: no C_S <= 1 yields a violation"
        }
    );
    Ok(r)
}

#[derive(Serialize)]
struct ModelsOutput {
    spread: f64,
    bins: usize,
    audits: Vec<AuditReport>,
}

fn print_audit(title: &str, r: &AuditReport) {
    println!("[{title}]");
    println!("  reproduction residual: {}", sig12(r.max_residual));
    println!("  condition 1 (pointer response): {}", verdict(r.condition1_holds));
    println!("  condition 2 (disturbance): {}", verdict(r.condition2_holds));
    if let Some(nc) = r.prep_nc_holds {
        println!("  preparation equivalence: {}", verdict(nc));
    }
    let failing = r.failing_conditions();
    if failing.is_empty() {
        println!("  failing: none");
    } else {
        println!("  failing: {}", failing.join(", "));
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "holds"
    } else {
        "FAILS"
    }
}

pub fn models(config: &Path, out: Option<&Path>) -> Result<Vec<AuditReport>, CliError> {
    let cfg = ExperimentConfig::load(config)?;
    if cfg.scheme.kind != SchemeKind::GaussianPosition {
        return Err(CliError::input("models needs a gaussian_position config"));
    }
    let exp = cfg.experiment()?;
    let spec = exp.points.first().ok_or_else(|| CliError::input("no sweep point"))?;
    if exp.points.len() > 1 {
        eprintln!("models: using the first sweep point only");
    }
    let s = spec.strength();
    let bins = exp.bins.unwrap_or(DEFAULT_BINS);
    let stats = spec.run(&exp.rho, &exp.e, &exp.pi)?;
    let post = noisy_postselection(&exp.pi, spec.noise_eps)?;
    let data = extract_operational_data(&exp.rho, &exp.e, &post, s, bins)?;

    let a = audit_model(&build_minimal_disturbance_model(&data)?, &data)?;
    let b = audit_model(&build_full_disturbance_model(&data)?, &data)?;
    let scenario = weak_value_scenario(&exp.rho, &exp.e, &post, s, bins)?;
    let c = audit_psi_complete(&build_psi_complete_model(&scenario.table)?, &scenario)?;

    println!("s = {}, bins = {bins}", sig12(s));
    println!(
        "p_F = {}, p_d = {}, p_- = {}",
        sig12(stats.p_f),
        sig12(stats.p_d),
        sig12(stats.p_minus)
    );
    print_audit("model A: minimal disturbance", &a);
    print_audit("model B: full disturbance", &b);
    print_audit("model C: psi-complete", &c);
    let audits = vec![a, b, c];
    if let Some(path) = out {
        emit(
            Some(path),
            &json(&ModelsOutput {
                spread: s,
                bins,
                audits: audits.clone(),
            })?,
        )?;
    }
    Ok(audits)
}

/// Rational CLI parameters; absent optional values default to ½.
pub struct RationalArgs {
    pub p_d: String,
    pub p_tilde: Option<String>,
    pub q_0: Option<String>,
    pub q_star: Option<String>,
}

impl RationalArgs {
    pub fn params(&self) -> Result<ScenarioParams, CliError> {
        let get = |flag: &str, v: &Option<String>| -> Result<Rational, CliError> {
            match v {
                Some(s) => parse_rational(s).map_err(|e| CliError::input(format!("--{flag}: {e}"))),
                None => Ok(parse_rational("1/2")?),
            }
        };
        let p_d = parse_rational(&self.p_d).map_err(|e| CliError::input(format!("--pd: {e}")))?;
        Ok(ScenarioParams::new(
            p_d,
            get("ptilde", &self.p_tilde)?,
            get("q0", &self.q_0)?,
            get("qstar", &self.q_star)?,
        )?)
    }
}

fn names(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

fn print_facets(h: &HRep, names: &[String]) {
    for c in &h.equalities {
        println!("  {} = 0", c.render(names));
    }
    for c in &h.inequalities {
        println!("  {} >= 0", c.render(names));
    }
}

fn print_target(t: &Constraint, names: &[String], present: bool) {
    println!(
        "target facet {} >= 0: {}",
        t.canonical_inequality().render(names),
        if present { "present" } else { "absent" }
    );
}

fn print_point(v: &[Rational]) -> String {
    let parts: Vec<String> = v.iter().map(format_rational).collect();
    format!("({})", parts.join(", "))
}

pub fn polytope(pipeline: Pipeline, args: &RationalArgs, out: Option<&Path>) -> Result<bool, CliError> {
    let params = args.params()?;
    match pipeline {
        Pipeline::Lemma1 => {
            let r = lemma1_pipeline(&params)?;
            let n = names(&["p_F", "p_-"]);
            println!("assignment vertices: {}", r.assignment_vertex_count);
            println!("deterministic vertices: {}", r.deterministic_vertices.len());
            println!("reduced hull vertices: {}", r.reduced.len());
            for v in &r.reduced.vertices {
                println!("  {}", print_point(v));
            }
            println!("facets over (p_F, p_-):");
            print_facets(&r.hrep, &n);
            print_target(&r.target, &n, r.facet_present);
            if let Some(p) = out {
                emit(Some(p), &json(&r)?)?;
            }
            Ok(r.facet_present)
        }
        Pipeline::Lemma2 => {
            let r = lemma2_pipeline(&params)?;
            let n = names(&["p_F", "C_S", "p_-"]);
            println!("assignment vertices: {}", r.assignment_vertex_count);
            println!("kappa vertices: {}", r.kappa.len());
            println!("intermediate vertices: {}", r.intermediate_vertex_count);
            println!("intermediate dimension: {}", r.intermediate_dimension);
            println!("projected hull vertices: {}", r.projected.len());
            println!("facets over (p_F, C_S, p_-):");
            print_facets(&r.hrep, &n);
            print_target(&r.target, &n, r.facet_present);
            if let Some(p) = out {
                emit(Some(p), &json(&r)?)?;
            }
            Ok(r.facet_present)
        }
    }
}

pub const TRADEOFF_HEADER: [&str; 5] = ["p_f", "c_s", "max_p_minus", "max_p_minus_exact", "template2"];

/// Grid of `(p_F, C_S)` at multiples of `1/grid`, with the exact maximum
/// of `p_−` over the projected polytope and the closed-form template-2 bound.
pub fn tradeoff(args: &RationalArgs, grid: usize, out: Option<&PathBuf>) -> Result<(), CliError> {
    if grid == 0 {
        return Err(CliError::input("--grid must be positive"));
    }
    let params = args.params()?;
    let r = lemma2_pipeline(&params)?;
    let p_d = to_f64(&params.p_d);
    let p_tilde = to_f64(&params.p_tilde);
    let q_star = to_f64(&params.q_star);
    let steps: Vec<Rational> = (0..=grid)
        .map(|k| Rational::new((k as i64).into(), (grid as i64).into()))
        .collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Internal(e.to_string());
    w.write_record(TRADEOFF_HEADER).map_err(io)?;
    for p_f in &steps {
        for c_s in &steps {
            let (approx, exact) = match max_p_minus(&r.hrep, p_f, c_s)? {
                Some(m) => (sig12(to_f64(&m)), format_rational(&m)),
                None => (String::new(), String::new()),
            };
            let t2 = bound_template2(to_f64(p_f), p_d, p_tilde, to_f64(c_s), q_star)?;
            w.write_record([sig12(to_f64(p_f)), sig12(to_f64(c_s)), approx, exact, sig12(t2)])
                .map_err(io)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| CliError::Internal(e.to_string()))?;
    emit(out.map(|p| p.as_path()), &bytes)
}
