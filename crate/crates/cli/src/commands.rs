use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use enfix_core::comparison::{
    analytic_k, check_axioms, ComparisonFunction, Family, KCertificate, Variant,
};
use enfix_core::contraction::{verify, CertificateReport, CertificateVerdict, ContractionSpec};
use enfix_core::diagnostics::{
    check_limit_shadowing, check_wellposedness, SequenceKind, SequenceRecipe, DEFAULT_LENGTH,
    DEFAULT_TOL,
};
use enfix_core::registry::{self, ExampleEntry, Expected};
use enfix_core::solver::{averaged_step, solve, StopRule, Termination};
use enfix_core::space::{distance, norm, Vector, DEFAULT_GRID};
use enfix_core::Error as CoreError;

use crate::config::{self, ConfigError, Overrides, DEFAULT_SAMPLES};
use crate::report::{self, CommandEcho, DiagnosticSummary, RunReport, SolveSummary};

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Ok = 0,
    PropertyFail = 1,
    Usage = 2,
    NonConvergence = 3,
    InvalidSpec = 4,
    Falsified = 5,
}

impl Exit {
    pub fn code(self) -> u8 {
        self as u8
    }
}

/// Example fixed points must be matched to this, relative to `max(1, ||p||)`.
pub const MATCH_TOL: f64 = 1e-9;
/// Default axiom sample count.
pub const DEFAULT_AXIOM_SAMPLES: usize = 2_000;

#[derive(Debug, Clone, Copy)]
pub struct Common<'a> {
    pub seed: u64,
    pub overrides: Overrides,
    pub report: Option<&'a Path>,
}

impl Common<'_> {
    fn echo(&self, name: &'static str, mut args: BTreeMap<&'static str, String>) -> CommandEcho {
        let ov = self.overrides;
        let mut put = |k, v: Option<String>| {
            if let Some(v) = v {
                args.insert(k, v);
            }
        };
        put("tol", ov.tol.map(|x| x.to_string()));
        put("max-iters", ov.max_iters.map(|x| x.to_string()));
        put("samples", ov.samples.map(|x| x.to_string()));
        put("grid", ov.grid.map(|x| x.to_string()));
        CommandEcho { name, args }
    }

    fn finish<T: Serialize>(&self, echo: &CommandEcho, exit: Exit, result: T) -> Exit {
        if let Some(path) = self.report {
            let rep = RunReport {
                tool: report::TOOL,
                version: report::VERSION,
                command: echo,
                seed: self.seed,
                exit_code: exit.code(),
                result,
            };
            if let Err(e) = report::write(path, &rep) {
                eprintln!("error: cannot write report {}: {e}", path.display());
                return Exit::Usage;
            }
        }
        exit
    }

    fn stop(&self) -> StopRule {
        let d = StopRule::default();
        StopRule {
            residual_tol: self.overrides.tol.unwrap_or(d.residual_tol),
            max_iters: self.overrides.max_iters.unwrap_or(d.max_iters),
            ..d
        }
    }
}

/// Plain notation for ordinary magnitudes, scientific otherwise.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || !x.is_finite() || (1e-4..1e7).contains(&a) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

fn short(v: &Vector) -> String {
    match v.coords() {
        [x] => num(*x),
        c => format!("<{} points, max |u| = {}>", c.len(), num(v.max_abs())),
    }
}

fn config_exit(e: &ConfigError) -> Exit {
    eprintln!("error: {e}");
    match e {
        ConfigError::Spec(_) => Exit::InvalidSpec,
        _ => Exit::Usage,
    }
}

fn certificate_line(cert: &KCertificate) -> String {
    format!(
        "k = {} ({})",
        num(cert.k),
        if cert.valid { "valid" } else { "invalid" }
    )
}

#[derive(Debug, Serialize)]
struct ExampleOutcome {
    id: &'static str,
    note: &'static str,
    expected: Expected,
    observed: String,
    matches: bool,
    certificate: KCertificate,
    verify: CertificateReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    solve: Option<SolveSummary>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    diagnostics: Vec<DiagnosticSummary>,
}

/// Power-decay and geometric sequences along the constant direction.
fn standard_recipes(e: &ExampleEntry) -> Vec<(&'static str, SequenceRecipe)> {
    let dir = e.spec.space().constant(1.0);
    let kinds = [
        ("power-decay", SequenceKind::PowerDecay { exponent: 2.0 }),
        (
            "geometric-decay",
            SequenceKind::GeometricDecay { ratio: 0.5 },
        ),
    ];
    kinds
        .into_iter()
        .map(|(name, k)| {
            (
                name,
                SequenceRecipe::new(k, dir.clone(), DEFAULT_LENGTH).expect("valid recipe"),
            )
        })
        .collect()
}

fn run_example(
    e: &ExampleEntry,
    seed: u64,
    samples: usize,
    stop: &StopRule,
) -> Result<ExampleOutcome, CoreError> {
    let certificate = analytic_k(e.spec.comparison(), e.spec.variant());
    let ver = verify(&e.spec, seed, samples)?;
    let mut outcome = ExampleOutcome {
        id: e.id,
        note: e.note,
        expected: e.expected.clone(),
        observed: String::new(),
        matches: false,
        certificate,
        verify: ver,
        solve: None,
        diagnostics: Vec::new(),
    };
    let verified = outcome.verify.verdict == CertificateVerdict::VerifiedOnSamples;

    match &e.expected {
        Expected::Falsifiable => {
            outcome.matches = !verified;
            outcome.observed = match &outcome.verify.witness {
                Some(w) => format!(
                    "falsified at u = {}, v = {}: lhs = {} > rhs = {}",
                    short(&w.u),
                    short(&w.v),
                    num(w.lhs),
                    num(w.rhs)
                ),
                None => format!("not falsified in {} samples", outcome.verify.samples),
            };
        }
        Expected::DomainExit => {
            let res = solve(&e.spec, &e.u0, stop)?;
            outcome.matches = res.termination == Termination::DomainExit;
            outcome.observed = match res.trace.domain_exit_at {
                Some(n) => format!(
                    "domain-exit at iterate {n}, value {}",
                    short(&res.fixed_point)
                ),
                None => format!("no domain exit, terminated by {:?}", res.termination),
            };
            outcome.solve = Some(SolveSummary::from(&res));
        }
        Expected::FixedPoint(p) => {
            let res = solve(&e.spec, &e.u0, stop)?;
            let space = e.spec.space();
            let gap = distance(space, &res.fixed_point, p)?;
            let close = gap <= MATCH_TOL * norm(space, p)?.max(1.0);
            for (name, recipe) in standard_recipes(e) {
                for r in [
                    check_wellposedness(&e.spec, p, &recipe, DEFAULT_TOL)?,
                    check_limit_shadowing(&e.spec, p, &recipe, DEFAULT_TOL)?,
                ] {
                    outcome.diagnostics.push(DiagnosticSummary::new(name, &r));
                }
            }
            let diag_ok = outcome
                .diagnostics
                .iter()
                .all(|d| d.verdict == enfix_core::diagnostics::DiagnosticVerdict::Pass);
            outcome.matches =
                verified && res.termination == Termination::Residual && close && diag_ok;
            outcome.observed = format!(
                "p = {} after {} iteration{}, {}, diagnostics {}",
                short(&res.fixed_point),
                res.iterations,
                if res.iterations == 1 { "" } else { "s" },
                if verified { "verified" } else { "FALSIFIED" },
                if diag_ok { "pass" } else { "FAIL" },
            );
            outcome.solve = Some(SolveSummary::from(&res));
        }
    }
    Ok(outcome)
}

pub fn examples(common: &Common<'_>, filter: Option<&str>) -> Exit {
    let pattern_text = filter.unwrap_or("*");
    let pattern = match glob::Pattern::new(pattern_text) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: bad example filter `{pattern_text}`: {e}");
            return Exit::Usage;
        }
    };
    let grid = common.overrides.grid.unwrap_or(DEFAULT_GRID);
    let samples = common.overrides.samples.unwrap_or(DEFAULT_SAMPLES);
    let ids: Vec<&str> = registry::IDS
        .iter()
        .copied()
        .filter(|id| pattern.matches(id))
        .collect();
    if ids.is_empty() {
        eprintln!(
            "error: no example matches `{pattern_text}`; known ids: {}",
            registry::IDS.join(", ")
        );
        return Exit::Usage;
    }
    let mut args = BTreeMap::new();
    args.insert("filter", pattern_text.to_string());
    let echo = common.echo("examples", args);

    let stop = common.stop();
    let mut outcomes = Vec::new();
    for id in ids {
        let run =
            registry::get(id, grid).and_then(|e| run_example(&e, common.seed, samples, &stop));
        match run {
            Ok(o) => {
                println!(
                    "{:<9} {:<6} {}",
                    o.id,
                    if o.matches { "match" } else { "MISS" },
                    o.observed
                );
                outcomes.push(o);
            }
            Err(e) => {
                eprintln!("error: {id}: {e}");
                return Exit::Usage;
            }
        }
    }
    println!("seed {}", common.seed);
    let exit = if outcomes.iter().all(|o| o.matches) {
        Exit::Ok
    } else {
        Exit::PropertyFail
    };
    common.finish(&echo, exit, outcomes)
}

fn config_echo(common: &Common<'_>, name: &'static str, path: &Path) -> CommandEcho {
    let mut args = BTreeMap::new();
    args.insert(
        "config",
        path.file_name().map_or_else(
            || path.display().to_string(),
            |f| f.to_string_lossy().into_owned(),
        ),
    );
    common.echo(name, args)
}

#[derive(Debug, Serialize)]
struct SpecOutcome<'a> {
    spec: &'a ContractionSpec,
    certificate: KCertificate,
    #[serde(skip_serializing_if = "Option::is_none")]
    verify: Option<CertificateReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    solve: Option<SolveSummary>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    diagnostics: Vec<DiagnosticSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

impl<'a> SpecOutcome<'a> {
    fn new(spec: &'a ContractionSpec) -> Self {
        Self {
            spec,
            certificate: analytic_k(spec.comparison(), spec.variant()),
            verify: None,
            solve: None,
            diagnostics: Vec::new(),
            error: None,
        }
    }
}

fn print_verify(r: &CertificateReport) {
    match (&r.verdict, &r.witness) {
        (CertificateVerdict::Falsified, Some(w)) => println!(
            "verify: falsified after {} samples at u = {}, v = {}: lhs = {} > rhs = {}",
            r.samples,
            short(&w.u),
            short(&w.v),
            num(w.lhs),
            num(w.rhs)
        ),
        _ => println!(
            "verify: verified on {} samples, min margin {}",
            r.samples,
            num(r.margin_min)
        ),
    }
}

fn load(common: &Common<'_>, path: &Path) -> Result<config::RunConfig, Exit> {
    config::load(path, common.overrides).map_err(|e| config_exit(&e))
}

pub fn verify_cmd(common: &Common<'_>, path: &Path) -> Exit {
    let cfg = match load(common, path) {
        Ok(c) => c,
        Err(x) => return x,
    };
    let echo = config_echo(common, "verify", path);
    let mut out = SpecOutcome::new(&cfg.spec);
    println!("{}", certificate_line(&out.certificate));
    if !out.certificate.valid {
        return common.finish(&echo, Exit::InvalidSpec, out);
    }
    let exit = match verify(&cfg.spec, common.seed, cfg.samples) {
        Ok(r) => {
            print_verify(&r);
            let exit = if r.verdict == CertificateVerdict::Falsified {
                Exit::Falsified
            } else {
                Exit::Ok
            };
            out.verify = Some(r);
            exit
        }
        Err(e) => {
            eprintln!("error: {e}");
            out.error = Some(e.to_string());
            Exit::Usage
        }
    };
    println!("seed {}", common.seed);
    common.finish(&echo, exit, out)
}

pub fn solve_cmd(common: &Common<'_>, path: &Path) -> Exit {
    let cfg = match load(common, path) {
        Ok(c) => c,
        Err(x) => return x,
    };
    let echo = config_echo(common, "solve", path);
    let mut out = SpecOutcome::new(&cfg.spec);
    println!("{}", certificate_line(&out.certificate));
    if !out.certificate.valid {
        eprintln!(
            "error: refusing to iterate, contraction factor k = {} is not below 1",
            out.certificate.k
        );
        return common.finish(&echo, Exit::InvalidSpec, out);
    }
    let exit = run_solve(&cfg, common.seed, &mut out);
    println!("seed {}", common.seed);
    common.finish(&echo, exit, out)
}

fn run_solve(cfg: &config::RunConfig, seed: u64, out: &mut SpecOutcome<'_>) -> Exit {
    match verify(&cfg.spec, seed, cfg.samples) {
        Ok(r) => {
            print_verify(&r);
            let falsified = r.verdict == CertificateVerdict::Falsified;
            out.verify = Some(r);
            if falsified {
                return Exit::Falsified;
            }
        }
        Err(e) => {
            out.error = Some(e.to_string());
            eprintln!("error: {e}");
            return Exit::Usage;
        }
    }
    match solve(&cfg.spec, &cfg.u0, &cfg.stop) {
        Ok(res) => {
            let s = SolveSummary::from(&res);
            println!(
                "solve: {:?} after {} iterations, p = {}, residual {}, a-priori bound {}",
                s.termination,
                s.iterations,
                short(&s.fixed_point),
                num(s.final_residual),
                num(s.apriori_bound_at_exit)
            );
            out.solve = Some(s);
            match res.termination {
                Termination::Residual | Termination::Step => Exit::Ok,
                Termination::MaxIters | Termination::DomainExit => Exit::NonConvergence,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            out.error = Some(e.to_string());
            match e {
                CoreError::InvalidCertificate { .. } => Exit::InvalidSpec,
                _ => Exit::NonConvergence,
            }
        }
    }
}

/// Extra averaged steps while the residual keeps shrinking. A solver exit at
/// `residual_tol` leaves `p` up to `residual_tol / (1 - k)` from the fixed
/// point, which is too coarse for the orbit check of limit shadowing.
fn refine(spec: &ContractionSpec, p: &Vector) -> Vector {
    const MAX_STEPS: usize = 5_000;
    let space = spec.space();
    let mut u = p.clone();
    let mut res = f64::INFINITY;
    for _ in 0..MAX_STEPS {
        let Ok(next) = averaged_step(spec, &u) else {
            break;
        };
        let Ok(r) = distance(space, &u, &next) else {
            break;
        };
        if !(r < res) || !spec.in_domain(&next) {
            break;
        }
        res = r;
        u = next;
        if r == 0.0 {
            break;
        }
    }
    u
}

pub fn diagnose_cmd(common: &Common<'_>, path: &Path) -> Exit {
    let cfg = match load(common, path) {
        Ok(c) => c,
        Err(x) => return x,
    };
    let echo = config_echo(common, "diagnose", path);
    let mut out = SpecOutcome::new(&cfg.spec);
    println!("{}", certificate_line(&out.certificate));
    if !out.certificate.valid {
        return common.finish(&echo, Exit::InvalidSpec, out);
    }
    let d = &cfg.diagnose;
    let p = match &d.p {
        Some(p) => p.clone(),
        None => match solve(&cfg.spec, &cfg.u0, &cfg.stop) {
            Ok(res) if res.termination == Termination::Residual => {
                let p = refine(&cfg.spec, &res.fixed_point);
                out.solve = Some(SolveSummary::from(&res));
                p
            }
            Ok(res) => {
                eprintln!(
                    "error: no fixed point to diagnose, solve stopped by {:?}",
                    res.termination
                );
                out.solve = Some(SolveSummary::from(&res));
                return common.finish(&echo, Exit::NonConvergence, out);
            }
            Err(e) => {
                eprintln!("error: {e}");
                out.error = Some(e.to_string());
                return common.finish(&echo, Exit::NonConvergence, out);
            }
        },
    };
    let name = match d.recipe.kind() {
        SequenceKind::PowerDecay { .. } => "power-decay",
        SequenceKind::GeometricDecay { .. } => "geometric-decay",
        SequenceKind::RandomPerturbation { .. } => "random-perturbation",
    };
    let reports = check_wellposedness(&cfg.spec, &p, &d.recipe, d.tol)
        .and_then(|w| Ok([w, check_limit_shadowing(&cfg.spec, &p, &d.recipe, d.tol)?]));
    let exit = match reports {
        Ok(reports) => {
            for r in &reports {
                let s = DiagnosticSummary::new(name, r);
                println!(
                    "{:?}: {:?}, final distance {}, tail ratio {}",
                    s.property,
                    s.verdict,
                    num(s.final_distance),
                    num(s.tail_ratio)
                );
                out.diagnostics.push(s);
            }
            if reports.iter().all(|r| r.passed()) {
                Exit::Ok
            } else {
                Exit::PropertyFail
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            out.error = Some(e.to_string());
            Exit::PropertyFail
        }
    };
    println!("seed {}", common.seed);
    common.finish(&echo, exit, out)
}

pub fn axioms_cmd(common: &Common<'_>, family: &str, params: &[f64], variant: &str) -> Exit {
    let Ok(fam) = family.parse::<Family>() else {
        eprintln!(
            "error: unknown family `{family}`; known: {}",
            Family::ALL
                .iter()
                .map(|f| f.name())
                .collect::<Vec<_>>()
                .join(", ")
        );
        return Exit::Usage;
    };
    let Ok(var) = variant.parse::<Variant>() else {
        eprintln!("error: unknown variant `{variant}`, expected A or A'");
        return Exit::Usage;
    };
    let f = match ComparisonFunction::new(fam, params.to_vec(), var) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: {e}");
            return Exit::InvalidSpec;
        }
    };
    let samples = common.overrides.samples.unwrap_or(DEFAULT_AXIOM_SAMPLES);
    let mut args = BTreeMap::new();
    args.insert("family", fam.name().to_string());
    args.insert("params", format!("{params:?}"));
    args.insert("variant", var.to_string());
    let echo = common.echo("axioms", args);

    let rep = match check_axioms(&f, var, common.seed, samples) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return Exit::Usage;
        }
    };
    for c in &rep.checked_axioms {
        let text = serde_json::to_string(&c.verdict).expect("serializable");
        println!("{:<4} {text}", c.axiom.name());
    }
    println!(
        "analytic {}; numeric k = {}",
        certificate_line(&rep.analytic),
        num(rep.numeric.k)
    );
    println!("seed {}", common.seed);
    let exit = if rep.all_pass() {
        Exit::Ok
    } else {
        Exit::PropertyFail
    };
    common.finish(&echo, exit, rep)
}
