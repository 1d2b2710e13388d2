//! JSON run reports. Field order is fixed by the struct definitions, and
//! nothing time- or path-dependent is recorded, so equal inputs give equal
//! bytes.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use enfix_core::diagnostics::{DiagnosticReport, DiagnosticVerdict, Property};
use enfix_core::solver::{SolveResult, Termination};
use enfix_core::space::Vector;

pub const TOOL: &str = "enfix";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// The subcommand and the options that influence its result.
#[derive(Debug, Clone, Serialize)]
pub struct CommandEcho {
    pub name: &'static str,
    pub args: BTreeMap<&'static str, String>,
}

#[derive(Debug, Serialize)]
pub struct RunReport<'a, T: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a CommandEcho,
    pub seed: u64,
    pub exit_code: u8,
    pub result: T,
}

pub fn write<T: Serialize>(path: &Path, report: &RunReport<'_, T>) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    std::fs::write(path, text)
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveSummary {
    pub termination: Termination,
    pub iterations: usize,
    pub fixed_point: Vector,
    pub final_residual: f64,
    pub lambda: f64,
    pub k_used: f64,
    pub apriori_bound_at_exit: f64,
    /// Largest observed `step_norms[n+1] / step_norms[n]`.
    pub max_step_ratio: Option<f64>,
}

impl From<&SolveResult> for SolveSummary {
    fn from(r: &SolveResult) -> Self {
        Self {
            termination: r.termination,
            iterations: r.iterations,
            fixed_point: r.fixed_point.clone(),
            final_residual: r.trace.residuals.last().copied().unwrap_or(0.0),
            lambda: r.lambda,
            k_used: r.k_used,
            apriori_bound_at_exit: r.apriori_bound_at_exit,
            max_step_ratio: r.trace.ratios.iter().flatten().copied().reduce(f64::max),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagnosticSummary {
    pub property: Property,
    pub recipe: String,
    pub verdict: DiagnosticVerdict,
    pub tol: f64,
    pub length: usize,
    pub final_residual: f64,
    pub final_distance: f64,
    pub envelope_constant: f64,
    pub tail_ratio: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound_violation: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orbit_drift: Option<f64>,
}

impl DiagnosticSummary {
    pub fn new(recipe: impl Into<String>, r: &DiagnosticReport) -> Self {
        Self {
            property: r.property,
            recipe: recipe.into(),
            verdict: r.verdict,
            tol: r.tol,
            length: r.distances.len(),
            final_residual: r.residuals.last().copied().unwrap_or(0.0),
            final_distance: r.distances.last().copied().unwrap_or(0.0),
            envelope_constant: r.envelope_constant,
            tail_ratio: r.tail_ratio,
            bound_violation: r.bound_violation,
            orbit_drift: r.orbit_drift,
        }
    }
}
