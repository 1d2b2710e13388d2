//! Averaged (Krasnoselskii) iteration `u_{n+1} = (1 - lambda) u_n + lambda T u_n`
//! with `lambda = 1 / (b + 1)`, plus the geometric error bounds implied by the
//! contraction factor `k`.

use serde::Serialize;

use crate::comparison::analytic_k;
use crate::contraction::{averaged_raw, ContractionSpec};
use crate::error::{Error, Result};
use crate::space::{distance, Vector};

/// Coordinates beyond this magnitude abort the iteration.
pub const OVERFLOW_LIMIT: f64 = 1e100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StopRule {
    /// Stop once `||u_n - T_lambda u_n||` is at most this.
    pub residual_tol: f64,
    /// Stop once `||u_{n+1} - u_n||` is at most this; 0 disables.
    pub step_tol: f64,
    pub max_iters: usize,
}

impl Default for StopRule {
    fn default() -> Self {
        Self {
            residual_tol: 1e-12,
            step_tol: 0.0,
            max_iters: 10_000,
        }
    }
}

impl StopRule {
    pub fn validate(&self) -> Result<()> {
        if !(self.residual_tol > 0.0) {
            return Err(Error::InvalidParameter {
                name: "residual_tol",
                reason: format!("must be positive, got {}", self.residual_tol),
            });
        }
        if !(self.step_tol >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "step_tol",
                reason: format!("must be nonnegative, got {}", self.step_tol),
            });
        }
        if !self.residual_tol.is_finite() && !self.step_tol.is_finite() {
            return Err(Error::InvalidParameter {
                name: "stop rule",
                reason: "at least one tolerance must be finite".into(),
            });
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidParameter {
                name: "max_iters",
                reason: "must be at least 1".into(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationTrace {
    pub iterates: Vec<Vector>,
    /// `||u_{n+1} - u_n||`
    pub step_norms: Vec<f64>,
    /// `||u_n - T_lambda u_n||`
    pub residuals: Vec<f64>,
    /// `step_norms[n] / step_norms[n-1]`, for `n >= 1` with a nonzero divisor.
    pub ratios: Vec<Option<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub domain_exit_at: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    Residual,
    Step,
    MaxIters,
    DomainExit,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveResult {
    pub fixed_point: Vector,
    /// Averaged steps taken.
    pub iterations: usize,
    pub termination: Termination,
    pub lambda: f64,
    pub k_used: f64,
    /// `k^N / (1 - k) ||u_1 - u_0||` at the exit index `N`.
    pub apriori_bound_at_exit: f64,
    #[serde(skip)]
    pub trace: IterationTrace,
}

/// `lambda = 1 / (b + 1)`; equals 1 exactly when `b = 0`.
pub fn lambda_from_b(b: f64) -> Result<f64> {
    if !b.is_finite() {
        return Err(Error::NonFinite { what: "b" });
    }
    if b < 0.0 {
        return Err(Error::InvalidParameter {
            name: "b",
            reason: format!("must be nonnegative, got {b}"),
        });
    }
    Ok(1.0 / (b + 1.0))
}

/// One averaged step `(1 - lambda) u + lambda Tu`.
pub fn averaged_step(spec: &ContractionSpec, u: &Vector) -> Result<Vector> {
    spec.space().check(u)?;
    Ok(averaged_raw(spec, u))
}

fn overflowed(u: &Vector) -> bool {
    !u.is_finite() || u.max_abs() > OVERFLOW_LIMIT
}

/// Runs the averaged iteration from `u0` until `stop` fires.
///
/// Refuses specs whose closed-form contraction factor is not below 1.
pub fn solve(spec: &ContractionSpec, u0: &Vector, stop: &StopRule) -> Result<SolveResult> {
    stop.validate()?;
    spec.space().check(u0)?;
    if overflowed(u0) {
        return Err(Error::Overflow { iteration: 0 });
    }
    let cert = analytic_k(spec.comparison(), spec.variant());
    if !cert.valid {
        return Err(Error::InvalidCertificate { k: cert.k });
    }
    let lambda = lambda_from_b(spec.b())?;
    let space = spec.space();

    let mut trace = IterationTrace {
        iterates: vec![u0.clone()],
        step_norms: Vec::new(),
        residuals: Vec::new(),
        ratios: Vec::new(),
        domain_exit_at: None,
    };
    let mut u = u0.clone();
    let mut n = 0;
    let termination = loop {
        let next = averaged_raw(spec, &u);
        if overflowed(&next) {
            return Err(Error::Overflow { iteration: n + 1 });
        }
        let residual = distance(space, &u, &next)?;
        trace.residuals.push(residual);
        if residual <= stop.residual_tol {
            break Termination::Residual;
        }
        if n == stop.max_iters {
            break Termination::MaxIters;
        }

        if let Some(&prev) = trace.step_norms.last() {
            trace.ratios.push((prev > 0.0).then(|| residual / prev));
        }
        trace.step_norms.push(residual);
        trace.iterates.push(next.clone());
        u = next;
        n += 1;

        if !spec.in_domain(&u) {
            trace.domain_exit_at = Some(n);
            break Termination::DomainExit;
        }
        if residual <= stop.step_tol {
            break Termination::Step;
        }
    };

    let d0 = trace.step_norms.first().copied().unwrap_or(0.0);
    Ok(SolveResult {
        fixed_point: u,
        iterations: n,
        termination,
        lambda,
        k_used: cert.k,
        apriori_bound_at_exit: apriori_bound(cert.k, d0, n)?,
        trace,
    })
}

fn check_bound_args(k: f64, d0: f64) -> Result<()> {
    if !(0.0..1.0).contains(&k) {
        return Err(Error::InvalidCertificate { k });
    }
    if !(d0 >= 0.0) || !d0.is_finite() {
        return Err(Error::InvalidParameter {
            name: "d0",
            reason: format!("must be finite and nonnegative, got {d0}"),
        });
    }
    Ok(())
}

fn pow(k: f64, n: usize) -> f64 {
    i32::try_from(n).map_or(0.0, |e| k.powi(e))
}

/// `||u_n - p|| <= k^n / (1 - k) * d0` with `d0 = ||u_1 - u_0||`.
pub fn apriori_bound(k: f64, d0: f64, n: usize) -> Result<f64> {
    check_bound_args(k, d0)?;
    Ok(pow(k, n) * d0 / (1.0 - k))
}

/// `||u_{n+m} - u_n|| <= k^n (1 - k^m) / (1 - k) * d0`.
pub fn cauchy_bound(k: f64, d0: f64, n: usize, m: usize) -> Result<f64> {
    check_bound_args(k, d0)?;
    if m == 0 {
        return Err(Error::InvalidParameter {
            name: "m",
            reason: "must be at least 1".into(),
        });
    }
    Ok(pow(k, n) * (1.0 - pow(k, m)) / (1.0 - k) * d0)
}
