//! Well-posedness and limit-shadowing checks on generated sequences whose
//! residual `||u_n - T_lambda u_n||` tends to zero.
//!
//! A limit is approximated by its tail: the last quarter of the indices must
//! all sit below the tolerance.

use rand::Rng;
use serde::Serialize;

use crate::comparison::{analytic_k, Variant};
use crate::contraction::{averaged_raw, ContractionSpec};
use crate::error::{Error, Result};
use crate::sampling::stream;
use crate::space::{distance, norm, Vector};

pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_LENGTH: usize = 10_000;

/// Slack for the per-index `A'` bound.
pub const BOUND_SLACK: f64 = 1e-10;
/// Allowed drift of the orbit of `p`, relative to `max(1, ||p||)`.
pub const ORBIT_TOL: f64 = 1e-12;
/// `p` counts as a fixed point when `||p - T_lambda p|| <= CERTIFY_TOL * max(1, ||p||)`.
pub const CERTIFY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SequenceKind {
    /// `scale(n) = n^-exponent`
    PowerDecay { exponent: f64 },
    /// `scale(n) = ratio^n`
    GeometricDecay { ratio: f64 },
    /// Each coordinate of the direction gets its own factor
    /// `amplitude * n^-exponent * xi` with `xi` uniform in `[-1, 1]`.
    RandomPerturbation {
        amplitude: f64,
        exponent: f64,
        seed: u64,
    },
}

/// `u_n = p + scale(n) * direction / ||direction||` for `n = 1..=length`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SequenceRecipe {
    kind: SequenceKind,
    direction: Vector,
    length: usize,
}

fn positive(name: &'static str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: format!("must be positive and finite, got {x}"),
        })
    }
}

impl SequenceRecipe {
    pub fn new(kind: SequenceKind, direction: Vector, length: usize) -> Result<Self> {
        match kind {
            SequenceKind::PowerDecay { exponent } => positive("exponent", exponent)?,
            SequenceKind::GeometricDecay { ratio } => {
                if !(ratio > 0.0 && ratio < 1.0) {
                    return Err(Error::InvalidParameter {
                        name: "ratio",
                        reason: format!("must lie in (0, 1), got {ratio}"),
                    });
                }
            }
            SequenceKind::RandomPerturbation {
                amplitude,
                exponent,
                ..
            } => {
                positive("exponent", exponent)?;
                if !(amplitude >= 0.0) || !amplitude.is_finite() {
                    return Err(Error::InvalidParameter {
                        name: "amplitude",
                        reason: format!("must be finite and nonnegative, got {amplitude}"),
                    });
                }
            }
        }
        if direction.is_zero() {
            return Err(Error::InvalidParameter {
                name: "direction",
                reason: "must be nonzero".into(),
            });
        }
        if length == 0 {
            return Err(Error::InvalidParameter {
                name: "length",
                reason: "must be at least 1".into(),
            });
        }
        Ok(Self {
            kind,
            direction,
            length,
        })
    }

    pub fn kind(&self) -> SequenceKind {
        self.kind
    }

    pub fn direction(&self) -> &Vector {
        &self.direction
    }

    pub fn length(&self) -> usize {
        self.length
    }

    fn scale(&self, n: usize) -> f64 {
        let n = n as f64;
        match self.kind {
            SequenceKind::PowerDecay { exponent } => n.powf(-exponent),
            SequenceKind::GeometricDecay { ratio } => ratio.powf(n),
            SequenceKind::RandomPerturbation {
                amplitude,
                exponent,
                ..
            } => amplitude * n.powf(-exponent),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    WellPosedness,
    LimitShadowing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiagnosticVerdict {
    Pass,
    Fail,
    /// The residuals themselves do not reach the tolerance.
    HypothesisNotMet,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticReport {
    pub property: Property,
    pub verdict: DiagnosticVerdict,
    pub tol: f64,
    pub k_used: f64,
    /// First index of the tail window.
    pub tail_start: usize,
    /// `||u_n - T_lambda u_n||`
    pub residuals: Vec<f64>,
    /// `||u_n - p||`, or `||T_lambda^n p - u_n||` for limit shadowing.
    pub distances: Vec<f64>,
    /// `C` in the envelope `C * residual`: `1/(1-k)` for `A'`, fitted on
    /// the head of the sequence for `A`.
    pub envelope_constant: f64,
    /// Largest tail value of `distance / envelope`.
    pub tail_ratio: f64,
    /// First index violating `distance <= residual / (1 - k)`; `A'` only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound_violation: Option<usize>,
    /// `max_n ||T_lambda^n p - p||`; limit shadowing only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orbit_drift: Option<f64>,
}

impl DiagnosticReport {
    pub fn passed(&self) -> bool {
        self.verdict == DiagnosticVerdict::Pass
    }
}

fn scale_of(spec: &ContractionSpec, p: &Vector) -> Result<f64> {
    Ok(norm(spec.space(), p)?.max(1.0))
}

/// `||p - T_lambda p||`, rejecting points that are not numerically fixed.
pub fn certify_fixed_point(spec: &ContractionSpec, p: &Vector) -> Result<f64> {
    spec.space().check(p)?;
    let residual = distance(spec.space(), p, &averaged_raw(spec, p))?;
    if residual > CERTIFY_TOL * scale_of(spec, p)? {
        return Err(Error::NotCertified { residual });
    }
    Ok(residual)
}

/// The sequence `u_1, ..., u_length` described by `recipe` around `p`.
pub fn make_sequence(
    spec: &ContractionSpec,
    p: &Vector,
    recipe: &SequenceRecipe,
) -> Result<Vec<Vector>> {
    certify_fixed_point(spec, p)?;
    let space = spec.space();
    space.check(&recipe.direction)?;
    let len = norm(space, &recipe.direction)?;
    let dir: Vec<f64> = recipe.direction.coords().iter().map(|d| d / len).collect();

    let seq = (1..=recipe.length)
        .map(|n| {
            let c = recipe.scale(n);
            let coords = match recipe.kind {
                SequenceKind::RandomPerturbation { seed, .. } => {
                    let mut rng = stream(seed, n as u64);
                    p.coords()
                        .iter()
                        .zip(&dir)
                        .map(|(x, d)| x + c * rng.random_range(-1.0..=1.0) * d)
                        .collect()
                }
                _ => p
                    .coords()
                    .iter()
                    .zip(&dir)
                    .map(|(x, d)| x + c * d)
                    .collect(),
            };
            Vector::from_raw(coords)
        })
        .collect();
    Ok(seq)
}

struct Evaluated {
    residuals: Vec<f64>,
    tail_start: usize,
    k: f64,
}

fn evaluate(spec: &ContractionSpec, seq: &[Vector], tol: f64) -> Result<Evaluated> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter {
            name: "tol",
            reason: format!("must be positive, got {tol}"),
        });
    }
    let cert = analytic_k(spec.comparison(), spec.variant());
    if !cert.valid {
        return Err(Error::InvalidCertificate { k: cert.k });
    }
    let residuals = seq
        .iter()
        .map(|u| distance(spec.space(), u, &averaged_raw(spec, u)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Evaluated {
        tail_start: seq.len() - seq.len().div_ceil(4),
        residuals,
        k: cert.k,
    })
}

fn ratio(d: f64, e: f64) -> f64 {
    if d == 0.0 {
        0.0
    } else if e == 0.0 {
        f64::INFINITY
    } else {
        d / e
    }
}

fn judge(
    spec: &ContractionSpec,
    property: Property,
    ev: Evaluated,
    distances: Vec<f64>,
    tol: f64,
    orbit_drift: Option<f64>,
    orbit_ok: bool,
) -> DiagnosticReport {
    let Evaluated {
        residuals,
        tail_start,
        k,
    } = ev;
    let aprime = spec.variant() == Variant::APrime;

    let envelope_constant = if aprime {
        1.0 / (1.0 - k)
    } else {
        distances[..tail_start.max(1)]
            .iter()
            .zip(&residuals)
            .map(|(&d, &r)| ratio(d, r))
            .fold(0.0, f64::max)
    };
    let tail_ratio = distances[tail_start..]
        .iter()
        .zip(&residuals[tail_start..])
        .map(|(&d, &r)| ratio(d, envelope_constant * r))
        .fold(0.0, f64::max);
    let bound_violation = if aprime {
        distances
            .iter()
            .zip(&residuals)
            .position(|(&d, &r)| d > r / (1.0 - k) + BOUND_SLACK)
    } else {
        None
    };

    let verdict = if residuals[tail_start..].iter().any(|&r| !(r < tol)) {
        DiagnosticVerdict::HypothesisNotMet
    } else if !orbit_ok
        || bound_violation.is_some()
        || distances[tail_start..].iter().any(|&d| !(d < tol))
    {
        DiagnosticVerdict::Fail
    } else {
        DiagnosticVerdict::Pass
    };

    DiagnosticReport {
        property,
        verdict,
        tol,
        k_used: k,
        tail_start,
        residuals,
        distances,
        envelope_constant,
        tail_ratio,
        bound_violation,
        orbit_drift,
    }
}

/// Checks that `u_n -> p` for the generated sequence, and for `A'` specs the
/// per-index bound `||u_n - p|| <= ||u_n - T_lambda u_n|| / (1 - k)`.
pub fn check_wellposedness(
    spec: &ContractionSpec,
    p: &Vector,
    recipe: &SequenceRecipe,
    tol: f64,
) -> Result<DiagnosticReport> {
    let seq = make_sequence(spec, p, recipe)?;
    let ev = evaluate(spec, &seq, tol)?;
    let distances = seq
        .iter()
        .map(|u| distance(spec.space(), u, p))
        .collect::<Result<Vec<_>>>()?;
    Ok(judge(
        spec,
        Property::WellPosedness,
        ev,
        distances,
        tol,
        None,
        true,
    ))
}

/// Iterates the orbit `T_lambda^n p` alongside the sequence and checks
/// `||T_lambda^n p - u_n|| -> 0`. The orbit must stay at `p`; drifting away
/// fails the check.
pub fn check_limit_shadowing(
    spec: &ContractionSpec,
    p: &Vector,
    recipe: &SequenceRecipe,
    tol: f64,
) -> Result<DiagnosticReport> {
    let seq = make_sequence(spec, p, recipe)?;
    let ev = evaluate(spec, &seq, tol)?;
    let space = spec.space();

    let mut q = p.clone();
    let mut drift: f64 = 0.0;
    let mut distances = Vec::with_capacity(seq.len());
    for u in &seq {
        q = averaged_raw(spec, &q);
        drift = drift.max(distance(space, &q, p)?);
        distances.push(distance(space, &q, u)?);
    }
    let orbit_ok = drift <= ORBIT_TOL * scale_of(spec, p)?;
    Ok(judge(
        spec,
        Property::LimitShadowing,
        ev,
        distances,
        tol,
        Some(drift),
        orbit_ok,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contraction::apply_mapping;
    use crate::registry;
    use crate::solver::lambda_from_b;
    use proptest::prelude::*;

    fn power(gamma: f64, dir: Vector, len: usize) -> SequenceRecipe {
        SequenceRecipe::new(SequenceKind::PowerDecay { exponent: gamma }, dir, len).unwrap()
    }

    fn geometric(dir: Vector, len: usize) -> SequenceRecipe {
        SequenceRecipe::new(SequenceKind::GeometricDecay { ratio: 0.5 }, dir, len).unwrap()
    }

    #[test]
    fn recipe_validation() {
        let e = Vector::scalar(1.0);
        let bad = [
            SequenceKind::PowerDecay { exponent: 0.0 },
            SequenceKind::GeometricDecay { ratio: 1.0 },
            SequenceKind::GeometricDecay { ratio: 0.0 },
            SequenceKind::RandomPerturbation {
                amplitude: -1.0,
                exponent: 1.0,
                seed: 0,
            },
        ];
        for k in bad {
            assert!(SequenceRecipe::new(k, e.clone(), 5).is_err(), "{k:?}");
        }
        assert!(SequenceRecipe::new(
            SequenceKind::PowerDecay { exponent: 1.0 },
            Vector::scalar(0.0),
            5
        )
        .is_err());
        assert!(SequenceRecipe::new(SequenceKind::PowerDecay { exponent: 1.0 }, e, 0).is_err());
    }

    #[test]
    fn power_decay_around_three() {
        let spec = registry::ex3_7().unwrap();
        let seq = make_sequence(
            &spec,
            &Vector::scalar(3.0),
            &power(1.0, Vector::scalar(5.0), 50),
        )
        .unwrap();
        for (i, u) in seq.iter().enumerate() {
            let n = (i + 1) as f64;
            assert!((u.coords()[0] - (3.0 + 1.0 / n)).abs() < 1e-15);
        }
        assert!(matches!(
            make_sequence(
                &spec,
                &Vector::scalar(2.0),
                &power(1.0, Vector::scalar(1.0), 5)
            ),
            Err(Error::NotCertified { .. })
        ));
    }

    #[test]
    fn zero_scale_and_geometric() {
        let spec = registry::ex3_9().unwrap();
        let p = Vector::scalar(1.0);
        let r = SequenceRecipe::new(
            SequenceKind::RandomPerturbation {
                amplitude: 0.0,
                exponent: 1.0,
                seed: 3,
            },
            Vector::scalar(1.0),
            20,
        )
        .unwrap();
        let seq = make_sequence(&spec, &p, &r).unwrap();
        assert!(seq.iter().all(|u| *u == p));
        let rep = check_wellposedness(&spec, &p, &r, DEFAULT_TOL).unwrap();
        assert!(rep.passed());
        assert!(rep
            .residuals
            .iter()
            .chain(&rep.distances)
            .all(|&x| x == 0.0));
        let rep = check_limit_shadowing(&spec, &p, &r, DEFAULT_TOL).unwrap();
        assert!(rep.passed() && rep.distances.iter().all(|&x| x == 0.0));

        let g = make_sequence(
            &spec,
            &Vector::scalar(0.0 + 1.0),
            &geometric(Vector::scalar(-2.0), 10),
        )
        .unwrap();
        for w in g.windows(2) {
            let (a, b) = (w[0].coords()[0] - 1.0, w[1].coords()[0] - 1.0);
            assert_eq!(b, a / 2.0);
        }
    }

    #[test]
    fn wellposedness_examples() {
        let ex39 = registry::ex3_9().unwrap();
        let rep = check_wellposedness(
            &ex39,
            &Vector::scalar(1.0),
            &power(2.0, Vector::scalar(1.0), DEFAULT_LENGTH),
            DEFAULT_TOL,
        )
        .unwrap();
        assert_eq!(rep.verdict, DiagnosticVerdict::Pass);
        assert!(rep.bound_violation.is_none());

        let ex36 = registry::ex3_6(101).unwrap();
        let dir = ex36.space().sample(|t| 1.0 - t);
        let rep = check_wellposedness(
            &ex36,
            &ex36.space().zero(),
            &geometric(dir, 200),
            DEFAULT_TOL,
        )
        .unwrap();
        assert!(rep.passed());
        assert!(*rep.distances.last().unwrap() < 1e-50);
        assert!((rep.tail_ratio - 1.0).abs() < 1e-9);
    }

    #[test]
    fn slow_power_decay_needs_a_looser_tolerance() {
        let spec = registry::ex3_7().unwrap();
        let r = power(1.0, Vector::scalar(1.0), DEFAULT_LENGTH);
        let rep = check_wellposedness(&spec, &Vector::scalar(3.0), &r, DEFAULT_TOL).unwrap();
        assert_eq!(rep.verdict, DiagnosticVerdict::HypothesisNotMet);
        let rep = check_wellposedness(&spec, &Vector::scalar(3.0), &r, 1e-3).unwrap();
        assert!(rep.passed());
    }

    #[test]
    fn shadowing_distances_are_one_over_n() {
        let spec = registry::ex3_7().unwrap();
        let rep = check_limit_shadowing(
            &spec,
            &Vector::scalar(3.0),
            &power(1.0, Vector::scalar(1.0), 1000),
            1e-2,
        )
        .unwrap();
        assert!(rep.passed());
        assert_eq!(rep.orbit_drift, Some(0.0));
        for (i, d) in rep.distances.iter().enumerate() {
            let want = 1.0 / (i + 1) as f64;
            assert!((d - want).abs() <= 1e-15 * want.max(1.0) * 4.0);
        }

        let ex38 = registry::ex3_8(41).unwrap();
        let sp = ex38.space();
        let rep = check_limit_shadowing(
            &ex38,
            &sp.zero(),
            &power(2.0, sp.constant(1.0), DEFAULT_LENGTH),
            DEFAULT_TOL,
        )
        .unwrap();
        assert!(rep.passed());
    }

    #[test]
    fn orbit_drift_fails_shadowing() {
        // a point certified for the averaged map only up to CERTIFY_TOL drifts
        let spec = registry::ex3_6(11).unwrap();
        let p = spec.space().constant(5e-11);
        let rep = check_limit_shadowing(
            &spec,
            &p,
            &geometric(spec.space().constant(1.0), 80),
            DEFAULT_TOL,
        )
        .unwrap();
        assert!(rep.orbit_drift.unwrap() > ORBIT_TOL);
        assert_eq!(rep.verdict, DiagnosticVerdict::Fail);
    }

    proptest! {
        #[test]
        fn residual_equivalence(gamma in 0.5f64..3.0, seed in 0u64..1000, id in 0usize..6) {
            let entry = registry::all(101).unwrap().into_iter()
                .filter(|e| matches!(e.expected, registry::Expected::FixedPoint(_)))
                .nth(id).unwrap();
            let registry::Expected::FixedPoint(p) = entry.expected else { unreachable!() };
            let spec = entry.spec;
            let sp = spec.space();
            let lambda = lambda_from_b(spec.b()).unwrap();
            let r = SequenceRecipe::new(
                SequenceKind::RandomPerturbation { amplitude: 10.0, exponent: gamma, seed },
                sp.constant(1.0),
                50,
            ).unwrap();
            for u in make_sequence(&spec, &p, &r).unwrap() {
                let tu = apply_mapping(&spec, &u).unwrap();
                let lhs = distance(sp, &u, &averaged_raw(&spec, &u)).unwrap();
                let rhs = lambda * distance(sp, &u, &tu).unwrap();
                let scale = norm(sp, &u).unwrap() + norm(sp, &tu).unwrap();
                prop_assert!((lhs - rhs).abs() <= 1e-12 * scale);
            }
        }
    }
}
