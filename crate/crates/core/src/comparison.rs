//! Comparison functions `f: R+^3 -> R+` and the class axioms they must meet.
//!
//! The catalog holds seven positively homogeneous families. For each family
//! the branch implications of the class axioms ("if `r <= f(..)` then
//! `r <= k s`") are solved in closed form by [`analytic_k`]; [`numeric_k`]
//! recomputes the same constants by bisection and serves as the independent
//! check. [`check_axioms_a`] and [`check_axioms_aprime`] combine both with
//! sampled continuity, homogeneity and monotonicity probes.

use std::fmt;

use rand::Rng;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::sampling::{log_uniform, stream};

/// Which contraction inequality (and which axiom class) a spec uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Displacements `||u - Tu||`, `||v - Tv||`; class `A` (A1-A3).
    A,
    /// Cross displacements; class `A'` (A'1-A'6).
    APrime,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::A => "A",
            Variant::APrime => "A'",
        })
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" | "a" => Ok(Variant::A),
            "A'" | "a'" | "Aprime" | "aprime" | "A-prime" => Ok(Variant::APrime),
            other => Err(Error::Unknown(other.to_string())),
        }
    }
}

impl Serialize for Variant {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// `alpha * r`
    ScaledR,
    /// `alpha * (s + t)`
    ScaledSumSt,
    /// `alpha * (r + s + t)`
    ScaledSumRst,
    /// `alpha * max{s, t}`
    ScaledMaxSt,
    /// `alpha * max{r, s, t}`
    ScaledMaxRst,
    /// `a1 r + a2 s + a3 t`
    WeightedSum,
    /// `alpha * sqrt(s t)`
    GeometricMean,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::ScaledR,
        Family::ScaledSumSt,
        Family::ScaledSumRst,
        Family::ScaledMaxSt,
        Family::ScaledMaxRst,
        Family::WeightedSum,
        Family::GeometricMean,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::ScaledR => "scaled-r",
            Family::ScaledSumSt => "scaled-sum-st",
            Family::ScaledSumRst => "scaled-sum-rst",
            Family::ScaledMaxSt => "scaled-max-st",
            Family::ScaledMaxRst => "scaled-max-rst",
            Family::WeightedSum => "weighted-sum",
            Family::GeometricMean => "geometric-mean",
        }
    }

    pub fn param_count(self) -> usize {
        match self {
            Family::WeightedSum => 3,
            _ => 1,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Unknown(s.to_string()))
    }
}

impl Serialize for Family {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

/// A catalog comparison function with its parameters and intended class.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonFunction {
    family: Family,
    params: Vec<f64>,
    intended_class: Variant,
}

impl ComparisonFunction {
    pub fn new(family: Family, params: Vec<f64>, intended_class: Variant) -> Result<Self> {
        if params.len() != family.param_count() {
            return Err(Error::InvalidParameter {
                name: "params",
                reason: format!(
                    "{family} takes {} parameter(s), got {}",
                    family.param_count(),
                    params.len()
                ),
            });
        }
        if let Some(p) = params.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidParameter {
                name: "params",
                reason: format!("parameters must be finite and nonnegative, got {p}"),
            });
        }
        Ok(Self {
            family,
            params,
            intended_class,
        })
    }

    /// Single-parameter family shorthand.
    pub fn scaled(family: Family, alpha: f64, intended_class: Variant) -> Result<Self> {
        Self::new(family, vec![alpha], intended_class)
    }

    pub fn weighted_sum(a1: f64, a2: f64, a3: f64, intended_class: Variant) -> Result<Self> {
        Self::new(Family::WeightedSum, vec![a1, a2, a3], intended_class)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn intended_class(&self) -> Variant {
        self.intended_class
    }

    pub fn with_class(mut self, class: Variant) -> Self {
        self.intended_class = class;
        self
    }

    /// The family formula without argument validation.
    pub(crate) fn eval(&self, r: f64, s: f64, t: f64) -> f64 {
        let a = self.params[0];
        match self.family {
            Family::ScaledR => a * r,
            Family::ScaledSumSt => a * (s + t),
            Family::ScaledSumRst => a * (r + s + t),
            Family::ScaledMaxSt => a * s.max(t),
            Family::ScaledMaxRst => a * r.max(s).max(t),
            Family::WeightedSum => a * r + self.params[1] * s + self.params[2] * t,
            Family::GeometricMean => a * (s * t).sqrt(),
        }
    }

    /// Evaluates `f(r, s, t)` for nonnegative finite arguments.
    pub fn evaluate(&self, r: f64, s: f64, t: f64) -> Result<f64> {
        for x in [r, s, t] {
            if !x.is_finite() {
                return Err(Error::NonFinite {
                    what: "comparison argument",
                });
            }
            if x < 0.0 {
                return Err(Error::InvalidParameter {
                    name: "argument",
                    reason: format!("comparison functions take nonnegative arguments, got {x}"),
                });
            }
        }
        Ok(self.eval(r, s, t))
    }

    /// Upper bound on `|f(q) - f(p)|` from the family's modulus of continuity.
    fn continuity_modulus(&self, p: [f64; 3], q: [f64; 3]) -> f64 {
        let d = [
            (q[0] - p[0]).abs(),
            (q[1] - p[1]).abs(),
            (q[2] - p[2]).abs(),
        ];
        let a = self.params[0];
        match self.family {
            Family::ScaledR => a * d[0],
            Family::ScaledSumSt => a * (d[1] + d[2]),
            Family::ScaledSumRst => a * (d[0] + d[1] + d[2]),
            Family::ScaledMaxSt => a * d[1].max(d[2]),
            Family::ScaledMaxRst => a * d[0].max(d[1]).max(d[2]),
            Family::WeightedSum => a * d[0] + self.params[1] * d[1] + self.params[2] * d[2],
            // |sqrt(x) - sqrt(y)| <= sqrt|x - y|
            Family::GeometricMean => a * (d[1] * q[2] + p[1] * d[2]).sqrt(),
        }
    }
}

impl fmt::Display for ComparisonFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.family)?;
        for (i, p) in self.params.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ") [{}]", self.intended_class)
    }
}

/// Branch implications whose constants make up `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BranchLabel {
    /// `r <= f(s, r, s)`
    A2Srs,
    /// `r <= f(r, s, s)`
    A2Rss,
    /// `r <= f(r, s, s)`
    APrime2Rss,
    /// `r <= f(s, s, r)`
    APrime2Ssr,
    /// `r <= f(s, 0, r + s)`
    APrime5,
    /// `r <= f(r, r, r)` must force `r = 0`
    APrime6Ok,
}

impl BranchLabel {
    pub fn name(self) -> &'static str {
        match self {
            BranchLabel::A2Srs => "A2-srs",
            BranchLabel::A2Rss => "A2-rss",
            BranchLabel::APrime2Rss => "A'2-rss",
            BranchLabel::APrime2Ssr => "A'2-ssr",
            BranchLabel::APrime5 => "A'5",
            BranchLabel::APrime6Ok => "A'6-ok",
        }
    }

    /// Branches checked for a variant, in report order.
    pub fn for_variant(variant: Variant) -> &'static [BranchLabel] {
        match variant {
            Variant::A => &[BranchLabel::A2Srs, BranchLabel::A2Rss],
            Variant::APrime => &[
                BranchLabel::APrime2Rss,
                BranchLabel::APrime2Ssr,
                BranchLabel::APrime5,
                BranchLabel::APrime6Ok,
            ],
        }
    }

    /// Whether the branch contributes to `k` (A'6 is a satisfiability check).
    pub fn contributes_to_k(self) -> bool {
        self != BranchLabel::APrime6Ok
    }

    /// Arguments handed to `f` when testing `r` against this branch.
    pub fn args(self, r: f64, s: f64) -> [f64; 3] {
        match self {
            BranchLabel::A2Srs => [s, r, s],
            BranchLabel::A2Rss | BranchLabel::APrime2Rss => [r, s, s],
            BranchLabel::APrime2Ssr => [s, s, r],
            BranchLabel::APrime5 => [s, 0.0, r + s],
            BranchLabel::APrime6Ok => [r, r, r],
        }
    }
}

impl fmt::Display for BranchLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for BranchLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

/// Supremum of `r / s` over the branch's feasible set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BranchConstant {
    Finite(f64),
    /// Only `r = 0` satisfies the hypothesis; any `k` works.
    Vacuous,
    /// Feasible `r` is unbounded; no `k` exists.
    Unbounded,
}

impl BranchConstant {
    /// Value used when taking the max over branches.
    pub fn value(self) -> f64 {
        match self {
            BranchConstant::Finite(c) => c,
            BranchConstant::Vacuous => 0.0,
            BranchConstant::Unbounded => f64::INFINITY,
        }
    }

    pub fn agrees_with(self, other: BranchConstant, tol: f64) -> bool {
        match (self, other) {
            (BranchConstant::Unbounded, BranchConstant::Unbounded) => true,
            (BranchConstant::Unbounded, _) | (_, BranchConstant::Unbounded) => false,
            (a, b) => (a.value() - b.value()).abs() <= tol,
        }
    }
}

impl Serialize for BranchConstant {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            BranchConstant::Finite(c) => s.serialize_f64(*c),
            BranchConstant::Vacuous => s.serialize_str("vacuous"),
            BranchConstant::Unbounded => s.serialize_str("unbounded"),
        }
    }
}

/// Branch constants and the contraction factor `k` derived from them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KCertificate {
    pub variant: Variant,
    pub branch_constants: Vec<(BranchLabel, BranchConstant)>,
    pub k: f64,
    pub valid: bool,
}

impl KCertificate {
    fn from_branches(
        variant: Variant,
        branch_constants: Vec<(BranchLabel, BranchConstant)>,
    ) -> Self {
        let k = branch_constants
            .iter()
            .filter(|(l, _)| l.contributes_to_k())
            .map(|(_, c)| c.value())
            .fold(0.0_f64, f64::max);
        let a6_ok = branch_constants
            .iter()
            .filter(|(l, _)| !l.contributes_to_k())
            .all(|(_, c)| *c == BranchConstant::Vacuous);
        Self {
            variant,
            branch_constants,
            k,
            valid: k < 1.0 && a6_ok,
        }
    }

    pub fn branch(&self, label: BranchLabel) -> Option<BranchConstant> {
        self.branch_constants
            .iter()
            .find(|(l, _)| *l == label)
            .map(|(_, c)| *c)
    }
}

/// Shape of `x -> f(branch args at r = x, s = 1)`.
enum Profile {
    /// `c + a x`
    Linear { c: f64, a: f64 },
    /// `alpha * max{x, 1}`
    MaxWithOne { alpha: f64 },
    /// `alpha * sqrt(x)`
    Sqrt { alpha: f64 },
}

impl Profile {
    fn solve(self) -> BranchConstant {
        match self {
            Profile::Linear { c, a } => {
                if a >= 1.0 {
                    BranchConstant::Unbounded
                } else if c == 0.0 {
                    BranchConstant::Vacuous
                } else {
                    BranchConstant::Finite(c / (1.0 - a))
                }
            }
            Profile::MaxWithOne { alpha } => {
                if alpha >= 1.0 {
                    BranchConstant::Unbounded
                } else if alpha == 0.0 {
                    BranchConstant::Vacuous
                } else {
                    BranchConstant::Finite(alpha)
                }
            }
            Profile::Sqrt { alpha } => {
                if alpha == 0.0 {
                    BranchConstant::Vacuous
                } else {
                    BranchConstant::Finite(alpha * alpha)
                }
            }
        }
    }
}

fn profile(f: &ComparisonFunction, label: BranchLabel) -> Profile {
    use BranchLabel::*;
    use Profile::*;
    let p = f.params();
    let a = p[0];
    match (f.family, label) {
        (_, APrime6Ok) => Linear {
            c: 0.0,
            a: f.eval(1.0, 1.0, 1.0),
        },
        (Family::ScaledR, A2Rss | APrime2Rss) => Linear { c: 0.0, a },
        (Family::ScaledR, A2Srs | APrime2Ssr | APrime5) => Linear { c: a, a: 0.0 },

        (Family::ScaledSumSt, A2Rss | APrime2Rss) => Linear { c: 2.0 * a, a: 0.0 },
        (Family::ScaledSumSt, A2Srs | APrime2Ssr | APrime5) => Linear { c: a, a },

        (Family::ScaledSumRst, _) => Linear { c: 2.0 * a, a },

        (Family::ScaledMaxSt, A2Rss | APrime2Rss) => Linear { c: a, a: 0.0 },
        (Family::ScaledMaxSt, A2Srs | APrime2Ssr) => MaxWithOne { alpha: a },
        (Family::ScaledMaxSt, APrime5) => Linear { c: a, a },

        (Family::ScaledMaxRst, APrime5) => Linear { c: a, a },
        (Family::ScaledMaxRst, _) => MaxWithOne { alpha: a },

        (Family::WeightedSum, A2Srs) => Linear {
            c: p[0] + p[2],
            a: p[1],
        },
        (Family::WeightedSum, A2Rss | APrime2Rss) => Linear {
            c: p[1] + p[2],
            a: p[0],
        },
        (Family::WeightedSum, APrime2Ssr) => Linear {
            c: p[0] + p[1],
            a: p[2],
        },
        (Family::WeightedSum, APrime5) => Linear {
            c: p[0] + p[2],
            a: p[2],
        },

        (Family::GeometricMean, A2Srs | APrime2Ssr) => Sqrt { alpha: a },
        (Family::GeometricMean, A2Rss | APrime2Rss) => Linear { c: a, a: 0.0 },
        // f(s, 0, r + s) = 0
        (Family::GeometricMean, APrime5) => Linear { c: 0.0, a: 0.0 },
    }
}

/// Closed-form branch constant for one branch.
pub fn analytic_branch(f: &ComparisonFunction, label: BranchLabel) -> BranchConstant {
    profile(f, label).solve()
}

/// Closed-form branch constants and `k` for `variant`.
pub fn analytic_k(f: &ComparisonFunction, variant: Variant) -> KCertificate {
    let branches = BranchLabel::for_variant(variant)
        .iter()
        .map(|&l| (l, analytic_branch(f, l)))
        .collect();
    KCertificate::from_branches(variant, branches)
}

const S_RANGE: (f64, f64) = (1e-6, 1e3);
const UNBOUNDED_RATIO: f64 = 1e12;

/// Largest feasible `r` for the branch at scale `s`, by doubling then
/// bisection. `None` if feasibility persists past `UNBOUNDED_RATIO * s`.
fn sup_feasible(f: &ComparisonFunction, label: BranchLabel, s: f64) -> Option<f64> {
    let feasible = |r: f64| {
        let [x, y, z] = label.args(r, s);
        r <= f.eval(x, y, z)
    };
    let mut lo = 0.0;
    let mut hi = s;
    while feasible(hi) {
        lo = hi;
        hi *= 2.0;
        if hi > UNBOUNDED_RATIO * s {
            return None;
        }
    }
    for _ in 0..200 {
        if hi - lo <= 1e-15 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(lo)
}

fn sample_scales(seed: u64, n_samples: usize) -> impl Iterator<Item = f64> {
    std::iter::once(1.0).chain((0..n_samples as u64).map(move |i| {
        let mut rng = stream(seed, i);
        log_uniform(&mut rng, S_RANGE.0, S_RANGE.1)
    }))
}

/// Numeric branch constant: max over sampled `s` of `sup{r : r <= f(..)} / s`.
pub fn numeric_branch(
    f: &ComparisonFunction,
    label: BranchLabel,
    seed: u64,
    n_samples: usize,
) -> BranchConstant {
    let mut best = 0.0_f64;
    for s in sample_scales(seed, n_samples) {
        match sup_feasible(f, label, s) {
            None => return BranchConstant::Unbounded,
            Some(r) => best = best.max(r / s),
        }
    }
    if best == 0.0 {
        BranchConstant::Vacuous
    } else {
        BranchConstant::Finite(best)
    }
}

/// Sampling-and-bisection counterpart of [`analytic_k`].
pub fn numeric_k(
    f: &ComparisonFunction,
    variant: Variant,
    seed: u64,
    n_samples: usize,
) -> Result<KCertificate> {
    if n_samples == 0 {
        return Err(Error::InvalidParameter {
            name: "n_samples",
            reason: "must be at least 1".into(),
        });
    }
    let branches = BranchLabel::for_variant(variant)
        .iter()
        .map(|&l| (l, numeric_branch(f, l, seed, n_samples)))
        .collect();
    Ok(KCertificate::from_branches(variant, branches))
}

/// Tolerance for analytic/numeric agreement of branch constants.
pub const K_AGREEMENT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AxiomId {
    A1,
    A2,
    A3,
    APrime1,
    APrime2,
    APrime3,
    APrime4,
    APrime5,
    APrime6,
}

impl AxiomId {
    pub fn name(self) -> &'static str {
        match self {
            AxiomId::A1 => "A1",
            AxiomId::A2 => "A2",
            AxiomId::A3 => "A3",
            AxiomId::APrime1 => "A'1",
            AxiomId::APrime2 => "A'2",
            AxiomId::APrime3 => "A'3",
            AxiomId::APrime4 => "A'4",
            AxiomId::APrime5 => "A'5",
            AxiomId::APrime6 => "A'6",
        }
    }
}

impl fmt::Display for AxiomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for AxiomId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

/// Concrete evidence of an axiom violation.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    /// `|f(perturbed) - f(at)|` exceeds the family's modulus.
    Continuity { at: [f64; 3], perturbed: [f64; 3] },
    /// `r <= f(branch args)` with `r >= bound * s`, `r > 0`.
    Branch {
        branch: BranchLabel,
        r: f64,
        s: f64,
        bound: f64,
    },
    /// `lambda f(at) > f(lambda at)`.
    Homogeneity { lambda: f64, at: [f64; 3] },
    /// `f(r, s, t) > f(r, s, t1)` with `t <= t1`.
    Monotonicity { at: [f64; 3], t1: f64 },
    /// `r <= f(r, r, r)` with `r > 0`.
    Degenerate { r: f64 },
}

fn rel_slack(a: f64, b: f64) -> f64 {
    1e-12 * (a.abs() + b.abs()) + f64::MIN_POSITIVE
}

impl Witness {
    /// Argument triple of `f` at which the violation shows.
    pub fn triple(&self) -> [f64; 3] {
        match self {
            Witness::Continuity { at, .. }
            | Witness::Homogeneity { at, .. }
            | Witness::Monotonicity { at, .. } => *at,
            Witness::Branch { branch, r, s, .. } => branch.args(*r, *s),
            Witness::Degenerate { r } => [*r, *r, *r],
        }
    }

    /// Re-evaluates `f` and reports whether the violation still shows.
    pub fn reproduces(&self, f: &ComparisonFunction) -> bool {
        match *self {
            Witness::Continuity { at, perturbed } => {
                let (a, b) = (
                    f.eval(at[0], at[1], at[2]),
                    f.eval(perturbed[0], perturbed[1], perturbed[2]),
                );
                (a - b).abs() > f.continuity_modulus(at, perturbed) + rel_slack(a, b)
            }
            Witness::Branch {
                branch,
                r,
                s,
                bound,
            } => {
                let [x, y, z] = branch.args(r, s);
                r > 0.0 && r <= f.eval(x, y, z) && r >= bound * s
            }
            Witness::Homogeneity { lambda, at } => {
                let lhs = lambda * f.eval(at[0], at[1], at[2]);
                let rhs = f.eval(lambda * at[0], lambda * at[1], lambda * at[2]);
                lhs > rhs + rel_slack(lhs, rhs)
            }
            Witness::Monotonicity { at, t1 } => {
                let lo = f.eval(at[0], at[1], at[2]);
                let hi = f.eval(at[0], at[1], t1);
                at[2] <= t1 && lo > hi + rel_slack(lo, hi)
            }
            Witness::Degenerate { r } => r > 0.0 && r <= f.eval(r, r, r),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum AxiomVerdict {
    Pass,
    /// The hypothesis of a branch implication admits only `r = 0`.
    Vacuous,
    Fail {
        witness: Witness,
    },
}

impl AxiomVerdict {
    pub fn is_fail(&self) -> bool {
        matches!(self, AxiomVerdict::Fail { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomCheck {
    pub axiom: AxiomId,
    #[serde(flatten)]
    pub verdict: AxiomVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport {
    pub function: ComparisonFunction,
    pub variant: Variant,
    pub checked_axioms: Vec<AxiomCheck>,
    pub samples_used: usize,
    pub seed: u64,
    pub analytic: KCertificate,
    pub numeric: KCertificate,
}

impl AxiomReport {
    pub fn all_pass(&self) -> bool {
        self.checked_axioms.iter().all(|c| !c.verdict.is_fail())
    }

    pub fn verdict(&self, axiom: AxiomId) -> Option<&AxiomVerdict> {
        self.checked_axioms
            .iter()
            .find(|c| c.axiom == axiom)
            .map(|c| &c.verdict)
    }
}

const ARG_RANGE: (f64, f64) = (1e-6, 1e3);
const LAMBDA_RANGE: (f64, f64) = (1e-3, 1e3);

/// Boundary triples from `{0, 1}^3` followed by `n` log-uniform triples.
fn sample_triples(seed: u64, n: usize) -> Vec<[f64; 3]> {
    let mut out = Vec::with_capacity(8 + n);
    for mask in 0..8u32 {
        out.push([0, 1, 2].map(|bit| f64::from((mask >> bit) & 1)));
    }
    for i in 0..n as u64 {
        let mut rng = stream(seed ^ 0x5eed_a11c, i);
        out.push([(); 3].map(|_| log_uniform(&mut rng, ARG_RANGE.0, ARG_RANGE.1)));
    }
    out
}

fn check_continuity(f: &ComparisonFunction, seed: u64, triples: &[[f64; 3]]) -> AxiomVerdict {
    for (i, &p) in triples.iter().enumerate() {
        let mut rng = stream(seed ^ 0xc0_7171, i as u64);
        let q = p.map(|x| {
            let h = 1e-6 * x.max(1.0);
            (x + rng.random_range(-h..=h)).max(0.0)
        });
        let w = Witness::Continuity {
            at: p,
            perturbed: q,
        };
        if w.reproduces(f) {
            return AxiomVerdict::Fail { witness: w };
        }
    }
    AxiomVerdict::Pass
}

fn check_homogeneity(f: &ComparisonFunction, seed: u64, triples: &[[f64; 3]]) -> AxiomVerdict {
    for (i, &p) in triples.iter().enumerate() {
        let mut rng = stream(seed ^ 0x4a3, i as u64);
        let lambda = log_uniform(&mut rng, LAMBDA_RANGE.0, LAMBDA_RANGE.1);
        let w = Witness::Homogeneity { lambda, at: p };
        if w.reproduces(f) {
            return AxiomVerdict::Fail { witness: w };
        }
    }
    AxiomVerdict::Pass
}

fn check_monotone_t(f: &ComparisonFunction, seed: u64, triples: &[[f64; 3]]) -> AxiomVerdict {
    for (i, &p) in triples.iter().enumerate() {
        let mut rng = stream(seed ^ 0x7071, i as u64);
        let t1 = p[2] + log_uniform(&mut rng, ARG_RANGE.0, ARG_RANGE.1);
        let w = Witness::Monotonicity { at: p, t1 };
        if w.reproduces(f) {
            return AxiomVerdict::Fail { witness: w };
        }
    }
    AxiomVerdict::Pass
}

fn check_nondegenerate(
    f: &ComparisonFunction,
    analytic: &KCertificate,
    seed: u64,
    n: usize,
) -> AxiomVerdict {
    let mut rs = vec![1.0];
    rs.extend(
        (0..n as u64).map(|i| log_uniform(&mut stream(seed ^ 0xa6, i), ARG_RANGE.0, ARG_RANGE.1)),
    );
    for r in rs {
        let w = Witness::Degenerate { r };
        if w.reproduces(f) {
            return AxiomVerdict::Fail { witness: w };
        }
    }
    if analytic.branch(BranchLabel::APrime6Ok) != Some(BranchConstant::Vacuous) {
        // the sampled probes missed it; fall back on the homogeneous scale r = 1
        return AxiomVerdict::Fail {
            witness: Witness::Degenerate { r: 1.0 },
        };
    }
    AxiomVerdict::Pass
}

/// Verdict for a group of branch implications, using both routes.
fn check_branches(
    f: &ComparisonFunction,
    labels: &[BranchLabel],
    analytic: &KCertificate,
    numeric: &KCertificate,
) -> AxiomVerdict {
    let mut all_vacuous = true;
    for &label in labels {
        let a = analytic.branch(label).expect("branch computed");
        let n = numeric.branch(label).expect("branch computed");
        all_vacuous &= a == BranchConstant::Vacuous && n == BranchConstant::Vacuous;

        if a.value() >= 1.0 || n.value() >= 1.0 {
            // r = s is feasible; it refutes every k < 1.
            let w = Witness::Branch {
                branch: label,
                r: 1.0,
                s: 1.0,
                bound: 1.0,
            };
            if w.reproduces(f) {
                return AxiomVerdict::Fail { witness: w };
            }
            if let Some(r) = sup_feasible(f, label, 1.0) {
                let w = Witness::Branch {
                    branch: label,
                    r,
                    s: 1.0,
                    bound: 1.0,
                };
                if w.reproduces(f) {
                    return AxiomVerdict::Fail { witness: w };
                }
            }
            let w = Witness::Branch {
                branch: label,
                r: 2.0,
                s: 1.0,
                bound: 1.0,
            };
            return AxiomVerdict::Fail { witness: w };
        }
        if !a.agrees_with(n, K_AGREEMENT_TOL) {
            // numeric found feasible r beyond the closed-form constant
            let r = sup_feasible(f, label, 1.0).unwrap_or(f64::MAX);
            let w = Witness::Branch {
                branch: label,
                r,
                s: 1.0,
                bound: a.value() + K_AGREEMENT_TOL,
            };
            return AxiomVerdict::Fail { witness: w };
        }
    }
    if all_vacuous {
        AxiomVerdict::Vacuous
    } else {
        AxiomVerdict::Pass
    }
}

/// Checks the class-`A` axioms (continuity, branch implications,
/// homogeneity) on seeded samples.
pub fn check_axioms_a(f: &ComparisonFunction, seed: u64, n_samples: usize) -> Result<AxiomReport> {
    let analytic = analytic_k(f, Variant::A);
    let numeric = numeric_k(f, Variant::A, seed, n_samples)?;
    let triples = sample_triples(seed, n_samples);
    let checked_axioms = vec![
        AxiomCheck {
            axiom: AxiomId::A1,
            verdict: check_continuity(f, seed, &triples),
        },
        AxiomCheck {
            axiom: AxiomId::A2,
            verdict: check_branches(
                f,
                &[BranchLabel::A2Srs, BranchLabel::A2Rss],
                &analytic,
                &numeric,
            ),
        },
        AxiomCheck {
            axiom: AxiomId::A3,
            verdict: check_homogeneity(f, seed, &triples),
        },
    ];
    Ok(AxiomReport {
        function: f.clone(),
        variant: Variant::A,
        checked_axioms,
        samples_used: triples.len(),
        seed,
        analytic,
        numeric,
    })
}

/// Checks the class-`A'` axioms on seeded samples.
pub fn check_axioms_aprime(
    f: &ComparisonFunction,
    seed: u64,
    n_samples: usize,
) -> Result<AxiomReport> {
    let analytic = analytic_k(f, Variant::APrime);
    let numeric = numeric_k(f, Variant::APrime, seed, n_samples)?;
    let triples = sample_triples(seed, n_samples);
    let checked_axioms = vec![
        AxiomCheck {
            axiom: AxiomId::APrime1,
            verdict: check_continuity(f, seed, &triples),
        },
        AxiomCheck {
            axiom: AxiomId::APrime2,
            verdict: check_branches(
                f,
                &[BranchLabel::APrime2Rss, BranchLabel::APrime2Ssr],
                &analytic,
                &numeric,
            ),
        },
        AxiomCheck {
            axiom: AxiomId::APrime3,
            verdict: check_homogeneity(f, seed, &triples),
        },
        AxiomCheck {
            axiom: AxiomId::APrime4,
            verdict: check_monotone_t(f, seed, &triples),
        },
        AxiomCheck {
            axiom: AxiomId::APrime5,
            verdict: check_branches(f, &[BranchLabel::APrime5], &analytic, &numeric),
        },
        AxiomCheck {
            axiom: AxiomId::APrime6,
            verdict: check_nondegenerate(f, &analytic, seed, n_samples),
        },
    ];
    Ok(AxiomReport {
        function: f.clone(),
        variant: Variant::APrime,
        checked_axioms,
        samples_used: triples.len(),
        seed,
        analytic,
        numeric,
    })
}

/// Dispatches to the checker for `variant`.
pub fn check_axioms(
    f: &ComparisonFunction,
    variant: Variant,
    seed: u64,
    n_samples: usize,
) -> Result<AxiomReport> {
    match variant {
        Variant::A => check_axioms_a(f, seed, n_samples),
        Variant::APrime => check_axioms_aprime(f, seed, n_samples),
    }
}
