//! Enriched contraction inequalities and their sampling-based verification.
//!
//! For a spec `(T, b, f, variant)` the left side is always
//! `||b(u - v) + Tu - Tv||`. The right side is
//!
//! * variant `A`: `f((b+1)||u-v||, ||u-Tu||, ||v-Tv||)`
//! * variant `A'`: `f((b+1)||u-v||, ||(b+1)(u-v) + v - Tv||, ||(b+1)(v-u) + u - Tu||)`
//!
//! [`verify`] can only falsify or collect evidence; it never proves the
//! inequality for all pairs.

mod mapping;
mod specialize;

pub use mapping::{covers_real_line, Bound, Domain, Interval, MappingSpec, PiecewiseBranch, Shift};
pub use specialize::{specialize, Classic, ContractionTemplate};

use rand::Rng;
use serde::Serialize;

use crate::comparison::{ComparisonFunction, Variant};
use crate::error::{Error, Result};
use crate::sampling::{heavy_tailed, stream};
use crate::solver::lambda_from_b;
use crate::space::{norm, SpaceDescriptor, Vector};

/// Default half-width of the uniform part of the pair distribution.
pub const DEFAULT_RANGE: f64 = 100.0;

/// `(T, b, f, variant)` on a space, with an optional restricted domain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContractionSpec {
    space: SpaceDescriptor,
    mapping: MappingSpec,
    b: f64,
    f: ComparisonFunction,
    variant: Variant,
    #[serde(skip_serializing_if = "Option::is_none")]
    domain: Option<Domain>,
}

impl ContractionSpec {
    pub fn new(
        space: SpaceDescriptor,
        mapping: MappingSpec,
        b: f64,
        f: ComparisonFunction,
        variant: Variant,
    ) -> Result<Self> {
        if !b.is_finite() || b < 0.0 {
            return Err(Error::InvalidParameter {
                name: "b",
                reason: format!("must be finite and nonnegative, got {b}"),
            });
        }
        if f.intended_class() != variant {
            return Err(Error::VariantMismatch {
                expected: variant,
                found: f.intended_class(),
            });
        }
        mapping.validate(&space)?;
        Ok(Self {
            space,
            mapping,
            b,
            f,
            variant,
            domain: None,
        })
    }

    /// Restricts the mapping to `domain`.
    pub fn with_domain(mut self, domain: Domain) -> Self {
        self.domain = Some(domain);
        self
    }

    pub fn space(&self) -> &SpaceDescriptor {
        &self.space
    }

    pub fn mapping(&self) -> &MappingSpec {
        &self.mapping
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn comparison(&self) -> &ComparisonFunction {
        &self.f
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn domain(&self) -> Option<&Domain> {
        self.domain.as_ref()
    }

    pub fn in_domain(&self, u: &Vector) -> bool {
        self.domain.as_ref().is_none_or(|d| d.contains(u))
    }

    fn norm_raw(&self, coords: Vec<f64>) -> f64 {
        norm(&self.space, &Vector::from_raw(coords)).expect("dimension checked")
    }
}

/// `Tu`.
pub fn apply_mapping(spec: &ContractionSpec, u: &Vector) -> Result<Vector> {
    spec.space.check(u)?;
    Ok(spec.mapping.apply_raw(u))
}

fn check_pair(spec: &ContractionSpec, u: &Vector, v: &Vector) -> Result<()> {
    spec.space.check(u)?;
    spec.space.check(v)?;
    if u == v {
        return Err(Error::EqualPoints);
    }
    Ok(())
}

/// `||b(u - v) + Tu - Tv||`.
pub fn lhs_enriched(spec: &ContractionSpec, u: &Vector, v: &Vector) -> Result<f64> {
    check_pair(spec, u, v)?;
    let dt = spec.mapping.difference_raw(u, v);
    let b = spec.b;
    let coords = u
        .coords()
        .iter()
        .zip(v.coords())
        .zip(dt.coords())
        .map(|((x, y), d)| b * (x - y) + d)
        .collect();
    Ok(spec.norm_raw(coords))
}

fn displacement(spec: &ContractionSpec, u: &Vector, tu: &Vector) -> f64 {
    spec.norm_raw(
        u.coords()
            .iter()
            .zip(tu.coords())
            .map(|(x, y)| x - y)
            .collect(),
    )
}

/// Right side of the variant-`A` inequality.
pub fn rhs_enriched_a(spec: &ContractionSpec, u: &Vector, v: &Vector) -> Result<f64> {
    if spec.variant != Variant::A {
        return Err(Error::VariantMismatch {
            expected: Variant::A,
            found: spec.variant,
        });
    }
    check_pair(spec, u, v)?;
    let (tu, tv) = (spec.mapping.apply_raw(u), spec.mapping.apply_raw(v));
    let r = (spec.b + 1.0) * displacement(spec, u, v);
    let s = displacement(spec, u, &tu);
    let t = displacement(spec, v, &tv);
    spec.f.evaluate(r, s, t)
}

/// `||(b+1)(u - v) + v - Tv||`.
fn cross_displacement(spec: &ContractionSpec, u: &Vector, v: &Vector, tv: &Vector) -> f64 {
    let c = spec.b + 1.0;
    spec.norm_raw(
        u.coords()
            .iter()
            .zip(v.coords())
            .zip(tv.coords())
            .map(|((x, y), ty)| c * (x - y) + (y - ty))
            .collect(),
    )
}

/// Right side of the variant-`A'` inequality.
pub fn rhs_enriched_aprime(spec: &ContractionSpec, u: &Vector, v: &Vector) -> Result<f64> {
    if spec.variant != Variant::APrime {
        return Err(Error::VariantMismatch {
            expected: Variant::APrime,
            found: spec.variant,
        });
    }
    check_pair(spec, u, v)?;
    let (tu, tv) = (spec.mapping.apply_raw(u), spec.mapping.apply_raw(v));
    let r = (spec.b + 1.0) * displacement(spec, u, v);
    let s = cross_displacement(spec, u, v, &tv);
    let t = cross_displacement(spec, v, u, &tu);
    spec.f.evaluate(r, s, t)
}

/// Right side for the spec's own variant.
pub fn rhs_enriched(spec: &ContractionSpec, u: &Vector, v: &Vector) -> Result<f64> {
    match spec.variant {
        Variant::A => rhs_enriched_a(spec, u, v),
        Variant::APrime => rhs_enriched_aprime(spec, u, v),
    }
}

/// Whether `lhs` exceeds `rhs` beyond rounding.
pub fn violates(lhs: f64, rhs: f64) -> bool {
    lhs > rhs + 1e-12 * rhs.max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateVerdict {
    VerifiedOnSamples,
    Falsified,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairWitness {
    pub u: Vector,
    pub v: Vector,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateReport {
    pub verdict: CertificateVerdict,
    /// Pairs evaluated, structured ones included.
    pub samples: usize,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<PairWitness>,
    /// Smallest `rhs - lhs` among evaluated pairs.
    pub margin_min: f64,
}

impl CertificateReport {
    pub fn is_verified(&self) -> bool {
        self.verdict == CertificateVerdict::VerifiedOnSamples
    }
}

/// Deterministic pairs tried before any random draw.
fn structured_pairs(spec: &ContractionSpec, seed: u64) -> Vec<(Vector, Vector)> {
    let space = &spec.space;
    let n = space.dim();
    let mut pairs = vec![
        (space.zero(), space.constant(1.0)),
        (space.constant(1.0), space.constant(-1.0)),
    ];

    // equal except in one coordinate
    let mut rng = stream(seed, u64::MAX);
    let base: Vec<f64> = (0..n)
        .map(|_| heavy_tailed(&mut rng, DEFAULT_RANGE))
        .collect();
    for j in [0, n / 2, n - 1] {
        let mut other = base.clone();
        other[j] += 1.0 + other[j].abs();
        pairs.push((Vector::from_raw(base.clone()), Vector::from_raw(other)));
    }

    // successive averaged iterates approach the fixed point
    for start in [space.constant(1.0), Vector::from_raw(base.clone())] {
        let mut w = start;
        for _ in 0..6 {
            let next = averaged_raw(spec, &w);
            if !next.is_finite() {
                break;
            }
            pairs.push((w, next.clone()));
            w = next;
        }
    }

    // neighbourhoods of piecewise breakpoints
    let bps = spec.mapping.breakpoints();
    for &e in &bps {
        let h = 1e-9 * e.abs().max(1.0);
        for other in [e - h, e + h, e - 1.0, e + 1.0, 0.0] {
            pairs.push((Vector::scalar(e), Vector::scalar(other)));
        }
        for &e2 in &bps {
            pairs.push((Vector::scalar(e), Vector::scalar(e2)));
        }
    }

    pairs.retain(|(u, v)| u != v && spec.in_domain(u) && spec.in_domain(v));
    pairs
}

fn random_vector<R: Rng>(rng: &mut R, spec: &ContractionSpec) -> Option<Vector> {
    for _ in 0..1000 {
        let u = Vector::from_raw(
            (0..spec.space.dim())
                .map(|_| heavy_tailed(rng, DEFAULT_RANGE))
                .collect(),
        );
        if spec.in_domain(&u) {
            return Some(u);
        }
    }
    None
}

fn random_pair(spec: &ContractionSpec, seed: u64, index: u64) -> Option<(Vector, Vector)> {
    let mut rng = stream(seed, index);
    let u = random_vector(&mut rng, spec)?;
    loop {
        let v = random_vector(&mut rng, spec)?;
        if v != u {
            return Some((u, v));
        }
    }
}

/// Tests the spec's inequality on structured pairs plus `n_pairs` seeded
/// random pairs, stopping at the first violation.
pub fn verify(spec: &ContractionSpec, seed: u64, n_pairs: usize) -> Result<CertificateReport> {
    if n_pairs == 0 {
        return Err(Error::InvalidParameter {
            name: "n_pairs",
            reason: "must be at least 1".into(),
        });
    }
    let structured = structured_pairs(spec, seed);
    let random = (0..n_pairs as u64).filter_map(|i| random_pair(spec, seed, i));

    let mut samples = 0;
    let mut margin_min = f64::INFINITY;
    for (u, v) in structured.into_iter().chain(random) {
        samples += 1;
        let lhs = lhs_enriched(spec, &u, &v)?;
        let rhs = rhs_enriched(spec, &u, &v)?;
        margin_min = margin_min.min(rhs - lhs);
        if violates(lhs, rhs) {
            return Ok(CertificateReport {
                verdict: CertificateVerdict::Falsified,
                samples,
                seed,
                witness: Some(PairWitness { u, v, lhs, rhs }),
                margin_min,
            });
        }
    }
    Ok(CertificateReport {
        verdict: CertificateVerdict::VerifiedOnSamples,
        samples,
        seed,
        witness: None,
        margin_min,
    })
}

/// `T_lambda u = (1 - lambda) u + lambda Tu` without dimension checks.
pub(crate) fn averaged_raw(spec: &ContractionSpec, u: &Vector) -> Vector {
    let lambda = lambda_from_b(spec.b).expect("b validated");
    let tu = spec.mapping.apply_raw(u);
    Vector::from_raw(
        u.coords()
            .iter()
            .zip(tu.coords())
            .map(|(x, t)| (1.0 - lambda) * x + lambda * t)
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::comparison::Family;
    use crate::registry;
    use crate::space::sample_function_space;

    fn s(x: f64) -> Vector {
        Vector::scalar(x)
    }

    #[test]
    fn apply_examples() {
        let ex37 = registry::ex3_7().unwrap();
        assert_eq!(apply_mapping(&ex37, &s(4.0)).unwrap(), s(2.0));

        let t2 = registry::ex2_3_t2().unwrap();
        assert_eq!(apply_mapping(&t2, &s(1.5)).unwrap(), s(17.5));
        assert_eq!(apply_mapping(&t2, &s(0.0)).unwrap(), s(16.0));
        assert_eq!(apply_mapping(&t2, &s(1.0)).unwrap(), s(17.0));
        assert_eq!(apply_mapping(&t2, &s(2.0)).unwrap(), s(18.0));

        let ex38 = registry::ex3_8(101).unwrap();
        let ones = ex38.space().constant(1.0);
        let got = apply_mapping(&ex38, &ones).unwrap();
        assert_eq!(got.coords(), ex38.space().grid().unwrap());

        assert!(apply_mapping(&ex37, &Vector::new(vec![1.0, 2.0]).unwrap()).is_err());
    }

    #[test]
    fn lhs_examples() {
        let ex37 = registry::ex3_7().unwrap();
        for (u, v) in [(4.0, 0.0), (1e6, -3.5), (0.1, 0.2)] {
            assert_eq!(lhs_enriched(&ex37, &s(u), &s(v)).unwrap(), 0.0);
        }

        let ex36 = registry::ex3_6(101).unwrap();
        let sp = ex36.space();
        let l = lhs_enriched(&ex36, &sp.constant(1.0), &sp.zero()).unwrap();
        assert!((l - 0.75).abs() < 1e-15);

        let ex24 = registry::ex2_4().unwrap();
        assert_eq!(lhs_enriched(&ex24, &s(0.0), &s(1.0)).unwrap(), 1.0);

        assert_eq!(
            lhs_enriched(&ex37, &s(1.0), &s(1.0)),
            Err(Error::EqualPoints)
        );
    }

    #[test]
    fn rhs_a_examples() {
        let ex36 = registry::ex3_6(101).unwrap();
        let sp = ex36.space();
        let r = rhs_enriched_a(&ex36, &sp.constant(1.0), &sp.zero()).unwrap();
        assert!((r - 1.0).abs() < 1e-15);

        let ex37 = registry::ex3_7().unwrap();
        assert_eq!(rhs_enriched_a(&ex37, &s(4.0), &s(0.0)).unwrap(), 1.0);
        // both fixed points: displacement terms vanish
        let id = ContractionSpec::new(
            SpaceDescriptor::real_line(),
            MappingSpec::affine(1.0, 0.0),
            1.0,
            ComparisonFunction::weighted_sum(0.5, 0.1, 0.1, Variant::A).unwrap(),
            Variant::A,
        )
        .unwrap();
        assert_eq!(
            rhs_enriched_a(&id, &s(3.0), &s(5.0)).unwrap(),
            0.5 * 2.0 * 2.0
        );

        let ex39 = registry::ex3_9().unwrap();
        assert!(matches!(
            rhs_enriched_a(&ex39, &s(1.0), &s(2.0)),
            Err(Error::VariantMismatch { .. })
        ));
    }

    #[test]
    fn rhs_aprime_examples() {
        let ex39 = registry::ex3_9().unwrap();
        for (u, v) in [(0.0, 5.0), (-7.0, 1.0), (2.5, 2.0), (100.0, -100.0)] {
            let got = rhs_enriched_aprime(&ex39, &s(u), &s(v)).unwrap();
            let want = ((u - 1.0f64).abs() + (v - 1.0f64).abs()) / 3.0;
            assert!(
                (got - want).abs() <= 1e-14 * want.max(1.0),
                "{u} {v}: {got} vs {want}"
            );
        }

        // cancellation in the second argument: (b+1)(u-v) = Tv - v
        let ex37a = ContractionSpec::new(
            SpaceDescriptor::real_line(),
            MappingSpec::affine(-1.0, 6.0),
            1.0,
            ComparisonFunction::scaled(Family::ScaledSumSt, 0.25, Variant::APrime).unwrap(),
            Variant::APrime,
        )
        .unwrap();
        // v = 0: Tv - v = 6, so u = 3 cancels
        let got = rhs_enriched_aprime(&ex37a, &s(3.0), &s(0.0)).unwrap();
        // t = |2(0-3) + 3 - 3| = 6
        assert_eq!(got, 0.25 * 6.0);

        let ex38 = registry::ex3_8(101).unwrap();
        let sp = ex38.space();
        let (u, v) = (sp.constant(1.0), sp.zero());
        let got = rhs_enriched_aprime(&ex38, &u, &v).unwrap();
        // direct grid evaluation of the three norms
        let grid = sp.grid().unwrap();
        let r: f64 = 1.25;
        let s_arg = grid.iter().map(|_| 1.25f64).fold(0.0, f64::max);
        let t_arg = grid
            .iter()
            .map(|t| (-1.25 + 1.0 - t).abs())
            .fold(0.0, f64::max);
        let want = 0.45 * r.max(s_arg).max(t_arg);
        assert!((got - want).abs() < 1e-15);
        assert!((got - 9.0 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn verify_examples() {
        let ex36 = registry::ex3_6(101).unwrap();
        let rep = verify(&ex36, 42, 10_000).unwrap();
        assert!(rep.is_verified(), "{rep:?}");
        assert!(rep.margin_min >= -1e-12);

        let ex24 = registry::ex2_4().unwrap();
        let rep = verify(&ex24, 42, 1000).unwrap();
        assert_eq!(rep.verdict, CertificateVerdict::Falsified);
        assert_eq!(rep.samples, 1);
        let w = rep.witness.unwrap();
        assert_eq!((w.u, w.v), (s(0.0), s(1.0)));
        assert_eq!(w.lhs, 1.0);
        assert!((w.rhs - 2.0 / 3.0).abs() < 1e-15);

        let rem = registry::rem3_3().unwrap();
        assert!(verify(&rem, 42, 10_000).unwrap().is_verified());
    }

    #[test]
    fn verify_is_deterministic() {
        let t2 = registry::ex2_3_t2().unwrap();
        let a = verify(&t2, 7, 3000).unwrap();
        let b = verify(&t2, 7, 3000).unwrap();
        assert_eq!(format!("{a:?}"), format!("{b:?}"));
        assert!(a.is_verified());
    }

    #[test]
    fn homogeneity_transport_for_linear_maps() {
        let ex36 = registry::ex3_6(21).unwrap();
        let sp = ex36.space();
        let u = sp.sample(|t| (3.0 * t).sin());
        let v = sp.sample(|t| t * t - 0.5);
        for c in [0.5, 2.0, 8.0] {
            let cu = crate::space::combine(sp, c, &u, 0.0, &u).unwrap();
            let cv = crate::space::combine(sp, c, &v, 0.0, &v).unwrap();
            let (l, r) = (
                lhs_enriched(&ex36, &u, &v).unwrap(),
                rhs_enriched(&ex36, &u, &v).unwrap(),
            );
            let (lc, rc) = (
                lhs_enriched(&ex36, &cu, &cv).unwrap(),
                rhs_enriched(&ex36, &cu, &cv).unwrap(),
            );
            assert!((lc - c * l).abs() <= 1e-12 * lc);
            assert!((rc - c * r).abs() <= 1e-12 * rc);
        }
    }

    #[test]
    fn spec_validation() {
        let f = ComparisonFunction::scaled(Family::ScaledSumSt, 0.3, Variant::A).unwrap();
        let sp = SpaceDescriptor::real_line();
        assert!(ContractionSpec::new(
            sp.clone(),
            MappingSpec::affine(1.0, 0.0),
            -1.0,
            f.clone(),
            Variant::A
        )
        .is_err());
        assert!(matches!(
            ContractionSpec::new(sp, MappingSpec::affine(1.0, 0.0), 1.0, f, Variant::APrime),
            Err(Error::VariantMismatch { .. })
        ));
        let fs = sample_function_space(0.0, 1.0, 5).unwrap();
        let w = MappingSpec::PointwiseMultiply {
            weights: Vector::new(vec![1.0; 4]).unwrap(),
        };
        let f = ComparisonFunction::scaled(Family::ScaledSumSt, 0.3, Variant::A).unwrap();
        assert!(ContractionSpec::new(fs, w, 1.0, f, Variant::A).is_err());
    }
}
