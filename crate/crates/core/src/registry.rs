//! Worked examples with known outcomes, addressed by short ids.

use serde::Serialize;

use crate::comparison::{ComparisonFunction, Family, Variant};
use crate::contraction::{Bound, ContractionSpec, Domain, Interval, MappingSpec, PiecewiseBranch};
use crate::error::{Error, Result};
use crate::space::{sample_function_space, SpaceDescriptor, Vector, DEFAULT_GRID};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum Expected {
    FixedPoint(Vector),
    Falsifiable,
    DomainExit,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExampleEntry {
    pub id: &'static str,
    pub spec: ContractionSpec,
    pub u0: Vector,
    pub expected: Expected,
    pub note: &'static str,
}

pub const IDS: [&str; 8] = [
    "ex2.3-T1", "ex2.3-T2", "ex2.4", "ex3.6", "ex3.7", "ex3.8", "ex3.9", "rem3.3",
];

fn piecewise(branches: &[(Interval, f64, f64)]) -> MappingSpec {
    MappingSpec::Piecewise {
        branches: branches
            .iter()
            .map(|&(interval, scale, shift)| PiecewiseBranch {
                interval,
                scale,
                shift,
            })
            .collect(),
    }
}

fn open_below(x: f64) -> Result<Interval> {
    Interval::new(Bound::Unbounded, Bound::Open(x))
}

/// `-2u` on the real line, `b = 5/4`, `f = (s + t)/3`, variant A.
pub fn ex2_3_t1() -> Result<ContractionSpec> {
    ContractionSpec::new(
        SpaceDescriptor::real_line(),
        MappingSpec::affine(-2.0, 0.0),
        1.25,
        ComparisonFunction::scaled(Family::ScaledSumSt, 1.0 / 3.0, Variant::A)?,
        Variant::A,
    )
}

/// `u + 16` on `[1, 2]`, `16` elsewhere; `b = 1/3`, `f = r/3 + s/4 + t/4`, variant A'.
pub fn ex2_3_t2() -> Result<ContractionSpec> {
    let map = piecewise(&[
        (open_below(1.0)?, 0.0, 16.0),
        (Interval::closed(1.0, 2.0)?, 1.0, 16.0),
        (
            Interval::new(Bound::Open(2.0), Bound::Unbounded)?,
            0.0,
            16.0,
        ),
    ]);
    ContractionSpec::new(
        SpaceDescriptor::real_line(),
        map,
        1.0 / 3.0,
        ComparisonFunction::weighted_sum(1.0 / 3.0, 0.25, 0.25, Variant::APrime)?,
        Variant::APrime,
    )
}

/// `1 + u` for `u >= 0`, `0` otherwise, with `b = 0` and `f = (s + t)/3`.
/// Fixed-point free, so the inequality must fail somewhere.
pub fn ex2_4() -> Result<ContractionSpec> {
    let map = piecewise(&[
        (
            Interval::new(Bound::Closed(0.0), Bound::Unbounded)?,
            1.0,
            1.0,
        ),
        (open_below(0.0)?, 0.0, 0.0),
    ]);
    ContractionSpec::new(
        SpaceDescriptor::real_line(),
        map,
        0.0,
        ComparisonFunction::scaled(Family::ScaledSumSt, 1.0 / 3.0, Variant::A)?,
        Variant::A,
    )
}

/// `-2u` on a grid of `C[0, 1]`, `b = 5/4`, `f = (s + t)/3`.
pub fn ex3_6(grid: usize) -> Result<ContractionSpec> {
    ContractionSpec::new(
        sample_function_space(0.0, 1.0, grid)?,
        MappingSpec::affine(-2.0, 0.0),
        1.25,
        ComparisonFunction::scaled(Family::ScaledSumSt, 1.0 / 3.0, Variant::A)?,
        Variant::A,
    )
}

/// `6 - u`, `b = 1`, `f = max{s, t}/6`.
pub fn ex3_7() -> Result<ContractionSpec> {
    ContractionSpec::new(
        SpaceDescriptor::real_line(),
        MappingSpec::affine(-1.0, 6.0),
        1.0,
        ComparisonFunction::scaled(Family::ScaledMaxSt, 1.0 / 6.0, Variant::A)?,
        Variant::A,
    )
}

/// `(Tu)(t) = t u(t)` on a grid of `C[0, 1/4]`, `b = 1/4`, `f = 9/20 max{r, s, t}`.
pub fn ex3_8(grid: usize) -> Result<ContractionSpec> {
    let space = sample_function_space(0.0, 0.25, grid)?;
    let map = MappingSpec::multiply_by_abscissa(&space)?;
    ContractionSpec::new(
        space,
        map,
        0.25,
        ComparisonFunction::scaled(Family::ScaledMaxRst, 0.45, Variant::APrime)?,
        Variant::APrime,
    )
}

/// `2 - u`, `b = 1`, `f = (s + t)/6`, variant A'.
pub fn ex3_9() -> Result<ContractionSpec> {
    ContractionSpec::new(
        SpaceDescriptor::real_line(),
        MappingSpec::affine(-1.0, 2.0),
        1.0,
        ComparisonFunction::scaled(Family::ScaledSumSt, 1.0 / 6.0, Variant::APrime)?,
        Variant::APrime,
    )
}

/// `ex2.3-T1` restricted to `(-inf, -1] U [1, inf)`, which has no fixed point.
pub fn rem3_3() -> Result<ContractionSpec> {
    let domain = Domain::new(vec![
        Interval::new(Bound::Unbounded, Bound::Closed(-1.0))?,
        Interval::new(Bound::Closed(1.0), Bound::Unbounded)?,
    ])?;
    Ok(ex2_3_t1()?.with_domain(domain))
}

/// Bounded start for `ex3.6` with sup norm below 1.
pub fn ex3_6_start(space: &SpaceDescriptor) -> Vector {
    space.sample(|t| 0.8 * (7.0 * t + 0.3).sin())
}

/// Looks up one example; `grid` only affects the sampled-function ones.
pub fn get(id: &str, grid: usize) -> Result<ExampleEntry> {
    let s = Vector::scalar;
    let entry = match id {
        "ex2.3-T1" => ExampleEntry {
            id: "ex2.3-T1",
            spec: ex2_3_t1()?,
            u0: s(1.0),
            expected: Expected::FixedPoint(s(0.0)),
            note: "T = -2u, unique fixed point 0",
        },
        "ex2.3-T2" => ExampleEntry {
            id: "ex2.3-T2",
            spec: ex2_3_t2()?,
            u0: s(0.0),
            expected: Expected::FixedPoint(s(16.0)),
            note: "discontinuous T with fixed point 16",
        },
        "ex2.4" => ExampleEntry {
            id: "ex2.4",
            spec: ex2_4()?,
            u0: s(0.0),
            expected: Expected::Falsifiable,
            note: "fixed-point free, inequality fails at (0, 1)",
        },
        "ex3.6" => {
            let spec = ex3_6(grid)?;
            let u0 = ex3_6_start(spec.space());
            let zero = spec.space().zero();
            ExampleEntry {
                id: "ex3.6",
                spec,
                u0,
                expected: Expected::FixedPoint(zero),
                note: "T = -2u on C[0,1], fixed point the zero function",
            }
        }
        "ex3.7" => ExampleEntry {
            id: "ex3.7",
            spec: ex3_7()?,
            u0: s(100.0),
            expected: Expected::FixedPoint(s(3.0)),
            note: "T = 6 - u, one averaged step lands on 3",
        },
        "ex3.8" => {
            let spec = ex3_8(grid)?;
            let u0 = spec.space().constant(1.0);
            let zero = spec.space().zero();
            ExampleEntry {
                id: "ex3.8",
                spec,
                u0,
                expected: Expected::FixedPoint(zero),
                note: "(Tu)(t) = t u(t) on C[0,1/4], fixed point the zero function",
            }
        }
        "ex3.9" => ExampleEntry {
            id: "ex3.9",
            spec: ex3_9()?,
            u0: s(-7.0),
            expected: Expected::FixedPoint(s(1.0)),
            note: "T = 2 - u, one averaged step lands on 1",
        },
        "rem3.3" => ExampleEntry {
            id: "rem3.3",
            spec: rem3_3()?,
            u0: s(1.0),
            expected: Expected::DomainExit,
            note: "T = -2u off (-1, 1): the first iterate -1/3 leaves the domain",
        },
        other => return Err(Error::Unknown(other.to_string())),
    };
    Ok(entry)
}

/// Every example, ordered by id.
pub fn all(grid: usize) -> Result<Vec<ExampleEntry>> {
    IDS.iter().map(|id| get(id, grid)).collect()
}

/// `(spec, u0)` for the examples with a known fixed point, at the default grid.
pub fn solvable_specs() -> Vec<(ContractionSpec, Vector)> {
    all(DEFAULT_GRID)
        .expect("registry builds")
        .into_iter()
        .filter(|e| matches!(e.expected, Expected::FixedPoint(_)))
        .map(|e| (e.spec, e.u0))
        .collect()
}
