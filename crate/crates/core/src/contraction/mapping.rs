//! Catalog mappings `T` and scalar intervals.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::space::{SpaceDescriptor, Vector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    Unbounded,
    Closed(f64),
    Open(f64),
}

impl Bound {
    fn value(self) -> Option<f64> {
        match self {
            Bound::Unbounded => None,
            Bound::Closed(x) | Bound::Open(x) => Some(x),
        }
    }
}

/// An interval of the real line, possibly unbounded on either side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lower: Bound,
    upper: Bound,
}

impl Interval {
    pub fn new(lower: Bound, upper: Bound) -> Result<Self> {
        for b in [lower, upper] {
            if let Some(x) = b.value() {
                if !x.is_finite() {
                    return Err(Error::NonFinite {
                        what: "interval endpoint",
                    });
                }
            }
        }
        if let (Some(a), Some(b)) = (lower.value(), upper.value()) {
            let closed = matches!((lower, upper), (Bound::Closed(_), Bound::Closed(_)));
            if a > b || (a == b && !closed) {
                return Err(Error::InvalidParameter {
                    name: "interval",
                    reason: format!("empty interval with endpoints {a} and {b}"),
                });
            }
        }
        Ok(Self { lower, upper })
    }

    pub fn closed(a: f64, b: f64) -> Result<Self> {
        Self::new(Bound::Closed(a), Bound::Closed(b))
    }

    pub fn real_line() -> Self {
        Self {
            lower: Bound::Unbounded,
            upper: Bound::Unbounded,
        }
    }

    pub fn lower(&self) -> Bound {
        self.lower
    }

    pub fn upper(&self) -> Bound {
        self.upper
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = match self.lower {
            Bound::Unbounded => true,
            Bound::Closed(a) => x >= a,
            Bound::Open(a) => x > a,
        };
        let below = match self.upper {
            Bound::Unbounded => true,
            Bound::Closed(b) => x <= b,
            Bound::Open(b) => x < b,
        };
        above && below
    }

    /// Finite endpoints.
    pub fn endpoints(&self) -> impl Iterator<Item = f64> {
        self.lower.value().into_iter().chain(self.upper.value())
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.lower {
            Bound::Unbounded => f.write_str("(-inf")?,
            Bound::Closed(a) => write!(f, "[{a}")?,
            Bound::Open(a) => write!(f, "({a}")?,
        }
        f.write_str(", ")?;
        match self.upper {
            Bound::Unbounded => f.write_str("inf)"),
            Bound::Closed(b) => write!(f, "{b}]"),
            Bound::Open(b) => write!(f, "{b})"),
        }
    }
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl std::str::FromStr for Interval {
    type Err = Error;

    /// Parses `[a, b]`, `(a, b)`, `[a, b)`, `(a, b]` with `-inf`/`inf` allowed.
    fn from_str(text: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter {
            name: "interval",
            reason: format!("cannot parse `{text}`, expected e.g. `[1, 2]` or `(-inf, 0)`"),
        };
        let t = text.trim();
        if t.len() < 2 || !t.is_char_boundary(1) || !t.is_char_boundary(t.len() - 1) {
            return Err(bad());
        }
        let (open, body, close) = (&t[..1], &t[1..t.len() - 1], &t[t.len() - 1..]);
        if !matches!(open, "[" | "(") || !matches!(close, "]" | ")") {
            return Err(bad());
        }
        let (lo, hi) = body.split_once(',').ok_or_else(bad)?;
        let lower = match lo.trim() {
            "-inf" => Bound::Unbounded,
            v => {
                let a = v.parse::<f64>().map_err(|_| bad())?;
                if open == "[" {
                    Bound::Closed(a)
                } else {
                    Bound::Open(a)
                }
            }
        };
        let upper = match hi.trim() {
            "inf" | "+inf" => Bound::Unbounded,
            v => {
                let b = v.parse::<f64>().map_err(|_| bad())?;
                if close == "]" {
                    Bound::Closed(b)
                } else {
                    Bound::Open(b)
                }
            }
        };
        Interval::new(lower, upper)
    }
}

/// Union of intervals; a vector belongs to it when every coordinate does.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Domain(Vec<Interval>);

impl Domain {
    pub fn new(intervals: Vec<Interval>) -> Result<Self> {
        if intervals.is_empty() {
            return Err(Error::InvalidParameter {
                name: "domain",
                reason: "a domain needs at least one interval".into(),
            });
        }
        Ok(Self(intervals))
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.0
    }

    pub fn contains_scalar(&self, x: f64) -> bool {
        self.0.iter().any(|i| i.contains(x))
    }

    pub fn contains(&self, u: &Vector) -> bool {
        u.coords().iter().all(|&x| self.contains_scalar(x))
    }
}

/// Whether the union of `intervals` is all of R.
pub fn covers_real_line(intervals: &[Interval]) -> bool {
    // sort by lower endpoint, closed before open at equal values
    let key = |b: Bound| match b {
        Bound::Unbounded => (f64::NEG_INFINITY, 0),
        Bound::Closed(a) => (a, 0),
        Bound::Open(a) => (a, 1),
    };
    let mut sorted: Vec<Interval> = intervals.to_vec();
    sorted.sort_by(|x, y| {
        key(x.lower)
            .partial_cmp(&key(y.lower))
            .expect("finite endpoints")
    });

    // covered so far: (-inf, frontier) or (-inf, frontier]
    let mut frontier: Option<Bound> = None;
    for iv in sorted {
        let connects = match (frontier, iv.lower) {
            (None, Bound::Unbounded) => true,
            (None, _) => false,
            (Some(Bound::Unbounded), _) => return true,
            (Some(_), Bound::Unbounded) => true,
            (Some(f), lower) => {
                let (fv, lv) = (f.value().unwrap(), lower.value().unwrap());
                lv < fv
                    || (lv == fv
                        && (matches!(f, Bound::Closed(_)) || matches!(lower, Bound::Closed(_))))
            }
        };
        if !connects {
            return false;
        }
        frontier = Some(match (frontier, iv.upper) {
            (_, Bound::Unbounded) => return true,
            (None, u) => u,
            (Some(f), u) => {
                let (fv, uv) = (f.value().unwrap(), u.value().unwrap());
                if uv > fv || (uv == fv && matches!(u, Bound::Closed(_))) {
                    u
                } else {
                    f
                }
            }
        });
    }
    frontier == Some(Bound::Unbounded)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Shift {
    Broadcast(f64),
    Vector(Vector),
}

impl Shift {
    fn at(&self, i: usize) -> f64 {
        match self {
            Shift::Broadcast(c) => *c,
            Shift::Vector(v) => v.coords()[i],
        }
    }
}

/// One branch `u -> scale * u + shift` of a piecewise scalar map.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PiecewiseBranch {
    pub interval: Interval,
    pub scale: f64,
    pub shift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MappingSpec {
    /// `Tu = scale * u + shift`.
    Affine { scale: f64, shift: Shift },
    /// `(Tu)(t) = w(t) u(t)`.
    PointwiseMultiply { weights: Vector },
    /// Scalar map defined branch by branch; the first branch containing `u`
    /// applies.
    Piecewise { branches: Vec<PiecewiseBranch> },
}

impl MappingSpec {
    pub fn affine(scale: f64, shift: f64) -> Self {
        MappingSpec::Affine {
            scale,
            shift: Shift::Broadcast(shift),
        }
    }

    /// Multiplication by the grid abscissae, `(Tu)(t) = t u(t)`.
    pub fn multiply_by_abscissa(space: &SpaceDescriptor) -> Result<Self> {
        let grid = space.grid().ok_or_else(|| {
            Error::InvalidMapping("abscissa weights need a sampled function space".into())
        })?;
        Ok(MappingSpec::PointwiseMultiply {
            weights: Vector::new(grid.to_vec())?,
        })
    }

    pub fn validate(&self, space: &SpaceDescriptor) -> Result<()> {
        let finite = |x: f64, what: &'static str| {
            if x.is_finite() {
                Ok(())
            } else {
                Err(Error::NonFinite { what })
            }
        };
        match self {
            MappingSpec::Affine { scale, shift } => {
                finite(*scale, "affine scale")?;
                match shift {
                    Shift::Broadcast(c) => finite(*c, "affine shift")?,
                    Shift::Vector(v) => space.check(v)?,
                }
            }
            MappingSpec::PointwiseMultiply { weights } => space.check(weights)?,
            MappingSpec::Piecewise { branches } => {
                if space.dim() != 1 {
                    return Err(Error::InvalidMapping(format!(
                        "piecewise mappings act on 1-dimensional spaces, this one has dim {}",
                        space.dim()
                    )));
                }
                for br in branches {
                    finite(br.scale, "branch scale")?;
                    finite(br.shift, "branch shift")?;
                }
                let intervals: Vec<Interval> = branches.iter().map(|b| b.interval).collect();
                if !covers_real_line(&intervals) {
                    return Err(Error::InvalidMapping(
                        "piecewise branches must cover the real line".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    fn branch_of(branches: &[PiecewiseBranch], x: f64) -> &PiecewiseBranch {
        branches
            .iter()
            .find(|b| b.interval.contains(x))
            .expect("validated branches cover R")
    }

    /// `Tu`; `u` must already conform to the validated space.
    pub(crate) fn apply_raw(&self, u: &Vector) -> Vector {
        let c = u.coords();
        let out = match self {
            MappingSpec::Affine { scale, shift } => c
                .iter()
                .enumerate()
                .map(|(i, &x)| scale * x + shift.at(i))
                .collect(),
            MappingSpec::PointwiseMultiply { weights } => c
                .iter()
                .zip(weights.coords())
                .map(|(&x, &w)| w * x)
                .collect(),
            MappingSpec::Piecewise { branches } => c
                .iter()
                .map(|&x| {
                    let b = Self::branch_of(branches, x);
                    b.scale * x + b.shift
                })
                .collect(),
        };
        Vector::from_raw(out)
    }

    /// `Tu - Tv`, formed as `A(u - v)` wherever `T` is affine across the pair.
    pub(crate) fn difference_raw(&self, u: &Vector, v: &Vector) -> Vector {
        let (cu, cv) = (u.coords(), v.coords());
        let out = match self {
            MappingSpec::Affine { scale, .. } => {
                cu.iter().zip(cv).map(|(x, y)| scale * (x - y)).collect()
            }
            MappingSpec::PointwiseMultiply { weights } => cu
                .iter()
                .zip(cv)
                .zip(weights.coords())
                .map(|((x, y), w)| w * (x - y))
                .collect(),
            MappingSpec::Piecewise { branches } => cu
                .iter()
                .zip(cv)
                .map(|(&x, &y)| {
                    let (bx, by) = (Self::branch_of(branches, x), Self::branch_of(branches, y));
                    if std::ptr::eq(bx, by) {
                        bx.scale * (x - y)
                    } else {
                        (bx.scale * x + bx.shift) - (by.scale * y + by.shift)
                    }
                })
                .collect(),
        };
        Vector::from_raw(out)
    }

    /// Finite breakpoints of a piecewise map.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            MappingSpec::Piecewise { branches } => {
                let mut pts: Vec<f64> = branches
                    .iter()
                    .flat_map(|b| b.interval.endpoints())
                    .collect();
                pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
                pts.dedup();
                pts
            }
            _ => Vec::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(s: &str) -> Interval {
        s.parse().unwrap()
    }

    #[test]
    fn parse_intervals() {
        assert_eq!(iv("[1,2]"), Interval::closed(1.0, 2.0).unwrap());
        assert_eq!(iv("(-inf, 1)").upper(), Bound::Open(1.0));
        assert_eq!(iv("(-inf, 1)").lower(), Bound::Unbounded);
        assert_eq!(iv("[1, inf)").lower(), Bound::Closed(1.0));
        assert_eq!(iv("(-inf, inf)"), Interval::real_line());
        for bad in ["1,2", "[2,1]", "(1,1)", "[a,2]", "{1,2}", "[1 2]", ""] {
            assert!(bad.parse::<Interval>().is_err(), "{bad}");
        }
        assert!(iv("[1,1]").contains(1.0));
        assert_eq!(iv(&iv("(0.5, 3]").to_string()), iv("(0.5, 3]"));
    }

    #[test]
    fn membership() {
        let i = iv("[1, 2]");
        assert!(i.contains(1.0) && i.contains(2.0) && i.contains(1.5));
        assert!(!i.contains(0.999) && !i.contains(2.001));
        let o = iv("(1, 2)");
        assert!(!o.contains(1.0) && !o.contains(2.0));
    }

    #[test]
    fn coverage() {
        let t2 = [iv("[1,2]"), iv("(-inf,1)"), iv("(2,inf)")];
        assert!(covers_real_line(&t2));
        assert!(!covers_real_line(&[iv("(-inf,1)"), iv("(1,inf)")]));
        assert!(covers_real_line(&[iv("(-inf,1]"), iv("(1,inf)")]));
        assert!(!covers_real_line(&[iv("(-inf,1]"), iv("(1,5)")]));
        assert!(covers_real_line(&[iv("(-inf,inf)")]));
        assert!(!covers_real_line(&[iv("[0,inf)")]));
        assert!(covers_real_line(&[iv("[0,inf)"), iv("(-inf,0)")]));
        assert!(!covers_real_line(&[]));
    }

    #[test]
    fn piecewise_requires_cover_and_dim_one() {
        let space = SpaceDescriptor::real_line();
        let m = MappingSpec::Piecewise {
            branches: vec![PiecewiseBranch {
                interval: iv("[0, inf)"),
                scale: 1.0,
                shift: 1.0,
            }],
        };
        assert!(m.validate(&space).is_err());
        let m = MappingSpec::Piecewise {
            branches: vec![PiecewiseBranch {
                interval: Interval::real_line(),
                scale: 1.0,
                shift: 1.0,
            }],
        };
        assert!(m.validate(&space).is_ok());
        let plane = SpaceDescriptor::euclidean(2, crate::space::NormKind::Sup).unwrap();
        assert!(matches!(m.validate(&plane), Err(Error::InvalidMapping(_))));
    }

    #[test]
    fn first_matching_branch_wins_at_shared_endpoint() {
        let m = MappingSpec::Piecewise {
            branches: vec![
                PiecewiseBranch {
                    interval: iv("(-inf, 0]"),
                    scale: 0.0,
                    shift: 5.0,
                },
                PiecewiseBranch {
                    interval: iv("[0, inf)"),
                    scale: 0.0,
                    shift: 7.0,
                },
            ],
        };
        assert_eq!(m.apply_raw(&Vector::scalar(0.0)).coords(), &[5.0]);
    }
}
