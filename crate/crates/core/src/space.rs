//! Finite-dimensional normed spaces.
//!
//! A [`SpaceDescriptor`] is either a plain coordinate space with one of three
//! norms, or a uniform-grid sampling of a continuous-function space `C[a, b]`
//! carrying the sup norm. Function-space norms are the maximum over the grid
//! values, which is exact for mappings acting pointwise on samples.

use serde::Serialize;

use crate::error::{Error, Result};

/// Default number of grid points for sampled function spaces.
pub const DEFAULT_GRID: usize = 101;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormKind {
    Sup,
    L1,
    L2,
}

impl std::str::FromStr for NormKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sup" => Ok(NormKind::Sup),
            "l1" => Ok(NormKind::L1),
            "l2" => Ok(NormKind::L2),
            other => Err(Error::Unknown(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpaceKind {
    Euclidean,
    SampledFunction,
}

/// Description of the ambient space `(X, ||.||)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpaceDescriptor {
    kind: SpaceKind,
    dim: usize,
    norm: NormKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    interval: Option<(f64, f64)>,
    #[serde(skip)]
    grid: Option<Vec<f64>>,
}

impl SpaceDescriptor {
    /// `R^dim` with the given norm.
    pub fn euclidean(dim: usize, norm: NormKind) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidSpace("dimension must be at least 1".into()));
        }
        Ok(Self {
            kind: SpaceKind::Euclidean,
            dim,
            norm,
            interval: None,
            grid: None,
        })
    }

    /// The real line with the absolute value.
    pub fn real_line() -> Self {
        Self::euclidean(1, NormKind::Sup).expect("dim 1 is valid")
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn norm_kind(&self) -> NormKind {
        self.norm
    }

    pub fn interval(&self) -> Option<(f64, f64)> {
        self.interval
    }

    /// Sample abscissae, for sampled function spaces.
    pub fn grid(&self) -> Option<&[f64]> {
        self.grid.as_deref()
    }

    /// Checks that `u` can be interpreted in this space.
    pub fn check(&self, u: &Vector) -> Result<()> {
        if u.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: u.dim(),
            });
        }
        Ok(())
    }

    /// The zero vector.
    pub fn zero(&self) -> Vector {
        Vector(vec![0.0; self.dim])
    }

    /// The vector with every coordinate equal to `c`.
    pub fn constant(&self, c: f64) -> Vector {
        Vector(vec![c; self.dim])
    }

    /// Samples `g` on the grid; for euclidean spaces `g` receives the
    /// coordinate index as a float.
    pub fn sample(&self, g: impl Fn(f64) -> f64) -> Vector {
        match &self.grid {
            Some(grid) => Vector(grid.iter().map(|&t| g(t)).collect()),
            None => Vector((0..self.dim).map(|i| g(i as f64)).collect()),
        }
    }
}

/// Uniform-grid discretization of `C[left, right]` with `n` points and the
/// sup norm.
pub fn sample_function_space(left: f64, right: f64, n: usize) -> Result<SpaceDescriptor> {
    if !left.is_finite() || !right.is_finite() {
        return Err(Error::NonFinite {
            what: "interval endpoint",
        });
    }
    if left >= right {
        return Err(Error::InvalidSpace(format!(
            "interval endpoints must be strictly ordered, got [{left}, {right}]"
        )));
    }
    if n < 2 {
        return Err(Error::InvalidSpace(format!(
            "a sampled function space needs at least 2 grid points, got {n}"
        )));
    }
    let last = (n - 1) as f64;
    let mut grid: Vec<f64> = (0..n)
        .map(|i| left + (right - left) * (i as f64) / last)
        .collect();
    grid[n - 1] = right;
    Ok(SpaceDescriptor {
        kind: SpaceKind::SampledFunction,
        dim: n,
        norm: NormKind::Sup,
        interval: Some((left, right)),
        grid: Some(grid),
    })
}

/// A point of a [`SpaceDescriptor`]: an ordered list of finite coordinates.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidSpace(
                "vectors need at least one coordinate".into(),
            ));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite {
                what: "vector coordinate",
            });
        }
        Ok(Self(coords))
    }

    /// A one-coordinate vector.
    pub fn scalar(x: f64) -> Self {
        Self(vec![x])
    }

    pub(crate) fn from_raw(coords: Vec<f64>) -> Self {
        Self(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    /// Largest coordinate magnitude.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, c| m.max(c.abs()))
    }
}

fn raw_norm(kind: NormKind, coords: &[f64]) -> f64 {
    match kind {
        NormKind::Sup => coords.iter().fold(0.0_f64, |m, c| m.max(c.abs())),
        NormKind::L1 => coords.iter().map(|c| c.abs()).sum(),
        NormKind::L2 => coords.iter().map(|c| c * c).sum::<f64>().sqrt(),
    }
}

/// Norm of `u` under the space's norm kind.
pub fn norm(space: &SpaceDescriptor, u: &Vector) -> Result<f64> {
    space.check(u)?;
    Ok(raw_norm(space.norm, &u.0))
}

/// Coordinatewise `a*u + b*v`.
pub fn combine(space: &SpaceDescriptor, a: f64, u: &Vector, b: f64, v: &Vector) -> Result<Vector> {
    space.check(u)?;
    space.check(v)?;
    Ok(Vector(
        u.0.iter().zip(&v.0).map(|(&x, &y)| a * x + b * y).collect(),
    ))
}

/// `||u - v||`.
pub fn distance(space: &SpaceDescriptor, u: &Vector, v: &Vector) -> Result<f64> {
    let d = combine(space, 1.0, u, -1.0, v)?;
    Ok(raw_norm(space.norm, &d.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(c: &[f64]) -> Vector {
        Vector::new(c.to_vec()).unwrap()
    }

    #[test]
    fn norms_of_small_vectors() {
        let sup = SpaceDescriptor::euclidean(3, NormKind::Sup).unwrap();
        assert_eq!(norm(&sup, &v(&[1.0, -2.0, 3.0])).unwrap(), 3.0);
        let l2 = SpaceDescriptor::euclidean(2, NormKind::L2).unwrap();
        assert_eq!(norm(&l2, &v(&[3.0, 4.0])).unwrap(), 5.0);
        let l1 = SpaceDescriptor::euclidean(3, NormKind::L1).unwrap();
        assert_eq!(norm(&l1, &v(&[1.0, -2.0, 3.0])).unwrap(), 6.0);
        for kind in [NormKind::Sup, NormKind::L1, NormKind::L2] {
            let s = SpaceDescriptor::euclidean(4, kind).unwrap();
            assert_eq!(norm(&s, &s.zero()).unwrap(), 0.0);
        }
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let s = SpaceDescriptor::euclidean(2, NormKind::Sup).unwrap();
        assert_eq!(
            norm(&s, &v(&[1.0, 2.0, 3.0])),
            Err(Error::DimensionMismatch {
                expected: 2,
                found: 3
            })
        );
        assert!(combine(&s, 1.0, &v(&[1.0, 2.0]), 1.0, &v(&[1.0])).is_err());
    }

    #[test]
    fn combine_examples() {
        let s = SpaceDescriptor::euclidean(2, NormKind::Sup).unwrap();
        let u = v(&[1.0, 2.0]);
        assert!(combine(&s, 1.0, &u, -1.0, &u).unwrap().is_zero());
        assert_eq!(
            combine(&s, 1.0, &u, 1.0, &v(&[3.0, 4.0])).unwrap(),
            v(&[4.0, 6.0])
        );
        assert_eq!(
            combine(&s, 0.5, &v(&[2.0, 0.0]), 0.5, &v(&[0.0, 2.0])).unwrap(),
            v(&[1.0, 1.0])
        );
    }

    #[test]
    fn sampled_grids() {
        let s = sample_function_space(0.0, 1.0, 3).unwrap();
        assert_eq!(s.grid().unwrap(), &[0.0, 0.5, 1.0]);
        let s = sample_function_space(0.0, 0.25, 2).unwrap();
        assert_eq!(s.grid().unwrap(), &[0.0, 0.25]);
        let s = sample_function_space(0.0, 1.0, 101).unwrap();
        assert_eq!(s.dim(), 101);
        assert_eq!(s.norm_kind(), NormKind::Sup);
        let g = s.grid().unwrap();
        assert_eq!(g[0], 0.0);
        assert_eq!(g[100], 1.0);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert!((g[37] - 0.37).abs() < 1e-15);
    }

    #[test]
    fn bad_function_spaces() {
        assert!(sample_function_space(1.0, 0.0, 5).is_err());
        assert!(sample_function_space(0.0, 0.0, 5).is_err());
        assert!(sample_function_space(0.0, 1.0, 1).is_err());
        assert!(SpaceDescriptor::euclidean(0, NormKind::L2).is_err());
        assert!(Vector::new(vec![f64::NAN]).is_err());
    }

    fn kinds() -> impl Strategy<Value = NormKind> {
        prop_oneof![Just(NormKind::Sup), Just(NormKind::L1), Just(NormKind::L2)]
    }

    proptest! {
        #[test]
        fn norm_axioms(
            kind in kinds(),
            pair in (1usize..8).prop_flat_map(|n| (
                prop::collection::vec(-1e3f64..1e3, n),
                prop::collection::vec(-1e3f64..1e3, n),
            )),
            c in -50.0f64..50.0,
        ) {
            let (a, b) = pair;
            let s = SpaceDescriptor::euclidean(a.len(), kind).unwrap();
            let u = v(&a);
            let w = v(&b);
            let nu = norm(&s, &u).unwrap();
            prop_assert!(nu >= 0.0);
            prop_assert_eq!(nu == 0.0, u.is_zero());

            let cu = combine(&s, c, &u, 0.0, &u).unwrap();
            let lhs = norm(&s, &cu).unwrap();
            let rhs = c.abs() * nu;
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(f64::MIN_POSITIVE));

            let sum = combine(&s, 1.0, &u, 1.0, &w).unwrap();
            let nw = norm(&s, &w).unwrap();
            prop_assert!(norm(&s, &sum).unwrap() <= (nu + nw) * (1.0 + 1e-12));
        }

        #[test]
        fn combine_is_symmetric(
            pair in (1usize..8).prop_flat_map(|n| (
                prop::collection::vec(-1e6f64..1e6, n),
                prop::collection::vec(-1e6f64..1e6, n),
            )),
            a in -10.0f64..10.0,
            b in -10.0f64..10.0,
        ) {
            let s = SpaceDescriptor::euclidean(pair.0.len(), NormKind::L2).unwrap();
            let u = v(&pair.0);
            let w = v(&pair.1);
            prop_assert_eq!(
                combine(&s, a, &u, b, &w).unwrap(),
                combine(&s, b, &w, a, &u).unwrap()
            );
        }
    }
}
