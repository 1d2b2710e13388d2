//! Classic contraction conditions as catalog comparison functions.

use std::fmt;

use serde::Serialize;

use crate::comparison::{analytic_k, ComparisonFunction, Family, KCertificate, Variant};
use crate::error::{Error, Result};
use crate::space::SpaceDescriptor;

use super::{ContractionSpec, MappingSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classic {
    Banach,
    Kannan,
    Chatterjea,
    Reich,
    Bianchini,
    Khan,
    CiricMax,
}

impl Classic {
    pub const ALL: [Classic; 7] = [
        Classic::Banach,
        Classic::Kannan,
        Classic::Chatterjea,
        Classic::Reich,
        Classic::Bianchini,
        Classic::Khan,
        Classic::CiricMax,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Classic::Banach => "banach",
            Classic::Kannan => "kannan",
            Classic::Chatterjea => "chatterjea",
            Classic::Reich => "reich",
            Classic::Bianchini => "bianchini",
            Classic::Khan => "khan",
            Classic::CiricMax => "ciric-max",
        }
    }

    /// Catalog family and inequality variant realizing the condition.
    pub fn family_and_variant(self) -> (Family, Variant) {
        match self {
            Classic::Banach => (Family::ScaledR, Variant::A),
            Classic::Kannan => (Family::ScaledSumSt, Variant::A),
            Classic::Chatterjea => (Family::ScaledSumSt, Variant::APrime),
            Classic::Reich => (Family::WeightedSum, Variant::A),
            Classic::Bianchini => (Family::ScaledMaxSt, Variant::A),
            Classic::Khan => (Family::GeometricMean, Variant::A),
            Classic::CiricMax => (Family::ScaledMaxSt, Variant::APrime),
        }
    }
}

impl fmt::Display for Classic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Classic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Classic::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Unknown(s.to_string()))
    }
}

/// `(f, variant, b)` with the mapping and space left open.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContractionTemplate {
    pub f: ComparisonFunction,
    pub variant: Variant,
    pub b: f64,
    pub certificate: KCertificate,
}

impl ContractionTemplate {
    pub fn into_spec(
        self,
        space: SpaceDescriptor,
        mapping: MappingSpec,
    ) -> Result<ContractionSpec> {
        ContractionSpec::new(space, mapping, self.b, self.f, self.variant)
    }
}

/// Builds the enriched version of a classic condition.
///
/// For `banach` the single parameter is `theta` of `||b(u-v) + Tu - Tv|| <=
/// theta ||u-v||` and the catalog coefficient is `theta / (b + 1)`; every
/// other condition takes its catalog coefficients directly. Admissibility is
/// decided by [`analytic_k`], not by textbook parameter ranges.
pub fn specialize(name: Classic, params: &[f64], b: f64) -> Result<ContractionTemplate> {
    if !b.is_finite() || b < 0.0 {
        return Err(Error::InvalidParameter {
            name: "b",
            reason: format!("must be finite and nonnegative, got {b}"),
        });
    }
    let (family, variant) = name.family_and_variant();
    let params = match name {
        Classic::Banach => {
            let &[theta] = params else {
                return Err(Error::InvalidParameter {
                    name: "params",
                    reason: format!("banach takes one parameter (theta), got {}", params.len()),
                });
            };
            vec![theta / (b + 1.0)]
        }
        _ => params.to_vec(),
    };
    let f = ComparisonFunction::new(family, params, variant)?;
    let certificate = analytic_k(&f, variant);
    if !certificate.valid {
        return Err(Error::InvalidCertificate { k: certificate.k });
    }
    Ok(ContractionTemplate {
        f,
        variant,
        b,
        certificate,
    })
}
