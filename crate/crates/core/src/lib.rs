//! Enriched contractions on normed spaces: comparison-function classes,
//! sampled verification of the enriched inequalities, the averaged fixed-point
//! iteration with a-priori error bounds, and well-posedness / limit-shadowing
//! diagnostics.

pub mod comparison;
pub mod contraction;
pub mod diagnostics;
pub mod error;
pub mod registry;
pub mod sampling;
pub mod solver;
pub mod space;

pub use comparison::{
    analytic_k, check_axioms, numeric_k, AxiomReport, BranchConstant, BranchLabel,
    ComparisonFunction, Family, KCertificate, Variant,
};
pub use contraction::{
    verify, CertificateReport, CertificateVerdict, ContractionSpec, MappingSpec,
};
pub use diagnostics::{
    check_limit_shadowing, check_wellposedness, DiagnosticReport, SequenceKind, SequenceRecipe,
};
pub use error::{Error, Result};
pub use solver::{solve, SolveResult, StopRule, Termination};
pub use space::{NormKind, SpaceDescriptor, Vector};
