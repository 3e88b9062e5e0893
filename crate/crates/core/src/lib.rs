//! Exact computations in finite sections of polyhedral sequence spaces built
//! from Schreier families and p-measures: the norm, its dual, extreme points
//! of small sections, witness families, and inequality checks.

pub mod constructions;
pub mod error;
pub mod harness;
pub mod norm;
pub mod ordinal;
pub mod rational;
pub mod schreier;
pub mod space;

pub use error::{Error, Result};
pub use ordinal::{ord_compare, Ordinal};
pub use schreier::{schreier_enumerate, schreier_maximal, schreier_member, FinSet};
pub use space::{
    admissible_check, functional_restrict, functional_value, Mode, NormFunctional, PMeasure,
    SpaceConfig, SparseVector,
};
pub use norm::{
    dual_norm, norm_bb, norm_exhaustive, section_extreme_points, DualNormResult, NormLimits,
    NormResult,
};
