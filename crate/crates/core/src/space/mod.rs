//! Configurations, vectors and the functionals of the norming set.

mod config;
mod functional;
mod vector;

pub use config::{Mode, Params, SpaceConfig, ValidationReport, WeightTable};
pub use functional::{
    admissible_check, functional_restrict, functional_value, NormFunctional, PMeasure,
};
pub use vector::SparseVector;
