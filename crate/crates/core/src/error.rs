use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// An object refers to a block, coordinate or segment outside the configured window.
    #[error("structural error: {0}")]
    Structural(String),

    #[error("{what} exceeded the configured cap of {cap}")]
    ResourceCap { what: &'static str, cap: usize },

    #[error("ordinal {0} is not a limit ordinal")]
    NotLimit(String),

    #[error("{0} is not a member of the Schreier family of order {1}")]
    NotMember(String, String),

    #[error("sequence exhausted: the recursion needs at least {required} elements but only {available} were supplied")]
    Exhausted { required: usize, available: usize },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("dual norm did not converge after {iterations} cuts; value lies in [{lower}, {upper}]")]
    CutLimit {
        iterations: usize,
        lower: String,
        upper: String,
    },

    #[error("smallness check failed on F = {set}: norm {norm} is not below {eps}")]
    Smallness {
        set: String,
        norm: String,
        eps: String,
    },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("unknown suite `{0}`")]
    UnknownSuite(String),

    #[error("exact arithmetic required: {0}")]
    ExactRequired(String),

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("linear program is unbounded")]
    Unbounded,
}
