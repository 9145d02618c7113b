//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("parameter chain violated: {0}")]
    ParamChain(String),

    #[error("frequency set invalid: {0}")]
    FrequencySet(String),

    #[error("symbol construction failed: {0}")]
    Symbol(String),

    #[error("exact rational coordinates missing: {0}")]
    RationalsMissing(String),

    #[error("cardinality cap exceeded: {0}")]
    CapExceeded(String),

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("numerical non-convergence: {0}")]
    NonConvergence(String),
}
