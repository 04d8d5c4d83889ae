//! Error type shared by all modules of the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("operator `{0}` requires a reference energy E")]
    MissingEnergy(String),

    #[error("energy E = {energy} out of range for operator `{label}`: {constraint}")]
    EnergyOutOfRange {
        label: String,
        energy: f64,
        constraint: String,
    },

    #[error("field shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: String, got: String },

    #[error("position multiplier `{label}` evaluates non-finite at sample ({x1}, {x2})")]
    NonFiniteSample { label: String, x1: f64, x2: f64 },

    #[error("zero-norm field where a normalizable state is required")]
    ZeroNorm,

    #[error("requested {count} eigenvalues of a dimension-{dim} matrix")]
    CountExceedsDimension { count: usize, dim: usize },

    #[error("no sign change found while bracketing: {0}")]
    BracketNotFound(String),

    #[error("objective not monotone across the bracket: {0}")]
    NonMonotoneObjective(String),

    #[error("iteration failed to converge: {0}")]
    ConvergenceFailure(String),

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),

    #[error("calibration fixture problem: {0}")]
    Fixture(String),
}

pub type Result<T> = std::result::Result<T, Error>;
