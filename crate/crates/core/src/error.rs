use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("length mismatch: expected {expected} coefficients, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("{what} out of range: {detail}")]
    OutOfRange { what: &'static str, detail: String },

    #[error("grid of {m} points too small for truncation {n} (need a power of two >= {required})")]
    GridTooSmall { m: usize, n: usize, required: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("state diverged at t = {t}: norm {norm:e}")]
    Diverged { t: f64, norm: f64 },

    #[error("{what} did not converge after {iterations} iterations (contraction estimate {contraction:.3e})")]
    NonConvergence {
        what: &'static str,
        iterations: usize,
        contraction: f64,
    },

    #[error("declared bound violated: {0}")]
    BoundViolation(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
