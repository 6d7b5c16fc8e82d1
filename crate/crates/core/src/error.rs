use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not symmetric (max relative asymmetry {0:.3e})")]
    Asymmetric(f64),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("{algorithm} did not converge (unreduced block rows {lo}..={hi})")]
    Convergence {
        algorithm: &'static str,
        lo: usize,
        hi: usize,
    },

    #[error("scalar estimate `{name}` = {value:e} is at or below the floor {floor:e}")]
    GuardedScalar {
        name: &'static str,
        value: f64,
        floor: f64,
    },

    #[error("vector is (nearly) parallel to the constant-sum plane: 1ᵀx = {0:e}")]
    ConstraintDegenerate(f64),

    #[error("Jacobian is singular or ill-conditioned (condition estimate {0:e})")]
    Singular(f64),

    #[error("spectrum rejected: {0}")]
    Spectrum(String),

    #[error("rule kind {0} is not supported here")]
    UnsupportedKind(&'static str),

    #[error("unsupported orientation: rows {rows} < cols {cols}; transpose the matrix and swap roles")]
    UnsupportedOrientation { rows: usize, cols: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("state diverged at step {step} (norm {norm:e})")]
    Divergence { step: usize, norm: f64 },

    #[error("stream exhausted after {0} samples")]
    StreamExhausted(usize),

    #[error("zero vector")]
    ZeroVector,

    #[error("parse error: {0}")]
    Parse(String),
}
