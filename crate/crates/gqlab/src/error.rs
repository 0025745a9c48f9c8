use thiserror::Error;

/// Errors raised by learners, drivers, and environment constructors.
#[derive(Debug, Error)]
pub enum GqError {
    /// Two vectors that must share the feature dimension do not.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// The behavior policy assigned zero probability to an action that was
    /// nevertheless observed, so the importance ratio is undefined.
    #[error("coverage violation at state {state}, action {action}: b(s,a) = 0 for a sampled action")]
    CoverageViolation { state: usize, action: usize },

    /// A learner update produced a non-finite entry.
    #[error("divergence detected at step {step}: non-finite value in {vector}")]
    Divergence { step: usize, vector: &'static str },

    /// A scalar parameter fell outside its declared range.
    #[error("invalid parameter {name}: {message}")]
    InvalidParameter { name: &'static str, message: String },

    /// A configuration document failed to parse or validate.
    #[error("config error at `{key}`: {message}")]
    Config { key: String, message: String },

    /// Reading or writing an experiment artifact failed.
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// An MDP or policy table violated a structural invariant.
    #[error("invalid model: {0}")]
    InvalidModel(String),

    /// A driver run stopped early; `source` holds the underlying failure.
    #[error("run aborted at step {step}: {source}")]
    RunAborted {
        step: usize,
        #[source]
        source: Box<GqError>,
    },

    /// The policy-evaluation sweep did not converge.
    #[error("policy evaluation did not converge within {max_iters} sweeps (residual {residual})")]
    OracleDidNotConverge { max_iters: usize, residual: f64 },
}

pub type Result<T> = std::result::Result<T, GqError>;
