use thiserror::Error;

/// Errors produced anywhere in the solve / verify / simulate pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("payoff matrices must be at least 1x1")]
    EmptyMatrix,

    #[error("ragged payoff matrix: row {row} has {found} entries, expected {expected}")]
    RaggedMatrix {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("dimension mismatch: matrix_s1 is {s1:?} but matrix_s2 is {s2:?}")]
    DimensionMismatch { s1: (usize, usize), s2: (usize, usize) },

    #[error("non-finite value in {what}")]
    NonFinite { what: &'static str },

    #[error("negative transition rate {name} = {value}")]
    NegativeRate { name: &'static str, value: f64 },

    #[error("degenerate chain: lambda1 + lambda2 must be positive")]
    DegenerateChain,

    #[error("discount rate r must be positive, got {0}")]
    NonPositiveDiscount(f64),

    #[error("step parameter n must be positive, got {0}")]
    NonPositiveStep(f64),

    #[error("probability {0} outside [0, 1]")]
    ProbabilityOutOfRange(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("interval [{lo}, {hi}] straddles the invariant belief {p_star}")]
    StraddlesInvariant { lo: f64, hi: f64, p_star: f64 },

    #[error("no progress at belief {at} (step {step}): {detail}")]
    ProgressStall {
        at: f64,
        step: usize,
        detail: String,
    },

    #[error("value function does not cover [0, 1]: {0}")]
    Coverage(String),

    #[error("oracle did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("linear program failed: {0}")]
    Lp(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by invalid input rather than I/O or numerics.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::Io(_) | Error::NonConvergence { .. } | Error::ProgressStall { .. } | Error::Lp(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
