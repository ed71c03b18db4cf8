//! Crate-wide error type.

/// Errors produced by validation, the LP solver, dataset IO, and training.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A probability table or model parameter violated its invariants.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Phase 1 of the simplex method ended with a nonzero artificial
    /// objective, so no feasible point exists.
    #[error("linear program is infeasible (phase-1 residual {residual:.3e})")]
    Infeasible { residual: f64 },

    /// A pivot column had no positive entry; the objective is unbounded
    /// below along that ray.
    #[error("linear program is unbounded along variable {column}")]
    Unbounded { column: usize },

    /// Vector lengths passed to an optimizer step did not agree.
    #[error("shape mismatch: expected {expected} entries, got {got}")]
    ShapeMismatch { expected: usize, got: usize },

    /// Training produced a non-finite loss or parameter. Carries the last
    /// finite parameter vector so the caller can inspect or restart.
    #[error("training diverged at outer iteration {iter}")]
    Diverged { iter: usize, last_finite: Vec<f64> },

    /// A dataset file failed to parse. `line` is 1-based.
    #[error("dataset parse error at line {line}: {msg}")]
    DatasetParse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
