use thiserror::Error;

/// Every failure the simulator can report.
#[derive(Debug, Error)]
pub enum MuskatError {
    #[error("rejected input: {0}")]
    InvalidInput(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("contour collision at node ({i}, {j}): gap {gap:e}")]
    ContourCollision { i: usize, j: usize, gap: f64 },

    #[error("numerical failure at node ({i}, {j}): {what}")]
    NumericalFailure { i: usize, j: usize, what: String },

    #[error("point lies on an interface; request the interface limit explicitly")]
    AmbiguousEvaluation,

    #[error("the Fourier multiplier is undefined at the zero mode")]
    UndefinedMultiplier,

    #[error("splitting radius {delta:e} does not exceed the grid spacing {spacing:e}")]
    ResolutionInsufficient { delta: f64, spacing: f64 },

    #[error("need at least {needed} records, got {got}")]
    TooFewRecords { needed: usize, got: usize },

    #[error("no signal: {0}")]
    NoSignal(String),

    #[error("{path}: {message}")]
    Validation { path: String, message: String },

    #[error("malformed artifact {path}: {message}")]
    Artifact { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = MuskatError> = std::result::Result<T, E>;

impl MuskatError {
    pub fn validation(path: impl Into<String>, message: impl Into<String>) -> Self {
        MuskatError::Validation {
            path: path.into(),
            message: message.into(),
        }
    }

    /// True for failures that halt a time integration (collision, NaN).
    pub fn is_numerical_halt(&self) -> bool {
        matches!(
            self,
            MuskatError::ContourCollision { .. } | MuskatError::NumericalFailure { .. }
        )
    }

    /// Process exit status used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        if self.is_numerical_halt() {
            3
        } else {
            2
        }
    }
}
