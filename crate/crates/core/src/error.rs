use thiserror::Error;

/// Errors raised by the library. The CLI maps each variant to an exit code.
#[derive(Debug, Error)]
pub enum NagError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("resource guard `{guard}`: predicted {predicted} exceeds limit {limit}")]
    SizeLimit {
        guard: &'static str,
        predicted: u128,
        limit: u128,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("singular tangent derivative (sigma_min = {sigma:.3e})")]
    SingularDerivative { sigma: f64 },

    #[error("condition estimate reached 2^{bits} (last estimate {estimate:.6e}); input is singular or too ill-posed")]
    ConditionOverflow { bits: u32, estimate: f64 },

    #[error("precondition `{0}` violated")]
    Precondition(String),

    #[error("subdivision exceeded max depth {max_depth}; {} boxes unresolved", .boxes.len())]
    MaxDepth {
        max_depth: u32,
        boxes: Vec<crate::pv::Box>,
    },

    #[error("homotopy step underflow at t = {t:.17e} (dt = {dt:.3e}); path passes near a singular system")]
    StepUnderflow { t: f64, dt: f64 },
}

impl NagError {
    /// Broad class used for exit codes.
    pub fn kind(&self) -> ErrorKind {
        match self {
            NagError::Dimension(_) | NagError::InvalidInput(_) => ErrorKind::Input,
            NagError::SizeLimit { .. } => ErrorKind::Resource,
            _ => ErrorKind::Numerical,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Input,
    Resource,
    Numerical,
}

pub type Result<T> = std::result::Result<T, NagError>;
