use thiserror::Error;

/// Errors raised by time-scale construction, calculus and the certifiers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("time scale needs at least {required} points, got {actual}")]
    TooFewPoints { required: usize, actual: usize },
    #[error("time scale points must be strictly increasing (violated at index {index})")]
    NonMonotone { index: usize },
    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },
    #[error("index {index} out of range for a time scale of {len} points")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("reversed integration bounds: {start} > {end}")]
    ReversedInterval { start: usize, end: usize },
    #[error("expected {expected} values, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("grid functions live on different time scales")]
    MisalignedGrids,
    #[error("invalid time scale family: {0}")]
    InvalidFamily(String),
    #[error("coefficient is not regressive at index {index} (1 + mu*p = {factor})")]
    NonRegressive { index: usize, factor: f64 },
    #[error("complex characteristic roots (discriminant {discriminant})")]
    ComplexRoots { discriminant: f64 },
    #[error("repeated characteristic root {root}")]
    RepeatedRoots { root: f64 },
    #[error("Riccati breakdown at index {index}: 1 - mu*z vanishes")]
    RiccatiBreakdown { index: usize },
    #[error("Riccati condition violated at index {index}: {condition}")]
    RiccatiCondition { index: usize, condition: &'static str },
    #[error("Riccati residual {residual} exceeds tolerance {tolerance}")]
    RiccatiResidual { residual: f64, tolerance: f64 },
    #[error("invalid perturbation: {0}")]
    InvalidPerturbation(String),
}

impl Error {
    /// True for errors that mean the equation falls outside the hypotheses
    /// a certificate relies on, as opposed to malformed input.
    pub fn is_hypothesis_violation(&self) -> bool {
        matches!(
            self,
            Error::NonRegressive { .. }
                | Error::ComplexRoots { .. }
                | Error::RepeatedRoots { .. }
                | Error::RiccatiBreakdown { .. }
                | Error::RiccatiCondition { .. }
                | Error::RiccatiResidual { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
