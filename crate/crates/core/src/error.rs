use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("layout conflict: {0}")]
    LayoutConflict(String),

    #[error("unknown subsystem label `{0}`")]
    UnknownLabel(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("operator is not Hermitian (max |H - H^dagger| = {defect:e})")]
    NotHermitian { defect: f64 },

    #[error("vector norm deviates from 1 by {deviation:e}")]
    NotNormalized { deviation: f64 },

    #[error("vector is not entangled (Schmidt rank {rank})")]
    NotEntangled { rank: usize },

    #[error("invalid effect: {0}")]
    InvalidEffect(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("no detection: {0}")]
    NoDetection(String),

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("validation error: {0}")]
    Validation(String),
}

impl Error {
    /// True for errors caused by incompatible shapes or impossible conversions,
    /// as opposed to malformed input values.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::LayoutConflict(_) => "layout_conflict",
            Error::UnknownLabel(_) => "unknown_label",
            Error::DimensionMismatch(_) => "dimension_mismatch",
            Error::NotHermitian { .. } => "not_hermitian",
            Error::NotNormalized { .. } => "not_normalized",
            Error::NotEntangled { .. } => "not_entangled",
            Error::InvalidEffect(_) => "invalid_effect",
            Error::InvalidState(_) => "invalid_state",
            Error::Infeasible(_) => "infeasible",
            Error::NoDetection(_) => "no_detection",
            Error::Solver(_) => "solver",
            Error::Validation(_) => "validation",
        }
    }

    pub fn is_dimensional(&self) -> bool {
        matches!(
            self,
            Error::DimensionMismatch(_) | Error::Infeasible(_) | Error::LayoutConflict(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
