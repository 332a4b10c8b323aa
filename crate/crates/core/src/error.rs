use thiserror::Error;

use crate::model::ValidationReport;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("model failed validation:\n{0}")]
    Invalid(ValidationReport),

    /// The empty clause was derived: the dependency model has no models.
    #[error("contradiction: the dependency model is unsatisfiable")]
    Contradiction,

    /// Recorded results cannot be reconciled with the dependency model.
    #[error("inconsistent status: recorded results contradict the dependency model")]
    InconsistentStatus,

    #[error("saturation exceeded the derived-clause limit of {limit}")]
    SaturationLimit { limit: usize },

    #[error("ordering constraints contain a cycle through {0}")]
    Cycle(String),

    #[error("unknown test '{0}'")]
    UnknownTest(String),

    #[error("test '{0}' was already executed")]
    AlreadyExecuted(String),

    #[error("test '{0}' is not droppable")]
    NotDroppable(String),

    #[error("history policy requires prior results")]
    MissingHistory,
}

pub type Result<T> = std::result::Result<T, Error>;
