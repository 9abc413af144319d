use thiserror::Error;

use crate::Point;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point ({}, {}) is outside the metric's domain of definition", .0[0], .0[1])]
    OutsideDomain(Point),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("integration failed: {0}")]
    Integration(String),

    #[error("field support touches the boundary collar ({nonzero} nonzero samples inside it)")]
    Support { nonzero: usize },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("metric is not simple: {0}")]
    NotSimple(String),

    #[error("sigma grid too short: need [{need_min}, {need_max}], got [{have_min}, {have_max}]")]
    SigmaGrid { need_min: f64, need_max: f64, have_min: f64, have_max: f64 },

    #[error("internal consistency violated: {0}")]
    Consistency(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }
}
