use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid pose: {0}")]
    InvalidPose(String),
    #[error("invalid region: {0}")]
    InvalidRegion(String),
    #[error("invalid manipulator model: {0}")]
    InvalidModel(String),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("start configuration is {distance} from the first waypoint (tolerance {tolerance})")]
    StartMismatch { distance: f64, tolerance: f64 },
    #[error("path needs at least {min} poses, got {actual}")]
    PathTooShort { min: usize, actual: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("task instance has {actual} objects, demonstration expects {expected}")]
    ObjectCountMismatch { expected: usize, actual: usize },
    #[error("demonstration set is empty")]
    EmptyDemonstrationSet,
    #[error("failure list is empty")]
    EmptyFailureList,
    #[error("invalid demonstration: {0}")]
    InvalidDemonstration(String),
    #[error("unknown template `{0}`")]
    UnknownTemplate(String),
    #[error("unknown manipulator model `{0}`")]
    UnknownModel(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
