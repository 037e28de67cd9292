use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("invalid gains: {0}")]
    InvalidGains(String),
    #[error("closed-loop matrix is not Hurwitz (max real eigenvalue part {0})")]
    NotHurwitz(f64),
    #[error("system is not critically damped: {0}")]
    NotCriticallyDamped(String),
    #[error("singular linear system: {0}")]
    SingularSystem(String),
    #[error("no point of the path lies inside the local safe zone")]
    NoFeasibleAlpha,
    #[error("no path between start and goal")]
    NoPath,
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("invalid obstacle: {0}")]
    InvalidObstacle(String),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
}
