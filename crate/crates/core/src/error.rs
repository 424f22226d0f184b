use thiserror::Error;

/// Errors surfaced by construction, scheduling, replay, and I/O paths.
///
/// Pure evaluation (winners, beats, step sets) never fails; contract
/// violations there are programming errors and assert instead.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("invalid ranking: {0}")]
    InvalidRanking(String),
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("invalid uncertainty spec: {0}")]
    InvalidSpec(String),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("scheduler error at round {round}: {reason}")]
    Scheduler { round: usize, reason: String },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),
    #[error("trace audit failed at round {round}: {reason}")]
    Audit { round: usize, reason: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
