use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    BadParameter(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("index error: {0}")]
    Index(String),
    #[error("size limit: {0}")]
    SizeLimit(String),
    #[error("time error: {0}")]
    Time(String),
    #[error("incomplete record: {0}")]
    IncompleteRecord(String),
    #[error("regime mismatch: {0}")]
    Regime(String),
    #[error("condition failed: {0}")]
    ConditionFailed(String),
}
