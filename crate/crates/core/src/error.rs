use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("degree {degree} lies outside the window [{lo}, {hi}]")]
    OutOfWindow { degree: i64, lo: i64, hi: i64 },
    #[error("degree {degree} lies outside the interior [{lo}, {hi}]")]
    OutOfInterior { degree: i64, lo: i64, hi: i64 },
    #[error("Sq^{k} is not materialized on degree {degree}")]
    MissingOperation { k: u32, degree: i64 },
    #[error("malformed input: {0}")]
    Parse(String),
    #[error("integrity check failed: {0}")]
    Integrity(String),
    #[error("unsupported request: {0}")]
    Unsupported(String),
    #[error("window too small: {0}")]
    WindowTooSmall(String),
}

pub type Result<T> = std::result::Result<T, Error>;
