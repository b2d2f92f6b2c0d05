use thiserror::Error;

/// Errors raised by every module of the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("size limit exceeded: {0}")]
    SizeLimit(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("no agreement: threat points sensor={d_sensor} years, switch={d_switch} years")]
    NoAgreement { d_sensor: f64, d_switch: f64 },

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
