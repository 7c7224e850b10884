use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("eta undefined: the trade-off vanishes identically, so Phi has no root")]
    EtaUndefined,

    /// An iterative method failed to reach its tolerance.
    #[error("numeric failure: {message} (residual {residual:e})")]
    Numeric { message: String, residual: f64 },

    #[error("NaN or infinite value detected at step {step} (t = {time})")]
    NonFinite { step: usize, time: f64 },

    #[error("invalid normalization: {0}")]
    InvalidNormalization(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("not enough points in fit window: got {got}, need {need}")]
    InsufficientPoints { got: usize, need: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>, residual: f64) -> Self {
        Error::Numeric {
            message: msg.into(),
            residual,
        }
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
