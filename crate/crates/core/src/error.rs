use thiserror::Error;

/// Errors raised across the pipeline. Messages carry the originating module.
#[derive(Debug, Error)]
pub enum Error {
    #[error("chain_model: {0}")]
    InvalidChain(String),

    #[error("chain_model: speed measure: {0}")]
    InvalidSpeedMeasure(String),

    #[error("chain_model: resolvent system is numerically singular at row {row}")]
    SingularSystem { row: usize },

    #[error("jfraction: {0}")]
    InvalidFraction(String),

    #[error("jfraction: approximant denominator vanished at z = {z}")]
    ZeroDenominator { z: f64 },

    #[error("spectral_measure: eigenvalue {index} did not converge after {sweeps} sweeps")]
    NoConvergence { index: usize, sweeps: usize },

    #[error("spectral_measure: {0}")]
    InvalidMeasure(String),

    #[error("levy_measure: {0}")]
    InvalidSamples(String),

    #[error("mc_simulator: event cap of {cap} exceeded before the local-time budget was reached")]
    EventCapExceeded { cap: usize },

    #[error("mc_simulator: local time {t} exceeds the recorded budget {budget}")]
    LocalTimeOutOfRange { t: f64, budget: f64 },

    #[error("{op}: {msg}")]
    InvalidArgument { op: &'static str, msg: String },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid_arg<T>(op: &'static str, msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument {
        op,
        msg: msg.into(),
    })
}
