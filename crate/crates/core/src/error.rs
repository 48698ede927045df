use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid measurement: {0}")]
    Measurement(String),

    #[error("embedding is not unit norm (|v| = {norm})")]
    NotUnitNorm { norm: f64 },

    #[error("embedding dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("cannot average an empty embedding bank")]
    EmptyBank,

    #[error("registration failed: {0}")]
    Registration(String),

    #[error("bank file: {0}")]
    BankFormat(String),

    #[error("tick log: {0}")]
    Log(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
