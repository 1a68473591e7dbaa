use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("field has {got} values, grid expects {expected}")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("non-finite value in {what}")]
    NonFinite { what: String },

    #[error("symbol magnitude {value:e} at mode ({kx}, {ky}) is below the solve guard {guard:e}")]
    SingularSymbol {
        kx: usize,
        ky: usize,
        value: f64,
        guard: f64,
    },

    #[error("initial SAV radicand E1 + C = {value:e} is not positive")]
    NegativeInitialRadicand { value: f64 },

    #[error("scalar elimination denominator {denominator:e} is singular at step {step}")]
    EliminationSingular { step: usize, denominator: f64 },

    #[error("radicand clamped at step {step} (raw value {radicand:e})")]
    ClampAbort { step: usize, radicand: f64 },

    #[error("unknown {kind} `{name}`")]
    UnknownName { kind: &'static str, name: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("malformed snapshot {path}: {reason}")]
    Snapshot { path: PathBuf, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("config parse error: {0}")]
    ConfigParse(#[from] toml::de::Error),
}
