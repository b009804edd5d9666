use thiserror::Error;

/// Errors raised by pricing, hedging and experiment routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid market parameter: {name} = {value} ({reason})")]
    InvalidMarket {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid lattice parameter: {0}")]
    InvalidLattice(String),

    /// The per-step riskless return is not strictly between the down and up
    /// returns, so the lattice admits arbitrage.
    #[error("arbitrage: lattice requires a < r < b, got a = {a}, r = {r}, b = {b}")]
    Arbitrage { a: f64, r: f64, b: f64 },

    #[error("path has {path} steps but the value surface has {surface}")]
    PathMismatch { path: usize, surface: usize },

    #[error("at least two replications are required to estimate a variance, got {0}")]
    TooFewReplications(usize),

    #[error("unsupported: {0}")]
    Unsupported(&'static str),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
