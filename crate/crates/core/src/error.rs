use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by grid construction, boundary validation, solvers and I/O.
///
/// Species indices in messages are 1-based to match the `u1`, `u2`, ...
/// naming used in output files.
#[derive(Debug, Error)]
pub enum Error {
    #[error("resolution {0} is too small (need at least 3 nodes per axis)")]
    ResolutionTooSmall(usize),
    #[error("disconnected interior: {0} edge-connected components")]
    DisconnectedInterior(usize),
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("node {0} is not an interior node")]
    NotInterior(usize),
    #[error("boundary arcs of species {first} and {second} overlap")]
    OverlappingArcs { first: usize, second: usize },
    #[error("species {species} has negative arc amplitude {amplitude}")]
    NegativeAmplitude { species: usize, amplitude: f64 },
    #[error("invalid boundary data: {0}")]
    InvalidBoundary(String),
    #[error("epsilon must be positive, got {0}")]
    NonPositiveEpsilon(f64),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("malformed field file {path}: {reason}")]
    FieldFormat { path: String, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
