use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// Coherence times that cannot come from a physical emitter, e.g. T2 > 2 T1.
    #[error("inconsistent coherence times: {0}")]
    Inconsistent(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("curve under-sampled for convolution: step {step} ps > FWHM/8 = {limit} ps")]
    Undersampled { step: f64, limit: f64 },

    #[error("curve tails not flat at the {edge} edge (deviation {deviation:.3e} > 1e-4)")]
    EdgesNotFlat { edge: &'static str, deviation: f64 },

    #[error("click stream `{0}` is empty")]
    EmptyStream(String),

    #[error("timestamps not strictly increasing at index {index}")]
    Unsorted { index: usize },

    #[error("timestamp {timestamp} ps at index {index} lies outside [0, {duration}] ps")]
    OutOfRange { index: usize, timestamp: u64, duration: u64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{}: {source}", path.display())]
    AtPath {
        path: PathBuf,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    /// Side peaks of a Mollow fit are not resolved from the central line.
    #[error("Mollow triplet unresolved: fitted splitting {rabi_energy:.4} ueV is below the side-peak half-width {half_width:.4} ueV")]
    TripletUnresolved { rabi_energy: f64, half_width: f64 },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn at_path(path: impl Into<PathBuf>, source: Error) -> Self {
        Error::AtPath {
            path: path.into(),
            source: Box::new(source),
        }
    }
}
