//! Baseband simulation toolkit for the non-orthogonal AFDM waveform.
//!
//! The library builds chirp-carrier modulation matrices with a subcarrier
//! compression factor, runs frames through a delay-Doppler time-varying
//! channel, optionally pre-compensates the channel with ZF/MMSE transmit
//! precoding, detects with MMSE equalization or iterative interference
//! cancellation, and measures BER with a seeded Monte-Carlo harness.
//!
//! Link-level scheme variants (OFDM/AFDM baselines, compressed AFDM with
//! different transmitters and receivers) live behind the [`scheme::LinkScheme`]
//! trait and are selected by name at runtime through
//! [`scheme::SchemeRegistry`].

pub mod channel;
pub mod config;
pub mod detector;
pub mod harness;
pub mod linalg;
pub mod precoder;
pub mod scheme;
pub mod seeds;
pub mod waveform;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Linalg(#[from] linalg::LinalgError),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown scheme `{0}` (run the `schemes` subcommand for the registry)")]
    UnknownScheme(String),
    #[error("ML oracle search space too large: {hypotheses} hypotheses (cap {cap})")]
    SearchSpaceTooLarge { hypotheses: u128, cap: u64 },
    #[error("channel redraw limit reached after {0} singular draws")]
    RedrawLimit(usize),
    #[error("config error: {0}")]
    Config(String),
    #[error("I/O error at {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        Error::Io {
            path: path.display().to_string(),
            source,
        }
    }
}
