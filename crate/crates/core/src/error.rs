use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("community index {index} out of range for k = {k}")]
    CommunityOutOfRange { index: usize, k: usize },

    #[error("node index {index} out of range for n = {n}")]
    NodeOutOfRange { index: usize, n: usize },

    #[error("divergence of a community with itself is undefined (i = j = {0})")]
    SameCommunity(usize),

    #[error("invalid hyperedge {edge:?}: {reason}")]
    InvalidEdge { edge: Vec<usize>, reason: &'static str },

    #[error("rate {0} is outside the open interval (0, 1)")]
    InvalidRate(f64),

    #[error("no node has degree <= tau = {tau} (max degree {max_degree}, min degree {min_degree})")]
    EmptyTrimSet { tau: f64, min_degree: u32, max_degree: u32 },

    #[error("singular value decomposition failed to converge on a {rows}x{cols} matrix")]
    SvdFailed { rows: usize, cols: usize },

    #[error("invalid rank {rank} for a {n}x{n} matrix")]
    InvalidRank { rank: usize, n: usize },

    #[error("every community has zero posterior for node {0}")]
    NoFeasibleCommunity(usize),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error in {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
