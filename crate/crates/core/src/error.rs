use std::fmt;

use crate::numkit::NumError;

/// Which end of the link a beamforming quantity belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Tx,
    Rx,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Tx => f.write_str("transmit"),
            Side::Rx => f.write_str("receive"),
        }
    }
}

/// A rejected configuration value.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("invalid `{field}`: {reason}")]
pub struct ConfigError {
    pub field: String,
    pub reason: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("numerical failure: {0}")]
    Numerical(#[from] NumError),
    #[error("{side} RF Gram matrix is rank deficient (rank {rank} of {dim}); duplicate or dependent beams selected")]
    RankDeficientGram { side: Side, rank: usize, dim: usize },
    #[error("post-equalizer noise covariance is singular (rank {rank} of {dim})")]
    SingularNoise { rank: usize, dim: usize },
    #[error("failed to parse config: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures that stem from the user's input rather than the
    /// numerics or the filesystem.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_) | Error::Json(_))
    }

    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Numerical(_) | Error::RankDeficientGram { .. } | Error::SingularNoise { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
