//! Two-level spatial multiplexing link simulator for mmWave backhaul.
//!
//! The crate builds a LoS + ground-reflection scene between two vertical
//! stacks of `M×M` subarrays, applies analog codebook beams and digital
//! baseband processing, and evaluates capacity by extended-channel SVD and
//! waterfilling.

pub mod numkit;
pub mod error;
pub mod geometry;
pub mod channel;
pub mod beamforming;
pub mod capacity;

pub use error::{ConfigError, Error, Result, Side};
pub mod harness;
