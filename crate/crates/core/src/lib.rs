//! Near-field terahertz massive-MIMO channel estimation laboratory.
//!
//! The crate synthesizes spherical-wavefront MIMO channels from geometric
//! parameters, simulates beamformed pilot acquisition, and compares classical
//! estimators (LS, LMMSE, dictionary-based OMP) against a two-stage learned
//! estimator that extracts the slowly varying geometry (angles and distance)
//! with an LSTM + fully connected network and recovers the fast-fading path
//! gain in closed form.
//!
//! Modules:
//! - [`array`]: planar array geometry, far/near-field steering vectors.
//! - [`channel`]: parametric channel synthesis, UE trajectories, an auxiliary
//!   far-field multipath generator.
//! - [`pilot`]: precoder/combiner codebooks, noisy pilot measurements.
//! - [`estimators`]: LS, LMMSE, angular dictionaries, OMP, mutual coherence.
//! - [`dstice`]: the learned estimator, its hand-derived reverse-mode
//!   gradients, and the Adam training loop.
//! - [`complexity`]: flop-count models for the estimator families.
//! - [`harness`]: dataset generation, metrics, sweeps, CSV/result plumbing.

pub mod array;
pub mod channel;
pub mod complexity;
pub mod dstice;
pub mod estimators;
pub mod harness;
pub mod pilot;

mod error;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex<f64>;

/// Speed of light in m/s.
pub const LIGHT_SPEED: f64 = 2.997_924_58e8;
