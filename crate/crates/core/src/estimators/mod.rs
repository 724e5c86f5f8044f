//! Baseline channel estimators: least squares, linear MMSE, and
//! dictionary-based sparse recovery with mutual-coherence diagnostics.

mod linear;
mod sparse;

pub use linear::{
    empirical_covariance, estimate_covariance, lmmse_estimate, ls_estimate, ChannelCovariance,
    LinearEstimate,
};
pub use sparse::{
    build_dictionary, build_dictionary_grid, cs_omp_estimate, mutual_coherence, omp,
    AngularDictionary, SparseEstimate,
};
