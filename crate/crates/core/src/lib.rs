//! Periodic random band matrices with dependent entries.
//!
//! Samplers for Curie-Weiss, correlated Gaussian and Wigner schemes,
//! band masking and scaling, a dense symmetric eigensolver with semicircle
//! reference quantities, exact combinatorial oracles for small instances,
//! and a reproducible experiment harness.

pub mod bandmatrix;
pub mod ensembles;
pub mod error;
pub mod harness;
pub mod matrix;
pub mod numeric;
pub mod oracle;
pub mod rng;
pub mod spectra;

pub use crate::bandmatrix::{build_x, BandSpec, ScaledBandMatrix};
pub use crate::ensembles::{CovSpec, Pair, PreparedScheme, Scheme, SchemeSample, WignerDist};
pub use crate::error::{Error, Result};
pub use crate::matrix::SquareMatrix;
pub use crate::spectra::{
    catalan, eigenvalues, esd_moment, kolmogorov_distance, semicircle_cdf, semicircle_density, semicircle_moment,
    SemicircleRef, SpectralSample,
};
