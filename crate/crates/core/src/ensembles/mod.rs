//! Triangular schemes: Curie-Weiss, correlated Gaussian and Wigner entries.
//!
//! A scheme produces, for each dimension `n`, a symmetric `n x n` array of
//! raw (unscaled) entries. [`Scheme::prepare`] does the per-dimension
//! precomputation once (magnetization CDF, covariance factor) so that
//! replicas only pay for the draws.

pub mod aau;
pub mod curie_weiss;
pub mod gaussian;
pub mod wigner;

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

pub use self::aau::{verify_aau, AauReport, AauRow, BoundKind};
pub use self::curie_weiss::{
    curie_weiss_scheme, cw_product_moment, magnetization_pmf, sample_curie_weiss, CurieWeissParams, CurieWeissSampler,
};
pub use self::gaussian::{
    gaussian_scheme, triangle_index, triangle_size, CovSpec, GaussianSampler, GaussianSchemeParams,
};
pub use self::wigner::{wigner_scheme, WignerDist};

use crate::error::Result;
use crate::matrix::SquareMatrix;
use crate::rng::rng_from_seed;

/// Unordered index pair `{i, j}` stored with `i <= j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Pair(pub usize, pub usize);

impl Pair {
    pub fn new(i: usize, j: usize) -> Self {
        if i <= j {
            Pair(i, j)
        } else {
            Pair(j, i)
        }
    }

    pub fn is_loop(&self) -> bool {
        self.0 == self.1
    }
}

/// Scheme family and parameters, as recorded alongside every sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Scheme {
    CurieWeiss { beta: f64 },
    Gaussian { alpha: f64, cov: CovSpec },
    Wigner { dist: WignerDist },
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::CurieWeiss { .. } => "curie-weiss",
            Scheme::Gaussian { .. } => "gaussian",
            Scheme::Wigner { .. } => "wigner",
        }
    }

    /// True when every entry is almost surely `+1` or `-1`.
    pub fn is_sign_valued(&self) -> bool {
        matches!(self, Scheme::CurieWeiss { .. } | Scheme::Wigner { dist: WignerDist::Rademacher })
    }

    /// Validates the parameters for dimension `n` and performs the
    /// per-dimension precomputation.
    pub fn prepare(&self, n: usize) -> Result<PreparedScheme> {
        let inner = match self {
            Scheme::CurieWeiss { beta } => {
                let params = CurieWeissParams::new(*beta, n.checked_mul(n).unwrap_or(0))?;
                Prepared::CurieWeiss(CurieWeissSampler::new(params)?)
            }
            Scheme::Gaussian { alpha, cov } => {
                let params = GaussianSchemeParams::new(*alpha, n, cov.clone())?;
                Prepared::Gaussian(GaussianSampler::new(params)?)
            }
            Scheme::Wigner { dist } => {
                wigner::check_dim(n)?;
                Prepared::Wigner(*dist)
            }
        };
        Ok(PreparedScheme { scheme: self.clone(), n, inner })
    }

    pub fn sample(&self, n: usize, seed: u64) -> Result<SchemeSample> {
        self.prepare(n)?.sample_seeded(seed)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scheme::CurieWeiss { beta } => write!(f, "curie-weiss(beta={beta})"),
            Scheme::Gaussian { alpha, cov } => write!(f, "gaussian(alpha={alpha}, {cov})"),
            Scheme::Wigner { dist } => write!(f, "wigner({dist})"),
        }
    }
}

#[derive(Debug, Clone)]
enum Prepared {
    CurieWeiss(CurieWeissSampler),
    Gaussian(GaussianSampler),
    Wigner(WignerDist),
}

/// A scheme bound to a dimension, ready to draw replicas.
///
/// Holds no mutable state; share it across threads and give each replica
/// its own generator.
#[derive(Debug, Clone)]
pub struct PreparedScheme {
    scheme: Scheme,
    n: usize,
    inner: Prepared,
}

impl PreparedScheme {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn scheme(&self) -> &Scheme {
        &self.scheme
    }

    pub fn sample_entries<R: Rng + ?Sized>(&self, rng: &mut R) -> SquareMatrix {
        match &self.inner {
            Prepared::CurieWeiss(s) => curie_weiss::grid_to_scheme(self.n, &s.sample(rng)),
            Prepared::Gaussian(s) => s.sample_entries(rng),
            Prepared::Wigner(d) => wigner::sample_entries(*d, self.n, rng),
        }
    }

    pub fn sample_seeded(&self, seed: u64) -> Result<SchemeSample> {
        let mut rng = rng_from_seed(seed);
        Ok(SchemeSample { n: self.n, entries: self.sample_entries(&mut rng), scheme: self.scheme.clone(), seed })
    }
}

/// One realization of a triangular scheme at dimension `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeSample {
    pub n: usize,
    pub entries: SquareMatrix,
    pub scheme: Scheme,
    pub seed: u64,
}

/// Symmetrizes from the upper triangle: `a(i, j) = a(j, i) = upper(min, max)`.
pub(crate) fn symmetric_from_upper(n: usize, mut upper: impl FnMut(usize, usize) -> f64) -> SquareMatrix {
    let mut m = SquareMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            let v = upper(i, j);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}
