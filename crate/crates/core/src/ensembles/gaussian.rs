//! Correlated Gaussian schemes.
//!
//! The upper triangle of an `n x n` matrix has `n(n+1)/2` entries; they are
//! filled from one centered Gaussian vector of that length through the
//! row-major enumeration [`triangle_index`].

use std::fmt;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;

/// Largest covariance dimension accepted on the dense factorization path.
pub const MAX_EXPLICIT_DIM: usize = 4096;

/// Number of upper-triangle entries of an `n x n` matrix.
pub fn triangle_size(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Row-major position of `{i, j}` in the closed upper triangle (zero-based).
pub fn triangle_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * n - i * i.saturating_sub(1) / 2 + (j - i)
}

/// Covariance of the underlying Gaussian vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum CovSpec {
    /// Unit diagonal, constant off-diagonal value.
    Equicorrelated { off_diag_value: f64 },
    /// Equicorrelated with the largest off-diagonal value the decay bound
    /// allows, `m^(-alpha)` for covariance dimension `m`.
    MaxCorrelation,
    /// Arbitrary covariance given row by row.
    Explicit { matrix: Vec<Vec<f64>> },
}

impl CovSpec {
    /// Off-diagonal value of an equicorrelated covariance, if this is one.
    pub fn off_diagonal(&self, alpha: f64, dim: usize) -> Option<f64> {
        match self {
            CovSpec::Equicorrelated { off_diag_value } => Some(*off_diag_value),
            CovSpec::MaxCorrelation => Some((dim as f64).powf(-alpha)),
            CovSpec::Explicit { .. } => None,
        }
    }
}

impl fmt::Display for CovSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CovSpec::Equicorrelated { off_diag_value } => write!(f, "equicorrelated c={off_diag_value}"),
            CovSpec::MaxCorrelation => write!(f, "equicorrelated c=dim^-alpha"),
            CovSpec::Explicit { matrix } => write!(f, "explicit {0}x{0}", matrix.len()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianSchemeParams {
    alpha: f64,
    n: usize,
    cov: CovSpec,
}

impl GaussianSchemeParams {
    pub fn new(alpha: f64, n: usize, cov: CovSpec) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")));
        }
        if n == 0 {
            return Err(Error::InvalidParameter("dimension n must be at least 1".into()));
        }
        let dim = triangle_size(n);
        let bound = (dim as f64).powf(-alpha);
        let slack = 1e-12 * bound;
        match &cov {
            CovSpec::Equicorrelated { off_diag_value: c } => {
                let c = *c;
                if c.is_nan() || c.abs() >= 1.0 {
                    return Err(Error::InvalidParameter(format!("off-diagonal value {c} not in (-1, 1)")));
                }
                if dim > 1 && c.abs() > bound + slack {
                    return Err(Error::InvalidParameter(format!("|off-diagonal| {c} exceeds dim^-alpha = {bound}")));
                }
                if dim > 1 && c <= -1.0 / (dim as f64 - 1.0) {
                    return Err(Error::NotPositiveDefinite { pivot: dim - 1, value: 1.0 + (dim as f64 - 1.0) * c });
                }
            }
            CovSpec::MaxCorrelation => {}
            CovSpec::Explicit { matrix } => {
                if matrix.len() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, found: matrix.len() });
                }
                if dim > MAX_EXPLICIT_DIM {
                    return Err(Error::OversizedInstance(format!(
                        "explicit covariance of dimension {dim} exceeds {MAX_EXPLICIT_DIM}"
                    )));
                }
                for (i, row) in matrix.iter().enumerate() {
                    if row.len() != dim {
                        return Err(Error::DimensionMismatch { expected: dim, found: row.len() });
                    }
                    if row[i] != 1.0 {
                        return Err(Error::InvalidParameter(format!("diagonal entry {i} is {} not 1", row[i])));
                    }
                    for (j, &v) in row.iter().enumerate().take(i) {
                        if v != matrix[j][i] {
                            return Err(Error::NotSymmetric { i, j, gap: (v - matrix[j][i]).abs() });
                        }
                        if v.abs() > bound + slack {
                            return Err(Error::InvalidParameter(format!(
                                "|cov({i},{j})| = {} exceeds dim^-alpha = {bound}",
                                v.abs()
                            )));
                        }
                    }
                }
            }
        }
        Ok(Self { alpha, n, cov })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cov(&self) -> &CovSpec {
        &self.cov
    }

    /// Covariance dimension `n(n+1)/2`.
    pub fn dim(&self) -> usize {
        triangle_size(self.n)
    }

    /// Covariance between vector components `p` and `q`.
    pub fn covariance(&self, p: usize, q: usize) -> f64 {
        if p == q {
            return 1.0;
        }
        match &self.cov {
            CovSpec::Explicit { matrix } => matrix[p][q],
            other => other.off_diagonal(self.alpha, self.dim()).expect("equicorrelated"),
        }
    }
}

/// Lower Cholesky factor of a dense symmetric matrix, row-major.
pub fn cholesky(matrix: &SquareMatrix) -> Result<SquareMatrix> {
    let m = matrix.dim();
    let mut l = SquareMatrix::zeros(m);
    for j in 0..m {
        let mut diag = matrix[(j, j)];
        for k in 0..j {
            diag -= l[(j, k)] * l[(j, k)];
        }
        if diag.is_nan() || diag <= 0.0 {
            return Err(Error::NotPositiveDefinite { pivot: j, value: diag });
        }
        let d = diag.sqrt();
        l[(j, j)] = d;
        for i in (j + 1)..m {
            let mut s = matrix[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    Ok(l)
}

#[derive(Debug, Clone)]
enum Factor {
    /// `Y = sqrt(1-c) Z + sqrt(c) G` for `c >= 0`.
    Shared {
        idio: f64,
        common: f64,
    },
    /// `Y = sqrt(1-c) (Z - gamma * mean(Z))` for `c < 0`.
    Centred {
        scale: f64,
        gamma: f64,
    },
    Cholesky(SquareMatrix),
}

/// Gaussian scheme bound to one dimension.
#[derive(Debug, Clone)]
pub struct GaussianSampler {
    params: GaussianSchemeParams,
    factor: Factor,
}

impl GaussianSampler {
    pub fn new(params: GaussianSchemeParams) -> Result<Self> {
        let dim = params.dim();
        let factor = match params.cov.off_diagonal(params.alpha, dim) {
            Some(c) if c >= 0.0 => Factor::Shared { idio: (1.0 - c).sqrt(), common: c.sqrt() },
            Some(c) => {
                let s = -c * dim as f64 / (1.0 - c);
                Factor::Centred { scale: (1.0 - c).sqrt(), gamma: 1.0 - (1.0 - s).sqrt() }
            }
            None => {
                let CovSpec::Explicit { matrix } = &params.cov else { unreachable!() };
                Factor::Cholesky(cholesky(&SquareMatrix::from_rows(matrix)?)?)
            }
        };
        Ok(Self { params, factor })
    }

    pub fn params(&self) -> &GaussianSchemeParams {
        &self.params
    }

    /// Draws the underlying vector `(Y_1, ..., Y_dim)`.
    pub fn sample_vector<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let dim = self.params.dim();
        match &self.factor {
            Factor::Shared { idio, common } => {
                let g: f64 = rng.sample(StandardNormal);
                (0..dim).map(|_| idio * rng.sample::<f64, _>(StandardNormal) + common * g).collect()
            }
            Factor::Centred { scale, gamma } => {
                let z: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
                let mean = z.iter().sum::<f64>() / dim as f64;
                z.into_iter().map(|v| scale * (v - gamma * mean)).collect()
            }
            Factor::Cholesky(l) => {
                let z: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
                (0..dim).map(|i| l.row(i)[..=i].iter().zip(&z).map(|(a, b)| a * b).sum()).collect()
            }
        }
    }

    pub fn sample_entries<R: Rng + ?Sized>(&self, rng: &mut R) -> SquareMatrix {
        let n = self.params.n;
        let y = self.sample_vector(rng);
        super::symmetric_from_upper(n, |i, j| y[triangle_index(n, i, j)])
    }
}

pub fn gaussian_scheme<R: Rng + ?Sized>(params: GaussianSchemeParams, rng: &mut R) -> Result<SquareMatrix> {
    Ok(GaussianSampler::new(params)?.sample_entries(rng))
}
