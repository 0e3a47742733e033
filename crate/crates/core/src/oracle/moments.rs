//! Exact mixed moments of scheme entries.
//!
//! A product `a(p_1, q_1)^{d_1} ... a(p_l, q_l)^{d_l}` over distinct
//! unordered pairs is described by a list of `(Pair, exponent)` factors.

use std::collections::BTreeMap;

use crate::ensembles::curie_weiss::product_moment_from_pmf;
use crate::ensembles::gaussian::triangle_index;
use crate::ensembles::{magnetization_pmf, GaussianSchemeParams, Pair, Scheme, WignerDist};
use crate::error::{Error, Result};
use crate::numeric::double_factorial_odd;

use super::tuples::cyclic_edges;
use super::wick::wick_sum;

/// Exact `E[prod a(p_i, q_i)^{d_i}]` for one scheme at one dimension.
pub trait EntryMoments: Send + Sync {
    /// Dimension the moments refer to.
    fn n(&self) -> usize;

    /// `factors` must name distinct pairs inside `[0, n)`; zero exponents
    /// are allowed and ignored.
    fn mixed_moment(&self, factors: &[(Pair, u32)]) -> Result<f64>;
}

fn check_pairs(n: usize, factors: &[(Pair, u32)]) -> Result<()> {
    for (idx, (p, _)) in factors.iter().enumerate() {
        if p.1 >= n {
            return Err(Error::IndexOutOfRange { i: p.0, j: p.1, n });
        }
        if factors[..idx].iter().any(|(q, _)| q == p) {
            return Err(Error::InvalidParameter(format!("pair ({}, {}) listed twice", p.0, p.1)));
        }
    }
    Ok(())
}

/// Curie-Weiss scheme with `N = n^2` spins. Entries are `+-1`, so only the
/// number of odd exponents matters.
#[derive(Debug, Clone)]
pub struct CurieWeissMoments {
    n: usize,
    pmf: Vec<f64>,
}

impl CurieWeissMoments {
    pub fn new(beta: f64, n: usize) -> Result<Self> {
        let spins = n.checked_mul(n).ok_or_else(|| Error::Overflow(format!("n^2 for n = {n}")))?;
        Ok(Self { n, pmf: magnetization_pmf(beta, spins)? })
    }
}

impl EntryMoments for CurieWeissMoments {
    fn n(&self) -> usize {
        self.n
    }

    fn mixed_moment(&self, factors: &[(Pair, u32)]) -> Result<f64> {
        check_pairs(self.n, factors)?;
        let odd = factors.iter().filter(|(_, e)| e % 2 == 1).count();
        Ok(product_moment_from_pmf(&self.pmf, odd))
    }
}

/// Correlated Gaussian scheme: pairs map through the triangle enumeration
/// to components of the underlying vector, then Wick's formula applies.
#[derive(Debug, Clone)]
pub struct GaussianMoments {
    params: GaussianSchemeParams,
}

impl GaussianMoments {
    pub fn new(params: GaussianSchemeParams) -> Self {
        Self { params }
    }
}

impl EntryMoments for GaussianMoments {
    fn n(&self) -> usize {
        self.params.n()
    }

    fn mixed_moment(&self, factors: &[(Pair, u32)]) -> Result<f64> {
        let n = self.params.n();
        check_pairs(n, factors)?;
        let comps: Vec<usize> =
            factors.iter().flat_map(|&(p, e)| std::iter::repeat_n(triangle_index(n, p.0, p.1), e as usize)).collect();
        wick_sum(comps.len(), |r, s| self.params.covariance(comps[r], comps[s]))
    }
}

/// Independent entries: the moment factorizes.
#[derive(Debug, Clone, Copy)]
pub struct WignerMoments {
    n: usize,
    dist: WignerDist,
}

impl WignerMoments {
    pub fn new(dist: WignerDist, n: usize) -> Self {
        Self { n, dist }
    }

    /// `E[x^e]` of a single entry.
    pub fn single(&self, e: u32) -> f64 {
        match (self.dist, e % 2) {
            (_, 1) => 0.0,
            (WignerDist::Rademacher, _) => 1.0,
            (WignerDist::StandardNormal, _) => double_factorial_odd(e as usize / 2) as f64,
        }
    }
}

impl EntryMoments for WignerMoments {
    fn n(&self) -> usize {
        self.n
    }

    fn mixed_moment(&self, factors: &[(Pair, u32)]) -> Result<f64> {
        check_pairs(self.n, factors)?;
        Ok(factors.iter().map(|&(_, e)| self.single(e)).product())
    }
}

/// Exact entry-moment oracle for `scheme` at dimension `n`.
pub fn moment_oracle(scheme: &Scheme, n: usize) -> Result<Box<dyn EntryMoments>> {
    Ok(match scheme {
        Scheme::CurieWeiss { beta } => Box::new(CurieWeissMoments::new(*beta, n)?),
        Scheme::Gaussian { alpha, cov } => {
            Box::new(GaussianMoments::new(GaussianSchemeParams::new(*alpha, n, cov.clone())?))
        }
        Scheme::Wigner { dist } => {
            if n == 0 {
                return Err(Error::InvalidParameter("dimension n must be at least 1".into()));
            }
            Box::new(WignerMoments::new(*dist, n))
        }
    })
}

/// Groups the cyclic factors `a(t_1, t_2) ... a(t_k, t_1)` of a tuple by
/// unordered pair; factors come out sorted by pair.
pub fn tuple_factors(t: &[usize]) -> Vec<(Pair, u32)> {
    let mut m: BTreeMap<Pair, u32> = BTreeMap::new();
    for e in cyclic_edges(t) {
        *m.entry(e).or_insert(0) += 1;
    }
    m.into_iter().collect()
}
