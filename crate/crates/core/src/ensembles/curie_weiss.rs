//! Exact Curie-Weiss sampling.
//!
//! A Curie-Weiss(beta, N) vector has law proportional to
//! `exp(beta / (2N) * (sum y)^2)` on `{-1, 1}^N`. The weight depends only on
//! the magnetization `S = sum y`, so a sample is drawn in two stages: `S`
//! from its marginal, then a uniformly random placement of the `(N + S) / 2`
//! positive spins. Exchangeability makes this exact.

use rand::seq::index;
use rand::Rng;

use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;
use crate::numeric::neumaier_sum;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurieWeissParams {
    beta: f64,
    num_spins: usize,
}

impl CurieWeissParams {
    pub fn new(beta: f64, num_spins: usize) -> Result<Self> {
        if !beta.is_finite() || beta <= 0.0 {
            return Err(Error::InvalidParameter(format!("beta must be positive, got {beta}")));
        }
        if num_spins == 0 {
            return Err(Error::InvalidParameter("number of spins must be at least 1".into()));
        }
        Ok(Self { beta, num_spins })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn num_spins(&self) -> usize {
        self.num_spins
    }
}

/// Unnormalized log weights indexed by the number of positive spins `p`,
/// shifted so that the maximum is zero.
///
/// Accumulated outward from the centre via the ratio of neighbouring terms,
/// `w(p+1)/w(p) = (N-p)/(p+1) * exp(2 beta (S+1) / N)` with `S = 2p - N`.
fn log_weights(params: &CurieWeissParams) -> Vec<f64> {
    let n = params.num_spins;
    let beta = params.beta;
    let nf = n as f64;
    let step = |p: usize| -> f64 {
        let s = 2.0 * p as f64 - nf;
        ((nf - p as f64) / (p as f64 + 1.0)).ln() + 2.0 * beta * (s + 1.0) / nf
    };
    let mut lw = vec![0.0; n + 1];
    let centre = n / 2;
    for p in centre..n {
        lw[p + 1] = lw[p] + step(p);
    }
    for p in (1..=centre).rev() {
        lw[p - 1] = lw[p] - step(p - 1);
    }
    let max = lw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    lw.iter_mut().for_each(|v| *v -= max);
    lw
}

fn normalized(params: &CurieWeissParams) -> Vec<f64> {
    let mut w: Vec<f64> = log_weights(params).into_iter().map(f64::exp).collect();
    let z = neumaier_sum(w.iter().copied());
    w.iter_mut().for_each(|v| *v /= z);
    w
}

/// Law of the magnetization. Entry `p` is `P(S = 2p - N)`, so the vector runs
/// over `S = -N, -N + 2, ..., N` in ascending order.
pub fn magnetization_pmf(beta: f64, num_spins: usize) -> Result<Vec<f64>> {
    Ok(normalized(&CurieWeissParams::new(beta, num_spins)?))
}

/// `E[Y_1 ... Y_m | p positive spins among N]`, i.e. the mean of a product
/// of `m` draws without replacement from an urn with `p` plus and `N - p`
/// minus signs.
fn conditional_product(num_spins: usize, plus: usize, m: usize) -> f64 {
    let minus = num_spins - plus;
    let mut total = 0.0;
    let mut binom_mj = 1.0f64; // binom(m, j)
    for j in 0..=m {
        if j > 0 {
            binom_mj = binom_mj * (m - j + 1) as f64 / j as f64;
        }
        if j > plus || m - j > minus {
            continue;
        }
        let mut ratio = 1.0f64;
        for idx in 0..m {
            let num = if idx < j { (plus - idx) as f64 } else { (minus - (idx - j)) as f64 };
            ratio *= num / (num_spins - idx) as f64;
        }
        let sign = if (m - j).is_multiple_of(2) { 1.0 } else { -1.0 };
        total += sign * binom_mj * ratio;
    }
    total
}

/// `E[Y_1 ... Y_m]` for `m` distinct spins of a Curie-Weiss(beta, N) vector.
///
/// Spins are `+-1`, so the mixed moment `E[prod Y_i^{d_i}]` over distinct
/// spins equals this value with `m = #{i : d_i odd}`.
pub fn cw_product_moment(beta: f64, num_spins: usize, m: usize) -> Result<f64> {
    if m > num_spins {
        return Err(Error::InvalidParameter(format!("product of {m} distinct spins requested from {num_spins}")));
    }
    let pmf = magnetization_pmf(beta, num_spins)?;
    Ok(product_moment_from_pmf(&pmf, m))
}

pub(crate) fn product_moment_from_pmf(pmf: &[f64], m: usize) -> f64 {
    let num_spins = pmf.len() - 1;
    if m == 0 {
        return 1.0;
    }
    if m % 2 == 1 {
        // Global spin flip maps S to -S and leaves the weight unchanged.
        return 0.0;
    }
    neumaier_sum(
        pmf.iter().enumerate().filter(|(_, &w)| w > 0.0).map(|(p, &w)| w * conditional_product(num_spins, p, m)),
    )
}

/// Precomputed magnetization CDF for repeated exact sampling.
#[derive(Debug, Clone)]
pub struct CurieWeissSampler {
    params: CurieWeissParams,
    /// Smallest `p` with non-zero probability.
    offset: usize,
    /// Cumulative probabilities for `p = offset, offset + 1, ...`.
    cdf: Vec<f64>,
}

impl CurieWeissSampler {
    pub fn new(params: CurieWeissParams) -> Result<Self> {
        let pmf = normalized(&params);
        let first = pmf.iter().position(|&w| w > 0.0).unwrap_or(0);
        let last = pmf.iter().rposition(|&w| w > 0.0).unwrap_or(pmf.len() - 1);
        let mut cdf = Vec::with_capacity(last - first + 1);
        let mut acc = 0.0;
        let mut comp = 0.0;
        for &w in &pmf[first..=last] {
            // Kahan accumulation keeps the final value within a few ulps of 1.
            let y = w - comp;
            let t = acc + y;
            comp = (t - acc) - y;
            acc = t;
            cdf.push(acc);
        }
        Ok(Self { params, offset: first, cdf })
    }

    pub fn params(&self) -> &CurieWeissParams {
        &self.params
    }

    /// Draws the number of positive spins.
    pub fn sample_plus_count<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let total = *self.cdf.last().expect("non-empty cdf");
        let u: f64 = rng.random::<f64>() * total;
        let idx = self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1);
        self.offset + idx
    }

    /// Draws a full spin vector.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<i8> {
        let n = self.params.num_spins;
        let plus = self.sample_plus_count(rng);
        // Place the minority sign; the rest is filled with the majority.
        let (minority, majority, count) = if plus <= n - plus { (1i8, -1i8, plus) } else { (-1i8, 1i8, n - plus) };
        let mut spins = vec![majority; n];
        for pos in index::sample(rng, n, count).into_iter() {
            spins[pos] = minority;
        }
        spins
    }
}

pub fn sample_curie_weiss<R: Rng + ?Sized>(params: CurieWeissParams, rng: &mut R) -> Result<Vec<i8>> {
    Ok(CurieWeissSampler::new(params)?.sample(rng))
}

/// Arranges `n^2` spins in an `n x n` grid and symmetrizes from the upper
/// triangle (lower-triangle spins are drawn but unused).
pub(crate) fn grid_to_scheme(n: usize, spins: &[i8]) -> SquareMatrix {
    debug_assert_eq!(spins.len(), n * n);
    super::symmetric_from_upper(n, |i, j| spins[i * n + j] as f64)
}

/// One Curie-Weiss(beta, n^2) scheme sample at dimension `n`.
pub fn curie_weiss_scheme<R: Rng + ?Sized>(beta: f64, n: usize, rng: &mut R) -> Result<SquareMatrix> {
    let params = CurieWeissParams::new(beta, n * n)?;
    let spins = sample_curie_weiss(params, rng)?;
    Ok(grid_to_scheme(n, &spins))
}
