//! Mixed moments of centred Gaussian vectors.

use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;
use crate::numeric::double_factorial_odd;

use super::partitions::MAX_PARTITION_SIZE;

/// Sum over pair partitions `pi` of `{0, ..., k - 1}` of the product of
/// `cov(r, s)` over the blocks of `pi`.
///
/// `cov` is indexed by factor position, not by vector component. Evaluated
/// by recursion on the lowest unpaired position with memoization over the
/// set of remaining positions, so the cost is `O(k^2 2^k)` rather than
/// `(k - 1)!!`.
pub fn wick_sum(k: usize, cov: impl Fn(usize, usize) -> f64) -> Result<f64> {
    if k > MAX_PARTITION_SIZE {
        return Err(Error::OversizedInstance(format!("Wick sum over {k} factors (limit {MAX_PARTITION_SIZE})")));
    }
    if k % 2 == 1 {
        return Ok(0.0);
    }
    let mut memo = vec![f64::NAN; 1 << k];
    memo[0] = 1.0;
    fn rec(mask: usize, memo: &mut [f64], cov: &dyn Fn(usize, usize) -> f64) -> f64 {
        if !memo[mask].is_nan() {
            return memo[mask];
        }
        let first = mask.trailing_zeros() as usize;
        let rest = mask & !(1 << first);
        let mut others = rest;
        let mut total = 0.0;
        while others != 0 {
            let s = others.trailing_zeros() as usize;
            others &= others - 1;
            let c = cov(first, s);
            if c != 0.0 {
                total += c * rec(rest & !(1 << s), memo, cov);
            }
        }
        memo[mask] = total;
        total
    }
    Ok(rec((1 << k) - 1, &mut memo, &cov))
}

/// `E[Y_{i(1)} ... Y_{i(k)}]` for `Y ~ N(0, cov)` by the pair-partition
/// (Isserlis) formula. Indices are zero-based components of `Y`.
pub fn wick_mixed_moment(cov: &SquareMatrix, indices: &[usize]) -> Result<f64> {
    let dim = cov.dim();
    if let Some(&bad) = indices.iter().find(|&&i| i >= dim) {
        return Err(Error::IndexOutOfRange { i: bad, j: bad, n: dim });
    }
    wick_sum(indices.len(), |r, s| cov[(indices[r], indices[s])])
}

/// `E[prod_i Y_i^{d_i}]` over distinct components of an equicorrelated
/// Gaussian vector with unit variances and off-diagonal covariance `c`.
///
/// Uses the one-factor representation `Y_i = sqrt(1-c) Z_i + sqrt(c) G`:
/// conditionally on `G = g` the factors are independent, each a polynomial
/// in `g`; the product is then integrated against the normal law. Only even
/// powers of `sqrt(c)` survive, so the result is a polynomial in `c` and is
/// valid for negative `c` as well. Independent of any pair-partition code.
pub fn equicorrelated_moment(c: f64, exponents: &[u32]) -> f64 {
    let gauss = |d: usize| -> f64 {
        if d % 2 == 1 {
            0.0
        } else {
            double_factorial_odd(d / 2) as f64
        }
    };
    let binom = |n: usize, k: usize| -> f64 { (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64) };
    // poly[d] is the coefficient of (sqrt(c) g)^d.
    let mut poly = vec![1.0];
    for &e in exponents {
        let e = e as usize;
        let mut factor = vec![0.0; e + 1];
        for j in (0..=e).step_by(2) {
            factor[e - j] = binom(e, j) * (1.0 - c).powi((j / 2) as i32) * gauss(j);
        }
        let mut next = vec![0.0; poly.len() + e];
        for (a, &pa) in poly.iter().enumerate() {
            for (b, &fb) in factor.iter().enumerate() {
                next[a + b] += pa * fb;
            }
        }
        poly = next;
    }
    poly.iter().enumerate().filter(|(d, _)| d % 2 == 0).map(|(d, &p)| p * gauss(d) * c.powi((d / 2) as i32)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::partitions::enumerate_pair_partitions;
    use proptest::prelude::*;

    fn equicorrelated(m: usize, c: f64) -> SquareMatrix {
        SquareMatrix::from_fn(m, |i, j| if i == j { 1.0 } else { c })
    }

    fn by_enumeration(cov: &SquareMatrix, idx: &[usize]) -> f64 {
        enumerate_pair_partitions(idx.len())
            .unwrap()
            .iter()
            .map(|p| p.blocks().iter().map(|&(r, s)| cov[(idx[r], idx[s])]).product::<f64>())
            .sum()
    }

    #[test]
    fn documented_values() {
        let id = SquareMatrix::identity(3);
        assert_eq!(wick_mixed_moment(&id, &[0, 0, 0, 0]).unwrap(), 3.0);
        assert_eq!(wick_mixed_moment(&id, &[0, 1, 2]).unwrap(), 0.0);
        let c = 0.3;
        let cov = equicorrelated(2, c);
        let v = wick_mixed_moment(&cov, &[0, 0, 1, 1]).unwrap();
        assert!((v - (1.0 + 2.0 * c * c)).abs() < 1e-15);
        assert!(matches!(wick_mixed_moment(&cov, &[0, 2]), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(wick_sum(18, |_, _| 1.0), Err(Error::OversizedInstance(_))));
    }

    #[test]
    fn all_ones_covariance_counts_partitions() {
        for k in (0..=16).step_by(2) {
            let v = wick_sum(k, |_, _| 1.0).unwrap();
            assert_eq!(v, double_factorial_odd(k / 2) as f64);
        }
    }

    #[test]
    fn closed_form_known_values() {
        let c: f64 = 0.2;
        assert!((equicorrelated_moment(c, &[2, 2]) - (1.0 + 2.0 * c * c)).abs() < 1e-15);
        let v = equicorrelated_moment(c, &[2, 2, 2]);
        assert!((v - (1.0 + 6.0 * c * c + 8.0 * c.powi(3))).abs() < 1e-15);
        assert!((equicorrelated_moment(c, &[4, 2]) - (3.0 + 12.0 * c * c)).abs() < 1e-14);
        assert_eq!(equicorrelated_moment(c, &[1]), 0.0);
        assert!((equicorrelated_moment(c, &[1, 1]) - c).abs() < 1e-16);
        assert_eq!(equicorrelated_moment(0.0, &[4]), 3.0);
    }

    proptest! {
        #[test]
        fn memoized_sum_matches_enumeration(
            idx in proptest::collection::vec(0usize..4, 0..=8),
            c in -0.3f64..0.3,
        ) {
            let cov = equicorrelated(4, c);
            let fast = wick_mixed_moment(&cov, &idx).unwrap();
            let slow = if idx.len() % 2 == 1 { 0.0 } else { by_enumeration(&cov, &idx) };
            prop_assert!((fast - slow).abs() <= 1e-12 * (1.0 + slow.abs()));
        }

        #[test]
        fn invariant_under_permutation(
            idx in proptest::collection::vec(0usize..4, 0..=10),
            seed in any::<u64>(),
        ) {
            use rand::seq::SliceRandom;
            let cov = SquareMatrix::from_fn(4, |i, j| if i == j { 1.0 } else { 0.1 * (i + j) as f64 / 6.0 });
            let mut shuffled = idx.clone();
            shuffled.shuffle(&mut crate::rng::rng_from_seed(seed));
            let a = wick_mixed_moment(&cov, &idx).unwrap();
            let b = wick_mixed_moment(&cov, &shuffled).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
        }

        #[test]
        fn closed_form_matches_wick(
            exps in proptest::collection::vec(1u32..=4, 1..=4),
            c in -0.15f64..0.3,
        ) {
            let total: u32 = exps.iter().sum();
            prop_assume!(total as usize <= MAX_PARTITION_SIZE);
            let cov = equicorrelated(exps.len(), c);
            let idx: Vec<usize> = exps.iter().enumerate()
                .flat_map(|(i, &e)| std::iter::repeat_n(i, e as usize))
                .collect();
            let w = wick_mixed_moment(&cov, &idx).unwrap();
            let f = equicorrelated_moment(c, &exps);
            prop_assert!((w - f).abs() <= 1e-12 * (1.0 + w.abs()), "{} vs {}", w, f);
        }
    }
}
