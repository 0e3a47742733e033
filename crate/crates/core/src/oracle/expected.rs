//! Exact expected ESD moments of small band matrices.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::bandmatrix::{scale_entries, BandSpec};
use crate::ensembles::{triangle_index, triangle_size, Pair};
use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;
use crate::numeric::neumaier_sum;

use super::lemmas::MAX_EXHAUSTIVE_TUPLES;
use super::moments::{tuple_factors, EntryMoments};
use super::tuples::{relevant_tuple_unchecked, TupleOdometer};

/// `E[(1/n) tr X^k]` as the tuple sum
/// `1/(n b^{k/2}) * sum over relevant t of E[a(t_1,t_2) ... a(t_k,t_1)]`,
/// each expectation resolved by `oracle` after grouping the factors by
/// unordered pair.
pub fn exact_expected_moment(oracle: &dyn EntryMoments, n: usize, k: usize, spec: &BandSpec) -> Result<f64> {
    if spec.n() != n || oracle.n() != n {
        return Err(Error::DimensionMismatch { expected: n, found: if spec.n() != n { spec.n() } else { oracle.n() } });
    }
    let total = (n as u64).checked_pow(k as u32).filter(|&t| t <= MAX_EXHAUSTIVE_TUPLES);
    if total.is_none() {
        return Err(Error::OversizedInstance(format!("{n}^{k} tuples exceeds {MAX_EXHAUSTIVE_TUPLES}")));
    }
    if k == 0 {
        return Ok(1.0);
    }
    let partial: Vec<Result<Vec<f64>>> = (0..n)
        .into_par_iter()
        .map(|lead| {
            let mut cache: HashMap<Vec<(Pair, u32)>, f64> = HashMap::new();
            let mut terms = Vec::new();
            let mut odo = TupleOdometer::with_lead(n, k, lead);
            while let Some(t) = odo.next() {
                if !relevant_tuple_unchecked(t, spec) {
                    continue;
                }
                let factors = tuple_factors(t);
                let v = match cache.get(&factors) {
                    Some(&v) => v,
                    None => {
                        let v = oracle.mixed_moment(&factors)?;
                        cache.insert(factors, v);
                        v
                    }
                };
                terms.push(v);
            }
            Ok(terms)
        })
        .collect();
    let mut terms = Vec::new();
    for p in partial {
        terms.extend(p?);
    }
    let norm = n as f64 * (spec.b() as f64).powf(k as f64 / 2.0);
    Ok(neumaier_sum(terms) / norm)
}

/// Largest number of upper-triangle entries enumerated by
/// [`rademacher_enumerated_moment`].
pub const MAX_ENUMERATED_ENTRIES: usize = 21;

/// `E[(1/n) tr X^k]` for independent `+-1` entries by averaging over all
/// `2^{n(n+1)/2}` sign assignments, with `X^k` formed by repeated
/// multiplication.
pub fn rademacher_enumerated_moment(n: usize, k: usize, spec: &BandSpec) -> Result<f64> {
    if spec.n() != n {
        return Err(Error::DimensionMismatch { expected: n, found: spec.n() });
    }
    let dim = triangle_size(n);
    if dim > MAX_ENUMERATED_ENTRIES {
        return Err(Error::OversizedInstance(format!("2^{dim} sign assignments (limit 2^{MAX_ENUMERATED_ENTRIES})")));
    }
    let values: Vec<f64> = (0u64..1 << dim)
        .map(|mask| {
            let a = SquareMatrix::from_fn(n, |i, j| if mask >> triangle_index(n, i, j) & 1 == 1 { 1.0 } else { -1.0 });
            let x = scale_entries(&a, spec).expect("dimension checked").values;
            let mut p = SquareMatrix::identity(n);
            for _ in 0..k {
                p = p.matmul(&x).expect("square");
            }
            p.trace() / n as f64
        })
        .collect();
    Ok(neumaier_sum(values) / (1u64 << dim) as f64)
}
