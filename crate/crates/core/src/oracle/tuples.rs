//! Tuples as closed walks and their edge profiles.
//!
//! A tuple `t = (t_1, ..., t_k)` is read as the cycle
//! `t_1 -> t_2 -> ... -> t_k -> t_1`; its `k` edges are the unordered pairs
//! `{t_i, t_{i+1}}` with `t_{k+1} = t_1`.

use std::collections::{BTreeMap, BTreeSet};

use crate::bandmatrix::BandSpec;
use crate::ensembles::Pair;
use crate::error::{Error, Result};

/// Edge multiset and derived counts of a tuple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TupleGraph {
    tuple: Vec<usize>,
    /// Multiplicity of every distinct edge.
    edges: BTreeMap<Pair, usize>,
    /// `profile[l - 1]` is the number of distinct `l`-fold edges.
    profile: Vec<usize>,
    loop_count: usize,
    vertex_count: usize,
}

impl TupleGraph {
    pub fn tuple(&self) -> &[usize] {
        &self.tuple
    }

    pub fn k(&self) -> usize {
        self.tuple.len()
    }

    pub fn edges(&self) -> &BTreeMap<Pair, usize> {
        &self.edges
    }

    /// `(kappa_1, ..., kappa_k)`.
    pub fn profile(&self) -> &[usize] {
        &self.profile
    }

    /// Number of distinct loops `{v, v}`.
    pub fn loop_count(&self) -> usize {
        self.loop_count
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn vertices(&self) -> BTreeSet<usize> {
        self.tuple.iter().copied().collect()
    }

    /// Number of distinct edges, `kappa_1 + ... + kappa_k`.
    pub fn distinct_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn has_odd_edge(&self) -> bool {
        self.edges.values().any(|&m| m % 2 == 1)
    }

    /// Number of distinct edges shared with `other`.
    pub fn common_edges(&self, other: &TupleGraph) -> usize {
        self.edges.keys().filter(|e| other.edges.contains_key(e)).count()
    }
}

/// Cyclic edges of a tuple, in walk order.
pub fn cyclic_edges(t: &[usize]) -> impl Iterator<Item = Pair> + '_ {
    let k = t.len();
    (0..k).map(move |i| Pair::new(t[i], t[(i + 1) % k]))
}

pub fn tuple_graph(t: &[usize]) -> TupleGraph {
    let k = t.len();
    let mut edges = BTreeMap::new();
    for e in cyclic_edges(t) {
        *edges.entry(e).or_insert(0) += 1;
    }
    let mut profile = vec![0; k];
    for &m in edges.values() {
        profile[m - 1] += 1;
    }
    let loop_count = edges.keys().filter(|e| e.is_loop()).count();
    let vertex_count = t.iter().collect::<BTreeSet<_>>().len();
    TupleGraph { tuple: t.to_vec(), edges, profile, loop_count, vertex_count }
}

/// True when every cyclic pair `(t_i, t_{i+1})` is inside the band.
pub fn is_relevant_tuple(t: &[usize], spec: &BandSpec) -> Result<bool> {
    let n = spec.n();
    if let Some(&bad) = t.iter().find(|&&v| v >= n) {
        return Err(Error::IndexOutOfRange { i: bad, j: bad, n });
    }
    Ok(relevant_tuple_unchecked(t, spec))
}

pub(crate) fn relevant_tuple_unchecked(t: &[usize], spec: &BandSpec) -> bool {
    let k = t.len();
    (0..k).all(|i| spec.relevant_unchecked(t[i], t[(i + 1) % k]))
}

/// Lexicographic enumeration of `[0, n)^k` that reuses one buffer.
#[derive(Debug, Clone)]
pub struct TupleOdometer {
    n: usize,
    current: Vec<usize>,
    /// First position allowed to change (1 when the lead is pinned).
    floor: usize,
    started: bool,
    done: bool,
}

impl TupleOdometer {
    pub fn new(n: usize, k: usize) -> Self {
        Self { n, current: vec![0; k], floor: 0, started: false, done: n == 0 && k > 0 }
    }

    /// Enumerates the tuples whose first entry is `lead`.
    pub fn with_lead(n: usize, k: usize, lead: usize) -> Self {
        let mut odo = Self::new(n, k);
        if k > 0 {
            odo.current[0] = lead;
            odo.floor = 1;
            odo.done |= lead >= n;
        }
        odo
    }

    #[allow(clippy::should_implement_trait)]
    pub fn next(&mut self) -> Option<&[usize]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(&self.current);
        }
        for pos in (self.floor..self.current.len()).rev() {
            self.current[pos] += 1;
            if self.current[pos] < self.n {
                return Some(&self.current);
            }
            self.current[pos] = 0;
        }
        self.done = true;
        None
    }
}

/// Rotation of `t` that starts at position `start`.
pub fn rotate(t: &[usize], start: usize) -> Vec<usize> {
    t[start..].iter().chain(&t[..start]).copied().collect()
}

/// Joins two closed walks through a shared vertex into one walk of length
/// `k + k'`: both are rotated to start at the smallest shared vertex (at its
/// earliest occurrence) and concatenated.
pub fn superpose(t: &[usize], t_prime: &[usize]) -> Result<Vec<usize>> {
    let a: BTreeSet<usize> = t.iter().copied().collect();
    let shared = t_prime.iter().copied().filter(|v| a.contains(v)).min().ok_or(Error::NoCommonVertex)?;
    let i = t.iter().position(|&v| v == shared).expect("shared vertex in t");
    let j = t_prime.iter().position(|&v| v == shared).expect("shared vertex in t'");
    let mut u = rotate(t, i);
    u.extend(rotate(t_prime, j));
    Ok(u)
}
