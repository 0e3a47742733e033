//! Standard colorings and the Dyck-path encoding of walks whose edges are
//! all proper double edges.

use std::collections::{BTreeSet, HashSet};

use crate::ensembles::Pair;
use crate::error::{Error, Result};

use super::tuples::{cyclic_edges, tuple_graph};

/// Relabels a tuple by order of first appearance, colors starting at 1.
pub fn standard_coloring(t: &[usize]) -> Vec<usize> {
    let mut seen: Vec<usize> = Vec::new();
    t.iter()
        .map(|v| match seen.iter().position(|s| s == v) {
            Some(i) => i + 1,
            None => {
                seen.push(*v);
                seen.len()
            }
        })
        .collect()
}

/// Outcome of [`dyck_check`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DyckCheck {
    pub coloring: Vec<usize>,
    /// Only proper double edges and `k/2 + 1` vertices.
    pub qualifies: bool,
    /// `+1` for the first traversal of an edge, `-1` for the second; set
    /// when the tuple qualifies.
    pub steps: Option<Vec<i8>>,
    pub is_dyck: bool,
}

/// True when partial sums never drop below zero and end at zero.
pub fn is_dyck_path(steps: &[i8]) -> bool {
    let mut h = 0i64;
    for &s in steps {
        h += i64::from(s);
        if h < 0 {
            return false;
        }
    }
    h == 0
}

/// Checks whether the walk is made of proper double edges only and spans
/// `k/2 + 1` vertices; if so, encodes it as a step sequence and verifies
/// that the sequence is a Dyck path.
pub fn dyck_check(t: &[usize]) -> DyckCheck {
    let coloring = standard_coloring(t);
    let k = t.len();
    let g = tuple_graph(t);
    let qualifies = k.is_multiple_of(2)
        && k > 0
        && g.loop_count() == 0
        && g.edges().values().all(|&m| m == 2)
        && g.vertex_count() == k / 2 + 1;
    if !qualifies {
        return DyckCheck { coloring, qualifies, steps: None, is_dyck: false };
    }
    let mut first: HashSet<Pair> = HashSet::new();
    let steps: Vec<i8> = cyclic_edges(t).map(|e| if first.insert(e) { 1 } else { -1 }).collect();
    let is_dyck = is_dyck_path(&steps);
    DyckCheck { coloring, qualifies, steps: Some(steps), is_dyck }
}

/// Summary of [`enumerate_dyck_colorings`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoringCount {
    pub k: usize,
    /// Standard colorings with only proper double edges and `k/2 + 1` colors.
    pub qualifying: u64,
    /// Of those, how many encode to a Dyck path.
    pub dyck: u64,
    /// Number of distinct step sequences produced.
    pub distinct_paths: u64,
}

/// Enumerates every standard coloring of length `k` (restricted growth
/// strings) and counts those with only proper double edges and `k/2 + 1`
/// colors.
pub fn enumerate_dyck_colorings(k: usize) -> Result<ColoringCount> {
    if k % 2 == 1 || k == 0 || k > 16 {
        return Err(Error::InvalidParameter(format!("even 2 <= k <= 16 required, got {k}")));
    }
    let max_color = k / 2 + 1;
    let mut count = ColoringCount { k, qualifying: 0, dyck: 0, distinct_paths: 0 };
    let mut paths: BTreeSet<Vec<i8>> = BTreeSet::new();
    let mut word = vec![1usize; k];
    fn rec(pos: usize, max_used: usize, limit: usize, word: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if pos == word.len() {
            f(word);
            return;
        }
        for c in 1..=(max_used + 1).min(limit) {
            word[pos] = c;
            rec(pos + 1, max_used.max(c), limit, word, f);
        }
    }
    rec(1, 1, max_color, &mut word, &mut |w| {
        let check = dyck_check(w);
        if check.qualifies {
            count.qualifying += 1;
            if check.is_dyck {
                count.dyck += 1;
            }
            paths.insert(check.steps.expect("steps for qualifying walk"));
        }
    });
    count.distinct_paths = paths.len() as u64;
    Ok(count)
}
