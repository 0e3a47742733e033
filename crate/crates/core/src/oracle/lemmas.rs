//! Exhaustive validation of the vertex and counting bounds for closed
//! walks in a periodic band.
//!
//! Every scan streams tuples through [`TupleOdometer`] and is split by the
//! leading coordinate across rayon workers; per-lead results are merged in
//! lead order so reports do not depend on scheduling.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::bandmatrix::BandSpec;
use crate::error::{Error, Result};

use super::tuples::{relevant_tuple_unchecked, rotate, superpose, tuple_graph, TupleGraph, TupleOdometer};

/// Largest `n^k` scanned by the single-tuple validators.
pub const MAX_EXHAUSTIVE_TUPLES: u64 = 10_000_000;

/// Largest number of ordered tuple pairs scanned by [`verify_paired_bounds`].
pub const MAX_EXHAUSTIVE_PAIRS: u64 = 50_000_000;

/// One failed inequality.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaViolation {
    pub check: &'static str,
    pub n: usize,
    pub k: usize,
    pub b: usize,
    /// Offending tuple(s) or class profile(s), rendered for the report.
    pub subject: String,
    pub lhs: u128,
    pub rhs: String,
}

/// `count <= coeff * n * b^exp`, evaluated exactly; negative exponents are
/// handled by moving the power to the left side.
fn power_bound_holds(count: u128, coeff: u128, n: usize, b: usize, exp: i64) -> (bool, String) {
    let b = b as u128;
    let n = n as u128;
    let rendered = format!("{coeff}*{n}*{b}^{exp}");
    if exp >= 0 {
        match b.checked_pow(exp as u32).and_then(|p| p.checked_mul(coeff)).and_then(|p| p.checked_mul(n)) {
            Some(rhs) => (count <= rhs, rendered),
            None => (true, rendered),
        }
    } else {
        let lhs = b.checked_pow((-exp) as u32).and_then(|p| p.checked_mul(count));
        (lhs.is_some_and(|l| l <= coeff * n), rendered)
    }
}

fn pow_u128(base: usize, exp: usize) -> u128 {
    (base as u128).pow(exp as u32)
}

fn check_size(n: usize, k: usize, limit: u64) -> Result<u64> {
    let total = (n as u64).checked_pow(k as u32).filter(|&t| t <= limit);
    total.ok_or_else(|| Error::OversizedInstance(format!("{n}^{k} tuples exceeds {limit}")))
}

fn fmt_tuple(t: &[usize]) -> String {
    let parts: Vec<String> = t.iter().map(|v| v.to_string()).collect();
    format!("({})", parts.join(" "))
}

fn fmt_profile(p: &[usize]) -> String {
    let parts: Vec<String> = p.iter().map(|v| v.to_string()).collect();
    format!("kappa=[{}]", parts.join(" "))
}

/// Result of [`verify_vertex_bounds`].
#[derive(Debug, Clone, Serialize)]
pub struct VertexBoundReport {
    pub n: usize,
    pub k: usize,
    pub b: usize,
    pub tuples_checked: u64,
    pub violations: Vec<LemmaViolation>,
}

/// Checks, for every tuple in `[n]^k` (relevant or not), that
/// `#V <= 1 + sum(kappa) - loops`, and `#V <= sum(kappa)` whenever some edge
/// has odd multiplicity.
pub fn verify_vertex_bounds(n: usize, k: usize, spec: &BandSpec) -> Result<VertexBoundReport> {
    if spec.n() != n {
        return Err(Error::DimensionMismatch { expected: n, found: spec.n() });
    }
    let total = check_size(n, k, MAX_EXHAUSTIVE_TUPLES)?;
    let b = spec.b();
    let per_lead: Vec<Vec<LemmaViolation>> = (0..n)
        .into_par_iter()
        .map(|lead| {
            let mut out = Vec::new();
            let mut odo = TupleOdometer::with_lead(n, k, lead);
            while let Some(t) = odo.next() {
                let g = tuple_graph(t);
                let v = g.vertex_count() as u128;
                let edges = g.distinct_edges();
                let bound = (1 + edges - g.loop_count()) as u128;
                if v > bound {
                    out.push(LemmaViolation {
                        check: "vertex-bound",
                        n,
                        k,
                        b,
                        subject: fmt_tuple(t),
                        lhs: v,
                        rhs: bound.to_string(),
                    });
                }
                if g.has_odd_edge() && v > edges as u128 {
                    out.push(LemmaViolation {
                        check: "odd-edge-vertex-bound",
                        n,
                        k,
                        b,
                        subject: fmt_tuple(t),
                        lhs: v,
                        rhs: edges.to_string(),
                    });
                }
            }
            out
        })
        .collect();
    Ok(VertexBoundReport { n, k, b, tuples_checked: total, violations: per_lead.concat() })
}

/// One equivalence class of relevant tuples (tuples with equal profile).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassEntry {
    pub size: u64,
    /// `kappa_1 + ... + kappa_k`, the number of distinct edges.
    pub distinct_edges: usize,
    pub has_odd_edge: bool,
}

/// Relevant tuples of `[n]^k` grouped by profile. Loops are not part of the
/// key: tuples with loops and tuples without can share a class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquivalenceClassTable {
    pub n: usize,
    pub k: usize,
    pub b: usize,
    pub classes: BTreeMap<Vec<usize>, ClassEntry>,
}

impl EquivalenceClassTable {
    pub fn build(n: usize, k: usize, spec: &BandSpec) -> Result<Self> {
        check_size(n, k, MAX_EXHAUSTIVE_TUPLES)?;
        let parts: Vec<BTreeMap<Vec<usize>, ClassEntry>> = (0..n)
            .into_par_iter()
            .map(|lead| {
                let mut classes: BTreeMap<Vec<usize>, ClassEntry> = BTreeMap::new();
                let mut odo = TupleOdometer::with_lead(n, k, lead);
                while let Some(t) = odo.next() {
                    if !relevant_tuple_unchecked(t, spec) {
                        continue;
                    }
                    let g = tuple_graph(t);
                    classes
                        .entry(g.profile().to_vec())
                        .or_insert(ClassEntry {
                            size: 0,
                            distinct_edges: g.distinct_edges(),
                            has_odd_edge: g.has_odd_edge(),
                        })
                        .size += 1;
                }
                classes
            })
            .collect();
        let mut classes: BTreeMap<Vec<usize>, ClassEntry> = BTreeMap::new();
        for part in parts {
            for (key, entry) in part {
                classes.entry(key).and_modify(|e| e.size += entry.size).or_insert(entry);
            }
        }
        Ok(Self { n, k, b: spec.b(), classes })
    }

    pub fn total(&self) -> u64 {
        self.classes.values().map(|c| c.size).sum()
    }
}

/// Result of [`verify_count_bounds`].
#[derive(Debug, Clone, Serialize)]
pub struct CountBoundReport {
    pub n: usize,
    pub k: usize,
    pub b: usize,
    pub relevant_tuples: u64,
    /// `at_most[l - 1]` = number of relevant tuples with at most `l` vertices.
    pub at_most: Vec<u64>,
    pub table: EquivalenceClassTable,
    pub violations: Vec<LemmaViolation>,
}

/// Checks the bounds on relevant tuples with few vertices, on the number of
/// equivalence classes and on class sizes.
pub fn verify_count_bounds(n: usize, k: usize, spec: &BandSpec) -> Result<CountBoundReport> {
    if spec.n() != n {
        return Err(Error::DimensionMismatch { expected: n, found: spec.n() });
    }
    check_size(n, k, MAX_EXHAUSTIVE_TUPLES)?;
    let b = spec.b();
    let hist: Vec<Vec<u64>> = (0..n)
        .into_par_iter()
        .map(|lead| {
            let mut h = vec![0u64; k + 1];
            let mut odo = TupleOdometer::with_lead(n, k, lead);
            while let Some(t) = odo.next() {
                if relevant_tuple_unchecked(t, spec) {
                    h[tuple_graph(t).vertex_count()] += 1;
                }
            }
            h
        })
        .collect();
    let mut by_vertices = vec![0u64; k + 1];
    for h in hist {
        for (acc, v) in by_vertices.iter_mut().zip(h) {
            *acc += v;
        }
    }
    let at_most: Vec<u64> = (1..=k).map(|l| by_vertices[..=l].iter().sum()).collect();
    let relevant: u64 = by_vertices.iter().sum();
    let table = EquivalenceClassTable::build(n, k, spec)?;

    let mut violations = Vec::new();
    let kk = pow_u128(k, k);
    for l in 1..=k {
        let (ok, rhs) = power_bound_holds(at_most[l - 1] as u128, kk, n, b, l as i64 - 1);
        if !ok {
            violations.push(LemmaViolation {
                check: "vertices-at-most-l",
                n,
                k,
                b,
                subject: format!("l={l}"),
                lhs: at_most[l - 1] as u128,
                rhs,
            });
        }
    }
    let max_classes = pow_u128(k + 1, k);
    if table.classes.len() as u128 > max_classes {
        violations.push(LemmaViolation {
            check: "class-count",
            n,
            k,
            b,
            subject: "all classes".into(),
            lhs: table.classes.len() as u128,
            rhs: max_classes.to_string(),
        });
    }
    if table.total() != relevant {
        violations.push(LemmaViolation {
            check: "class-partition",
            n,
            k,
            b,
            subject: "all classes".into(),
            lhs: table.total() as u128,
            rhs: relevant.to_string(),
        });
    }
    for (profile, entry) in &table.classes {
        let e = entry.distinct_edges as i64;
        let (ok, rhs) = power_bound_holds(entry.size as u128, kk, n, b, e);
        if !ok {
            violations.push(LemmaViolation {
                check: "class-size",
                n,
                k,
                b,
                subject: fmt_profile(profile),
                lhs: entry.size as u128,
                rhs,
            });
        }
        if entry.has_odd_edge {
            let (ok, rhs) = power_bound_holds(entry.size as u128, kk, n, b, e - 1);
            if !ok {
                violations.push(LemmaViolation {
                    check: "class-size-odd",
                    n,
                    k,
                    b,
                    subject: fmt_profile(profile),
                    lhs: entry.size as u128,
                    rhs,
                });
            }
        }
    }
    Ok(CountBoundReport { n, k, b, relevant_tuples: relevant, at_most, table, violations })
}

/// Pair counts for one ordered pair of classes `(s, s')`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassPairCounts {
    pub profile: Vec<usize>,
    pub profile_prime: Vec<usize>,
    /// `#T(s) * #T(s')`.
    pub total: u64,
    /// Edge-disjoint pairs.
    pub disjoint: u64,
    /// Pairs sharing at least one edge.
    pub common: u64,
    /// `common_by_l[l - 1]`: pairs sharing exactly `l` distinct edges.
    pub common_by_l: Vec<u64>,
}

/// Result of [`verify_paired_bounds`].
#[derive(Debug, Clone, Serialize)]
pub struct PairedBoundReport {
    pub n: usize,
    pub k: usize,
    pub b: usize,
    pub pairs_checked: u64,
    pub superpositions_checked: u64,
    pub class_pairs: Vec<ClassPairCounts>,
    pub violations: Vec<LemmaViolation>,
}

struct Walk {
    graph: TupleGraph,
    vertices: BTreeSet<usize>,
    class: usize,
}

/// Checks, over all ordered pairs of relevant tuples, the vertex bounds for
/// pairs sharing an edge, the superposition construction, the split of each
/// class pair into edge-disjoint and edge-sharing pairs, and the bounds on
/// the number of edge-sharing pairs.
pub fn verify_paired_bounds(n: usize, k: usize, spec: &BandSpec) -> Result<PairedBoundReport> {
    if spec.n() != n {
        return Err(Error::DimensionMismatch { expected: n, found: spec.n() });
    }
    let singles = check_size(n, k, MAX_EXHAUSTIVE_TUPLES)?;
    if singles.saturating_mul(singles) > MAX_EXHAUSTIVE_PAIRS {
        return Err(Error::OversizedInstance(format!("({n}^{k})^2 tuple pairs exceeds {MAX_EXHAUSTIVE_PAIRS}")));
    }
    let b = spec.b();
    let mut profiles: Vec<Vec<usize>> = Vec::new();
    let mut walks: Vec<Walk> = Vec::new();
    let mut odo = TupleOdometer::new(n, k);
    while let Some(t) = odo.next() {
        if !relevant_tuple_unchecked(t, spec) {
            continue;
        }
        let graph = tuple_graph(t);
        let class = match profiles.iter().position(|p| p == graph.profile()) {
            Some(c) => c,
            None => {
                profiles.push(graph.profile().to_vec());
                profiles.len() - 1
            }
        };
        walks.push(Walk { vertices: graph.vertices(), graph, class });
    }
    let classes = profiles.len();
    let class_edges: Vec<usize> = profiles.iter().map(|p| p.iter().sum()).collect();
    let class_odd: Vec<bool> = profiles.iter().map(|p| p.iter().step_by(2).any(|&c| c > 0)).collect();
    let mut class_size = vec![0u64; classes];
    for w in &walks {
        class_size[w.class] += 1;
    }

    // Per first tuple: counts[(class, class')] = (disjoint, common_by_l).
    type Tally = BTreeMap<(usize, usize), (u64, Vec<u64>)>;
    let results: Vec<(Tally, Vec<LemmaViolation>, u64)> = walks
        .par_iter()
        .map(|w| {
            let mut tally: Tally = BTreeMap::new();
            let mut out = Vec::new();
            let mut supers = 0u64;
            for w2 in &walks {
                let entry = tally.entry((w.class, w2.class)).or_insert_with(|| (0, vec![0; k]));
                let l = w.graph.common_edges(&w2.graph);
                if l == 0 {
                    entry.0 += 1;
                    continue;
                }
                entry.1[l - 1] += 1;
                let union = w.vertices.union(&w2.vertices).count() as u128;
                let odd = class_odd[w.class] || class_odd[w2.class];
                let subject = || format!("{} {}", fmt_tuple(w.graph.tuple()), fmt_tuple(w2.graph.tuple()));
                if !odd && union > k as u128 {
                    out.push(LemmaViolation {
                        check: "paired-even-union",
                        n,
                        k,
                        b,
                        subject: subject(),
                        lhs: union,
                        rhs: k.to_string(),
                    });
                }
                if odd {
                    let bound = (class_edges[w.class] + class_edges[w2.class]) as i64 - l as i64;
                    if union as i64 > bound {
                        out.push(LemmaViolation {
                            check: "paired-odd-union",
                            n,
                            k,
                            b,
                            subject: subject(),
                            lhs: union,
                            rhs: bound.to_string(),
                        });
                    }
                }
                supers += 1;
                if !superposition_ok(w, w2, spec) {
                    out.push(LemmaViolation {
                        check: "superposition",
                        n,
                        k,
                        b,
                        subject: subject(),
                        lhs: 0,
                        rhs: "walk through both edge multisets".into(),
                    });
                }
            }
            (tally, out, supers)
        })
        .collect();

    let mut merged: BTreeMap<(usize, usize), (u64, Vec<u64>)> = BTreeMap::new();
    let mut violations = Vec::new();
    let mut superpositions = 0;
    for (tally, out, supers) in results {
        violations.extend(out);
        superpositions += supers;
        for (key, (d, by_l)) in tally {
            let e = merged.entry(key).or_insert_with(|| (0, vec![0; k]));
            e.0 += d;
            for (acc, v) in e.1.iter_mut().zip(by_l) {
                *acc += v;
            }
        }
    }

    let coeff = pow_u128(k, 2) * pow_u128(2 * k, 2 * k);
    let mut class_pairs = Vec::new();
    for s in 0..classes {
        for s2 in 0..classes {
            let (disjoint, by_l) = merged.remove(&(s, s2)).unwrap_or_else(|| (0, vec![0; k]));
            let common: u64 = by_l.iter().sum();
            let total = class_size[s] * class_size[s2];
            let subject = || format!("{} {}", fmt_profile(&profiles[s]), fmt_profile(&profiles[s2]));
            if disjoint + common != total {
                violations.push(LemmaViolation {
                    check: "paired-partition",
                    n,
                    k,
                    b,
                    subject: subject(),
                    lhs: (disjoint + common) as u128,
                    rhs: total.to_string(),
                });
            }
            let odd = class_odd[s] || class_odd[s2];
            let edges = (class_edges[s] + class_edges[s2]) as i64;
            let mut check = |name: &'static str, count: u64, exp: i64| {
                let (ok, rhs) = power_bound_holds(count as u128, coeff, n, b, exp);
                if !ok {
                    violations.push(LemmaViolation {
                        check: name,
                        n,
                        k,
                        b,
                        subject: subject(),
                        lhs: count as u128,
                        rhs,
                    });
                }
            };
            if !odd {
                check("paired-common-even", common, k as i64 - 1);
            } else {
                check("paired-common-odd", common, edges - 2);
                for (l, &count) in by_l.iter().enumerate() {
                    check("paired-common-l", count, edges - (l as i64 + 1) - 1);
                }
            }
            class_pairs.push(ClassPairCounts {
                profile: profiles[s].clone(),
                profile_prime: profiles[s2].clone(),
                total,
                disjoint,
                common,
                common_by_l: by_l,
            });
        }
    }
    Ok(PairedBoundReport {
        n,
        k,
        b,
        pairs_checked: (walks.len() as u64).pow(2),
        superpositions_checked: superpositions,
        class_pairs,
        violations,
    })
}

fn superposition_ok(w: &Walk, w2: &Walk, spec: &BandSpec) -> bool {
    let (t, t2) = (w.graph.tuple(), w2.graph.tuple());
    let k = t.len();
    let Ok(u) = superpose(t, t2) else { return false };
    if u.len() != 2 * k || !relevant_tuple_unchecked(&u, spec) {
        return false;
    }
    if !(0..k).any(|s| rotate(t, s) == u[..k]) || !(0..k).any(|s| rotate(t2, s) == u[k..]) {
        return false;
    }
    let gu = tuple_graph(&u);
    let mut merged = w.graph.edges().clone();
    for (e, c) in w2.graph.edges() {
        *merged.entry(*e).or_insert(0) += c;
    }
    gu.edges() == &merged && gu.vertices() == w.vertices.union(&w2.vertices).copied().collect()
}
