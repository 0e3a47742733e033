//! Aggregated exhaustive checks of the counting bounds, the Dyck encoding
//! and the Gaussian moment bounds.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::bandmatrix::BandSpec;
use crate::error::Result;
use crate::oracle::dyck::{enumerate_dyck_colorings, ColoringCount};
use crate::oracle::gaussian_lemmas::{verify_gaussian_lemmas, GaussianLemmaReport};
use crate::oracle::lemmas::{verify_count_bounds, verify_paired_bounds, verify_vertex_bounds, LemmaViolation};
use crate::spectra::catalan;

use super::prepare_out_dir;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaSuiteConfig {
    /// Single-tuple checks run for `1 <= n <= max_n`, `1 <= k <= max_k`.
    pub max_n: usize,
    pub max_k: usize,
    /// Paired-tuple checks run for `1 <= n <= max_pair_n`, `1 <= k <= max_pair_k`.
    pub max_pair_n: usize,
    pub max_pair_k: usize,
    /// Even walk lengths for the Dyck count.
    pub dyck_k: Vec<usize>,
    pub gaussian_alpha: Vec<f64>,
    pub gaussian_n: Vec<usize>,
    pub gaussian_z: Vec<usize>,
}

impl Default for LemmaSuiteConfig {
    fn default() -> Self {
        Self {
            max_n: 5,
            max_k: 6,
            max_pair_n: 4,
            max_pair_k: 4,
            dyck_k: vec![2, 4, 6, 8],
            gaussian_alpha: vec![0.3, 0.5, 0.75],
            gaussian_n: vec![4, 8, 16],
            gaussian_z: vec![1, 2, 3],
        }
    }
}

impl LemmaSuiteConfig {
    pub fn with_ranges(max_n: usize, max_k: usize) -> Self {
        Self { max_n, max_k, max_pair_n: max_n.min(4), max_pair_k: max_k.min(4), ..Self::default() }
    }
}

/// Counts for one `(check group, n, k, b)` cell.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteEntry {
    pub group: String,
    pub n: usize,
    pub k: usize,
    pub b: usize,
    pub checked: u64,
    pub violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DyckEntry {
    pub k: usize,
    pub qualifying: u64,
    pub dyck: u64,
    pub distinct_paths: u64,
    pub catalan: u64,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaSuiteReport {
    pub config: LemmaSuiteConfig,
    pub entries: Vec<SuiteEntry>,
    pub violations: Vec<LemmaViolation>,
    pub dyck: Vec<DyckEntry>,
    pub gaussian: Vec<GaussianLemmaReport>,
    pub seconds: f64,
}

impl LemmaSuiteReport {
    pub fn violation_count(&self) -> usize {
        self.violations.len()
            + self.dyck.iter().filter(|d| !d.holds).count()
            + self.gaussian.iter().map(GaussianLemmaReport::violations).sum::<usize>()
    }

    pub fn passed(&self) -> bool {
        self.violation_count() == 0
    }

    pub fn save_json(&self, dir: &Path) -> Result<PathBuf> {
        let dir = prepare_out_dir(dir)?;
        let path = dir.join("lemma_suite.json");
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(&path, text)?;
        Ok(path)
    }
}

fn dyck_entry(c: ColoringCount) -> Result<DyckEntry> {
    let cat = catalan(c.k / 2)?;
    Ok(DyckEntry {
        k: c.k,
        qualifying: c.qualifying,
        dyck: c.dyck,
        distinct_paths: c.distinct_paths,
        catalan: cat,
        holds: c.qualifying == cat && c.dyck == cat && c.distinct_paths == cat,
    })
}

pub fn run_lemma_suite(config: &LemmaSuiteConfig) -> Result<LemmaSuiteReport> {
    let start = Instant::now();
    let mut entries = Vec::new();
    let mut violations = Vec::new();
    let mut push = |group: &str, n, k, b, checked, v: Vec<LemmaViolation>| {
        entries.push(SuiteEntry { group: group.to_string(), n, k, b, checked, violations: v.len() });
        violations.extend(v);
    };
    for n in 1..=config.max_n {
        for b in BandSpec::valid_bandwidths(n) {
            let spec = BandSpec::new(n, b)?;
            for k in 1..=config.max_k {
                let r = verify_vertex_bounds(n, k, &spec)?;
                push("vertex", n, k, b, r.tuples_checked, r.violations);
                let r = verify_count_bounds(n, k, &spec)?;
                push("count", n, k, b, r.relevant_tuples, r.violations);
            }
        }
    }
    for n in 1..=config.max_pair_n {
        for b in BandSpec::valid_bandwidths(n) {
            let spec = BandSpec::new(n, b)?;
            for k in 1..=config.max_pair_k {
                let r = verify_paired_bounds(n, k, &spec)?;
                push("paired", n, k, b, r.pairs_checked, r.violations);
            }
        }
    }
    let dyck =
        config.dyck_k.iter().map(|&k| enumerate_dyck_colorings(k).and_then(dyck_entry)).collect::<Result<Vec<_>>>()?;
    let gaussian = config
        .gaussian_alpha
        .iter()
        .map(|&a| verify_gaussian_lemmas(a, &config.gaussian_n, &config.gaussian_z))
        .collect::<Result<Vec<_>>>()?;
    Ok(LemmaSuiteReport {
        config: config.clone(),
        entries,
        violations,
        dyck,
        gaussian,
        seconds: start.elapsed().as_secs_f64(),
    })
}
