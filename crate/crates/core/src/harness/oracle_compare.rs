//! Exact expected moments against Monte Carlo means on small instances.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::bandmatrix::BandSpec;
use crate::ensembles::triangle_size;
use crate::ensembles::{Scheme, WignerDist};
use crate::error::{Error, Result};
use crate::numeric::mean_and_stderr;
use crate::oracle::expected::{exact_expected_moment, rademacher_enumerated_moment, MAX_ENUMERATED_ENTRIES};
use crate::oracle::moments::moment_oracle;

use super::config::ExperimentConfig;
use super::convergence::write_rows;
use super::engine::{run_points, PointRun};
use super::manifest::{unix_ms, RunManifest};
use super::prepare_out_dir;

pub const ORACLE_CSV: &str = "oracle_compare.csv";

/// Discrepancies beyond this many standard errors are flagged.
pub const FLAG_STDERRS: f64 = 4.0;

/// Largest `n` accepted for dependent schemes and for Wigner schemes.
pub const MAX_DEPENDENT_N: usize = 4;
pub const MAX_WIGNER_N: usize = 6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleRow {
    pub n: usize,
    pub b: usize,
    pub k: u32,
    pub exact: f64,
    /// Brute-force value over all sign assignments (Rademacher entries only).
    pub enumerated: Option<f64>,
    pub mc_mean: f64,
    pub mc_stderr: f64,
    /// `(mc_mean - exact) / mc_stderr`.
    pub z_score: f64,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleComparison {
    pub rows: Vec<OracleRow>,
    pub points: Vec<PointRun>,
}

impl OracleComparison {
    pub fn flagged(&self) -> Vec<&OracleRow> {
        self.rows.iter().filter(|r| r.flagged).collect()
    }
}

fn check_small(scheme: &Scheme, spec: &BandSpec) -> Result<()> {
    let limit = match scheme {
        Scheme::Wigner { .. } => MAX_WIGNER_N,
        _ => MAX_DEPENDENT_N,
    };
    if spec.n() > limit {
        return Err(Error::OversizedInstance(format!(
            "n = {} exceeds {limit} for {} oracle comparison",
            spec.n(),
            scheme.name()
        )));
    }
    Ok(())
}

fn is_flagged(exact: f64, mean: f64, stderr: f64) -> bool {
    let diff = (mean - exact).abs();
    // Below this the difference is rounding, whatever the standard error
    // (deterministic moments have a standard error of pure noise).
    if diff <= 1e-9 * exact.abs().max(1.0) {
        return false;
    }
    !(stderr.is_finite() && stderr > 0.0 && diff <= FLAG_STDERRS * stderr)
}

pub fn oracle_comparison(config: &ExperimentConfig) -> Result<OracleComparison> {
    let grid = config.validate()?;
    for spec in &grid {
        check_small(&config.scheme, spec)?;
    }
    let points = run_points(&config.scheme, &grid, config.replicas, &config.moments, config.seed)?;
    let rademacher = matches!(config.scheme, Scheme::Wigner { dist: WignerDist::Rademacher });
    let mut rows = Vec::new();
    for p in &points {
        let n = p.spec.n();
        let oracle = moment_oracle(&config.scheme, n)?;
        for (i, &k) in config.moments.iter().enumerate() {
            let exact = exact_expected_moment(oracle.as_ref(), n, k as usize, &p.spec)?;
            let enumerated = if rademacher && triangle_size(n) <= MAX_ENUMERATED_ENTRIES {
                Some(rademacher_enumerated_moment(n, k as usize, &p.spec)?)
            } else {
                None
            };
            let (mc_mean, mc_stderr) = mean_and_stderr(&p.moment_column(i));
            rows.push(OracleRow {
                n,
                b: p.spec.b(),
                k,
                exact,
                enumerated,
                mc_mean,
                mc_stderr,
                z_score: (mc_mean - exact) / mc_stderr,
                flagged: is_flagged(exact, mc_mean, mc_stderr),
            });
        }
    }
    Ok(OracleComparison { rows, points })
}

#[derive(Debug, Clone)]
pub struct OracleOutput {
    pub comparison: OracleComparison,
    pub csv: PathBuf,
    pub manifest: PathBuf,
}

pub fn run_oracle_comparison(config: &ExperimentConfig) -> Result<OracleOutput> {
    let started = unix_ms();
    let comparison = oracle_comparison(config)?;
    let dir = prepare_out_dir(&config.out_dir)?;
    let csv = dir.join(ORACLE_CSV);
    write_rows(&csv, &comparison.rows)?;
    let mut manifest = RunManifest::new("oracle-compare", config.seed, serde_json::to_value(config)?, started);
    manifest.points = comparison.points.iter().map(PointRun::seeds).collect();
    let manifest = manifest.finish(&dir, "oracle_compare", std::slice::from_ref(&csv))?;
    Ok(OracleOutput { comparison, csv, manifest })
}
