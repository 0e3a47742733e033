//! Decay of the variance of ESD moments across replicas.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{linear_fit, mean_and_stderr, sample_variance};

use super::config::ExperimentConfig;
use super::convergence::write_rows;
use super::engine::{run_points, PointRun};
use super::manifest::{unix_ms, RunManifest};
use super::prepare_out_dir;

pub const VARIANCE_CSV: &str = "variance.csv";
pub const FIT_CSV: &str = "variance_fit.csv";

/// Replica counts below this only produce a warning.
pub const RECOMMENDED_REPLICAS: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceRow {
    pub n: usize,
    pub b: usize,
    pub k: u32,
    pub replicas: usize,
    pub mean: f64,
    pub variance: f64,
}

/// Log-log regression of variance against `n` for one moment order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub k: u32,
    pub points: usize,
    pub slope: f64,
    pub slope_stderr: f64,
    pub strictly_decreasing: bool,
    /// `slope < -1`.
    pub summable: bool,
    /// `slope <= -1 + 2 * slope_stderr`.
    pub consistent_with_summable: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VarianceStudy {
    pub rows: Vec<VarianceRow>,
    pub fits: Vec<SlopeFit>,
    pub points: Vec<PointRun>,
}

impl VarianceStudy {
    pub fn fit_for(&self, k: u32) -> Option<&SlopeFit> {
        self.fits.iter().find(|f| f.k == k)
    }
}

pub fn variance_study(config: &ExperimentConfig) -> Result<VarianceStudy> {
    let grid = config.validate()?;
    if config.replicas < 2 {
        return Err(Error::VarianceUndefined);
    }
    if config.replicas < RECOMMENDED_REPLICAS {
        log::warn!("{} replicas: variance estimates are noisy below {RECOMMENDED_REPLICAS}", config.replicas);
    }
    let points = run_points(&config.scheme, &grid, config.replicas, &config.moments, config.seed)?;
    let mut rows = Vec::new();
    for p in &points {
        for (i, &k) in config.moments.iter().enumerate() {
            let col = p.moment_column(i);
            rows.push(VarianceRow {
                n: p.spec.n(),
                b: p.spec.b(),
                k,
                replicas: col.len(),
                mean: mean_and_stderr(&col).0,
                variance: sample_variance(&col),
            });
        }
    }
    let mut fits = Vec::new();
    for &k in &config.moments {
        let mut series: Vec<(usize, f64)> = rows.iter().filter(|r| r.k == k).map(|r| (r.n, r.variance)).collect();
        series.sort_by_key(|s| s.0);
        let strictly_decreasing = series.windows(2).all(|w| w[1].1 < w[0].1);
        let usable: Vec<(f64, f64)> =
            series.iter().filter(|s| s.1 > 0.0).map(|&(n, v)| ((n as f64).ln(), v.ln())).collect();
        if usable.len() != series.len() {
            // A zero variance (e.g. k = 0) has no logarithm; no fit.
            continue;
        }
        let (xs, ys): (Vec<f64>, Vec<f64>) = usable.into_iter().unzip();
        if let Some(fit) = linear_fit(&xs, &ys) {
            fits.push(SlopeFit {
                k,
                points: xs.len(),
                slope: fit.slope,
                slope_stderr: fit.slope_stderr,
                strictly_decreasing,
                summable: fit.slope < -1.0,
                consistent_with_summable: fit.slope <= -1.0 + 2.0 * fit.slope_stderr,
            });
        }
    }
    Ok(VarianceStudy { rows, fits, points })
}

#[derive(Debug, Clone)]
pub struct VarianceOutput {
    pub study: VarianceStudy,
    pub csv: PathBuf,
    pub fit_csv: PathBuf,
    pub manifest: PathBuf,
}

pub fn run_variance_study(config: &ExperimentConfig) -> Result<VarianceOutput> {
    let started = unix_ms();
    let study = variance_study(config)?;
    let dir = prepare_out_dir(&config.out_dir)?;
    let csv = dir.join(VARIANCE_CSV);
    let fit_csv = dir.join(FIT_CSV);
    write_rows(&csv, &study.rows)?;
    write_rows(&fit_csv, &study.fits)?;
    let mut manifest = RunManifest::new("variance", config.seed, serde_json::to_value(config)?, started);
    manifest.points = study.points.iter().map(PointRun::seeds).collect();
    let manifest = manifest.finish(&dir, "variance", &[csv.clone(), fit_csv.clone()])?;
    Ok(VarianceOutput { study, csv, fit_csv, manifest })
}
