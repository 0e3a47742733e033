//! Convergence of ESD moments and of the Kolmogorov distance as `n` grows.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::numeric::{mean_and_stderr, sample_variance};
use crate::spectra::semicircle_moment;

use super::config::ExperimentConfig;
use super::engine::{run_points, PointRun};
use super::manifest::{unix_ms, RunManifest};
use super::{csv_writer, prepare_out_dir};

pub const CONVERGENCE_CSV: &str = "convergence.csv";
pub const SUMMARY_CSV: &str = "convergence_summary.csv";
pub const TIMING_CSV: &str = "convergence_timing.csv";

/// One replica's moment of one order. Wall time goes to the timing file so
/// that this file is reproducible byte for byte.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub b: usize,
    pub replica: usize,
    pub k: u32,
    pub moment: f64,
    pub kolmogorov: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub n: usize,
    pub b: usize,
    pub k: u32,
    pub replicas: usize,
    pub mean: f64,
    pub stderr: f64,
    /// Spread of the moment across replicas (sample standard deviation).
    pub dispersion: f64,
    pub reference: f64,
    pub abs_error: f64,
    pub kolmogorov_mean: f64,
    pub kolmogorov_stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingRow {
    pub n: usize,
    pub b: usize,
    pub replica: usize,
    pub seed: u64,
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStudy {
    pub rows: Vec<ConvergenceRow>,
    pub summary: Vec<SummaryRow>,
    pub timing: Vec<TimingRow>,
    pub points: Vec<PointRun>,
}

impl ConvergenceStudy {
    /// Mean Kolmogorov distance per grid point, in grid order.
    pub fn kolmogorov_means(&self) -> Vec<(usize, usize, f64)> {
        self.points.iter().map(|p| (p.spec.n(), p.spec.b(), mean_and_stderr(&p.kolmogorov_column()).0)).collect()
    }

    pub fn summary_for(&self, n: usize, k: u32) -> Option<&SummaryRow> {
        self.summary.iter().find(|s| s.n == n && s.k == k)
    }
}

/// Runs the study in memory.
pub fn convergence_study(config: &ExperimentConfig) -> Result<ConvergenceStudy> {
    let grid = config.validate()?;
    let points = run_points(&config.scheme, &grid, config.replicas, &config.moments, config.seed)?;
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    let mut timing = Vec::new();
    for p in &points {
        let (n, b) = (p.spec.n(), p.spec.b());
        for r in &p.replicas {
            for (i, &k) in config.moments.iter().enumerate() {
                rows.push(ConvergenceRow {
                    n,
                    b,
                    replica: r.replica,
                    k,
                    moment: r.moments[i],
                    kolmogorov: r.kolmogorov,
                });
            }
            timing.push(TimingRow { n, b, replica: r.replica, seed: r.seed, wall_seconds: r.wall_seconds });
        }
        let (kolmogorov_mean, kolmogorov_stderr) = mean_and_stderr(&p.kolmogorov_column());
        for (i, &k) in config.moments.iter().enumerate() {
            let col = p.moment_column(i);
            let (mean, stderr) = mean_and_stderr(&col);
            let reference = semicircle_moment(k as usize);
            summary.push(SummaryRow {
                n,
                b,
                k,
                replicas: col.len(),
                mean,
                stderr,
                dispersion: sample_variance(&col).sqrt(),
                reference,
                abs_error: (mean - reference).abs(),
                kolmogorov_mean,
                kolmogorov_stderr,
            });
        }
    }
    Ok(ConvergenceStudy { rows, summary, timing, points })
}

#[derive(Debug, Clone)]
pub struct ConvergenceOutput {
    pub study: ConvergenceStudy,
    pub csv: PathBuf,
    pub summary_csv: PathBuf,
    pub timing_csv: PathBuf,
    pub manifest: PathBuf,
}

/// Runs the study and writes the replica, summary and timing CSVs plus a
/// manifest into `config.out_dir`.
pub fn run_convergence(config: &ExperimentConfig) -> Result<ConvergenceOutput> {
    let started = unix_ms();
    let study = convergence_study(config)?;
    let dir = prepare_out_dir(&config.out_dir)?;
    let csv = dir.join(CONVERGENCE_CSV);
    let summary_csv = dir.join(SUMMARY_CSV);
    let timing_csv = dir.join(TIMING_CSV);
    write_rows(&csv, &study.rows)?;
    write_rows(&summary_csv, &study.summary)?;
    write_rows(&timing_csv, &study.timing)?;
    let mut manifest = RunManifest::new("converge", config.seed, serde_json::to_value(config)?, started);
    manifest.points = study.points.iter().map(PointRun::seeds).collect();
    let manifest = manifest.finish(&dir, "convergence", &[csv.clone(), summary_csv.clone(), timing_csv.clone()])?;
    Ok(ConvergenceOutput { study, csv, summary_csv, timing_csv, manifest })
}

pub(crate) fn write_rows<T: Serialize>(path: &std::path::Path, rows: &[T]) -> Result<()> {
    let mut w = csv_writer(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{Scheme, WignerDist};
    use crate::harness::manifest::RunManifest;

    fn small_config(dir: &std::path::Path) -> ExperimentConfig {
        ExperimentConfig {
            scheme: Scheme::CurieWeiss { beta: 0.5 },
            n_values: vec![20, 40],
            replicas: 4,
            moments: vec![0, 1, 2, 4],
            seed: 11,
            out_dir: dir.to_path_buf(),
            ..Default::default()
        }
    }

    #[test]
    fn zeroth_moment_is_one_and_summary_matches_rows() {
        let dir = tempfile::tempdir().unwrap();
        let study = convergence_study(&small_config(dir.path())).unwrap();
        assert_eq!(study.rows.len(), 2 * 4 * 4);
        for r in study.rows.iter().filter(|r| r.k == 0) {
            assert!((r.moment - 1.0).abs() < 1e-14);
        }
        let s = study.summary_for(40, 2).unwrap();
        let col: Vec<f64> = study.rows.iter().filter(|r| r.n == 40 && r.k == 2).map(|r| r.moment).collect();
        assert_eq!(col.len(), 4);
        assert!((s.mean - col.iter().sum::<f64>() / 4.0).abs() < 1e-14);
        assert_eq!(s.reference, 1.0);
        assert_eq!(study.summary_for(20, 4).unwrap().reference, 2.0);
    }

    #[test]
    fn files_are_reproducible_and_checksummed() {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let oa = run_convergence(&small_config(a.path())).unwrap();
        let ob = run_convergence(&small_config(b.path())).unwrap();
        for (x, y) in [(&oa.csv, &ob.csv), (&oa.summary_csv, &ob.summary_csv)] {
            assert_eq!(std::fs::read(x).unwrap(), std::fs::read(y).unwrap());
        }
        RunManifest::verify(&oa.manifest).unwrap();
        let text = std::fs::read_to_string(&oa.csv).unwrap();
        assert!(text.starts_with("n,b,replica,k,moment,kolmogorov\n"));
        assert!(!text.contains('\r'));
        let m = RunManifest::load(&oa.manifest).unwrap();
        assert_eq!(m.points.len(), 2);
        assert_eq!(m.points[1].seeds.len(), 4);
        assert_eq!(m.outputs.len(), 3);
    }

    #[test]
    fn different_seed_changes_output() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = ExperimentConfig {
            scheme: Scheme::Wigner { dist: WignerDist::StandardNormal },
            n_values: vec![10],
            replicas: 2,
            moments: vec![2],
            out_dir: dir.path().to_path_buf(),
            ..Default::default()
        };
        let a = convergence_study(&c).unwrap();
        c.seed = 1;
        let b = convergence_study(&c).unwrap();
        assert_ne!(a.rows, b.rows);
    }
}
