//! Experiment orchestration and reproducible persistence.
//!
//! Every study runs its replicas in parallel from seeds derived from the
//! master seed, merges them in replica order and writes comma-separated
//! files with LF line endings plus a JSON manifest of seeds and checksums.

pub mod config;
pub mod convergence;
pub mod engine;
pub mod lemma_suite;
pub mod manifest;
pub mod oracle_compare;
pub mod plot;
pub mod variance;

use std::fs::File;
use std::path::{Path, PathBuf};

pub use self::config::{BandwidthRule, ExperimentConfig, PointSpec};
pub use self::convergence::{convergence_study, run_convergence, ConvergenceRow, ConvergenceStudy, SummaryRow};
pub use self::engine::{run_points, sample_spectrum, PointRun, ReplicaResult};
pub use self::lemma_suite::{run_lemma_suite, LemmaSuiteConfig, LemmaSuiteReport};
pub use self::manifest::RunManifest;
pub use self::oracle_compare::{oracle_comparison, run_oracle_comparison, OracleComparison, OracleRow};
pub use self::plot::{emit_plot_data, write_spectrum_csv, PlotKind};
pub use self::variance::{run_variance_study, variance_study, SlopeFit, VarianceRow, VarianceStudy};

use crate::error::Result;

pub(crate) fn csv_writer(path: &Path) -> Result<csv::Writer<File>> {
    Ok(csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(path)?)
}

pub(crate) fn prepare_out_dir(dir: &Path) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    Ok(dir.to_path_buf())
}
