//! Whitespace-separated plot data derived from the experiment CSVs.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectra::{semicircle_density, semicircle_moment, SpectralSample};

use super::convergence::SummaryRow;
use super::csv_writer;
use super::variance::VarianceRow;

pub const HISTOGRAM_BINS: usize = 50;
pub const HISTOGRAM_RANGE: (f64, f64) = (-2.5, 2.5);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlotKind {
    EsdHistogram,
    MomentVsN,
    VarianceLoglog,
}

impl PlotKind {
    pub fn name(&self) -> &'static str {
        match self {
            PlotKind::EsdHistogram => "esd_histogram",
            PlotKind::MomentVsN => "moment_vs_n",
            PlotKind::VarianceLoglog => "variance_loglog",
        }
    }
}

impl FromStr for PlotKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "esd_histogram" => Ok(PlotKind::EsdHistogram),
            "moment_vs_n" => Ok(PlotKind::MomentVsN),
            "variance_loglog" => Ok(PlotKind::VarianceLoglog),
            _ => Err(Error::InvalidParameter(format!(
                "plot kind {s:?}: expected esd_histogram, moment_vs_n or variance_loglog"
            ))),
        }
    }
}

/// Row of a spectrum CSV as written by [`write_spectrum_csv`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub index: usize,
    pub eigenvalue: f64,
}

pub fn write_spectrum_csv(path: &Path, s: &SpectralSample) -> Result<()> {
    let mut w = csv_writer(path)?;
    for (index, &eigenvalue) in s.eigenvalues.iter().enumerate() {
        w.serialize(SpectrumRow { index, eigenvalue })?;
    }
    w.flush()?;
    Ok(())
}

fn read_rows<T: DeserializeOwned>(path: &Path, required: &[&str]) -> Result<Vec<T>> {
    let schema = |detail: String| Error::Schema { path: path.to_path_buf(), detail };
    let mut r = csv::Reader::from_path(path)?;
    let headers = r.headers()?.clone();
    for col in required {
        if !headers.iter().any(|h| h == *col) {
            return Err(schema(format!("missing column {col:?}")));
        }
    }
    r.deserialize().map(|row| row.map_err(|e| schema(e.to_string()))).collect()
}

/// Histogram of the pooled eigenvalues with the semicircle density at the
/// bin centres: `center empirical_density semicircle_density`.
pub fn esd_histogram(eigenvalues: &[f64]) -> Vec<(f64, f64, f64)> {
    let (lo, hi) = HISTOGRAM_RANGE;
    let width = (hi - lo) / HISTOGRAM_BINS as f64;
    let mut counts = [0u64; HISTOGRAM_BINS];
    for &x in eigenvalues {
        if (lo..=hi).contains(&x) {
            let bin = (((x - lo) / width) as usize).min(HISTOGRAM_BINS - 1);
            counts[bin] += 1;
        }
    }
    let total = eigenvalues.len().max(1) as f64;
    (0..HISTOGRAM_BINS)
        .map(|i| {
            let center = lo + (i as f64 + 0.5) * width;
            (center, counts[i] as f64 / (total * width), semicircle_density(center))
        })
        .collect()
}

fn render(kind: PlotKind, csv_path: &Path) -> Result<String> {
    let mut out = String::new();
    match kind {
        PlotKind::EsdHistogram => {
            let rows: Vec<SpectrumRow> = read_rows(csv_path, &["eigenvalue"])?;
            let values: Vec<f64> = rows.iter().map(|r| r.eigenvalue).collect();
            out.push_str("# center empirical_density semicircle_density\n");
            for (c, e, d) in esd_histogram(&values) {
                let _ = writeln!(out, "{c} {e} {d}");
            }
        }
        PlotKind::MomentVsN => {
            let rows: Vec<SummaryRow> = read_rows(csv_path, &["n", "k", "mean", "stderr"])?;
            let mut by_k: BTreeMap<u32, Vec<&SummaryRow>> = BTreeMap::new();
            for r in &rows {
                by_k.entry(r.k).or_default().push(r);
            }
            for (i, (k, rows)) in by_k.iter().enumerate() {
                if i > 0 {
                    out.push_str("\n\n");
                }
                let _ = writeln!(out, "# k = {k}\n# n mean stderr reference");
                for r in rows {
                    let _ = writeln!(out, "{} {} {} {}", r.n, r.mean, r.stderr, semicircle_moment(*k as usize));
                }
            }
        }
        PlotKind::VarianceLoglog => {
            let rows: Vec<VarianceRow> = read_rows(csv_path, &["n", "k", "variance"])?;
            let mut by_k: BTreeMap<u32, Vec<&VarianceRow>> = BTreeMap::new();
            for r in rows.iter().filter(|r| r.variance > 0.0) {
                by_k.entry(r.k).or_default().push(r);
            }
            for (i, (k, rows)) in by_k.iter().enumerate() {
                if i > 0 {
                    out.push_str("\n\n");
                }
                let _ = writeln!(out, "# k = {k}\n# ln_n ln_variance");
                for r in rows {
                    let _ = writeln!(out, "{} {}", (r.n as f64).ln(), r.variance.ln());
                }
            }
        }
    }
    Ok(out)
}

/// Writes the plot data for `kind` next to `csv_path` (or to `out`) and
/// returns the path written.
pub fn emit_plot_data(csv_path: &Path, kind: PlotKind, out: Option<&Path>) -> Result<PathBuf> {
    let text = render(kind, csv_path)?;
    let path = match out {
        Some(p) => p.to_path_buf(),
        None => csv_path.with_extension(format!("{}.dat", kind.name())),
    };
    std::fs::write(&path, text)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{Scheme, WignerDist};
    use crate::harness::config::ExperimentConfig;
    use crate::harness::convergence::run_convergence;
    use crate::harness::variance::run_variance_study;

    #[test]
    fn histogram_binning() {
        let h = esd_histogram(&[-2.5, 0.0, 0.01, 2.5, 3.0]);
        assert_eq!(h.len(), 50);
        assert!((h[0].0 + 2.45).abs() < 1e-12);
        let width = 0.1;
        assert!((h[0].1 - 1.0 / (5.0 * width)).abs() < 1e-12);
        assert!((h[25].1 - 2.0 / (5.0 * width)).abs() < 1e-12);
        assert!((h[49].1 - 1.0 / (5.0 * width)).abs() < 1e-12);
        assert_eq!(h[0].2, 0.0);
        assert!((h[25].2 - semicircle_density(0.05)).abs() < 1e-15);
    }

    #[test]
    fn emits_all_kinds() {
        let dir = tempfile::tempdir().unwrap();
        let spectrum = dir.path().join("spectrum.csv");
        write_spectrum_csv(&spectrum, &SpectralSample::from_eigenvalues(vec![-1.0, 0.0, 1.0])).unwrap();
        let p = emit_plot_data(&spectrum, PlotKind::EsdHistogram, None).unwrap();
        assert!(p.to_string_lossy().ends_with("spectrum.esd_histogram.dat"));
        let text = std::fs::read_to_string(p).unwrap();
        assert_eq!(text.lines().count(), 51);
        assert_eq!(text.lines().nth(1).unwrap().split_whitespace().count(), 3);

        let c = ExperimentConfig {
            scheme: Scheme::Wigner { dist: WignerDist::Rademacher },
            n_values: vec![8, 16],
            replicas: 3,
            moments: vec![2, 4],
            out_dir: dir.path().join("conv"),
            ..Default::default()
        };
        let out = run_convergence(&c).unwrap();
        let p = emit_plot_data(&out.summary_csv, PlotKind::MomentVsN, None).unwrap();
        let text = std::fs::read_to_string(p).unwrap();
        assert!(text.contains("# k = 4"));
        let row: Vec<&str> = text.lines().nth(2).unwrap().split_whitespace().collect();
        assert_eq!(row[0], "8");
        assert_eq!(row[3], "1");

        let v = run_variance_study(&ExperimentConfig { out_dir: dir.path().join("var"), ..c }).unwrap();
        let p = emit_plot_data(&v.csv, PlotKind::VarianceLoglog, Some(&dir.path().join("v.dat"))).unwrap();
        let text = std::fs::read_to_string(p).unwrap();
        let first: Vec<f64> = text.lines().nth(2).unwrap().split_whitespace().map(|t| t.parse().unwrap()).collect();
        assert!((first[0] - 8f64.ln()).abs() < 1e-12);

        // Wrong input for the kind.
        assert!(matches!(emit_plot_data(&spectrum, PlotKind::MomentVsN, None), Err(Error::Schema { .. })));
    }

    #[test]
    fn kind_names() {
        for k in [PlotKind::EsdHistogram, PlotKind::MomentVsN, PlotKind::VarianceLoglog] {
            assert_eq!(k.name().parse::<PlotKind>().unwrap(), k);
        }
        assert_eq!("moment-vs-n".parse::<PlotKind>().unwrap(), PlotKind::MomentVsN);
        assert!("bars".parse::<PlotKind>().is_err());
    }
}
