//! Replica loop shared by the Monte Carlo studies.

use std::time::Instant;

use rayon::prelude::*;

use crate::bandmatrix::{build_x, BandSpec};
use crate::ensembles::Scheme;
use crate::error::{Error, Result};
use crate::rng::replica_seed;
use crate::spectra::{eigenvalues, esd_moment, kolmogorov_distance, SpectralSample};

use super::manifest::PointSeeds;

/// Observables of one replica.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicaResult {
    pub replica: usize,
    pub seed: u64,
    /// `moments[i]` is the ESD moment of order `orders[i]`.
    pub moments: Vec<f64>,
    pub kolmogorov: f64,
    pub wall_seconds: f64,
}

/// All replicas of one grid point, in replica order.
#[derive(Debug, Clone, PartialEq)]
pub struct PointRun {
    pub point: usize,
    pub spec: BandSpec,
    pub replicas: Vec<ReplicaResult>,
}

impl PointRun {
    /// Values of moment `index` across replicas.
    pub fn moment_column(&self, index: usize) -> Vec<f64> {
        self.replicas.iter().map(|r| r.moments[index]).collect()
    }

    pub fn kolmogorov_column(&self) -> Vec<f64> {
        self.replicas.iter().map(|r| r.kolmogorov).collect()
    }

    pub fn seeds(&self) -> PointSeeds {
        PointSeeds {
            point: self.point,
            n: self.spec.n(),
            b: self.spec.b(),
            seeds: self.replicas.iter().map(|r| r.seed).collect(),
        }
    }
}

/// Spectrum of the scaled band matrix for one seed.
pub fn sample_spectrum(scheme: &Scheme, spec: &BandSpec, seed: u64) -> Result<SpectralSample> {
    let sample = scheme.sample(spec.n(), seed)?;
    eigenvalues(&build_x(&sample, spec)?.values)
}

/// Runs `replicas` replicas at every grid point. Replicas run in parallel;
/// results come back in replica order, so the output does not depend on
/// scheduling. The first failing replica aborts the run.
pub fn run_points(
    scheme: &Scheme,
    grid: &[BandSpec],
    replicas: usize,
    orders: &[u32],
    master_seed: u64,
) -> Result<Vec<PointRun>> {
    let mut out = Vec::with_capacity(grid.len());
    for (point, spec) in grid.iter().enumerate() {
        let prepared = scheme.prepare(spec.n())?;
        let results: Vec<Result<ReplicaResult>> = (0..replicas)
            .into_par_iter()
            .map(|replica| {
                let seed = replica_seed(master_seed, point as u64, replica as u64);
                let start = Instant::now();
                let run = || -> Result<ReplicaResult> {
                    let sample = prepared.sample_seeded(seed)?;
                    let s = eigenvalues(&build_x(&sample, spec)?.values)?;
                    Ok(ReplicaResult {
                        replica,
                        seed,
                        moments: orders.iter().map(|&k| esd_moment(&s, k)).collect(),
                        kolmogorov: kolmogorov_distance(&s),
                        wall_seconds: 0.0,
                    })
                };
                run()
                    .map(|mut r| {
                        r.wall_seconds = start.elapsed().as_secs_f64();
                        r
                    })
                    .map_err(|e| Error::ReplicaFailed { replica, seed, source: Box::new(e) })
            })
            .collect();
        let replicas = results.into_iter().collect::<Result<Vec<_>>>()?;
        log::info!("point {point}: n={} b={} done", spec.n(), spec.b());
        out.push(PointRun { point, spec: *spec, replicas });
    }
    Ok(out)
}
