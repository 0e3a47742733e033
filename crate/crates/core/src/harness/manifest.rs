//! Run manifests: what was run, with which seeds, and checksums of every
//! file written.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::rng::{RNG_NAME, SEED_MIX_NAME};

pub const ARTIFACT_VERSION: &str = concat!("semiband ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputFile {
    /// Path relative to the manifest's directory.
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointSeeds {
    pub point: usize,
    pub n: usize,
    pub b: usize,
    pub seeds: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub artifact_version: String,
    pub rng: String,
    pub seed_derivation: String,
    pub master_seed: u64,
    pub config: serde_json::Value,
    pub points: Vec<PointSeeds>,
    pub started_unix_ms: u128,
    pub finished_unix_ms: u128,
    pub outputs: Vec<OutputFile>,
}

pub fn unix_ms() -> u128 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis()).unwrap_or(0)
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path)?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

impl RunManifest {
    pub fn new(command: &str, master_seed: u64, config: serde_json::Value, started_unix_ms: u128) -> Self {
        Self {
            command: command.to_string(),
            artifact_version: ARTIFACT_VERSION.to_string(),
            rng: RNG_NAME.to_string(),
            seed_derivation: SEED_MIX_NAME.to_string(),
            master_seed,
            config,
            points: Vec::new(),
            started_unix_ms,
            finished_unix_ms: started_unix_ms,
            outputs: Vec::new(),
        }
    }

    /// Checksums `files` (which must live in `dir`) and writes the manifest
    /// to `dir/<stem>.manifest.json`.
    pub fn finish(mut self, dir: &Path, stem: &str, files: &[PathBuf]) -> Result<PathBuf> {
        self.outputs.clear();
        for f in files {
            let rel = f.strip_prefix(dir).unwrap_or(f);
            self.outputs.push(OutputFile {
                path: rel.to_string_lossy().into_owned(),
                bytes: fs::metadata(f)?.len(),
                sha256: sha256_file(f)?,
            });
        }
        self.finished_unix_ms = unix_ms();
        let path = dir.join(format!("{stem}.manifest.json"));
        let mut text = serde_json::to_string_pretty(&self)?;
        text.push('\n');
        fs::write(&path, text)?;
        Ok(path)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }

    /// Recomputes every listed checksum against the files next to the
    /// manifest at `path`.
    pub fn verify(path: &Path) -> Result<()> {
        let m = Self::load(path)?;
        let dir = path.parent().unwrap_or(Path::new("."));
        for o in &m.outputs {
            let actual = sha256_file(&dir.join(&o.path))?;
            if actual != o.sha256 {
                return Err(Error::Schema {
                    path: dir.join(&o.path),
                    detail: format!("checksum {actual} does not match manifest {}", o.sha256),
                });
            }
        }
        Ok(())
    }
}
