//! Experiment configuration, read from TOML.
//!
//! ```toml
//! seed = 7
//! replicas = 20
//! moments = [1, 2, 3, 4]
//! out_dir = "out"
//! n = [100, 400, 1600]
//!
//! [scheme]
//! kind = "curie-weiss"
//! beta = 0.5
//!
//! [bandwidth]
//! rule = "power"
//! gamma = 0.6
//!
//! [[point]]
//! n = 50
//! b = 11
//! ```

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bandmatrix::BandSpec;
use crate::ensembles::{Scheme, WignerDist};
use crate::error::{Error, Result};

/// Largest moment order an experiment may request.
pub const MAX_MOMENT_ORDER: u32 = 10;

/// How the bandwidth follows the dimension for the entries of `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum BandwidthRule {
    /// `b = n`.
    #[default]
    Full,
    /// `b = floor(n^gamma)`, rounded down to an admissible value.
    Power { gamma: f64 },
    /// The same `b` for every `n` (clamped to `n` when `b >= n`).
    Fixed { b: usize },
}

impl BandwidthRule {
    pub fn apply(&self, n: usize) -> Result<BandSpec> {
        match *self {
            BandwidthRule::Full => BandSpec::full(n),
            BandwidthRule::Power { gamma } => BandSpec::power_rule(n, gamma),
            BandwidthRule::Fixed { b } if b >= n => BandSpec::full(n),
            BandwidthRule::Fixed { b } => BandSpec::new(n, b),
        }
    }
}

impl fmt::Display for BandwidthRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BandwidthRule::Full => write!(f, "full"),
            BandwidthRule::Power { gamma } => write!(f, "power:{gamma}"),
            BandwidthRule::Fixed { b } => write!(f, "fixed:{b}"),
        }
    }
}

impl std::str::FromStr for BandwidthRule {
    type Err = Error;

    /// Parses `full`, `power:<gamma>` or `fixed:<b>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad =
            || Error::InvalidParameter(format!("bandwidth rule {s:?}: expected full, power:<gamma> or fixed:<b>"));
        match s.split_once(':') {
            None if s == "full" => Ok(BandwidthRule::Full),
            Some(("power", g)) => Ok(BandwidthRule::Power { gamma: g.parse().map_err(|_| bad())? }),
            Some(("fixed", b)) => Ok(BandwidthRule::Fixed { b: b.parse().map_err(|_| bad())? }),
            _ => Err(bad()),
        }
    }
}

/// An explicit `(n, b)` grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointSpec {
    pub n: usize,
    pub b: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scheme: Scheme,
    /// Dimensions whose bandwidth comes from `bandwidth`.
    #[serde(default, rename = "n")]
    pub n_values: Vec<usize>,
    #[serde(default)]
    pub bandwidth: BandwidthRule,
    /// Explicit grid points, run after those from `n`.
    #[serde(default, rename = "point")]
    pub points: Vec<PointSpec>,
    #[serde(default = "default_replicas")]
    pub replicas: usize,
    #[serde(default = "default_moments")]
    pub moments: Vec<u32>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
}

fn default_replicas() -> usize {
    20
}

fn default_moments() -> Vec<u32> {
    vec![1, 2, 3, 4]
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            scheme: Scheme::Wigner { dist: WignerDist::StandardNormal },
            n_values: Vec::new(),
            bandwidth: BandwidthRule::Full,
            points: Vec::new(),
            replicas: default_replicas(),
            moments: default_moments(),
            seed: 0,
            out_dir: default_out_dir(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Checks the invariants and resolves the grid.
    pub fn validate(&self) -> Result<Vec<BandSpec>> {
        if self.replicas == 0 {
            return Err(Error::Config("replicas must be at least 1".into()));
        }
        if self.moments.is_empty() {
            return Err(Error::Config("moments must be non-empty".into()));
        }
        if let Some(k) = self.moments.iter().find(|&&k| k > MAX_MOMENT_ORDER) {
            return Err(Error::Config(format!("moment order {k} exceeds {MAX_MOMENT_ORDER}")));
        }
        let grid = self.grid()?;
        if grid.is_empty() {
            return Err(Error::Config("no grid points: give `n` or `[[point]]` entries".into()));
        }
        Ok(grid)
    }

    /// Grid points in run order: `n` under the bandwidth rule, then the
    /// explicit points.
    pub fn grid(&self) -> Result<Vec<BandSpec>> {
        let mut out = Vec::with_capacity(self.n_values.len() + self.points.len());
        for &n in &self.n_values {
            out.push(self.bandwidth.apply(n)?);
        }
        for p in &self.points {
            out.push(BandSpec::new(p.n, p.b)?);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::CovSpec;

    #[test]
    fn parses_documented_layout() {
        let text = r#"
seed = 7
replicas = 20
moments = [1, 2, 3, 4]
out_dir = "out"
n = [100, 400, 1600]

[scheme]
kind = "curie-weiss"
beta = 0.5

[bandwidth]
rule = "power"
gamma = 0.6

[[point]]
n = 50
b = 11
"#;
        let c = ExperimentConfig::from_toml_str(text).unwrap();
        assert_eq!(c.scheme, Scheme::CurieWeiss { beta: 0.5 });
        let grid = c.validate().unwrap();
        let pairs: Vec<(usize, usize)> = grid.iter().map(|s| (s.n(), s.b())).collect();
        // 100^0.6 = 15.8, 400^0.6 = 36.4, 1600^0.6 = 83.7
        assert_eq!(pairs, vec![(100, 15), (400, 35), (1600, 83), (50, 11)]);
        let back = ExperimentConfig::from_toml_str(&c.to_toml_string().unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn gaussian_scheme_with_nested_covariance() {
        let text = r#"
n = [8]
[scheme]
kind = "gaussian"
alpha = 0.5
[scheme.cov]
type = "equicorrelated"
off_diag_value = 0.01
"#;
        let c = ExperimentConfig::from_toml_str(text).unwrap();
        assert_eq!(c.scheme, Scheme::Gaussian { alpha: 0.5, cov: CovSpec::Equicorrelated { off_diag_value: 0.01 } });
        assert_eq!(c.replicas, 20);
        assert_eq!(c.bandwidth, BandwidthRule::Full);
    }

    #[test]
    fn invariants_enforced() {
        let mut c = ExperimentConfig { n_values: vec![10], ..Default::default() };
        assert!(c.validate().is_ok());
        c.replicas = 0;
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        c.replicas = 1;
        c.moments.clear();
        assert!(c.validate().is_err());
        c.moments = vec![11];
        assert!(c.validate().is_err());
        c.moments = vec![2];
        c.points.push(PointSpec { n: 10, b: 4 });
        assert!(matches!(c.validate(), Err(Error::InvalidParameter(_))));
        let empty = ExperimentConfig::default();
        assert!(empty.validate().is_err());
        assert!(
            ExperimentConfig::from_toml_str("bogus = 1\n[scheme]\nkind = \"wigner\"\ndist = \"rademacher\"").is_err()
        );
    }

    #[test]
    fn bandwidth_rules() {
        assert_eq!("full".parse::<BandwidthRule>().unwrap(), BandwidthRule::Full);
        assert_eq!("power:0.5".parse::<BandwidthRule>().unwrap(), BandwidthRule::Power { gamma: 0.5 });
        assert_eq!("fixed:5".parse::<BandwidthRule>().unwrap(), BandwidthRule::Fixed { b: 5 });
        assert!("power".parse::<BandwidthRule>().is_err());
        assert_eq!(BandwidthRule::Fixed { b: 9 }.apply(4).unwrap().b(), 4);
        assert_eq!(BandwidthRule::Power { gamma: 0.5 }.apply(100).unwrap().b(), 9);
        assert_eq!(BandwidthRule::Power { gamma: 0.5 }.apply(144).unwrap().b(), 11);
        for r in [BandwidthRule::Full, BandwidthRule::Power { gamma: 0.25 }, BandwidthRule::Fixed { b: 3 }] {
            assert_eq!(r.to_string().parse::<BandwidthRule>().unwrap(), r);
        }
    }
}
