//! Exact checks of the pair-partition bounds for equicorrelated Gaussian
//! vectors with the largest admissible correlation `c = dim^-alpha`.

use serde::Serialize;

use crate::ensembles::triangle_size;
use crate::error::{Error, Result};

use super::partitions::pair_partition_count;
use super::wick::wick_sum;

/// Which bound a row exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GaussianCheck {
    /// `|E prod Y^{d_i}| <= #P2(sum d) / (n/sqrt2)^{alpha #{d_i = 1}}`.
    DistinctDecay,
    /// `|E prod_{i<=z} Y_i^2 - 1| <= #P2(2z) / (n/sqrt2)^{4 alpha}`.
    SecondMoment,
    /// `|E Y_1^4 prod_{2<=i<=z} Y_i^2 - 3| <= #P2(2z+2) / (n/sqrt2)^{4 alpha}`.
    FourthMoment,
}

impl GaussianCheck {
    pub fn name(&self) -> &'static str {
        match self {
            GaussianCheck::DistinctDecay => "distinct-decay",
            GaussianCheck::SecondMoment => "second-moment",
            GaussianCheck::FourthMoment => "fourth-moment",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaussianLemmaRow {
    pub check: GaussianCheck,
    pub alpha: f64,
    pub n: usize,
    pub z: usize,
    pub c: f64,
    /// Multiplicity of each distinct vector component.
    pub pattern: Vec<u32>,
    /// Left-hand side: the absolute moment or its deviation.
    pub value: f64,
    pub bound: f64,
    pub holds: bool,
}

/// Identity-covariance row: the moment must equal its constant exactly.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactConstantRow {
    pub check: GaussianCheck,
    pub z: usize,
    pub pattern: Vec<u32>,
    pub moment: f64,
    pub expected: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct GaussianLemmaReport {
    pub rows: Vec<GaussianLemmaRow>,
    pub exact_rows: Vec<ExactConstantRow>,
}

impl GaussianLemmaReport {
    pub fn violations(&self) -> usize {
        self.rows.iter().filter(|r| !r.holds).count() + self.exact_rows.iter().filter(|r| !r.holds).count()
    }

    pub fn passed(&self) -> bool {
        self.violations() == 0
    }
}

/// Largest number of Gaussian factors in one checked moment.
pub const MAX_PATTERN_SIZE: usize = 12;

/// Moment of distinct equicorrelated components raised to `pattern`.
fn pattern_moment(pattern: &[u32], c: f64) -> Result<f64> {
    let group: Vec<usize> = pattern.iter().enumerate().flat_map(|(g, &d)| std::iter::repeat_n(g, d as usize)).collect();
    wick_sum(group.len(), |r, s| if group[r] == group[s] { 1.0 } else { c })
}

fn decay_patterns(z: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut p = vec![1u32; z];
    loop {
        let total: u32 = p.iter().sum();
        if total.is_multiple_of(2) && total as usize <= MAX_PATTERN_SIZE {
            out.push(p.clone());
        }
        let mut pos = 0;
        loop {
            if pos == z {
                return out;
            }
            if p[pos] < 4 {
                p[pos] += 1;
                break;
            }
            p[pos] = 1;
            pos += 1;
        }
    }
}

fn second_pattern(z: usize) -> Vec<u32> {
    vec![2; z]
}

fn fourth_pattern(z: usize) -> Vec<u32> {
    let mut p = vec![4];
    p.extend(std::iter::repeat_n(2, z - 1));
    p
}

/// Evaluates the three bounds exactly for every `n` and `z`, with
/// `c = (n(n+1)/2)^-alpha`, and confirms that `c = 0` reproduces the
/// constants 1 and 3 exactly.
///
/// For the decay bound every multiplicity pattern in `{1,2,3,4}^z` with even
/// total of at most [`MAX_PATTERN_SIZE`] is checked. The fourth-moment
/// pattern for `z` is one component with multiplicity 4 followed by `z - 1`
/// components with multiplicity 2.
pub fn verify_gaussian_lemmas(alpha: f64, n_values: &[usize], z_values: &[usize]) -> Result<GaussianLemmaReport> {
    if alpha.is_nan() || alpha <= 0.0 {
        return Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")));
    }
    if let Some(&z) = z_values.iter().find(|&&z| z == 0 || 2 * z + 2 > MAX_PATTERN_SIZE) {
        return Err(Error::InvalidParameter(format!("z = {z} outside 1..={}", MAX_PATTERN_SIZE / 2 - 1)));
    }
    let mut rows = Vec::new();
    for &n in n_values {
        let dim = triangle_size(n);
        let c = (dim as f64).powf(-alpha);
        let scale = n as f64 / 2f64.sqrt();
        for &z in z_values {
            if z > dim {
                return Err(Error::InvalidParameter(format!("z = {z} exceeds {dim} components at n = {n}")));
            }
            for pattern in decay_patterns(z) {
                let total: u32 = pattern.iter().sum();
                let ones = pattern.iter().filter(|&&d| d == 1).count() as f64;
                let value = pattern_moment(&pattern, c)?.abs();
                let bound = pair_partition_count(total as usize) as f64 / scale.powf(alpha * ones);
                rows.push(GaussianLemmaRow {
                    check: GaussianCheck::DistinctDecay,
                    alpha,
                    n,
                    z,
                    c,
                    pattern,
                    value,
                    bound,
                    holds: value <= bound,
                });
            }
            let denom = scale.powf(4.0 * alpha);
            for (check, pattern, constant) in [
                (GaussianCheck::SecondMoment, second_pattern(z), 1.0),
                (GaussianCheck::FourthMoment, fourth_pattern(z), 3.0),
            ] {
                let total: u32 = pattern.iter().sum();
                let value = (pattern_moment(&pattern, c)? - constant).abs();
                let bound = pair_partition_count(total as usize) as f64 / denom;
                rows.push(GaussianLemmaRow { check, alpha, n, z, c, pattern, value, bound, holds: value <= bound });
            }
        }
    }
    let mut exact_rows = Vec::new();
    for &z in z_values {
        for (check, pattern, expected) in [
            (GaussianCheck::SecondMoment, second_pattern(z), 1.0),
            (GaussianCheck::FourthMoment, fourth_pattern(z), 3.0),
        ] {
            let moment = pattern_moment(&pattern, 0.0)?;
            exact_rows.push(ExactConstantRow { check, z, pattern, moment, expected, holds: moment == expected });
        }
        for pattern in decay_patterns(z).into_iter().filter(|p| p.contains(&1)) {
            let moment = pattern_moment(&pattern, 0.0)?;
            exact_rows.push(ExactConstantRow {
                check: GaussianCheck::DistinctDecay,
                z,
                pattern,
                moment,
                expected: 0.0,
                holds: moment == 0.0,
            });
        }
    }
    Ok(GaussianLemmaReport { rows, exact_rows })
}
