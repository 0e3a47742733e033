//! Periodic band structure.
//!
//! Indices are zero-based and taken modulo `n`: a pair `(i, j)` lies in the
//! band of width `b` when its cyclic distance is at most `(b - 1) / 2`.
//! The full matrix is the special case `b = n`.

use serde::{Deserialize, Serialize};

use crate::ensembles::SchemeSample;
use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;

/// Dimension and bandwidth of a periodic band matrix.
///
/// Admissible bandwidths are the odd values below `n` together with `n`
/// itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BandSpec {
    n: usize,
    b: usize,
}

impl BandSpec {
    pub fn new(n: usize, b: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("dimension n must be at least 1".into()));
        }
        if b == 0 || b > n {
            return Err(Error::InvalidParameter(format!("bandwidth {b} outside 1..={n}")));
        }
        if b < n && b.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!("bandwidth {b} < n = {n} must be odd")));
        }
        Ok(Self { n, b })
    }

    pub fn full(n: usize) -> Result<Self> {
        Self::new(n, n)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn is_full(&self) -> bool {
        self.b == self.n
    }

    /// Half-width `(b - 1) / 2` of a proper band.
    pub fn half_width(&self) -> usize {
        (self.b - 1) / 2
    }

    /// All admissible bandwidths for dimension `n`, ascending.
    pub fn valid_bandwidths(n: usize) -> Vec<usize> {
        let mut out: Vec<usize> = (1..n).step_by(2).collect();
        if n > 0 {
            out.push(n);
        }
        out
    }

    /// Largest admissible bandwidth not exceeding `target`, clamped to `1..=n`.
    pub fn round_down(n: usize, target: usize) -> Result<Self> {
        if target >= n {
            return Self::full(n);
        }
        let b = if target == 0 {
            1
        } else if target.is_multiple_of(2) {
            target - 1
        } else {
            target
        };
        Self::new(n, b)
    }

    /// Bandwidth `floor(n^gamma)` rounded down to an admissible value.
    pub fn power_rule(n: usize, gamma: f64) -> Result<Self> {
        if gamma.is_nan() || gamma <= 0.0 {
            return Err(Error::InvalidParameter(format!("gamma must be positive, got {gamma}")));
        }
        // Nudge before flooring so exact powers are not lost to rounding.
        let target = ((n as f64).powf(gamma) * (1.0 + 1e-12)).floor() as usize;
        Self::round_down(n, target)
    }

    #[inline]
    pub fn relevant_unchecked(&self, i: usize, j: usize) -> bool {
        if self.b == self.n {
            return true;
        }
        let d = i.abs_diff(j);
        let h = self.half_width();
        d <= h || d >= self.n - h
    }

    pub fn is_relevant(&self, i: usize, j: usize) -> Result<bool> {
        if i >= self.n || j >= self.n {
            return Err(Error::IndexOutOfRange { i, j, n: self.n });
        }
        Ok(self.relevant_unchecked(i, j))
    }

    /// Number of relevant index pairs, `n * b`.
    pub fn count_relevant(&self) -> usize {
        self.n * self.b
    }
}

pub fn is_relevant(i: usize, j: usize, spec: &BandSpec) -> Result<bool> {
    spec.is_relevant(i, j)
}

pub fn count_relevant(spec: &BandSpec) -> usize {
    spec.count_relevant()
}

fn check_dim(sample_n: usize, spec: &BandSpec) -> Result<()> {
    if sample_n != spec.n() {
        return Err(Error::DimensionMismatch { expected: spec.n(), found: sample_n });
    }
    Ok(())
}

/// Copies `entries` with all non-relevant positions set to zero.
pub fn mask_matrix(entries: &SquareMatrix, spec: &BandSpec) -> Result<SquareMatrix> {
    check_dim(entries.dim(), spec)?;
    Ok(SquareMatrix::from_fn(spec.n(), |i, j| if spec.relevant_unchecked(i, j) { entries[(i, j)] } else { 0.0 }))
}

pub fn apply_band_mask(sample: &SchemeSample, spec: &BandSpec) -> Result<SquareMatrix> {
    mask_matrix(&sample.entries, spec)
}

/// The scaled periodic band matrix `X = a^b / sqrt(b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledBandMatrix {
    pub spec: BandSpec,
    pub values: SquareMatrix,
    pub scale_applied: bool,
}

pub fn scale_entries(entries: &SquareMatrix, spec: &BandSpec) -> Result<ScaledBandMatrix> {
    check_dim(entries.dim(), spec)?;
    let scale = 1.0 / (spec.b() as f64).sqrt();
    let values =
        SquareMatrix::from_fn(
            spec.n(),
            |i, j| {
                if spec.relevant_unchecked(i, j) {
                    entries[(i, j)] * scale
                } else {
                    0.0
                }
            },
        );
    Ok(ScaledBandMatrix { spec: *spec, values, scale_applied: true })
}

pub fn build_x(sample: &SchemeSample, spec: &BandSpec) -> Result<ScaledBandMatrix> {
    scale_entries(&sample.entries, spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Relevance pattern for n = 6, b = 5 (1 = entry kept).
    const PATTERN_N6_B5: [[u8; 6]; 6] = [
        [1, 1, 1, 0, 1, 1],
        [1, 1, 1, 1, 0, 1],
        [1, 1, 1, 1, 1, 0],
        [0, 1, 1, 1, 1, 1],
        [1, 0, 1, 1, 1, 1],
        [1, 1, 0, 1, 1, 1],
    ];

    #[test]
    fn admissible_bandwidths() {
        assert!(BandSpec::new(6, 5).is_ok());
        assert!(BandSpec::new(6, 6).is_ok());
        assert!(BandSpec::new(7, 7).is_ok());
        assert!(BandSpec::new(6, 4).is_err());
        assert!(BandSpec::new(6, 7).is_err());
        assert!(BandSpec::new(6, 0).is_err());
        assert!(BandSpec::new(0, 0).is_err());
        assert_eq!(BandSpec::valid_bandwidths(6), vec![1, 3, 5, 6]);
        assert_eq!(BandSpec::valid_bandwidths(5), vec![1, 3, 5]);
    }

    #[test]
    fn pattern_n6_b5() {
        let spec = BandSpec::new(6, 5).unwrap();
        assert!(!spec.is_relevant(0, 3).unwrap());
        assert!(spec.is_relevant(0, 4).unwrap());
        for (i, row) in PATTERN_N6_B5.iter().enumerate() {
            for (j, &bit) in row.iter().enumerate() {
                assert_eq!(spec.is_relevant(i, j).unwrap(), bit == 1, "({i},{j})");
            }
        }
        let ones = SquareMatrix::from_fn(6, |_, _| 1.0);
        let masked = mask_matrix(&ones, &spec).unwrap();
        for (i, row) in PATTERN_N6_B5.iter().enumerate() {
            for (j, &bit) in row.iter().enumerate() {
                assert_eq!(masked[(i, j)], bit as f64);
            }
        }
    }

    #[test]
    fn out_of_range() {
        let spec = BandSpec::new(6, 5).unwrap();
        assert!(matches!(spec.is_relevant(6, 0), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn counts_match_brute_force() {
        for n in 1..=64 {
            for b in BandSpec::valid_bandwidths(n) {
                let spec = BandSpec::new(n, b).unwrap();
                let mut total = 0;
                for i in 0..n {
                    let row = (0..n).filter(|&j| spec.relevant_unchecked(i, j)).count();
                    assert_eq!(row, b, "n={n} b={b} row {i}");
                    total += row;
                }
                assert_eq!(total, spec.count_relevant());
            }
        }
        assert_eq!(BandSpec::new(6, 5).unwrap().count_relevant(), 30);
        assert_eq!(BandSpec::new(5, 3).unwrap().count_relevant(), 15);
        assert_eq!(BandSpec::full(9).unwrap().count_relevant(), 81);
    }

    #[test]
    fn symmetric_and_periodic() {
        for n in 1..=32 {
            for b in BandSpec::valid_bandwidths(n) {
                let spec = BandSpec::new(n, b).unwrap();
                for i in 0..n {
                    for j in 0..n {
                        let r = spec.relevant_unchecked(i, j);
                        assert_eq!(r, spec.relevant_unchecked(j, i));
                        assert_eq!(r, spec.relevant_unchecked((i + 1) % n, (j + 1) % n));
                    }
                }
            }
        }
    }

    #[test]
    fn mask_cases() {
        let m = SquareMatrix::from_fn(3, |i, j| (1 + i + j) as f64);
        let full = mask_matrix(&m, &BandSpec::full(3).unwrap()).unwrap();
        assert_eq!(full, m);
        let diag = mask_matrix(&m, &BandSpec::new(3, 1).unwrap()).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(diag[(i, j)], if i == j { m[(i, j)] } else { 0.0 });
            }
        }
        let spec = BandSpec::new(3, 1).unwrap();
        assert_eq!(mask_matrix(&diag, &spec).unwrap(), diag);
        assert!(mask_matrix(&m, &BandSpec::full(4).unwrap()).is_err());
    }

    #[test]
    fn scaling() {
        let one = SquareMatrix::from_fn(1, |_, _| -3.5);
        let x = scale_entries(&one, &BandSpec::full(1).unwrap()).unwrap();
        assert_eq!(x.values[(0, 0)], -3.5);
        assert!(x.scale_applied);

        let ones = SquareMatrix::from_fn(4, |_, _| 1.0);
        let x = scale_entries(&ones, &BandSpec::full(4).unwrap()).unwrap();
        assert!(x.values.as_slice().iter().all(|&v| v == 0.5));
    }

    #[test]
    fn squared_row_sums_are_one_for_signs() {
        for (n, b) in [(9, 3), (9, 9), (16, 7), (16, 16)] {
            let spec = BandSpec::new(n, b).unwrap();
            let signs = SquareMatrix::from_fn(n, |i, j| if (i * 7 + j * 7) % 3 == 0 { 1.0 } else { -1.0 });
            let x = scale_entries(&signs, &spec).unwrap();
            for i in 0..n {
                let s: f64 = x.values.row(i).iter().map(|v| v * v).sum();
                assert!((s - 1.0).abs() < 1e-12, "n={n} b={b} row {i}: {s}");
            }
        }
    }

    #[test]
    fn power_rule_rounding() {
        assert_eq!(BandSpec::power_rule(200, 0.6).unwrap().b(), 23);
        assert_eq!(BandSpec::power_rule(800, 0.6).unwrap().b(), 55);
        assert_eq!(BandSpec::power_rule(3200, 0.6).unwrap().b(), 125);
        assert_eq!(BandSpec::power_rule(10, 1.0).unwrap().b(), 10);
        assert_eq!(BandSpec::power_rule(16, 0.5).unwrap().b(), 3);
        assert_eq!(BandSpec::round_down(10, 0).unwrap().b(), 1);
    }
}
