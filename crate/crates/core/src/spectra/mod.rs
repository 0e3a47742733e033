//! Spectra of symmetric matrices and the semicircle reference law.

mod eigen;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

pub use self::eigen::{symmetric_eigen, symmetric_eigenvalues};

use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;
use crate::numeric::neumaier_sum;

/// Largest argument accepted by [`catalan`].
pub const MAX_CATALAN_INDEX: usize = 30;

/// Eigenvalues of a symmetric matrix, sorted ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralSample {
    pub n: usize,
    pub eigenvalues: Vec<f64>,
}

impl SpectralSample {
    /// Wraps a spectrum, sorting it.
    pub fn from_eigenvalues(mut eigenvalues: Vec<f64>) -> Self {
        eigenvalues.sort_by(f64::total_cmp);
        Self { n: eigenvalues.len(), eigenvalues }
    }
}

/// Full spectrum of a symmetric matrix (symmetric to within `1e-12`
/// relative to its largest entry).
pub fn eigenvalues(matrix: &SquareMatrix) -> Result<SpectralSample> {
    let values = symmetric_eigenvalues(matrix)?;
    Ok(SpectralSample { n: values.len(), eigenvalues: values })
}

/// Spectrum plus orthonormal eigenvectors (rows of the matrix, in the
/// order of the eigenvalues).
pub fn eigen_decomposition(matrix: &SquareMatrix) -> Result<(SpectralSample, SquareMatrix)> {
    let (values, vectors) = symmetric_eigen(matrix)?;
    Ok((SpectralSample { n: values.len(), eigenvalues: values }, vectors))
}

/// `(1/n) sum lambda_i^k`. Zero for an empty spectrum.
pub fn esd_moment(s: &SpectralSample, k: u32) -> f64 {
    if s.eigenvalues.is_empty() {
        return 0.0;
    }
    let k = i32::try_from(k).unwrap_or(i32::MAX);
    neumaier_sum(s.eigenvalues.iter().map(|x| x.powi(k))) / s.eigenvalues.len() as f64
}

/// Catalan number `C_m = binom(2m, m) / (m + 1)`.
pub fn catalan(m: usize) -> Result<u64> {
    if m > MAX_CATALAN_INDEX {
        return Err(Error::Overflow(format!("catalan({m}) exceeds the supported range 0..={MAX_CATALAN_INDEX}")));
    }
    // C_{j+1} = C_j * 2(2j + 1) / (j + 2), exact at every step.
    let mut c: u128 = 1;
    for j in 0..m as u128 {
        c = c * 2 * (2 * j + 1) / (j + 2);
    }
    u64::try_from(c).map_err(|_| Error::Overflow(format!("catalan({m})")))
}

/// `k`-th moment of the standard semicircle law: `C_{k/2}` for even `k`,
/// zero for odd `k`.
pub fn semicircle_moment(k: usize) -> f64 {
    if k % 2 == 1 {
        return 0.0;
    }
    match catalan(k / 2) {
        Ok(c) => c as f64,
        // Past the exact range, same recurrence in floating point.
        Err(_) => (0..k / 2).fold(1.0, |c, j| c * 2.0 * (2.0 * j as f64 + 1.0) / (j as f64 + 2.0)),
    }
}

/// Density `(1/2pi) sqrt(4 - x^2)` on `[-2, 2]`, zero outside.
pub fn semicircle_density(x: f64) -> f64 {
    if x.abs() >= 2.0 {
        0.0
    } else {
        (4.0 - x * x).sqrt() / (2.0 * PI)
    }
}

/// Distribution function of the semicircle law.
pub fn semicircle_cdf(x: f64) -> f64 {
    if x <= -2.0 {
        0.0
    } else if x >= 2.0 {
        1.0
    } else {
        let v = 0.5 + x * (4.0 - x * x).sqrt() / (4.0 * PI) + (x / 2.0).asin() / PI;
        v.clamp(0.0, 1.0)
    }
}

/// Unit struct bundling the semicircle reference quantities.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SemicircleRef;

impl SemicircleRef {
    pub fn density(&self, x: f64) -> f64 {
        semicircle_density(x)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        semicircle_cdf(x)
    }

    pub fn moment(&self, k: usize) -> f64 {
        semicircle_moment(k)
    }
}

/// Kolmogorov distance between the ESD and the semicircle law.
///
/// The ESD is a step function, so the supremum is attained at an
/// eigenvalue, on one side or the other of a jump.
pub fn kolmogorov_distance(s: &SpectralSample) -> f64 {
    let n = s.eigenvalues.len();
    if n == 0 {
        return 0.0;
    }
    let nf = n as f64;
    let mut sorted = s.eigenvalues.clone();
    sorted.sort_by(f64::total_cmp);
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = semicircle_cdf(x);
            (f - (i + 1) as f64 / nf).abs().max((f - i as f64 / nf).abs())
        })
        .fold(0.0, f64::max)
        .min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use rand::Rng;

    fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
        #[allow(clippy::too_many_arguments)]
        fn rec(
            f: &dyn Fn(f64) -> f64,
            a: f64,
            b: f64,
            fa: f64,
            fm: f64,
            fb: f64,
            whole: f64,
            tol: f64,
            depth: u32,
        ) -> f64 {
            let m = 0.5 * (a + b);
            let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
            let (flm, frm) = (f(lm), f(rm));
            let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            let delta = left + right - whole;
            if depth == 0 || delta.abs() <= 15.0 * tol {
                return left + right + delta / 15.0;
            }
            rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
        let m = 0.5 * (a + b);
        let (fa, fm, fb) = (f(a), f(m), f(b));
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        rec(f, a, b, fa, fm, fb, whole, tol, 50)
    }

    /// Integral of `g(x) f(x)` over `[-2, x]` after substituting
    /// `x = 2 sin t`, which removes the square-root endpoint singularity.
    fn semicircle_integral(g: &dyn Fn(f64) -> f64, upper: f64) -> f64 {
        let t1 = (upper / 2.0).clamp(-1.0, 1.0).asin();
        let h = |t: f64| {
            let c = t.cos();
            g(2.0 * t.sin()) * 2.0 * c * c / PI
        };
        // Split first so that no initial Simpson panel sees only zeros.
        let t0 = -PI / 2.0;
        let pieces = 16;
        let w = (t1 - t0) / pieces as f64;
        (0..pieces).map(|i| adaptive_simpson(&h, t0 + i as f64 * w, t0 + (i + 1) as f64 * w, 1e-15)).sum()
    }

    fn random_symmetric(n: usize, seed: u64) -> SquareMatrix {
        let mut rng = rng_from_seed(seed);
        let mut m = SquareMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let v: f64 = rng.random_range(-1.0..1.0);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        m
    }

    #[test]
    fn catalan_values() {
        let expected = [1u64, 1, 2, 5, 14, 42, 132, 429];
        for (m, e) in expected.iter().enumerate() {
            assert_eq!(catalan(m).unwrap(), *e);
        }
        assert_eq!(catalan(30).unwrap(), 3_814_986_502_092_304);
        assert!(matches!(catalan(31), Err(Error::Overflow(_))));
    }

    #[test]
    fn semicircle_moments() {
        assert_eq!(semicircle_moment(0), 1.0);
        assert_eq!(semicircle_moment(1), 0.0);
        assert_eq!(semicircle_moment(2), 1.0);
        assert_eq!(semicircle_moment(6), 5.0);
        for k in 0..=5usize {
            let q = semicircle_integral(&|x| x.powi(2 * k as i32), 2.0);
            assert!((q - semicircle_moment(2 * k)).abs() <= 1e-8, "k={k}: {q}");
        }
        assert!((semicircle_integral(&|_| 1.0, 2.0) - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn cdf_values_and_quadrature() {
        assert_eq!(semicircle_cdf(0.0), 0.5);
        assert_eq!(semicircle_cdf(2.0), 1.0);
        assert_eq!(semicircle_cdf(-2.0), 0.0);
        assert_eq!(semicircle_cdf(-7.0), 0.0);
        let q = semicircle_integral(&|_| 1.0, 1.0);
        assert!((semicircle_cdf(1.0) - q).abs() <= 1e-10);
        let r = SemicircleRef;
        assert_eq!(r.cdf(0.3), semicircle_cdf(0.3));
        assert_eq!(r.density(3.0), 0.0);
    }

    #[test]
    fn cdf_monotone_and_matches_density_on_grid() {
        // Cumulative Simpson integration of the density between grid points
        // in the sine substitution, compared against the closed form.
        let points = 10_000;
        let xs: Vec<f64> = (0..points).map(|i| -2.5 + 5.0 * i as f64 / (points - 1) as f64).collect();
        let mut prev = -1.0;
        let mut acc = 0.0;
        let mut last_t = -PI / 2.0;
        let h = |t: f64| {
            let c = t.cos();
            2.0 * c * c / PI
        };
        for &x in &xs {
            let f = semicircle_cdf(x);
            assert!(f >= prev);
            prev = f;
            let t = (x / 2.0).clamp(-1.0, 1.0).asin();
            if t > last_t {
                acc += adaptive_simpson(&h, last_t, t, 1e-15);
                last_t = t;
            }
            assert!((f - acc).abs() <= 1e-8, "x={x}: {f} vs {acc}");
        }
    }

    #[test]
    fn esd_moments() {
        let s = SpectralSample::from_eigenvalues(vec![1.0, -1.0]);
        assert_eq!(s.eigenvalues, vec![-1.0, 1.0]);
        assert_eq!(esd_moment(&s, 0), 1.0);
        assert_eq!(esd_moment(&s, 2), 1.0);
        let m = random_symmetric(6, 11);
        let s = eigenvalues(&m).unwrap();
        let m2 = m.matmul(&m).unwrap();
        let m4 = m2.matmul(&m2).unwrap();
        let m4_alt = m.matmul(&m.matmul(&m2).unwrap()).unwrap();
        assert!((m4.trace() - m4_alt.trace()).abs() < 1e-12);
        let exact = m4.trace() / 6.0;
        assert!((esd_moment(&s, 4) - exact).abs() <= 1e-8 * exact.abs());
    }

    #[test]
    fn trace_identities() {
        for (n, seed) in [(1, 1), (5, 2), (32, 3), (100, 4), (256, 5)] {
            let m = random_symmetric(n, seed);
            let s = eigenvalues(&m).unwrap();
            assert_eq!(s.n, n);
            assert!(s.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
            let nf = n as f64;
            let tr = m.trace();
            assert!((esd_moment(&s, 1) * nf - tr).abs() <= 1e-8 * tr.abs().max(1.0));
            let fro = m.frobenius_norm_sq();
            assert!((esd_moment(&s, 2) * nf - fro).abs() <= 1e-8 * fro);
        }
    }

    #[test]
    fn kolmogorov_examples() {
        assert_eq!(kolmogorov_distance(&SpectralSample::from_eigenvalues(vec![0.0])), 0.5);
        for n in [1usize, 2, 10, 333] {
            // Quantiles by bisection on the closed-form cdf.
            let q: Vec<f64> = (0..n)
                .map(|i| {
                    let target = (i as f64 + 0.5) / n as f64;
                    let (mut lo, mut hi) = (-2.0f64, 2.0f64);
                    for _ in 0..200 {
                        let mid = 0.5 * (lo + hi);
                        if semicircle_cdf(mid) < target {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                    }
                    0.5 * (lo + hi)
                })
                .collect();
            let d = kolmogorov_distance(&SpectralSample::from_eigenvalues(q));
            assert!((d - 0.5 / n as f64).abs() < 1e-12, "n={n}: {d}");
        }
        let far = SpectralSample::from_eigenvalues(vec![10.0, 11.0]);
        assert_eq!(kolmogorov_distance(&far), 1.0);
    }

    #[test]
    fn spectrum_of_scaled_band_wigner_is_near_semicircle() {
        use crate::bandmatrix::{build_x, BandSpec};
        use crate::ensembles::{Scheme, WignerDist};
        let n = 400;
        let sample = Scheme::Wigner { dist: WignerDist::StandardNormal }.sample(n, 3).unwrap();
        let x = build_x(&sample, &BandSpec::new(n, 201).unwrap()).unwrap();
        let s = eigenvalues(&x.values).unwrap();
        assert!(kolmogorov_distance(&s) < 0.05);
        assert!((esd_moment(&s, 2) - 1.0).abs() < 0.05);
    }
}
