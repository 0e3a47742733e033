//! Dense symmetric eigensolver: Householder reduction to tridiagonal form
//! followed by implicitly shifted QL iteration.
//!
//! The reduction works on the upper triangle in row-major order so that
//! every inner loop runs over a contiguous row. The rank-two update of
//! step `k` is deferred and fused with the matrix-vector product of step
//! `k + 1`, so each step streams the trailing triangle once.

use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;

/// Tridiagonal form `Q^T A Q`: diagonal `d`, off-diagonal `e` (`e[i]`
/// couples `i` and `i + 1`, last entry zero).
struct Tridiagonal {
    d: Vec<f64>,
    e: Vec<f64>,
    /// Reflectors (row `k` holds `v_k` in columns `k+1..n`) and scalars,
    /// kept only when eigenvectors are wanted.
    reflectors: Option<(Vec<f64>, Vec<f64>)>,
}

#[inline]
#[allow(clippy::needless_range_loop)]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let len = a.len().min(b.len());
    let (a, b) = (&a[..len], &b[..len]);
    let mut acc = [0.0f64; 4];
    let chunks = len / 4;
    for c in 0..chunks {
        for l in 0..4 {
            acc[l] += a[4 * c + l] * b[4 * c + l];
        }
    }
    let mut tail = 0.0;
    for j in 4 * chunks..len {
        tail += a[j] * b[j];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// Applies the pending update `row -= vi * w + wi * v` and accumulates the
/// product with `x`: returns `row . x` and adds `xi * row` to `p`.
#[inline]
#[allow(clippy::too_many_arguments, clippy::needless_range_loop)]
fn fused_row(row: &mut [f64], vp: &[f64], wp: &[f64], x: &[f64], p: &mut [f64], vpi: f64, wpi: f64, xi: f64) -> f64 {
    let len = row.len();
    let (vp, wp, x, p) = (&vp[..len], &wp[..len], &x[..len], &mut p[..len]);
    let mut acc = [0.0f64; 4];
    let chunks = len / 4;
    for c in 0..chunks {
        for l in 0..4 {
            let j = 4 * c + l;
            let a = row[j] - (vpi * wp[j] + wpi * vp[j]);
            row[j] = a;
            acc[l] += a * x[j];
            p[j] += a * xi;
        }
    }
    let mut tail = 0.0;
    for j in 4 * chunks..len {
        let a = row[j] - (vpi * wp[j] + wpi * vp[j]);
        row[j] = a;
        tail += a * x[j];
        p[j] += a * xi;
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

fn tridiagonalize(matrix: &SquareMatrix, keep_reflectors: bool) -> Tridiagonal {
    let n = matrix.dim();
    let mut a = matrix.as_slice().to_vec();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    let mut taus = vec![0.0; n];
    // Pending rank-two update from the previous step, indexed globally.
    let mut vp = vec![0.0; n];
    let mut wp = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    for k in 0..n.saturating_sub(1) {
        // Row k is fully updated here. Build the reflector from a[k][k+1..].
        let x = &a[k * n + k + 1..k * n + n];
        let alpha = x[0];
        let xnorm = dot(&x[1..], &x[1..]).sqrt();
        let (tau, beta) = if xnorm == 0.0 {
            v[k + 1..].iter_mut().for_each(|t| *t = 0.0);
            v[k + 1] = 1.0;
            (0.0, alpha)
        } else {
            let beta = -alpha.signum() * alpha.hypot(xnorm);
            let scale = 1.0 / (alpha - beta);
            v[k + 1] = 1.0;
            for j in k + 2..n {
                v[j] = a[k * n + j] * scale;
            }
            ((beta - alpha) / beta, beta)
        };
        d[k] = a[k * n + k];
        e[k] = beta;
        taus[k] = tau;
        if keep_reflectors {
            a[k * n + k + 1..k * n + n].copy_from_slice(&v[k + 1..n]);
        }

        // One pass over rows k+1..n: finish the previous update, then
        // accumulate p = T v on the updated trailing triangle.
        p[k + 1..].iter_mut().for_each(|t| *t = 0.0);
        for i in k + 1..n {
            let (vpi, wpi, vi) = (vp[i], wp[i], v[i]);
            let rowbase = i * n;
            let diag = a[rowbase + i] - 2.0 * vpi * wpi;
            a[rowbase + i] = diag;
            let (row, rest_p) = (&mut a[rowbase + i + 1..rowbase + n], &mut p[i + 1..n]);
            let s = fused_row(row, &vp[i + 1..n], &wp[i + 1..n], &v[i + 1..n], rest_p, vpi, wpi, vi);
            p[i] += diag * vi + s;
        }
        if tau == 0.0 {
            vp[k + 1..].iter_mut().for_each(|t| *t = 0.0);
            wp[k + 1..].iter_mut().for_each(|t| *t = 0.0);
        } else {
            p[k + 1..].iter_mut().for_each(|t| *t *= tau);
            let kk = 0.5 * tau * dot(&p[k + 1..], &v[k + 1..]);
            for j in k + 1..n {
                vp[j] = v[j];
                wp[j] = p[j] - kk * v[j];
            }
        }
        // Row k+1 starts the next step; bring it up to date now.
        let i = k + 1;
        let (vpi, wpi) = (vp[i], wp[i]);
        for j in i..n {
            a[i * n + j] -= vpi * wp[j] + wpi * vp[j];
        }
        vp[i] = 0.0;
        wp[i] = 0.0;
    }
    if n > 0 {
        d[n - 1] = a[(n - 1) * n + n - 1];
    }
    let reflectors = keep_reflectors.then_some((a, taus));
    Tridiagonal { d, e, reflectors }
}

/// `Q^T = H_{n-2} ... H_0` as a row-major matrix.
fn householder_transpose(n: usize, store: &[f64], taus: &[f64]) -> Vec<f64> {
    let mut m = SquareMatrix::identity(n).into_vec();
    let mut wrow = vec![0.0; n];
    for k in 0..n.saturating_sub(1) {
        let tau = taus[k];
        if tau == 0.0 {
            continue;
        }
        let v = &store[k * n + k + 1..k * n + n];
        wrow.iter_mut().for_each(|t| *t = 0.0);
        for (off, &vi) in v.iter().enumerate() {
            let row = &m[(k + 1 + off) * n..(k + 2 + off) * n];
            for (w, r) in wrow.iter_mut().zip(row) {
                *w += vi * r;
            }
        }
        for (off, &vi) in v.iter().enumerate() {
            let f = tau * vi;
            let row = &mut m[(k + 1 + off) * n..(k + 2 + off) * n];
            for (r, w) in row.iter_mut().zip(&wrow) {
                *r -= f * w;
            }
        }
    }
    m
}

/// Implicit QL on a symmetric tridiagonal matrix. When `zt` is given, its
/// rows are rotated along (they end up as eigenvectors of the original
/// matrix when `zt` starts as `Q^T`).
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], mut zt: Option<&mut [f64]>) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    let cap = 30 * n;
    let mut total = 0usize;
    e[n - 1] = 0.0;
    for l in 0..n {
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            total += 1;
            if total > cap {
                return Err(Error::NoConvergence { index: l, iterations: total });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0f64, 1.0f64, 0.0f64);
            let mut early = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    early = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = zt.as_deref_mut() {
                    let (lo, hi) = z.split_at_mut((i + 1) * n);
                    let zi = &mut lo[i * n..];
                    let zi1 = &mut hi[..n];
                    for (a, b) in zi.iter_mut().zip(zi1.iter_mut()) {
                        let f = *b;
                        *b = s * *a + c * f;
                        *a = c * *a - s * f;
                    }
                }
            }
            if early {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

fn check_symmetric(matrix: &SquareMatrix) -> Result<()> {
    let (gap, i, j) = matrix.asymmetry();
    if gap > 1e-12 * matrix.max_abs().max(1.0) {
        return Err(Error::NotSymmetric { i, j, gap });
    }
    Ok(())
}

/// Eigenvalues in ascending order.
pub fn symmetric_eigenvalues(matrix: &SquareMatrix) -> Result<Vec<f64>> {
    check_symmetric(matrix)?;
    let mut t = tridiagonalize(matrix, false);
    tridiagonal_ql(&mut t.d, &mut t.e, None)?;
    t.d.sort_by(f64::total_cmp);
    Ok(t.d)
}

/// Eigenvalues in ascending order and the matching orthonormal
/// eigenvectors as the rows of the returned matrix.
pub fn symmetric_eigen(matrix: &SquareMatrix) -> Result<(Vec<f64>, SquareMatrix)> {
    check_symmetric(matrix)?;
    let n = matrix.dim();
    let mut t = tridiagonalize(matrix, true);
    let (store, taus) = t.reflectors.take().expect("reflectors kept");
    let mut zt = householder_transpose(n, &store, &taus);
    tridiagonal_ql(&mut t.d, &mut t.e, Some(&mut zt))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| t.d[a].total_cmp(&t.d[b]));
    let values = order.iter().map(|&i| t.d[i]).collect();
    let mut vecs = Vec::with_capacity(n * n);
    for &i in &order {
        vecs.extend_from_slice(&zt[i * n..(i + 1) * n]);
    }
    Ok((values, SquareMatrix::from_vec(n, vecs)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use rand::Rng;

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

    /// Determinant by cofactor expansion along the first row.
    fn cofactor_det(m: &[Vec<f64>]) -> f64 {
        let n = m.len();
        if n == 1 {
            return m[0][0];
        }
        (0..n)
            .map(|c| {
                let minor: Vec<Vec<f64>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, v)| *v).collect())
                    .collect();
                let sign = if c % 2 == 0 { 1.0 } else { -1.0 };
                sign * m[0][c] * cofactor_det(&minor)
            })
            .sum()
    }

    #[test]
    fn two_by_two_and_diagonal() {
        let m = SquareMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let v = symmetric_eigenvalues(&m).unwrap();
        assert!((v[0] + 1.0).abs() < 1e-15 && (v[1] - 1.0).abs() < 1e-15);
        let diag = [3.0, -1.0, 2.5, 0.0, -7.0];
        let m = SquareMatrix::from_fn(5, |i, j| if i == j { diag[i] } else { 0.0 });
        let mut sorted = diag.to_vec();
        sorted.sort_by(f64::total_cmp);
        assert_eq!(symmetric_eigenvalues(&m).unwrap(), sorted);
        assert!(symmetric_eigenvalues(&SquareMatrix::zeros(0)).unwrap().is_empty());
        assert_eq!(symmetric_eigenvalues(&SquareMatrix::identity(1)).unwrap(), vec![1.0]);
    }

    #[test]
    fn trace_and_determinant_against_cofactors() {
        for seed in 0..3 {
            let m = random_symmetric(8, seed);
            let v = symmetric_eigenvalues(&m).unwrap();
            assert!((v.iter().sum::<f64>() - m.trace()).abs() < 1e-10);
            let rows: Vec<Vec<f64>> = (0..8).map(|i| m.row(i).to_vec()).collect();
            let det = cofactor_det(&rows);
            let prod: f64 = v.iter().product();
            assert!((prod - det).abs() <= 1e-8 * det.abs(), "{prod} vs {det}");
        }
    }

    #[test]
    fn rejects_asymmetric_input() {
        let m = SquareMatrix::from_rows(&[vec![0.0, 1.0], vec![1.1, 0.0]]).unwrap();
        assert!(matches!(symmetric_eigenvalues(&m), Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn eigenvectors_orthonormal_with_small_residuals() {
        for (n, seed) in [(1, 1), (2, 2), (7, 3), (64, 4), (512, 5)] {
            let m = random_symmetric(n, seed);
            let (vals, vecs) = symmetric_eigen(&m).unwrap();
            let plain = symmetric_eigenvalues(&m).unwrap();
            for (a, b) in vals.iter().zip(&plain) {
                assert!((a - b).abs() < 1e-10);
            }
            let gram = vecs.matmul(&vecs.transpose()).unwrap();
            let dev = SquareMatrix::from_fn(n, |i, j| gram[(i, j)] - if i == j { 1.0 } else { 0.0 }).max_abs();
            assert!(dev <= 1e-8, "n={n}: {dev}");
            let norm = m.frobenius_norm_sq().sqrt();
            let mut rng = rng_from_seed(seed + 100);
            for _ in 0..10 {
                let idx = rng.random_range(0..n);
                let v = vecs.row(idx);
                let mv = m.mul_vec(v);
                let res: f64 = mv.iter().zip(v).map(|(a, b)| (a - vals[idx] * b).powi(2)).sum::<f64>().sqrt();
                assert!(res <= 1e-8 * norm.max(1.0), "n={n}: residual {res}");
            }
        }
    }

    #[test]
    fn degenerate_and_banded_inputs() {
        // Repeated eigenvalues and an already tridiagonal matrix.
        let m = SquareMatrix::from_fn(6, |i, j| if i == j { 2.0 } else { 1.0 });
        let v = symmetric_eigenvalues(&m).unwrap();
        for x in &v[..5] {
            assert!((x - 1.0).abs() < 1e-12);
        }
        assert!((v[5] - 7.0).abs() < 1e-12);
        let m = SquareMatrix::from_fn(5, |i, j| {
            if i == j {
                2.0
            } else if i.abs_diff(j) == 1 {
                -1.0
            } else {
                0.0
            }
        });
        let v = symmetric_eigenvalues(&m).unwrap();
        for (i, x) in v.iter().enumerate() {
            let exact = 2.0 - 2.0 * ((i + 1) as f64 * std::f64::consts::PI / 6.0).cos();
            assert!((x - exact).abs() < 1e-12);
        }
    }
}
