//! Small dense helpers over `nalgebra` shared by the geometry kernels.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{GeometryError, Result};

/// Condition estimate above which a metric is treated as singular.
pub const MAX_CONDITION: f64 = 1e12;

pub fn to_matrix(data: &[f64], n: usize) -> DMatrix<f64> {
    DMatrix::from_row_slice(n, n, data)
}

fn one_norm(m: &DMatrix<f64>) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Inverse of a square row-major matrix by pivoted LU, rejecting matrices whose
/// 1-norm condition number exceeds [`MAX_CONDITION`].
pub fn invert(data: &[f64], n: usize) -> Result<Vec<f64>> {
    let m = to_matrix(data, n);
    let inv = m
        .clone()
        .lu()
        .try_inverse()
        .ok_or(GeometryError::SingularMetric {
            condition: f64::INFINITY,
        })?;
    let condition = one_norm(&m) * one_norm(&inv);
    if !condition.is_finite() || condition > MAX_CONDITION {
        return Err(GeometryError::SingularMetric { condition });
    }
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            out.push(inv[(i, j)]);
        }
    }
    Ok(out)
}

/// `g(u, v)` for a row-major `n × n` bilinear form.
#[inline]
pub fn bilinear(g: &[f64], u: &[f64], v: &[f64]) -> f64 {
    let n = u.len();
    let mut s = 0.0;
    for i in 0..n {
        if u[i] == 0.0 {
            continue;
        }
        for j in 0..n {
            s += u[i] * g[i * n + j] * v[j];
        }
    }
    s
}

/// `A v` for a row-major `n × n` matrix.
pub fn mat_vec(a: &[f64], v: &[f64]) -> Vec<f64> {
    let n = v.len();
    (0..n)
        .map(|i| (0..n).map(|j| a[i * n + j] * v[j]).sum())
        .collect()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Singular values of `a` (unordered).
pub fn singular_values(a: &DMatrix<f64>) -> DVector<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return DVector::zeros(0);
    }
    a.clone().singular_values()
}

/// Numerical rank with singular values below `rel_tol · σ_max` treated as zero.
pub fn rank(a: &DMatrix<f64>, rel_tol: f64) -> usize {
    let s = singular_values(a);
    let smax = s.iter().fold(0.0_f64, |m, x| m.max(*x));
    if smax == 0.0 {
        return 0;
    }
    s.iter().filter(|x| **x > rel_tol * smax).count()
}

/// Number of singular values above the absolute threshold `tol`.
pub fn rank_abs(a: &DMatrix<f64>, tol: f64) -> usize {
    singular_values(a).iter().filter(|x| **x > tol).count()
}

/// Orthonormal basis (columns) of `ker a`.
pub fn null_space(a: &DMatrix<f64>, rel_tol: f64) -> DMatrix<f64> {
    let (m, n) = a.shape();
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }
    // Pad with zero rows so the SVD returns a full right factor.
    let rows = m.max(n);
    let mut padded = DMatrix::zeros(rows, n);
    padded.view_mut((0, 0), (m, n)).copy_from(a);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let smax = svd.singular_values.iter().fold(0.0_f64, |acc, x| acc.max(*x));
    let cols: Vec<DVector<f64>> = (0..n)
        .filter(|&k| smax == 0.0 || svd.singular_values[k] <= rel_tol * smax)
        .map(|k| v_t.row(k).transpose())
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(n, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Orthonormal basis of the Euclidean orthogonal complement of `Im a`.
pub fn complement_of_image(a: &DMatrix<f64>, rel_tol: f64) -> DMatrix<f64> {
    if a.ncols() == 0 {
        return DMatrix::identity(a.nrows(), a.nrows());
    }
    null_space(&a.transpose(), rel_tol)
}

/// A `g`-orthonormal frame for the span of `basis` (vectors of length `n`).
///
/// Returns the frame vectors and their signs `g(e, e) ∈ {−1, +1}`. The form
/// must be nondegenerate on the span.
pub fn g_orthonormal_frame(g: &[f64], basis: &[Vec<f64>]) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    let k = basis.len();
    if k == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    let gram = DMatrix::from_fn(k, k, |a, b| bilinear(g, &basis[a], &basis[b]));
    let scale = gram.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let eig = SymmetricEigen::new(gram);
    let n = basis[0].len();
    let mut frame = Vec::with_capacity(k);
    let mut signs = Vec::with_capacity(k);
    for c in 0..k {
        let d = eig.eigenvalues[c];
        if d.abs() <= 1e-12 * scale.max(f64::MIN_POSITIVE) {
            return Err(GeometryError::SingularMetric {
                condition: f64::INFINITY,
            });
        }
        let s = 1.0 / d.abs().sqrt();
        let mut e = alloc::vec![0.0; n];
        for (a, b) in basis.iter().enumerate() {
            axpy(eig.eigenvectors[(a, c)] * s, b, &mut e);
        }
        frame.push(e);
        signs.push(d.signum());
    }
    Ok((frame, signs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn invert_rejects_singular_and_ill_conditioned() {
        assert!(invert(&[1.0, 2.0, 2.0, 4.0], 2).is_err());
        assert!(invert(&[1.0, 0.0, 0.0, 1e-14], 2).is_err());
        let inv = invert(&[2.0, 0.0, 0.0, -4.0], 2).unwrap();
        assert_eq!(inv, vec![0.5, 0.0, 0.0, -0.25]);
    }

    #[test]
    fn null_space_of_wide_matrix() {
        let a = DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 0.0]);
        let k = null_space(&a, 1e-10);
        assert_eq!(k.ncols(), 2);
        assert!((&a * &k).amax() < 1e-12);
    }

    #[test]
    fn lorentzian_frame_has_one_negative_sign() {
        let g = [-1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0];
        let basis = vec![vec![1.0, 0.5, 0.0], vec![0.0, 1.0, 0.0]];
        let (frame, signs) = g_orthonormal_frame(&g, &basis).unwrap();
        assert_eq!(signs.iter().filter(|s| **s < 0.0).count(), 1);
        for a in 0..2 {
            for b in 0..2 {
                let want = if a == b { signs[a] } else { 0.0 };
                assert!((bilinear(&g, &frame[a], &frame[b]) - want).abs() < 1e-12);
            }
        }
    }
}
