//! Dense nonsymmetric eigenvalues: balancing, Householder reduction to
//! Hessenberg form and Francis double-shift QR, plus inverse iteration for
//! eigenvectors of real eigenvalues.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{GeometryError, Result};

const MAX_SWEEPS_PER_EIGENVALUE: usize = 60;

/// A complex eigenvalue `(re, im)`.
pub type Complex = (f64, f64);

fn balance(a: &mut DMatrix<f64>) {
    const RADIX: f64 = 2.0;
    let n = a.nrows();
    let sqrdx = RADIX * RADIX;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].abs();
                    r += a[(i, j)].abs();
                }
            }
            if c != 0.0 && r != 0.0 {
                let mut g = r / RADIX;
                let mut f = 1.0;
                let s = c + r;
                while c < g {
                    f *= RADIX;
                    c *= sqrdx;
                }
                g = r * RADIX;
                while c > g {
                    f /= RADIX;
                    c /= sqrdx;
                }
                if (c + r) / f < 0.95 * s {
                    done = false;
                    let g = 1.0 / f;
                    for j in 0..n {
                        a[(i, j)] *= g;
                    }
                    for j in 0..n {
                        a[(j, i)] *= f;
                    }
                }
            }
        }
    }
}

/// Householder reduction to upper Hessenberg form (similarity transform).
pub fn hessenberg(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let mut h = a.clone();
    if n < 3 {
        return h;
    }
    for k in 0..n - 2 {
        let alpha_norm: f64 = (k + 1..n).map(|i| h[(i, k)] * h[(i, k)]).sum::<f64>().sqrt();
        if alpha_norm == 0.0 {
            continue;
        }
        let alpha = if h[(k + 1, k)] > 0.0 { -alpha_norm } else { alpha_norm };
        let mut v = vec![0.0; n - k - 1];
        v[0] = h[(k + 1, k)] - alpha;
        for i in k + 2..n {
            v[i - k - 1] = h[(i, k)];
        }
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let beta = 2.0 / vnorm2;
        // H ← (I − β v vᵀ) H
        for j in 0..n {
            let s: f64 = (0..v.len()).map(|i| v[i] * h[(k + 1 + i, j)]).sum::<f64>() * beta;
            for i in 0..v.len() {
                h[(k + 1 + i, j)] -= s * v[i];
            }
        }
        // H ← H (I − β v vᵀ)
        for i in 0..n {
            let s: f64 = (0..v.len()).map(|j| h[(i, k + 1 + j)] * v[j]).sum::<f64>() * beta;
            for j in 0..v.len() {
                h[(i, k + 1 + j)] -= s * v[j];
            }
        }
        for i in k + 2..n {
            h[(i, k)] = 0.0;
        }
    }
    h
}

fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Eigenvalues of an upper Hessenberg matrix by the Francis double-shift QR
/// iteration with exceptional shifts. The input is destroyed.
pub fn hqr(a: &mut DMatrix<f64>) -> Result<Vec<Complex>> {
    let n = a.nrows();
    let mut wr = vec![0.0; n];
    let mut wi = vec![0.0; n];
    if n == 0 {
        return Ok(Vec::new());
    }
    let eps = f64::EPSILON;
    let mut anorm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += a[(i, j)].abs();
        }
    }
    let mut nn = n as isize - 1;
    let mut t = 0.0;
    let (mut p, mut q, mut r, mut s, mut w, mut x, mut y, mut z);
    let mut total = 0usize;
    while nn >= 0 {
        let mut its = 0usize;
        loop {
            let nu = nn as usize;
            let mut l = nu;
            while l > 0 {
                s = a[(l - 1, l - 1)].abs() + a[(l, l)].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[(l, l - 1)].abs() <= eps * s {
                    a[(l, l - 1)] = 0.0;
                    break;
                }
                l -= 1;
            }
            x = a[(nu, nu)];
            if l == nu {
                wr[nu] = x + t;
                wi[nu] = 0.0;
                nn -= 1;
                break;
            }
            y = a[(nu - 1, nu - 1)];
            w = a[(nu, nu - 1)] * a[(nu - 1, nu)];
            if l == nu - 1 {
                p = 0.5 * (y - x);
                q = p * p + w;
                z = q.abs().sqrt();
                x += t;
                if q >= 0.0 {
                    z = p + sign(z, p);
                    wr[nu - 1] = x + z;
                    wr[nu] = x + z;
                    if z != 0.0 {
                        wr[nu] = x - w / z;
                    }
                    wi[nu - 1] = 0.0;
                    wi[nu] = 0.0;
                } else {
                    wr[nu - 1] = x + p;
                    wr[nu] = x + p;
                    wi[nu - 1] = -z;
                    wi[nu] = z;
                }
                nn -= 2;
                break;
            }
            if its >= MAX_SWEEPS_PER_EIGENVALUE {
                return Err(GeometryError::EigensolverFailure { iterations: total });
            }
            if its == 10 || its == 20 || its == 40 {
                t += x;
                for i in 0..=nu {
                    a[(i, i)] -= x;
                }
                s = a[(nu, nu - 1)].abs() + a[(nu - 1, nu - 2)].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;
            total += 1;
            let mut m = nu - 2;
            loop {
                z = a[(m, m)];
                r = x - z;
                s = y - z;
                p = (r * s - w) / a[(m + 1, m)] + a[(m, m + 1)];
                q = a[(m + 1, m + 1)] - z - r - s;
                r = a[(m + 2, m + 1)];
                s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = a[(m, m - 1)].abs() * (q.abs() + r.abs());
                let v = p.abs() * (a[(m - 1, m - 1)].abs() + z.abs() + a[(m + 1, m + 1)].abs());
                if u <= eps * v {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=nu {
                a[(i, i - 2)] = 0.0;
                if i != m + 2 {
                    a[(i, i - 3)] = 0.0;
                }
            }
            let mut k = m;
            while k < nu {
                if k != m {
                    p = a[(k, k - 1)];
                    q = a[(k + 1, k - 1)];
                    r = 0.0;
                    if k + 1 != nu {
                        r = a[(k + 2, k - 1)];
                    }
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                s = sign((p * p + q * q + r * r).sqrt(), p);
                if s != 0.0 {
                    if k == m {
                        if l != m {
                            a[(k, k - 1)] = -a[(k, k - 1)];
                        }
                    } else {
                        a[(k, k - 1)] = -s * x;
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nu {
                        p = a[(k, j)] + q * a[(k + 1, j)];
                        if k + 1 != nu {
                            p += r * a[(k + 2, j)];
                            a[(k + 2, j)] -= p * z;
                        }
                        a[(k + 1, j)] -= p * y;
                        a[(k, j)] -= p * x;
                    }
                    let mmin = if nu < k + 3 { nu } else { k + 3 };
                    for i in l..=mmin {
                        p = x * a[(i, k)] + y * a[(i, k + 1)];
                        if k + 1 != nu {
                            p += z * a[(i, k + 2)];
                            a[(i, k + 2)] -= p * r;
                        }
                        a[(i, k + 1)] -= p * q;
                        a[(i, k)] -= p;
                    }
                }
                k += 1;
            }
            if l + 1 >= nu {
                break;
            }
        }
    }
    Ok(wr.into_iter().zip(wi).collect())
}

/// All eigenvalues of a real square matrix.
pub fn eigenvalues(a: &DMatrix<f64>) -> Result<Vec<Complex>> {
    let mut b = a.clone();
    balance(&mut b);
    let mut h = hessenberg(&b);
    hqr(&mut h)
}

/// Eigenvector for the real eigenvalue `lambda` by shifted inverse iteration,
/// normalized to unit max-norm.
pub fn inverse_iteration(a: &DMatrix<f64>, lambda: f64) -> Result<Vec<f64>> {
    let n = a.nrows();
    let scale = a.amax().max(1.0);
    let mut shift = lambda - 1e-10 * scale;
    let mut lu = None;
    for _ in 0..8 {
        let m = a - DMatrix::identity(n, n) * shift;
        let f = m.lu();
        if f.is_invertible() {
            lu = Some(f);
            break;
        }
        shift -= 1e-9 * scale;
    }
    let lu = lu.ok_or(GeometryError::EigensolverFailure { iterations: 0 })?;
    let mut x = DVector::from_fn(n, |i, _| 1.0 + 0.01 * ((i * 7919) % 13) as f64);
    for it in 0..50 {
        let y = lu.solve(&x).ok_or(GeometryError::EigensolverFailure { iterations: it })?;
        let k = y.iamax();
        let y = &y / y[k];
        let change = (&y - &x).amax();
        x = y;
        if change < 1e-13 {
            break;
        }
    }
    Ok(x.iter().copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sorted(mut v: Vec<Complex>) -> Vec<Complex> {
        v.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.partial_cmp(&b.1).unwrap()));
        v
    }

    #[test]
    fn hessenberg_is_similar() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = DMatrix::from_fn(7, 7, |_, _| rng.gen_range(-1.0..1.0));
        let h = hessenberg(&a);
        for i in 0..7usize {
            for j in 0..i.saturating_sub(1) {
                assert_eq!(h[(i, j)], 0.0);
            }
        }
        assert!((h.trace() - a.trace()).abs() < 1e-12);
        assert!(((&h * &h).trace() - (&a * &a).trace()).abs() < 1e-11);
    }

    #[test]
    fn matches_reference_solver() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [1, 2, 3, 5, 12, 40] {
            let a = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
            let ours = sorted(eigenvalues(&a).unwrap());
            let theirs = sorted(a.complex_eigenvalues().iter().map(|c| (c.re, c.im)).collect());
            for (x, y) in ours.iter().zip(&theirs) {
                assert!((x.0 - y.0).abs() < 1e-9 && (x.1 - y.1).abs() < 1e-9, "{n}: {x:?} vs {y:?}");
            }
        }
    }

    #[test]
    fn rotation_has_imaginary_pair() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let ev = sorted(eigenvalues(&a).unwrap());
        assert_eq!(ev, vec![(0.0, -1.0), (0.0, 1.0)]);
    }

    #[test]
    fn inverse_iteration_recovers_vector() {
        let a = DMatrix::from_row_slice(3, 3, &[2.0, 1.0, 0.0, 0.0, 3.0, 1.0, 0.0, 0.0, 5.0]);
        let v = inverse_iteration(&a, 3.0).unwrap();
        let av = &a * DVector::from_vec(v.clone());
        for i in 0..3 {
            assert!((av[i] - 3.0 * v[i]).abs() < 1e-9);
        }
    }
}
