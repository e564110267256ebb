//! Finite-dimensional checks of the surjectivity criterion for `T ⊕ S`, the
//! codimension formula for preimages, and the kernel projection of
//! `ker(T ⊕ S)`.

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{GeometryError, Result};
use crate::linalg::{complement_of_image, null_space, rank, rank_abs, singular_values};

/// Singular values below `RANK_TOL · σ_max` count as zero.
pub const RANK_TOL: f64 = 1e-10;

/// `T: ℝ^e → ℝ^h` and `S: ℝ^f → ℝ^h` with the Euclidean inner product on `ℝ^h`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorTriple {
    pub t: DMatrix<f64>,
    pub s: DMatrix<f64>,
}

impl OperatorTriple {
    pub fn new(t: DMatrix<f64>, s: DMatrix<f64>) -> Result<Self> {
        if t.nrows() != s.nrows() {
            return Err(GeometryError::DimensionMismatch {
                expected: t.nrows(),
                found: s.nrows(),
            });
        }
        Ok(Self { t, s })
    }

    pub fn h(&self) -> usize {
        self.t.nrows()
    }

    /// `[T | S]`.
    pub fn sum_matrix(&self) -> DMatrix<f64> {
        hcat(&self.t, &self.s)
    }
}

fn hcat(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(a.nrows(), a.ncols() + b.ncols());
    m.view_mut((0, 0), a.shape()).copy_from(a);
    m.view_mut((0, a.ncols()), b.shape()).copy_from(b);
    m
}

/// `T ⊕ S` is onto `ℝ^h`.
pub fn sum_surjective(tr: &OperatorTriple) -> bool {
    rank(&tr.sum_matrix(), RANK_TOL) == tr.h()
}

/// `(Im T)^⊥ ∩ (Im S)^⊥ = {0}`, decided by principal angles between the two
/// complements.
pub fn perp_intersection_trivial(tr: &OperatorTriple) -> bool {
    let p = complement_of_image(&tr.t, RANK_TOL);
    let r = complement_of_image(&tr.s, RANK_TOL);
    if p.ncols() == 0 || r.ncols() == 0 {
        return true;
    }
    let cosines = singular_values(&(p.transpose() * r));
    cosines.iter().all(|c| *c < 1.0 - RANK_TOL)
}

/// `ker Tᵀ ∩ ker Sᵀ = {0}`.
pub fn adjoint_kernels_trivial(tr: &OperatorTriple) -> bool {
    let stacked = tr.sum_matrix().transpose();
    null_space(&stacked, RANK_TOL).ncols() == 0
}

/// `(codim L⁻¹(S), codim S − codim(S + Im L))` for `L: ℝ^u → ℝ^v` and `S`
/// spanned by the columns of `s_basis`.
pub fn codim_formula_check(l: &DMatrix<f64>, s_basis: &DMatrix<f64>) -> Result<(usize, usize)> {
    if l.nrows() != s_basis.nrows() {
        return Err(GeometryError::DimensionMismatch {
            expected: l.nrows(),
            found: s_basis.nrows(),
        });
    }
    let s = s_basis.ncols();
    let rs = rank(s_basis, RANK_TOL);
    if rs < s {
        return Err(GeometryError::DependentBasis { rank: rs, columns: s });
    }
    let u = l.ncols();
    // {x : Lx ∈ S} ≅ ker [L | −S] since S has independent columns
    let pre = null_space(&hcat(l, &(-s_basis)), RANK_TOL).ncols();
    let lhs = u - pre;
    let rhs = rank(&hcat(s_basis, l), RANK_TOL) - s;
    Ok((lhs, rhs))
}

/// Kernel-projection bookkeeping for `M = ker(T ⊕ S)` and `Π(x, y) = x`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionReport {
    pub dim_m: usize,
    pub dim_ker_pi: usize,
    pub dim_ker_s: usize,
    pub rank_pi: usize,
    /// `dim T⁻¹(Im S)`.
    pub expected_image_dim: usize,
    pub index_pi: isize,
    pub index_s: isize,
    pub sum_surjective: bool,
    /// `dim ker Π|_M = dim ker S`.
    pub identity_a: bool,
    /// `Π|_M` maps onto `T⁻¹(Im S)`, injectively exactly when `ker S = {0}`.
    pub identity_b: bool,
    /// Equal indices when `T ⊕ S` is onto; vacuous otherwise.
    pub identity_c: bool,
}

impl ProjectionReport {
    pub fn holds(&self) -> bool {
        self.identity_a && self.identity_b && self.identity_c
    }
}

pub fn projection_regularity(tr: &OperatorTriple) -> ProjectionReport {
    let e = tr.t.ncols();
    let h = tr.h();
    let m_basis = null_space(&tr.sum_matrix(), RANK_TOL);
    let dim_m = m_basis.ncols();
    let rank_pi = if dim_m == 0 || e == 0 {
        0
    } else {
        // the basis is orthonormal, so an absolute threshold is scale-free
        rank_abs(&m_basis.rows(0, e).into_owned(), RANK_TOL)
    };
    let dim_ker_pi = dim_m - rank_pi;
    let rank_s = rank(&tr.s, RANK_TOL);
    let dim_ker_s = tr.s.ncols() - rank_s;
    let c = complement_of_image(&tr.s, RANK_TOL);
    let expected_image_dim = if c.ncols() == 0 {
        e
    } else {
        let scale = singular_values(&tr.t).iter().fold(0.0_f64, |m, x| m.max(*x));
        e - rank_abs(&(c.transpose() * &tr.t), RANK_TOL * scale.max(f64::MIN_POSITIVE))
    };
    let index_pi = dim_ker_pi as isize - (e - rank_pi) as isize;
    let index_s = dim_ker_s as isize - (h - rank_s) as isize;
    let surj = sum_surjective(tr);
    ProjectionReport {
        dim_m,
        dim_ker_pi,
        dim_ker_s,
        rank_pi,
        expected_image_dim,
        index_pi,
        index_s,
        sum_surjective: surj,
        identity_a: dim_ker_pi == dim_ker_s,
        identity_b: rank_pi == expected_image_dim && ((dim_ker_pi == 0) == (dim_ker_s == 0)),
        identity_c: !surj || index_pi == index_s,
    }
}

/// Random `rows × cols` matrix of rank at most `r`.
pub fn random_low_rank<R: Rng>(rng: &mut R, rows: usize, cols: usize, r: usize) -> DMatrix<f64> {
    let a = DMatrix::from_fn(rows, r, |_, _| rng.gen_range(-1.0..1.0));
    let b = DMatrix::from_fn(r, cols, |_, _| rng.gen_range(-1.0..1.0));
    a * b
}

/// Random triple with `h, e, f ≤ max_dim` and random ranks, so that both
/// surjective and non-surjective instances occur.
pub fn random_triple<R: Rng>(rng: &mut R, max_dim: usize) -> OperatorTriple {
    let h = rng.gen_range(1..=max_dim);
    let e = rng.gen_range(1..=max_dim);
    let f = rng.gen_range(1..=max_dim);
    let rt = rng.gen_range(0..=e.min(h));
    let rs = rng.gen_range(0..=f.min(h));
    OperatorTriple {
        t: random_low_rank(rng, h, e, rt),
        s: random_low_rank(rng, h, f, rs),
    }
}

/// Random `(L, S)` instance for the codimension formula; `S` has
/// independent columns.
pub fn random_codim_instance<R: Rng>(rng: &mut R, max_dim: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let v = rng.gen_range(1..=max_dim);
    let u = rng.gen_range(1..=max_dim);
    let s = rng.gen_range(0..=v);
    let rl = rng.gen_range(0..=u.min(v));
    (random_low_rank(rng, v, u, rl), random_low_rank(rng, v, s, s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn col(h: usize, i: usize) -> DMatrix<f64> {
        DMatrix::from_fn(h, 1, |r, _| if r == i { 1.0 } else { 0.0 })
    }

    #[test]
    fn small_cases() {
        let tr = OperatorTriple::new(col(2, 0), col(2, 0)).unwrap();
        assert!(!sum_surjective(&tr) && !perp_intersection_trivial(&tr) && !adjoint_kernels_trivial(&tr));
        let tr = OperatorTriple::new(col(2, 0), DMatrix::identity(2, 2)).unwrap();
        assert!(sum_surjective(&tr) && perp_intersection_trivial(&tr) && adjoint_kernels_trivial(&tr));
        let tr = OperatorTriple::new(DMatrix::zeros(3, 2), DMatrix::zeros(3, 2)).unwrap();
        assert!(!sum_surjective(&tr) && !perp_intersection_trivial(&tr));
        assert!(OperatorTriple::new(DMatrix::zeros(3, 2), DMatrix::zeros(2, 2)).is_err());
    }

    #[test]
    fn codim_small_cases() {
        let s = DMatrix::from_fn(4, 2, |r, c| if r == c { 1.0 } else { 0.0 });
        assert_eq!(codim_formula_check(&DMatrix::identity(4, 4), &s).unwrap(), (2, 2));
        assert_eq!(codim_formula_check(&DMatrix::zeros(4, 3), &s).unwrap(), (0, 0));
        let dep = DMatrix::from_fn(4, 2, |r, _| if r == 0 { 1.0 } else { 0.0 });
        assert!(matches!(
            codim_formula_check(&DMatrix::identity(4, 4), &dep),
            Err(GeometryError::DependentBasis { rank: 1, columns: 2 })
        ));
    }

    #[test]
    fn projection_cases() {
        let t = DMatrix::from_fn(2, 3, |r, c| if r == c { 1.0 } else { 0.0 });
        let inv = OperatorTriple::new(t.clone(), DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 0.0, 1.0])).unwrap();
        let r = projection_regularity(&inv);
        assert_eq!((r.dim_ker_pi, r.rank_pi), (0, 3));
        assert!(r.holds());
        let zero = OperatorTriple::new(t, DMatrix::zeros(2, 4)).unwrap();
        let r = projection_regularity(&zero);
        assert_eq!(r.dim_ker_pi, 4);
        assert!(r.holds());
    }

    #[test]
    fn random_batches_are_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut surj = 0;
        for _ in 0..300 {
            let tr = random_triple(&mut rng, 8);
            let a = sum_surjective(&tr);
            surj += a as usize;
            assert_eq!(a, perp_intersection_trivial(&tr));
            assert_eq!(a, adjoint_kernels_trivial(&tr));
            let rep = projection_regularity(&tr);
            assert!(rep.holds(), "{rep:?} {tr:?}");
        }
        assert!(surj > 30 && surj < 270);
        for _ in 0..200 {
            let (l, s) = random_codim_instance(&mut rng, 8);
            let (a, b) = codim_formula_check(&l, &s).unwrap();
            assert_eq!(a, b);
        }
    }
}
