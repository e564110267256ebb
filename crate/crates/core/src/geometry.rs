//! Connection and curvature of metric 2-jets, and causal classification.
//!
//! Curvature follows the convention `R(X,Y)Z = ∇_X∇_Y Z − ∇_Y∇_X Z − ∇_[X,Y] Z`
//! with the covariant tensor `Rm(X,Y,Z,W) = g(R(X,Y)Z, W)`, so that
//! `Rm(v,w,w,v)` is the sectional curvature of an orthonormal pair (`+1` on the
//! unit sphere). Signature is `(−,+,…,+)` for Lorentzian jets.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::SymmetricEigen;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{GeometryError, Result};
use crate::jet::{coordinate_jets, ScalarJet2};
use crate::linalg::{self, bilinear};

/// `|g(v,v)| ≤ NULL_REL_TOL · ‖v‖²_aux` declares a vector null.
pub const NULL_REL_TOL: f64 = 1e-10;
/// Components all below this magnitude make a vector zero.
pub const ZERO_TOL: f64 = 1e-14;
/// Collinearity threshold in the auxiliary Euclidean norm.
pub const COLLINEAR_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Signature {
    Lorentzian,
    Riemannian,
}

/// Metric components with first and second coordinate derivatives at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricJet2 {
    pub dim: usize,
    pub signature: Signature,
    /// `g_ij`, row-major.
    pub g: Vec<f64>,
    /// `∂_k g_ij` stored at `(k·n + i)·n + j`.
    pub dg: Vec<f64>,
    /// `∂_l ∂_k g_ij` stored at `((l·n + k)·n + i)·n + j`.
    pub ddg: Vec<f64>,
}

impl MetricJet2 {
    pub fn new(signature: Signature, g: Vec<f64>, dg: Vec<f64>, ddg: Vec<f64>) -> Result<Self> {
        let n = (g.len() as f64).sqrt().round() as usize;
        if n < 2 || n * n != g.len() || dg.len() != n * n * n || ddg.len() != n * n * n * n {
            return Err(GeometryError::InvalidJet(format!(
                "inconsistent component counts {} / {} / {}",
                g.len(),
                dg.len(),
                ddg.len()
            )));
        }
        let jet = Self {
            dim: n,
            signature,
            g,
            dg,
            ddg,
        };
        jet.validate()?;
        Ok(jet)
    }

    /// Flat metric of the given signature with vanishing derivatives.
    pub fn flat(signature: Signature, dim: usize) -> Self {
        let mut g = vec![0.0; dim * dim];
        for i in 0..dim {
            g[i * dim + i] = 1.0;
        }
        if signature == Signature::Lorentzian {
            g[0] = -1.0;
        }
        Self {
            dim,
            signature,
            g,
            dg: vec![0.0; dim * dim * dim],
            ddg: vec![0.0; dim * dim * dim * dim],
        }
    }

    /// Assemble a jet from component jets `component(i, j)`, evaluated for
    /// `i ≤ j` and mirrored.
    pub fn from_components(
        signature: Signature,
        dim: usize,
        mut component: impl FnMut(usize, usize) -> ScalarJet2,
    ) -> Self {
        let n = dim;
        let mut g = vec![0.0; n * n];
        let mut dg = vec![0.0; n * n * n];
        let mut ddg = vec![0.0; n * n * n * n];
        for i in 0..n {
            for j in i..n {
                let c = component(i, j);
                for (a, b) in [(i, j), (j, i)] {
                    g[a * n + b] = c.value;
                    for k in 0..n {
                        dg[(k * n + a) * n + b] = c.grad[k];
                        for l in 0..n {
                            ddg[((l * n + k) * n + a) * n + b] = c.hess[l * n + k];
                        }
                    }
                }
            }
        }
        Self {
            dim,
            signature,
            g,
            dg,
            ddg,
        }
    }

    /// The component `g_ij` as a scalar 2-jet.
    pub fn component(&self, i: usize, j: usize) -> ScalarJet2 {
        let n = self.dim;
        ScalarJet2 {
            value: self.g(i, j),
            grad: (0..n).map(|k| self.dg(i, j, k)).collect(),
            hess: (0..n * n).map(|lk| self.ddg(i, j, lk % n, lk / n)).collect(),
        }
    }

    #[inline]
    pub fn g(&self, i: usize, j: usize) -> f64 {
        self.g[i * self.dim + j]
    }

    /// `∂_k g_ij`.
    #[inline]
    pub fn dg(&self, i: usize, j: usize, k: usize) -> f64 {
        let n = self.dim;
        self.dg[(k * n + i) * n + j]
    }

    /// `∂_l ∂_k g_ij`.
    #[inline]
    pub fn ddg(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        let n = self.dim;
        self.ddg[((l * n + k) * n + i) * n + j]
    }

    pub fn inner(&self, u: &[f64], v: &[f64]) -> f64 {
        bilinear(&self.g, u, v)
    }

    pub fn inverse(&self) -> Result<Vec<f64>> {
        linalg::invert(&self.g, self.dim)
    }

    /// Checks the symmetry and signature invariants.
    pub fn validate(&self) -> Result<()> {
        let n = self.dim;
        let scale = linalg::max_abs(&self.g).max(1.0);
        let tol = 1e-12 * scale;
        for i in 0..n {
            for j in 0..n {
                if (self.g(i, j) - self.g(j, i)).abs() > tol {
                    return Err(GeometryError::InvalidJet(format!("g not symmetric at ({i},{j})")));
                }
                for k in 0..n {
                    if (self.dg(i, j, k) - self.dg(j, i, k)).abs() > tol {
                        return Err(GeometryError::InvalidJet(format!("dg not symmetric at ({i},{j},{k})")));
                    }
                    for l in 0..n {
                        let v = self.ddg(i, j, k, l);
                        if (v - self.ddg(j, i, k, l)).abs() > tol || (v - self.ddg(i, j, l, k)).abs() > tol {
                            return Err(GeometryError::InvalidJet(format!(
                                "ddg not symmetric at ({i},{j},{k},{l})"
                            )));
                        }
                    }
                }
            }
        }
        let eig = SymmetricEigen::new(linalg::to_matrix(&self.g, n));
        let negatives = eig.eigenvalues.iter().filter(|e| **e < 0.0).count();
        let degenerate = eig.eigenvalues.iter().any(|e| e.abs() <= 1e-14 * scale);
        let expected = match self.signature {
            Signature::Lorentzian => 1,
            Signature::Riemannian => 0,
        };
        if degenerate || negatives != expected {
            return Err(GeometryError::InvalidJet(format!(
                "metric has {negatives} negative eigenvalues, expected {expected}"
            )));
        }
        Ok(())
    }
}

/// Christoffel symbols `Γ^k_ij` and, when the jet carries second derivatives,
/// their first derivatives `∂_m Γ^k_ij`.
#[derive(Debug, Clone)]
pub struct Christoffel {
    pub dim: usize,
    /// `Γ^k_ij` at `(k·n + i)·n + j`.
    pub gamma: Vec<f64>,
    /// `∂_m Γ^k_ij` at `((m·n + k)·n + i)·n + j`.
    pub dgamma: Vec<f64>,
    pub inverse_metric: Vec<f64>,
}

impl Christoffel {
    #[inline]
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        let n = self.dim;
        self.gamma[(k * n + i) * n + j]
    }

    #[inline]
    pub fn derivative(&self, m: usize, k: usize, i: usize, j: usize) -> f64 {
        let n = self.dim;
        self.dgamma[((m * n + k) * n + i) * n + j]
    }

    /// `Γ(x, y)^k = Γ^k_ij x^i y^j`, the covariant derivative of the
    /// constant-coefficient field `y` along `x`.
    pub fn contract(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let n = self.dim;
        (0..n)
            .map(|k| {
                let mut s = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        s += self.get(k, i, j) * x[i] * y[j];
                    }
                }
                s
            })
            .collect()
    }
}

/// Levi-Civita connection of the jet.
pub fn christoffel(m: &MetricJet2) -> Result<Christoffel> {
    let n = m.dim;
    let ginv = m.inverse()?;
    // S_lij = ∂_i g_lj + ∂_j g_li − ∂_l g_ij
    let s = |l: usize, i: usize, j: usize| m.dg(l, j, i) + m.dg(l, i, j) - m.dg(i, j, l);
    let ds = |mm: usize, l: usize, i: usize, j: usize| {
        m.ddg(l, j, i, mm) + m.ddg(l, i, j, mm) - m.ddg(i, j, l, mm)
    };
    let mut gamma = vec![0.0; n * n * n];
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0.0;
                for l in 0..n {
                    acc += ginv[k * n + l] * s(l, i, j);
                }
                gamma[(k * n + i) * n + j] = 0.5 * acc;
            }
        }
    }
    // ∂_m g^{kl} = −g^{ka} ∂_m g_ab g^{bl}
    let mut dginv = vec![0.0; n * n * n];
    for mm in 0..n {
        for k in 0..n {
            for l in 0..n {
                let mut acc = 0.0;
                for a in 0..n {
                    for b in 0..n {
                        acc += ginv[k * n + a] * m.dg(a, b, mm) * ginv[b * n + l];
                    }
                }
                dginv[(mm * n + k) * n + l] = -acc;
            }
        }
    }
    let mut dgamma = vec![0.0; n * n * n * n];
    for mm in 0..n {
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut acc = 0.0;
                    for l in 0..n {
                        acc += dginv[(mm * n + k) * n + l] * s(l, i, j) + ginv[k * n + l] * ds(mm, l, i, j);
                    }
                    dgamma[((mm * n + k) * n + i) * n + j] = 0.5 * acc;
                }
            }
        }
    }
    Ok(Christoffel {
        dim: n,
        gamma,
        dgamma,
        inverse_metric: ginv,
    })
}

/// Covariant (0,4) curvature components at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureTensor {
    pub dim: usize,
    /// `Rm_abcd` at `((a·n + b)·n + c)·n + d`.
    pub components: Vec<f64>,
}

impl CurvatureTensor {
    #[inline]
    pub fn get(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        let n = self.dim;
        self.components[((a * n + b) * n + c) * n + d]
    }

    /// `Rm(x, y, z, w)` for arbitrary vectors.
    pub fn eval(&self, x: &[f64], y: &[f64], z: &[f64], w: &[f64]) -> f64 {
        let n = self.dim;
        let mut s = 0.0;
        for a in 0..n {
            if x[a] == 0.0 {
                continue;
            }
            for b in 0..n {
                if y[b] == 0.0 {
                    continue;
                }
                for c in 0..n {
                    if z[c] == 0.0 {
                        continue;
                    }
                    for d in 0..n {
                        s += x[a] * y[b] * z[c] * w[d] * self.get(a, b, c, d);
                    }
                }
            }
        }
        s
    }

    pub fn max_abs(&self) -> f64 {
        linalg::max_abs(&self.components)
    }

    /// Largest residual of the four curvature-like symmetries, in the order
    /// last-pair antisymmetry, first-pair antisymmetry, first Bianchi
    /// identity, pair symmetry. Absolute values.
    pub fn symmetry_residuals(&self) -> [f64; 4] {
        let n = self.dim;
        let mut r = [0.0_f64; 4];
        for w in 0..n {
            for z in 0..n {
                for x in 0..n {
                    for y in 0..n {
                        let f = self.get(w, z, x, y);
                        r[0] = r[0].max((f + self.get(w, z, y, x)).abs());
                        r[1] = r[1].max((f + self.get(z, w, x, y)).abs());
                        r[2] = r[2].max((f + self.get(w, x, y, z) + self.get(w, y, z, x)).abs());
                        r[3] = r[3].max((self.get(x, y, w, z) - f).abs());
                    }
                }
            }
        }
        r
    }
}

/// Riemann curvature of the jet.
pub fn riemann(m: &MetricJet2) -> Result<CurvatureTensor> {
    let conn = christoffel(m)?;
    Ok(riemann_from_connection(m, &conn))
}

pub fn riemann_from_connection(m: &MetricJet2, conn: &Christoffel) -> CurvatureTensor {
    let n = m.dim;
    // R_{ijk}^l = ∂_i Γ^l_jk − ∂_j Γ^l_ik + Γ^p_jk Γ^l_ip − Γ^p_ik Γ^l_jp
    let mut up = vec![0.0; n * n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut acc = conn.derivative(i, l, j, k) - conn.derivative(j, l, i, k);
                    for p in 0..n {
                        acc += conn.get(p, j, k) * conn.get(l, i, p) - conn.get(p, i, k) * conn.get(l, j, p);
                    }
                    up[((i * n + j) * n + k) * n + l] = acc;
                }
            }
        }
    }
    let mut components = vec![0.0; n * n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut acc = 0.0;
                    for p in 0..n {
                        acc += m.g(l, p) * up[((i * n + j) * n + k) * n + p];
                    }
                    components[((i * n + j) * n + k) * n + l] = acc;
                }
            }
        }
    }
    CurvatureTensor { dim: n, components }
}

/// Ricci tensor computed directly from the connection,
/// `Ric_jk = ∂_i Γ^i_jk − ∂_j Γ^i_ik + Γ^i_ip Γ^p_jk − Γ^i_jp Γ^p_ik`.
pub fn ricci(m: &MetricJet2) -> Result<Vec<f64>> {
    let conn = christoffel(m)?;
    let n = m.dim;
    let mut ric = vec![0.0; n * n];
    for j in 0..n {
        for k in 0..n {
            let mut acc = 0.0;
            for i in 0..n {
                acc += conn.derivative(i, i, j, k) - conn.derivative(j, i, i, k);
                for p in 0..n {
                    acc += conn.get(i, i, p) * conn.get(p, j, k) - conn.get(i, j, p) * conn.get(p, i, k);
                }
            }
            ric[j * n + k] = acc;
        }
    }
    for j in 0..n {
        for k in (j + 1)..n {
            let avg = 0.5 * (ric[j * n + k] + ric[k * n + j]);
            ric[j * n + k] = avg;
            ric[k * n + j] = avg;
        }
    }
    Ok(ric)
}

/// `Ric_jk = g^{il} Rm_ijkl`.
pub fn ricci_from_riemann(r: &CurvatureTensor, inverse_metric: &[f64]) -> Vec<f64> {
    let n = r.dim;
    let mut ric = vec![0.0; n * n];
    for j in 0..n {
        for k in 0..n {
            let mut acc = 0.0;
            for i in 0..n {
                for l in 0..n {
                    acc += inverse_metric[i * n + l] * r.get(i, j, k, l);
                }
            }
            ric[j * n + k] = acc;
        }
    }
    ric
}

pub fn scalar_curvature(m: &MetricJet2) -> Result<f64> {
    let ric = ricci(m)?;
    let ginv = m.inverse()?;
    Ok(ric.iter().zip(&ginv).map(|(a, b)| a * b).sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CausalClass {
    TimelikeFuture,
    TimelikePast,
    NullFuture,
    NullPast,
    Spacelike,
    Zero,
}

impl CausalClass {
    pub fn is_causal(self) -> bool {
        !matches!(self, CausalClass::Spacelike | CausalClass::Zero)
    }

    pub fn is_future(self) -> bool {
        matches!(self, CausalClass::TimelikeFuture | CausalClass::NullFuture)
    }
}

/// Checks that `x` is timelike for a Lorentzian jet.
pub fn require_timelike(m: &MetricJet2, x: &[f64]) -> Result<()> {
    if m.signature != Signature::Lorentzian {
        return Err(GeometryError::InvalidJet("causal structure needs a Lorentzian jet".into()));
    }
    let xx = m.inner(x, x);
    if xx >= -NULL_REL_TOL * linalg::dot(x, x) {
        return Err(GeometryError::NonTimelikeOrientation { value: xx });
    }
    Ok(())
}

/// Causal type of `v` with time orientation fixed by the timelike vector `x`.
pub fn causal_classify(m: &MetricJet2, v: &[f64], x: &[f64]) -> Result<CausalClass> {
    require_timelike(m, x)?;
    if v.iter().all(|c| c.abs() < ZERO_TOL) {
        return Ok(CausalClass::Zero);
    }
    let vv = m.inner(v, v);
    let aux = linalg::dot(v, v);
    let future = m.inner(v, x) < 0.0;
    Ok(if vv.abs() <= NULL_REL_TOL * aux {
        if future {
            CausalClass::NullFuture
        } else {
            CausalClass::NullPast
        }
    } else if vv < 0.0 {
        if future {
            CausalClass::TimelikeFuture
        } else {
            CausalClass::TimelikePast
        }
    } else {
        CausalClass::Spacelike
    })
}

/// `Rm(w, v, v, w)`, rejecting `w` collinear with `v`.
pub fn riem_quadform(r: &CurvatureTensor, w: &[f64], v: &[f64]) -> Result<f64> {
    let vv = linalg::dot(v, v);
    if vv.sqrt() < ZERO_TOL {
        return Err(GeometryError::ZeroVector);
    }
    let along = linalg::dot(w, v) / vv;
    let perp: Vec<f64> = w.iter().zip(v).map(|(wi, vi)| wi - along * vi).collect();
    if linalg::norm(&perp) <= COLLINEAR_TOL * linalg::norm(w) {
        return Err(GeometryError::CollinearPair);
    }
    Ok(r.eval(w, v, v, w))
}

/// Central finite-difference 2-jet of a metric given only by its values,
/// Richardson-extrapolated over steps `h` and `h/2`. Accuracy is roughly
/// `1e-6` relative for smooth, order-one components at `h = 1e-5`.
pub fn fd_metric_jet(
    signature: Signature,
    p: &[f64],
    h: f64,
    metric: impl Fn(&[f64]) -> Vec<f64>,
) -> Result<MetricJet2> {
    let n = p.len();
    let eval = |offsets: &[(usize, f64)]| {
        let mut q = p.to_vec();
        for &(k, d) in offsets {
            q[k] += d;
        }
        metric(&q)
    };
    let g = metric(p);
    if g.len() != n * n {
        return Err(GeometryError::DimensionMismatch {
            expected: n * n,
            found: g.len(),
        });
    }
    let first = |k: usize, h: f64| -> Vec<f64> {
        let a = eval(&[(k, h)]);
        let b = eval(&[(k, -h)]);
        a.iter().zip(&b).map(|(x, y)| (x - y) / (2.0 * h)).collect()
    };
    let second = |k: usize, l: usize, h: f64| -> Vec<f64> {
        if k == l {
            let a = eval(&[(k, h)]);
            let b = eval(&[(k, -h)]);
            (0..n * n).map(|c| (a[c] - 2.0 * g[c] + b[c]) / (h * h)).collect()
        } else {
            let pp = eval(&[(k, h), (l, h)]);
            let pm = eval(&[(k, h), (l, -h)]);
            let mp = eval(&[(k, -h), (l, h)]);
            let mm = eval(&[(k, -h), (l, -h)]);
            (0..n * n)
                .map(|c| (pp[c] - pm[c] - mp[c] + mm[c]) / (4.0 * h * h))
                .collect()
        }
    };
    let richardson = |coarse: Vec<f64>, fine: Vec<f64>| -> Vec<f64> {
        coarse.iter().zip(&fine).map(|(c, f)| (4.0 * f - c) / 3.0).collect()
    };
    let mut dg = vec![0.0; n * n * n];
    let mut ddg = vec![0.0; n * n * n * n];
    for k in 0..n {
        let d = richardson(first(k, h), first(k, 0.5 * h));
        dg[k * n * n..(k + 1) * n * n].copy_from_slice(&d);
        for l in k..n {
            let dd = richardson(second(k, l, h), second(k, l, 0.5 * h));
            for (a, b) in [(k, l), (l, k)] {
                ddg[(a * n + b) * n * n..(a * n + b + 1) * n * n].copy_from_slice(&dd);
            }
        }
    }
    let sym = |data: &mut [f64], blocks: usize| {
        for blk in 0..blocks {
            let base = blk * n * n;
            for i in 0..n {
                for j in (i + 1)..n {
                    let avg = 0.5 * (data[base + i * n + j] + data[base + j * n + i]);
                    data[base + i * n + j] = avg;
                    data[base + j * n + i] = avg;
                }
            }
        }
    };
    let mut g = g;
    sym(&mut g, 1);
    sym(&mut dg, n);
    sym(&mut ddg, n * n);
    MetricJet2::new(signature, g, dg, ddg)
}

/// A metric defined on a chart, producing exact 2-jets at points.
pub trait MetricField {
    fn dim(&self) -> usize;
    fn signature(&self) -> Signature;
    fn jet(&self, p: &[f64]) -> Result<MetricJet2>;
}

impl<T: MetricField + ?Sized> MetricField for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn signature(&self) -> Signature {
        (**self).signature()
    }
    fn jet(&self, p: &[f64]) -> Result<MetricJet2> {
        (**self).jet(p)
    }
}

impl<T: MetricField + ?Sized> MetricField for Box<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn signature(&self) -> Signature {
        (**self).signature()
    }
    fn jet(&self, p: &[f64]) -> Result<MetricJet2> {
        (**self).jet(p)
    }
}

/// Metric whose components are closures over coordinate jets. The closure
/// returns the `n × n` components row-major; only the upper triangle is read.
pub struct FnMetricField<F> {
    dim: usize,
    signature: Signature,
    components: F,
}

impl<F> FnMetricField<F>
where
    F: Fn(&[ScalarJet2]) -> Vec<ScalarJet2>,
{
    pub fn new(dim: usize, signature: Signature, components: F) -> Self {
        Self {
            dim,
            signature,
            components,
        }
    }
}

impl<F> MetricField for FnMetricField<F>
where
    F: Fn(&[ScalarJet2]) -> Vec<ScalarJet2>,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn signature(&self) -> Signature {
        self.signature
    }

    fn jet(&self, p: &[f64]) -> Result<MetricJet2> {
        if p.len() != self.dim {
            return Err(GeometryError::DimensionMismatch {
                expected: self.dim,
                found: p.len(),
            });
        }
        let comps = (self.components)(&coordinate_jets(p));
        let n = self.dim;
        if comps.len() != n * n {
            return Err(GeometryError::DimensionMismatch {
                expected: n * n,
                found: comps.len(),
            });
        }
        let jet = MetricJet2::from_components(self.signature, n, |i, j| comps[i * n + j].clone());
        jet.validate()?;
        Ok(jet)
    }
}

/// Flat metric `η` (Lorentzian) or `δ` (Riemannian) on `ℝ^dim`.
pub struct FlatMetric {
    pub dim: usize,
    pub signature: Signature,
}

impl MetricField for FlatMetric {
    fn dim(&self) -> usize {
        self.dim
    }
    fn signature(&self) -> Signature {
        self.signature
    }
    fn jet(&self, p: &[f64]) -> Result<MetricJet2> {
        if p.len() != self.dim {
            return Err(GeometryError::DimensionMismatch {
                expected: self.dim,
                found: p.len(),
            });
        }
        Ok(MetricJet2::flat(self.signature, self.dim))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::FRAC_PI_4;

    fn sphere_jet(theta: f64) -> MetricJet2 {
        let f = FnMetricField::new(2, Signature::Riemannian, |x: &[ScalarJet2]| {
            let zero = ScalarJet2::constant(0.0, 2);
            vec![ScalarJet2::constant(1.0, 2), zero.clone(), zero, x[0].sin().powi(2)]
        });
        f.jet(&[theta, 0.3]).unwrap()
    }

    fn cylinder_jet(theta: f64) -> MetricJet2 {
        let f = FnMetricField::new(3, Signature::Lorentzian, |x: &[ScalarJet2]| {
            let c = |v: f64| ScalarJet2::constant(v, 3);
            vec![c(-1.0), c(0.0), c(0.0), c(0.0), c(1.0), c(0.0), c(0.0), c(0.0), x[1].sin().powi(2)]
        });
        f.jet(&[0.2, theta, 1.0]).unwrap()
    }

    #[test]
    fn flat_jet_has_no_connection_or_curvature() {
        let m = MetricJet2::flat(Signature::Lorentzian, 4);
        let c = christoffel(&m).unwrap();
        assert!(c.gamma.iter().all(|g| *g == 0.0));
        assert!(riemann(&m).unwrap().max_abs() < 1e-10);
        assert!(ricci(&m).unwrap().iter().all(|r| *r == 0.0));
    }

    #[test]
    fn sphere_christoffel_matches_closed_form() {
        // Γ^θ_φφ = −sin θ cos θ
        let m = sphere_jet(FRAC_PI_4);
        let c = christoffel(&m).unwrap();
        assert!((c.get(0, 1, 1) + 0.5).abs() < 1e-14);
        // Γ^φ_θφ = cot θ
        assert!((c.get(1, 0, 1) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn conformal_constant_rescaling_has_zero_connection() {
        let c = 0.7_f64.exp().powi(2);
        let mut m = MetricJet2::flat(Signature::Lorentzian, 3);
        for v in m.g.iter_mut() {
            *v *= c;
        }
        assert!(christoffel(&m).unwrap().gamma.iter().all(|g| *g == 0.0));
    }

    #[test]
    fn metric_compatibility() {
        let m = sphere_jet(0.9);
        let c = christoffel(&m).unwrap();
        let n = 2;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut rhs = 0.0;
                    for l in 0..n {
                        rhs += c.get(l, k, i) * m.g(l, j) + c.get(l, k, j) * m.g(i, l);
                    }
                    assert!((m.dg(i, j, k) - rhs).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn unit_sphere_sectional_curvature_is_one() {
        let theta = 1.1;
        let m = sphere_jet(theta);
        let r = riemann(&m).unwrap();
        let e1 = [1.0, 0.0];
        let e2 = [0.0, 1.0 / theta.sin()];
        assert!((r.eval(&e1, &e2, &e2, &e1) - 1.0).abs() < 1e-12);
        assert!((riem_quadform(&r, &e1, &e2).unwrap() - 1.0).abs() < 1e-12);
        let ric = ricci(&m).unwrap();
        for k in 0..4 {
            assert!((ric[k] - m.g[k]).abs() < 1e-12);
        }
        assert!((scalar_curvature(&m).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn einstein_cylinder_curvature() {
        let theta = 0.8;
        let m = cylinder_jet(theta);
        let r = riemann(&m).unwrap();
        let dt = [1.0, 0.0, 0.0];
        let u = [0.0, 1.0, 0.0];
        assert!(r.eval(&u, &dt, &dt, &u).abs() < 1e-14);
        let ric = ricci(&m).unwrap();
        assert!(ric[0].abs() < 1e-14);
        assert!((m.inner(&u, &u) - 1.0).abs() < 1e-14);
        assert!((bilinear(&ric, &u, &u) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ricci_contraction_agrees_with_direct_formula() {
        let m = cylinder_jet(0.4);
        let r = riemann(&m).unwrap();
        let direct = ricci(&m).unwrap();
        let contracted = ricci_from_riemann(&r, &m.inverse().unwrap());
        for (a, b) in direct.iter().zip(&contracted) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn causal_classification_in_minkowski() {
        let m = MetricJet2::flat(Signature::Lorentzian, 4);
        let x = [1.0, 0.0, 0.0, 0.0];
        let c = |v: [f64; 4]| causal_classify(&m, &v, &x).unwrap();
        assert_eq!(c([1.0, 0.0, 0.0, 0.0]), CausalClass::TimelikeFuture);
        assert_eq!(c([-2.0, 0.5, 0.0, 0.0]), CausalClass::TimelikePast);
        assert_eq!(c([1.0, 1.0, 0.0, 0.0]), CausalClass::NullFuture);
        assert_eq!(c([-1.0, 0.0, 1.0, 0.0]), CausalClass::NullPast);
        assert_eq!(c([0.0, 1.0, 0.0, 0.0]), CausalClass::Spacelike);
        assert_eq!(c([0.0; 4]), CausalClass::Zero);
        assert!(matches!(
            causal_classify(&m, &x, &[0.0, 1.0, 0.0, 0.0]),
            Err(GeometryError::NonTimelikeOrientation { .. })
        ));
    }

    #[test]
    fn quadform_rejects_collinear_pairs() {
        let m = sphere_jet(1.0);
        let r = riemann(&m).unwrap();
        assert_eq!(riem_quadform(&r, &[2.0, 0.0], &[1.0, 0.0]), Err(GeometryError::CollinearPair));
        assert_eq!(riem_quadform(&r, &[1.0, 0.0], &[0.0, 0.0]), Err(GeometryError::ZeroVector));
    }

    #[test]
    fn invalid_jets_are_rejected() {
        let bad_sig = MetricJet2::new(
            Signature::Riemannian,
            vec![-1.0, 0.0, 0.0, 1.0],
            vec![0.0; 8],
            vec![0.0; 16],
        );
        assert!(matches!(bad_sig, Err(GeometryError::InvalidJet(_))));
        let singular = MetricJet2 {
            g: vec![1.0, 1.0, 1.0, 1.0 + 1e-15],
            ..MetricJet2::flat(Signature::Riemannian, 2)
        };
        assert!(matches!(christoffel(&singular), Err(GeometryError::SingularMetric { .. })));
    }

    #[test]
    fn finite_difference_jet_tracks_exact_jet() {
        let exact = sphere_jet(0.7);
        let fd = fd_metric_jet(Signature::Riemannian, &[0.7, 0.3], 1e-5, |q| {
            vec![1.0, 0.0, 0.0, q[0].sin().powi(2)]
        })
        .unwrap();
        for (a, b) in exact.dg.iter().zip(&fd.dg) {
            assert!((a - b).abs() < 1e-8);
        }
        for (a, b) in exact.ddg.iter().zip(&fd.ddg) {
            assert!((a - b).abs() < 1e-4);
        }
        let r = riemann(&fd).unwrap();
        let e1 = [1.0, 0.0];
        let e2 = [0.0, 1.0 / 0.7_f64.sin()];
        assert!((r.eval(&e1, &e2, &e2, &e1) - 1.0).abs() < 1e-4);
    }
}
