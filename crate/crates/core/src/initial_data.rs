//! Initial data sets `(h, K)`: constraint quantities, null expansions of
//! hypersurfaces in a slice, and the MOTS classification.
//!
//! `K(X, Y) = g(∇_X n, Y)` for the future unit normal `n`, so that
//! `θ± = tr_Σ K ± H_ν` agrees with `−g(H, n ± ν)` in the spacetime.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{GeometryError, Result};
use crate::geometry::{christoffel, scalar_curvature, MetricField, MetricJet2, Signature};
use crate::jet::{coordinate_jets, ScalarJet2};
use crate::linalg;
use crate::submanifold::{extrinsic_at, Embedding, ExtrinsicData};

/// Tolerance on `|h(ν, ν) − 1|` and `|h(ν, E_a)|`.
pub const UNIT_NORMAL_TOL: f64 = 1e-8;
pub const MOTS_TOL: f64 = 1e-9;

/// Riemannian metric and second fundamental form at one point of a slice.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialData {
    pub h: MetricJet2,
    /// `K_ij`, row-major.
    pub k: Vec<f64>,
    /// `∂_l K_ij` at `(l·n + i)·n + j`.
    pub dk: Vec<f64>,
}

impl InitialData {
    pub fn new(h: MetricJet2, k: Vec<f64>, dk: Vec<f64>) -> Result<Self> {
        let n = h.dim;
        if h.signature != Signature::Riemannian {
            return Err(GeometryError::InvalidJet("initial data needs a Riemannian metric".into()));
        }
        if k.len() != n * n || dk.len() != n * n * n {
            return Err(GeometryError::DimensionMismatch {
                expected: n * n,
                found: k.len(),
            });
        }
        let scale = 1.0 + linalg::max_abs(&k) + linalg::max_abs(&dk);
        for i in 0..n {
            for j in 0..n {
                let asym = (k[i * n + j] - k[j * n + i]).abs();
                let dasym = (0..n)
                    .map(|l| (dk[(l * n + i) * n + j] - dk[(l * n + j) * n + i]).abs())
                    .fold(0.0, f64::max);
                if asym.max(dasym) > 1e-10 * scale {
                    return Err(GeometryError::InvalidJet("K is not symmetric".into()));
                }
            }
        }
        Ok(Self { h, k, dk })
    }

    /// Time-symmetric data, `K = 0`.
    pub fn time_symmetric(h: MetricJet2) -> Result<Self> {
        let n = h.dim;
        Self::new(h, vec![0.0; n * n], vec![0.0; n * n * n])
    }

    pub fn dim(&self) -> usize {
        self.h.dim
    }

    /// `K(u, v)`.
    pub fn k_form(&self, u: &[f64], v: &[f64]) -> f64 {
        linalg::bilinear(&self.k, u, v)
    }
}

/// Initial data given on a chart.
pub trait InitialDataField {
    fn dim(&self) -> usize;
    fn jet(&self, p: &[f64]) -> Result<InitialData>;
}

impl<T: InitialDataField + ?Sized> InitialDataField for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn jet(&self, p: &[f64]) -> Result<InitialData> {
        (**self).jet(p)
    }
}

impl<T: InitialDataField + ?Sized> InitialDataField for alloc::boxed::Box<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn jet(&self, p: &[f64]) -> Result<InitialData> {
        (**self).jet(p)
    }
}

/// Metric field `h` paired with `K` from a closure over coordinate jets
/// (row-major `n × n` component jets).
pub struct FnInitialData<M, F> {
    metric: M,
    k: F,
}

impl<M, F> FnInitialData<M, F>
where
    M: MetricField,
    F: Fn(&[ScalarJet2]) -> Vec<ScalarJet2>,
{
    pub fn new(metric: M, k: F) -> Self {
        Self { metric, k }
    }
}

impl<M, F> InitialDataField for FnInitialData<M, F>
where
    M: MetricField,
    F: Fn(&[ScalarJet2]) -> Vec<ScalarJet2>,
{
    fn dim(&self) -> usize {
        self.metric.dim()
    }

    fn jet(&self, p: &[f64]) -> Result<InitialData> {
        let n = self.dim();
        let h = self.metric.jet(p)?;
        let comps = (self.k)(&coordinate_jets(p));
        if comps.len() != n * n {
            return Err(GeometryError::DimensionMismatch {
                expected: n * n,
                found: comps.len(),
            });
        }
        let k = comps.iter().map(|c| c.value).collect();
        let mut dk = vec![0.0; n * n * n];
        for l in 0..n {
            for ij in 0..n * n {
                dk[l * n * n + ij] = comps[ij].grad[l];
            }
        }
        InitialData::new(h, k, dk)
    }
}

/// Time-symmetric data on a Riemannian metric field.
pub struct TimeSymmetric<M>(pub M);

impl<M: MetricField> InitialDataField for TimeSymmetric<M> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn jet(&self, p: &[f64]) -> Result<InitialData> {
        InitialData::time_symmetric(self.0.jet(p)?)
    }
}

/// The metric `h` of an initial data field.
pub struct SliceMetric<'a>(pub &'a dyn InitialDataField);

impl MetricField for SliceMetric<'_> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn signature(&self) -> Signature {
        Signature::Riemannian
    }
    fn jet(&self, p: &[f64]) -> Result<MetricJet2> {
        Ok(self.0.jet(p)?.h)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintQuantities {
    /// Energy density `ρ`.
    pub rho: f64,
    /// Current `J`, a covector.
    pub j: Vec<f64>,
}

impl ConstraintQuantities {
    pub fn is_vacuum(&self, tol: f64) -> bool {
        self.rho.abs() <= tol && linalg::norm(&self.j) <= tol
    }

    /// `J(v)`.
    pub fn j_of(&self, v: &[f64]) -> f64 {
        linalg::dot(&self.j, v)
    }
}

/// `∇_l K_ij` at `(l·n + i)·n + j`.
pub fn covariant_dk(d: &InitialData) -> Result<Vec<f64>> {
    let n = d.dim();
    let conn = christoffel(&d.h)?;
    let mut out = d.dk.clone();
    for l in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for m in 0..n {
                    s += conn.get(m, l, i) * d.k[m * n + j] + conn.get(m, l, j) * d.k[i * n + m];
                }
                out[(l * n + i) * n + j] -= s;
            }
        }
    }
    Ok(out)
}

/// `ρ = ½(Scal − |K|² + (tr K)²)` and `J = div K − d tr K`.
pub fn constraint_quantities(d: &InitialData) -> Result<ConstraintQuantities> {
    let n = d.dim();
    let hinv = d.h.inverse()?;
    let scal = scalar_curvature(&d.h)?;
    let tr: f64 = (0..n * n).map(|ij| hinv[ij] * d.k[ij]).sum();
    let mut knorm = 0.0;
    for i in 0..n {
        for j in 0..n {
            for a in 0..n {
                for b in 0..n {
                    knorm += hinv[i * n + a] * hinv[j * n + b] * d.k[i * n + j] * d.k[a * n + b];
                }
            }
        }
    }
    let nabla = covariant_dk(d)?;
    let j = (0..n)
        .map(|jj| {
            let mut div = 0.0;
            let mut dtr = 0.0;
            for a in 0..n {
                for b in 0..n {
                    div += hinv[a * n + b] * nabla[(a * n + b) * n + jj];
                    dtr += hinv[a * n + b] * nabla[(jj * n + a) * n + b];
                }
            }
            div - dtr
        })
        .collect();
    Ok(ConstraintQuantities {
        rho: 0.5 * (scal - knorm + tr * tr),
        j,
    })
}

/// Unit normal of a hypersurface, oriented so that `h(ν, hint) > 0`.
pub fn unit_normal(data: &ExtrinsicData, hint: Option<&[f64]>) -> Result<Vec<f64>> {
    if data.codimension() != 1 {
        return Err(GeometryError::CodimensionMismatch {
            expected: 1,
            found: data.codimension(),
        });
    }
    let nu = data.normal_basis[0].clone();
    let s = match hint {
        Some(h) => {
            let c = data.metric.inner(&nu, h);
            if c.abs() < 1e-12 * linalg::norm(h) {
                return Err(GeometryError::OrientationFailure("outward hint is tangent to the hypersurface".into()));
            }
            c.signum()
        }
        None => 1.0,
    };
    Ok(nu.into_iter().map(|c| s * c).collect())
}

/// Largest of `|h(ν, ν) − 1|` and `|h(ν, E_a)|`, the latter scaled by `|E_a|_h`.
pub fn normal_defect(data: &ExtrinsicData, nu: &[f64]) -> f64 {
    let g = &data.metric;
    let mut d = (g.inner(nu, nu) - 1.0).abs();
    for e in &data.tangents {
        d = d.max(g.inner(nu, e).abs() / g.inner(e, e).sqrt());
    }
    d
}

/// `H_ν = −h(H, ν)`, the tangential divergence of `ν`.
pub fn mean_curvature_scalar(data: &ExtrinsicData, nu: &[f64]) -> f64 {
    -data.metric.inner(&data.mean_curvature, nu)
}

/// `tr_Σ K`.
pub fn tangential_trace(d: &InitialData, data: &ExtrinsicData) -> f64 {
    let m = data.sigma_dim();
    let mut s = 0.0;
    for a in 0..m {
        for b in 0..m {
            s += data.induced_inverse[a * m + b] * d.k_form(&data.tangents[a], &data.tangents[b]);
        }
    }
    s
}

/// `θ± = tr_Σ K ± H_ν` from precomputed data.
pub fn expansions_from(d: &InitialData, data: &ExtrinsicData, nu: &[f64]) -> Result<(f64, f64)> {
    let defect = normal_defect(data, nu);
    if defect > UNIT_NORMAL_TOL {
        return Err(GeometryError::NotUnitNormal { defect });
    }
    let tr = tangential_trace(d, data);
    let hnu = mean_curvature_scalar(data, nu);
    Ok((tr + hnu, tr - hnu))
}

/// `θ±` of the hypersurface `e` of the slice at parameter `u`. When `nu` is
/// `None` the normal is oriented by the embedding's outward hint.
pub fn initial_data_expansions(
    field: &dyn InitialDataField,
    e: &dyn Embedding,
    nu: Option<&[f64]>,
    u: &[f64],
) -> Result<(f64, f64)> {
    let data = extrinsic_at(e, &SliceMetric(field), u, 0)?;
    let d = field.jet(&data.point)?;
    let nu = match nu {
        Some(v) => v.to_vec(),
        None => unit_normal(&data, e.outward_hint(u).as_deref())?,
    };
    expansions_from(&d, &data, &nu)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MotsClass {
    OuterTrapped,
    WeaklyOuterTrapped,
    Mots,
    None,
}

pub fn mots_classify(theta_plus: &[f64]) -> MotsClass {
    let tol = MOTS_TOL;
    if theta_plus.is_empty() {
        MotsClass::None
    } else if theta_plus.iter().all(|t| *t < -tol) {
        MotsClass::OuterTrapped
    } else if theta_plus.iter().all(|t| t.abs() <= tol) {
        MotsClass::Mots
    } else if theta_plus.iter().all(|t| *t <= tol) {
        MotsClass::WeaklyOuterTrapped
    } else {
        MotsClass::None
    }
}
