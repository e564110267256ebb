//! Conformal rescaling `ĝ = e^{2f} g`, its effect on the mean curvature
//! vector, and the rescaling sequences used to trap submanifolds and to break
//! the curvature conditions.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{GeometryError, Result};
use crate::geometry::{
    causal_classify, christoffel, riem_quadform, riemann, CausalClass, FlatMetric, MetricField, MetricJet2, Signature,
};
use crate::jet::{ProductField, ScalarField, ScalarJet2, ScaledField};
use crate::linalg;
use crate::submanifold::{extrinsic_at, Embedding, NormalProjector, TRAPPING_TOL};

/// `e^{2f} g` with derivatives from the product and chain rules.
pub fn rescale_metric(m: &MetricJet2, f: &ScalarJet2) -> MetricJet2 {
    let w = f.scale(2.0).exp();
    MetricJet2::from_components(m.signature, m.dim, |i, j| &w * &m.component(i, j))
}

/// `grad_g f` at the jet's base point.
pub fn gradient(m: &MetricJet2, f: &ScalarJet2) -> Result<Vec<f64>> {
    let ginv = m.inverse()?;
    Ok(linalg::mat_vec(&ginv, &f.grad))
}

/// Max-norm residual between `∇̂_X Y` from the rescaled jet and
/// `∇_X Y + (Xf) Y + (Yf) X − g(X, Y) grad f`, for constant extensions.
pub fn conformal_connection_check(m: &MetricJet2, f: &ScalarJet2, x: &[f64], y: &[f64]) -> Result<f64> {
    let hat = christoffel(&rescale_metric(m, f))?;
    let base = christoffel(m)?;
    let lhs = hat.contract(x, y);
    let mut rhs = base.contract(x, y);
    linalg::axpy(linalg::dot(x, &f.grad), y, &mut rhs);
    linalg::axpy(linalg::dot(y, &f.grad), x, &mut rhs);
    linalg::axpy(-m.inner(x, y), &gradient(m, f)?, &mut rhs);
    Ok(lhs.iter().zip(&rhs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}

/// `Ĥ = e^{−2f}(H − m (grad f)^⊥)`.
pub fn conformal_mean_curvature(
    h: &[f64],
    f: &ScalarJet2,
    sigma_dim: usize,
    m: &MetricJet2,
    projector: &NormalProjector,
) -> Result<Vec<f64>> {
    let gn = projector.project(&gradient(m, f)?);
    let s = (-2.0 * f.value).exp();
    Ok(h.iter().zip(&gn).map(|(hi, gi)| s * (hi - sigma_dim as f64 * gi)).collect())
}

/// `ĝ(Ĥ, Ĥ) = e^{−2f}[g(H,H) − 2m g(H, grad f) + m² g((grad f)^⊥, (grad f)^⊥)]`.
pub fn conformal_h_normsq(
    h: &[f64],
    f: &ScalarJet2,
    sigma_dim: usize,
    m: &MetricJet2,
    projector: &NormalProjector,
) -> Result<f64> {
    let grad = gradient(m, f)?;
    let gn = projector.project(&grad);
    let k = sigma_dim as f64;
    Ok((-2.0 * f.value).exp() * (m.inner(h, h) - 2.0 * k * m.inner(h, &grad) + k * k * m.inner(&gn, &gn)))
}

/// Metric field `e^{2f} g`.
pub struct ConformalMetric<M, F> {
    pub base: M,
    pub factor: F,
}

impl<M: MetricField, F: ScalarField> ConformalMetric<M, F> {
    pub fn new(base: M, factor: F) -> Self {
        Self { base, factor }
    }
}

impl<M: MetricField, F: ScalarField> MetricField for ConformalMetric<M, F> {
    fn dim(&self) -> usize {
        self.base.dim()
    }
    fn signature(&self) -> Signature {
        self.base.signature()
    }
    fn jet(&self, p: &[f64]) -> Result<MetricJet2> {
        Ok(rescale_metric(&self.base.jet(p)?, &self.factor.jet(p)))
    }
}

/// Radial cutoff equal to 1 inside `inner_radius` and 0 outside `outer_radius`.
#[derive(Debug, Clone, PartialEq)]
pub struct BumpProfile {
    pub inner_radius: f64,
    pub outer_radius: f64,
    pub center: Vec<f64>,
}

impl BumpProfile {
    pub fn new(inner_radius: f64, outer_radius: f64, center: Vec<f64>) -> Result<Self> {
        if !(inner_radius > 0.0 && outer_radius > inner_radius) {
            return Err(GeometryError::BadParams(format!(
                "bump radii must satisfy 0 < inner < outer (got {inner_radius}, {outer_radius})"
            )));
        }
        Ok(Self {
            inner_radius,
            outer_radius,
            center,
        })
    }

    pub fn centered(dim: usize) -> Self {
        Self {
            inner_radius: 0.5,
            outer_radius: 1.0,
            center: vec![0.0; dim],
        }
    }
}

// e^{-1/x} on x > 0
fn flat_exp(x: &ScalarJet2) -> ScalarJet2 {
    let v = x.value;
    let h = (-1.0 / v).exp();
    let h1 = h / (v * v);
    let h2 = h * (1.0 / (v * v * v * v) - 2.0 / (v * v * v));
    x.compose(h, h1, h2)
}

/// Smoothstep `h(1−s) / (h(1−s) + h(s))` in the normalized radius `s`.
pub fn bump(profile: &BumpProfile, p: &[f64]) -> ScalarJet2 {
    let n = p.len();
    let r2: f64 = p.iter().zip(&profile.center).map(|(a, c)| (a - c) * (a - c)).sum();
    let r = r2.sqrt();
    if r <= profile.inner_radius {
        return ScalarJet2::constant(1.0, n);
    }
    if r >= profile.outer_radius {
        return ScalarJet2::constant(0.0, n);
    }
    let sq = p
        .iter()
        .zip(&profile.center)
        .enumerate()
        .map(|(i, (a, c))| {
            let d = ScalarJet2::variable(i, *a, n) - *c;
            &d * &d
        })
        .fold(ScalarJet2::constant(0.0, n), |acc, t| acc + t);
    let s = (sq.sqrt() - profile.inner_radius).scale(1.0 / (profile.outer_radius - profile.inner_radius));
    let a = flat_exp(&(-&s + 1.0));
    let b = flat_exp(&s);
    &a / &(&a + &b)
}

/// The bump as a scalar field.
pub struct BumpField {
    pub profile: BumpProfile,
}

impl ScalarField for BumpField {
    fn dim(&self) -> usize {
        self.profile.center.len()
    }
    fn jet(&self, p: &[f64]) -> ScalarJet2 {
        bump(&self.profile, p)
    }
}

/// Per-sample outcome of a trapping perturbation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbedSample {
    /// `g_n(H_n, H_n)` recomputed from the rescaled metric.
    pub hh: f64,
    /// `g_n(H_n, X)` recomputed from the rescaled metric.
    pub hx: f64,
    /// `g_n(H_n, H_n)` from the transformation law.
    pub hh_formula: f64,
    /// `g_n(H_n, X)` from the transformation law.
    pub hx_formula: f64,
    /// Max-norm distance between `g_n` and `g` at the sample.
    pub metric_deviation: f64,
}

pub struct TrappingPerturbation<'a> {
    pub metric: ConformalMetric<&'a dyn MetricField, Box<dyn ScalarField + 'a>>,
    pub n: u32,
    pub samples: Vec<PerturbedSample>,
}

impl TrappingPerturbation<'_> {
    pub fn strictly_trapped(&self) -> bool {
        self.samples.iter().all(|s| s.hh < 0.0 && s.hx > 0.0)
    }
}

/// Rescales `metric` by `e^{2φτ/n}` and recomputes the trapping data of
/// `sigma` under the new metric. The input must be weakly trapped, `grad τ`
/// future timelike, and every sample inside the bump's inner region.
pub fn trapping_perturbation<'a>(
    metric: &'a dyn MetricField,
    sigma: &dyn Embedding,
    tau: &'a dyn ScalarField,
    profile: &BumpProfile,
    n: u32,
    x: &dyn Fn(&[f64]) -> Vec<f64>,
) -> Result<TrappingPerturbation<'a>> {
    if n == 0 {
        return Err(GeometryError::BadParams("perturbation index must be at least 1".into()));
    }
    let bump_field = BumpField {
        profile: profile.clone(),
    };
    let factor: Box<dyn ScalarField + 'a> = Box::new(ScaledField(1.0 / n as f64, ProductField(bump_field, tau)));
    let rescaled = ConformalMetric::new(metric, factor);
    let m = sigma.sigma_dim();
    let mut samples = Vec::new();
    for (k, u) in sigma.samples().iter().enumerate() {
        let data = extrinsic_at(sigma, metric, u, k)?;
        let xv = x(&data.point);
        let g = &data.metric;
        let hh = g.inner(&data.mean_curvature, &data.mean_curvature);
        let hx = g.inner(&data.mean_curvature, &xv);
        if hh > TRAPPING_TOL || hx < -TRAPPING_TOL {
            return Err(GeometryError::NotWeaklyTrapped { sample: k, hh, hx });
        }
        let b = bump(profile, &data.point);
        if b.value != 1.0 {
            return Err(GeometryError::BadParams(format!(
                "sample {k} lies outside the inner region of the bump"
            )));
        }
        let t = tau.jet(&data.point);
        let grad_t = gradient(g, &t)?;
        if causal_classify(g, &grad_t, &xv)? != CausalClass::TimelikeFuture {
            return Err(GeometryError::OrientationFailure(format!(
                "gradient of the temporal function is not future timelike at sample {k}"
            )));
        }
        let f = rescaled.factor.jet(&data.point);
        let hat_h = conformal_mean_curvature(&data.mean_curvature, &f, m, g, &data.projector)?;
        let w = (2.0 * f.value).exp();
        let hh_formula = conformal_h_normsq(&data.mean_curvature, &f, m, g, &data.projector)?;
        let hx_formula = w * g.inner(&hat_h, &xv);
        let new = extrinsic_at(sigma, &rescaled, u, k)?;
        let gn = &new.metric;
        samples.push(PerturbedSample {
            hh: gn.inner(&new.mean_curvature, &new.mean_curvature),
            hx: gn.inner(&new.mean_curvature, &xv),
            hh_formula,
            hx_formula,
            metric_deviation: gn.g.iter().zip(&g.g).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max),
        });
    }
    Ok(TrappingPerturbation {
        metric: rescaled,
        n,
        samples,
    })
}

/// Which pair `(v, w)` the curvature perturbation targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurvatureCase {
    TimelikeV,
    NullVSpacelikeW,
    NullVNullW,
}

impl CurvatureCase {
    pub const ALL: [CurvatureCase; 3] = [Self::TimelikeV, Self::NullVSpacelikeW, Self::NullVNullW];

    pub fn vectors(self, dim: usize) -> (Vec<f64>, Vec<f64>) {
        let e = |i: usize| {
            let mut v = vec![0.0; dim];
            v[i] = 1.0;
            v
        };
        let add = |a: Vec<f64>, b: Vec<f64>, s: f64| a.iter().zip(&b).map(|(x, y)| x + s * y).collect::<Vec<_>>();
        match self {
            Self::TimelikeV => (e(0), e(1)),
            Self::NullVSpacelikeW => (add(e(0), e(1), 1.0), e(2)),
            Self::NullVNullW => (add(e(0), e(1), 1.0), add(e(0), e(1), -1.0)),
        }
    }

    /// The unextended profile `ξ` in coordinates.
    pub fn profile(self, x: &[ScalarJet2]) -> ScalarJet2 {
        match self {
            Self::TimelikeV => x[0].exp(),
            Self::NullVSpacelikeW => (&x[0] + &x[1]).powi(2),
            Self::NullVNullW => x[0].powi(2),
        }
    }

    /// Closed form stated for the perturbed quadform `Rm_n(w, v, v, w)` at the origin.
    pub fn stated_value(self, n: u32, gww: f64) -> f64 {
        let n = n as f64;
        match self {
            Self::TimelikeV => -(2.0 / n).exp() / n,
            Self::NullVSpacelikeW => -(4.0 / n) * gww,
            Self::NullVNullW => -8.0 / n,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvaturePerturbation {
    pub case: CurvatureCase,
    pub n: u32,
    pub v: Vec<f64>,
    pub w: Vec<f64>,
    /// `η(w, w)`
    pub gww: f64,
    pub measured: f64,
    pub stated: f64,
}

/// `Rm(w, v, v, w)` at the origin for `e^{2ξ/n} η` on flat `ℝ^{1,dim−1}`,
/// with `ξ` cut off by the default bump.
pub fn curvature_perturbation_in(dim: usize, case: CurvatureCase, n: u32) -> Result<CurvaturePerturbation> {
    if dim < 4 {
        return Err(GeometryError::BadParams(format!("dimension {dim} is below 4")));
    }
    if n == 0 {
        return Err(GeometryError::BadParams("perturbation index must be at least 1".into()));
    }
    let p = vec![0.0; dim];
    let flat = FlatMetric {
        dim,
        signature: Signature::Lorentzian,
    };
    let eta = flat.jet(&p)?;
    let xi = case.profile(&crate::jet::coordinate_jets(&p));
    let f = (bump(&BumpProfile::centered(dim), &p) * xi).scale(1.0 / n as f64);
    let r = riemann(&rescale_metric(&eta, &f))?;
    let (v, w) = case.vectors(dim);
    let measured = riem_quadform(&r, &w, &v)?;
    let gww = eta.inner(&w, &w);
    Ok(CurvaturePerturbation {
        case,
        n,
        stated: case.stated_value(n, gww),
        v,
        w,
        gww,
        measured,
    })
}

pub fn curvature_perturbation(case: CurvatureCase, n: u32) -> Result<CurvaturePerturbation> {
    curvature_perturbation_in(4, case, n)
}
