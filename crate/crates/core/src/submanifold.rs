//! Extrinsic geometry of spacelike submanifolds: second fundamental form,
//! mean curvature vector, null normal frames, null expansions and the
//! trapping classification.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, SymmetricEigen};

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{GeometryError, Result};
use crate::geometry::{christoffel, MetricField, MetricJet2};
use crate::jet::{coordinate_jets, ScalarJet2};
use crate::linalg;

/// Band used by the trapping decision table.
pub const TRAPPING_TOL: f64 = 1e-9;

/// Position, first and second parameter derivatives of an embedding at one
/// parameter value.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingJet2 {
    pub sigma_dim: usize,
    pub ambient_dim: usize,
    pub point: Vec<f64>,
    /// `∂_a x^A` at `A·m + a`.
    pub d: Vec<f64>,
    /// `∂_a ∂_b x^A` at `(A·m + a)·m + b`.
    pub dd: Vec<f64>,
}

impl EmbeddingJet2 {
    pub fn from_coordinates(sigma_dim: usize, coords: &[ScalarJet2]) -> Self {
        let m = sigma_dim;
        let n = coords.len();
        let mut d = vec![0.0; n * m];
        let mut dd = vec![0.0; n * m * m];
        for (a, c) in coords.iter().enumerate() {
            for i in 0..m {
                d[a * m + i] = c.grad[i];
                for j in 0..m {
                    dd[(a * m + i) * m + j] = c.hess_at(i, j);
                }
            }
        }
        Self {
            sigma_dim,
            ambient_dim: n,
            point: coords.iter().map(|c| c.value).collect(),
            d,
            dd,
        }
    }

    /// Coordinate tangent vector `∂_a x`.
    pub fn tangent(&self, a: usize) -> Vec<f64> {
        (0..self.ambient_dim).map(|k| self.d[k * self.sigma_dim + a]).collect()
    }

    pub fn second(&self, a: usize, b: usize) -> Vec<f64> {
        let m = self.sigma_dim;
        (0..self.ambient_dim).map(|k| self.dd[(k * m + a) * m + b]).collect()
    }
}

/// A parametrized submanifold together with the sample set covering it.
pub trait Embedding {
    fn sigma_dim(&self) -> usize;
    fn ambient_dim(&self) -> usize;
    fn jet(&self, u: &[f64]) -> EmbeddingJet2;
    /// Parameter samples, in the declared traversal order.
    fn samples(&self) -> Vec<Vec<f64>>;
    /// An ambient vector whose normal part points to the designated outward side.
    fn outward_hint(&self, _u: &[f64]) -> Option<Vec<f64>> {
        None
    }
}

impl<T: Embedding + ?Sized> Embedding for &T {
    fn sigma_dim(&self) -> usize {
        (**self).sigma_dim()
    }
    fn ambient_dim(&self) -> usize {
        (**self).ambient_dim()
    }
    fn jet(&self, u: &[f64]) -> EmbeddingJet2 {
        (**self).jet(u)
    }
    fn samples(&self) -> Vec<Vec<f64>> {
        (**self).samples()
    }
    fn outward_hint(&self, u: &[f64]) -> Option<Vec<f64>> {
        (**self).outward_hint(u)
    }
}

impl<T: Embedding + ?Sized> Embedding for Box<T> {
    fn sigma_dim(&self) -> usize {
        (**self).sigma_dim()
    }
    fn ambient_dim(&self) -> usize {
        (**self).ambient_dim()
    }
    fn jet(&self, u: &[f64]) -> EmbeddingJet2 {
        (**self).jet(u)
    }
    fn samples(&self) -> Vec<Vec<f64>> {
        (**self).samples()
    }
    fn outward_hint(&self, u: &[f64]) -> Option<Vec<f64>> {
        (**self).outward_hint(u)
    }
}

type HintFn = Box<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// Embedding given by a closure from parameter jets to ambient coordinate jets.
pub struct FnEmbedding<F> {
    sigma_dim: usize,
    ambient_dim: usize,
    map: F,
    samples: Vec<Vec<f64>>,
    outward: Option<HintFn>,
}

impl<F> FnEmbedding<F>
where
    F: Fn(&[ScalarJet2]) -> Vec<ScalarJet2>,
{
    pub fn new(sigma_dim: usize, ambient_dim: usize, map: F, samples: Vec<Vec<f64>>) -> Self {
        Self {
            sigma_dim,
            ambient_dim,
            map,
            samples,
            outward: None,
        }
    }

    pub fn with_outward(mut self, hint: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static) -> Self {
        self.outward = Some(Box::new(hint));
        self
    }
}

impl<F> Embedding for FnEmbedding<F>
where
    F: Fn(&[ScalarJet2]) -> Vec<ScalarJet2>,
{
    fn sigma_dim(&self) -> usize {
        self.sigma_dim
    }
    fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }
    fn jet(&self, u: &[f64]) -> EmbeddingJet2 {
        let coords = (self.map)(&coordinate_jets(u));
        debug_assert_eq!(coords.len(), self.ambient_dim);
        EmbeddingJet2::from_coordinates(self.sigma_dim, &coords)
    }
    fn samples(&self) -> Vec<Vec<f64>> {
        self.samples.clone()
    }
    fn outward_hint(&self, u: &[f64]) -> Option<Vec<f64>> {
        let x = self.jet(u).point;
        self.outward.as_ref().map(|h| h(&x))
    }
}

/// Orthogonal projection onto the normal space, `P = I − E γ⁻¹ Eᵀ g`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalProjector {
    pub dim: usize,
    pub matrix: Vec<f64>,
}

impl NormalProjector {
    pub fn new(metric: &MetricJet2, tangents: &[Vec<f64>], induced_inverse: &[f64]) -> Self {
        let n = metric.dim;
        let m = tangents.len();
        let mut matrix = vec![0.0; n * n];
        for i in 0..n {
            matrix[i * n + i] = 1.0;
        }
        // lowered tangents (g E_b)_B
        let lowered: Vec<Vec<f64>> = tangents.iter().map(|e| linalg::mat_vec(&metric.g, e)).collect();
        for a in 0..m {
            for b in 0..m {
                let c = induced_inverse[a * m + b];
                for i in 0..n {
                    for j in 0..n {
                        matrix[i * n + j] -= tangents[a][i] * c * lowered[b][j];
                    }
                }
            }
        }
        Self { dim: n, matrix }
    }

    pub fn project(&self, v: &[f64]) -> Vec<f64> {
        linalg::mat_vec(&self.matrix, v)
    }
}

/// Extrinsic quantities of a spacelike submanifold at one parameter value.
#[derive(Debug, Clone)]
pub struct ExtrinsicData {
    pub point: Vec<f64>,
    pub metric: MetricJet2,
    pub tangents: Vec<Vec<f64>>,
    pub induced: Vec<f64>,
    pub induced_inverse: Vec<f64>,
    /// `II(∂_a, ∂_b)` at `a·m + b`.
    pub second_fundamental_form: Vec<Vec<f64>>,
    pub mean_curvature: Vec<f64>,
    /// `g`-orthonormal normal frame.
    pub normal_basis: Vec<Vec<f64>>,
    pub normal_signs: Vec<f64>,
    pub projector: NormalProjector,
}

impl ExtrinsicData {
    pub fn sigma_dim(&self) -> usize {
        self.tangents.len()
    }

    pub fn codimension(&self) -> usize {
        self.metric.dim - self.tangents.len()
    }

    /// `√det γ`.
    pub fn area_density(&self) -> f64 {
        let m = self.sigma_dim();
        linalg::to_matrix(&self.induced, m).determinant().sqrt()
    }
}

/// Extrinsic data of the embedding at parameter `u`, with `sample` used only
/// to label errors.
pub fn extrinsic_at(e: &dyn Embedding, metric: &dyn MetricField, u: &[f64], sample: usize) -> Result<ExtrinsicData> {
    let jet = e.jet(u);
    let g = metric.jet(&jet.point)?;
    extrinsic_from_jets(&jet, g, sample)
}

/// Extrinsic data of the embedding at parameter `u`.
pub fn extrinsic_data(e: &dyn Embedding, metric: &dyn MetricField, u: &[f64]) -> Result<ExtrinsicData> {
    extrinsic_at(e, metric, u, 0)
}

pub fn extrinsic_from_jets(jet: &EmbeddingJet2, g: MetricJet2, sample: usize) -> Result<ExtrinsicData> {
    let n = g.dim;
    let m = jet.sigma_dim;
    if jet.ambient_dim != n {
        return Err(GeometryError::DimensionMismatch {
            expected: n,
            found: jet.ambient_dim,
        });
    }
    if m == 0 || m >= n {
        return Err(GeometryError::CodimensionMismatch { expected: 1, found: n.saturating_sub(m) });
    }
    let d = DMatrix::from_row_slice(n, m, &jet.d);
    if linalg::rank(&d, 1e-10) < m {
        return Err(GeometryError::ImmersionFailure { sample });
    }
    let tangents: Vec<Vec<f64>> = (0..m).map(|a| jet.tangent(a)).collect();
    let induced: Vec<f64> = (0..m * m)
        .map(|ab| g.inner(&tangents[ab / m], &tangents[ab % m]))
        .collect();
    let scale = linalg::max_abs(&induced);
    let eig = SymmetricEigen::new(linalg::to_matrix(&induced, m));
    if eig.eigenvalues.iter().any(|l| *l <= 1e-12 * scale) {
        return Err(GeometryError::NotSpacelike { sample });
    }
    let induced_inverse = linalg::invert(&induced, m).map_err(|_| GeometryError::NotSpacelike { sample })?;
    let conn = christoffel(&g)?;
    let projector = NormalProjector::new(&g, &tangents, &induced_inverse);
    let mut second_fundamental_form = Vec::with_capacity(m * m);
    for a in 0..m {
        for b in 0..m {
            let mut nabla = jet.second(a, b);
            linalg::axpy(1.0, &conn.contract(&tangents[a], &tangents[b]), &mut nabla);
            second_fundamental_form.push(projector.project(&nabla));
        }
    }
    let mut mean_curvature = vec![0.0; n];
    for a in 0..m {
        for b in 0..m {
            linalg::axpy(induced_inverse[a * m + b], &second_fundamental_form[a * m + b], &mut mean_curvature);
        }
    }
    // normal space = ker(Eᵀ g)
    let lowered = DMatrix::from_fn(m, n, |a, k| (0..n).map(|j| tangents[a][j] * g.g(j, k)).sum());
    let ker = linalg::null_space(&lowered, 1e-10);
    let raw: Vec<Vec<f64>> = (0..ker.ncols()).map(|c| ker.column(c).iter().copied().collect()).collect();
    let (normal_basis, normal_signs) = linalg::g_orthonormal_frame(&g.g, &raw)?;
    Ok(ExtrinsicData {
        point: jet.point.clone(),
        metric: g,
        tangents,
        induced,
        induced_inverse,
        second_fundamental_form,
        mean_curvature,
        normal_basis,
        normal_signs,
        projector,
    })
}

/// Future-directed null normals with `g(l₊, l₋) = −2`.
#[derive(Debug, Clone, PartialEq)]
pub struct NullFrame {
    pub l_plus: Vec<f64>,
    pub l_minus: Vec<f64>,
}

impl NullFrame {
    /// Unit timelike normal `(l₊ + l₋)/2`.
    pub fn timelike(&self) -> Vec<f64> {
        self.l_plus.iter().zip(&self.l_minus).map(|(a, b)| 0.5 * (a + b)).collect()
    }

    /// Unit spacelike outward normal `(l₊ − l₋)/2`.
    pub fn outward(&self) -> Vec<f64> {
        self.l_plus.iter().zip(&self.l_minus).map(|(a, b)| 0.5 * (a - b)).collect()
    }
}

/// Null frame of a codimension-2 submanifold at one point. The outward
/// spacelike normal is fixed by `hint`; without one, the spacelike member of
/// the normal basis is used with an arbitrary sign.
pub fn null_frame_at(data: &ExtrinsicData, x: &[f64], hint: Option<&[f64]>) -> Result<NullFrame> {
    let codim = data.codimension();
    if codim != 2 {
        return Err(GeometryError::CodimensionMismatch { expected: 2, found: codim });
    }
    let g = &data.metric;
    let xn = data.projector.project(x);
    let xx = g.inner(&xn, &xn);
    if xx >= -crate::geometry::NULL_REL_TOL * linalg::dot(&xn, &xn) || xx >= 0.0 {
        return Err(GeometryError::NonTimelikeOrientation { value: xx });
    }
    let t: Vec<f64> = xn.iter().map(|c| c / (-xx).sqrt()).collect();
    let raw = match hint {
        Some(h) => data.projector.project(h),
        None => {
            let k = data
                .normal_signs
                .iter()
                .position(|s| *s > 0.0)
                .ok_or_else(|| GeometryError::OrientationFailure("normal space has no spacelike direction".into()))?;
            data.normal_basis[k].clone()
        }
    };
    let along = g.inner(&raw, &t);
    let mut nvec = raw.clone();
    linalg::axpy(along, &t, &mut nvec);
    let nn = g.inner(&nvec, &nvec);
    if nn <= 1e-12 * linalg::dot(&raw, &raw).max(f64::MIN_POSITIVE) {
        return Err(GeometryError::OrientationFailure("outward hint has no spacelike normal part".into()));
    }
    let s = 1.0 / nn.sqrt();
    let l_plus = t.iter().zip(&nvec).map(|(a, b)| a + s * b).collect();
    let l_minus = t.iter().zip(&nvec).map(|(a, b)| a - s * b).collect();
    Ok(NullFrame { l_plus, l_minus })
}

/// Null frame at parameter `u`, orienting with the embedding's outward hint.
pub fn null_frame(
    e: &dyn Embedding,
    metric: &dyn MetricField,
    x: &dyn Fn(&[f64]) -> Vec<f64>,
    u: &[f64],
) -> Result<NullFrame> {
    let data = extrinsic_data(e, metric, u)?;
    let hint = e.outward_hint(u);
    null_frame_at(&data, &x(&data.point), hint.as_deref())
}

/// Null frames over the sample set. Without an outward hint the spacelike
/// normal is propagated by continuity along the sample order; when
/// `closed_loop` is set the last frame must agree with the first.
pub fn null_frames(
    e: &dyn Embedding,
    metric: &dyn MetricField,
    x: &dyn Fn(&[f64]) -> Vec<f64>,
    closed_loop: bool,
) -> Result<Vec<(ExtrinsicData, NullFrame)>> {
    let samples = e.samples();
    let mut out: Vec<(ExtrinsicData, NullFrame)> = Vec::with_capacity(samples.len());
    for (k, u) in samples.iter().enumerate() {
        let data = extrinsic_at(e, metric, u, k)?;
        let xv = x(&data.point);
        let frame = match e.outward_hint(u) {
            Some(h) => null_frame_at(&data, &xv, Some(&h))?,
            None => {
                let mut frame = null_frame_at(&data, &xv, None)?;
                if let Some((_, prev)) = out.last() {
                    if linalg::dot(&frame.outward(), &prev.outward()) < 0.0 {
                        core::mem::swap(&mut frame.l_plus, &mut frame.l_minus);
                    }
                }
                frame
            }
        };
        out.push((data, frame));
    }
    if closed_loop && out.len() > 1 && e.outward_hint(&samples[0]).is_none() {
        let first = out[0].1.outward();
        let last = out[out.len() - 1].1.outward();
        if linalg::dot(&first, &last) < 0.0 {
            return Err(GeometryError::OrientationFailure(
                "continuation around the closed sample loop reverses the outward normal".into(),
            ));
        }
    }
    Ok(out)
}

/// `θ± = −g(H, l±)`.
pub fn null_expansions(data: &ExtrinsicData, frame: &NullFrame) -> (f64, f64) {
    let g = &data.metric;
    (
        -g.inner(&data.mean_curvature, &frame.l_plus),
        -g.inner(&data.mean_curvature, &frame.l_minus),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrappingClass {
    Trapped,
    WeaklyTrappedStrict,
    MotsClass,
    Extremal,
    NotWeaklyTrapped,
}

/// Pointwise trapping data at one sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrappingRecord {
    /// `g(H, H)`
    pub hh: f64,
    /// `g(H, X)`
    pub hx: f64,
    /// Euclidean norm of the components of `H`.
    pub h_aux_norm: f64,
    pub theta_plus: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trapping {
    pub class: TrappingClass,
    pub per_point: Vec<TrappingRecord>,
}

/// Decision table: any point violating the closed inequalities makes the
/// configuration not weakly trapped; otherwise extremal, trapped, MOTS and
/// weakly trapped are tested in that order.
pub fn classify_records(records: &[TrappingRecord], tol: f64) -> TrappingClass {
    if records.iter().any(|r| r.hh > tol || r.hx < -tol) {
        return TrappingClass::NotWeaklyTrapped;
    }
    if records.iter().all(|r| r.h_aux_norm <= tol) {
        return TrappingClass::Extremal;
    }
    if records.iter().all(|r| r.hh < -tol && r.hx > tol) {
        return TrappingClass::Trapped;
    }
    if records.iter().all(|r| matches!(r.theta_plus, Some(t) if t.abs() <= tol)) {
        return TrappingClass::MotsClass;
    }
    TrappingClass::WeaklyTrappedStrict
}

pub fn trapping_record(data: &ExtrinsicData, x: &[f64], frame: Option<&NullFrame>) -> TrappingRecord {
    let h = &data.mean_curvature;
    TrappingRecord {
        hh: data.metric.inner(h, h),
        hx: data.metric.inner(h, x),
        h_aux_norm: linalg::norm(h),
        theta_plus: frame.map(|f| null_expansions(data, f).0),
    }
}

/// Classifies the embedding over `samples` with time orientation `x`.
pub fn trapping_classify(
    e: &dyn Embedding,
    metric: &dyn MetricField,
    x: &dyn Fn(&[f64]) -> Vec<f64>,
    samples: &[Vec<f64>],
) -> Result<Trapping> {
    let codim = e.ambient_dim() - e.sigma_dim();
    let mut per_point = Vec::with_capacity(samples.len());
    let mut prev_out: Option<Vec<f64>> = None;
    for (k, u) in samples.iter().enumerate() {
        let data = extrinsic_at(e, metric, u, k)?;
        let xv = x(&data.point);
        let frame = if codim == 2 {
            let hint = e.outward_hint(u);
            let mut f = null_frame_at(&data, &xv, hint.as_deref())?;
            if hint.is_none() {
                if let Some(p) = &prev_out {
                    if linalg::dot(&f.outward(), p) < 0.0 {
                        core::mem::swap(&mut f.l_plus, &mut f.l_minus);
                    }
                }
                prev_out = Some(f.outward());
            }
            Some(f)
        } else {
            None
        };
        per_point.push(trapping_record(&data, &xv, frame.as_ref()));
    }
    Ok(Trapping {
        class: classify_records(&per_point, TRAPPING_TOL),
        per_point,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{FlatMetric, Signature};
    use alloc::vec;

    fn minkowski() -> FlatMetric {
        FlatMetric {
            dim: 4,
            signature: Signature::Lorentzian,
        }
    }

    fn dt(_: &[f64]) -> Vec<f64> {
        vec![1.0, 0.0, 0.0, 0.0]
    }

    fn round_sphere(r: f64) -> impl Embedding {
        let samples = (1..6)
            .flat_map(|i| (0..6).map(move |j| vec![0.5 * i as f64, 1.0 * j as f64]))
            .collect();
        FnEmbedding::new(
            2,
            4,
            move |u: &[ScalarJet2]| {
                let (th, ph) = (&u[0], &u[1]);
                vec![
                    ScalarJet2::constant(0.0, 2),
                    (th.sin() * ph.cos()).scale(r),
                    (th.sin() * ph.sin()).scale(r),
                    th.cos().scale(r),
                ]
            },
            samples,
        )
        .with_outward(|x| vec![0.0, x[1], x[2], x[3]])
    }

    #[test]
    fn coordinate_plane_is_extremal() {
        let e = FnEmbedding::new(
            2,
            4,
            |u: &[ScalarJet2]| vec![ScalarJet2::constant(0.0, 2), ScalarJet2::constant(0.0, 2), u[0].clone(), u[1].clone()],
            vec![vec![0.1, 0.2], vec![0.5, 0.7]],
        )
        .with_outward(|_| vec![0.0, 1.0, 0.0, 0.0]);
        let m = minkowski();
        let data = extrinsic_data(&e, &m, &[0.3, 0.4]).unwrap();
        assert!(data.second_fundamental_form.iter().flatten().all(|c| c.abs() < 1e-15));
        let frame = null_frame(&e, &m, &dt, &[0.3, 0.4]).unwrap();
        assert_eq!(frame.l_plus, vec![1.0, 1.0, 0.0, 0.0]);
        assert_eq!(frame.l_minus, vec![1.0, -1.0, 0.0, 0.0]);
        let t = trapping_classify(&e, &m, &dt, &e.samples()).unwrap();
        assert_eq!(t.class, TrappingClass::Extremal);
    }

    #[test]
    fn round_sphere_mean_curvature_and_expansions() {
        let r = 2.0;
        let e = round_sphere(r);
        let m = minkowski();
        let u = [0.9, 0.4];
        let data = extrinsic_data(&e, &m, &u).unwrap();
        let h = &data.mean_curvature;
        assert!((linalg::norm(h) - 2.0 / r).abs() < 1e-12);
        // points toward the center
        assert!(linalg::dot(h, &data.point) < 0.0);
        let frame = null_frame(&e, &m, &dt, &u).unwrap();
        let (tp, tm) = null_expansions(&data, &frame);
        assert!((tp - 2.0 / r).abs() < 1e-12);
        assert!((tm + 2.0 / r).abs() < 1e-12);
        // g(H,H) = −θ₊θ₋ under the −2 normalization
        assert!((m.jet(&data.point).unwrap().inner(h, h) + tp * tm).abs() < 1e-12);
        assert!((data.metric.inner(&frame.l_plus, &frame.l_minus) + 2.0).abs() < 1e-12);
        let t = trapping_classify(&e, &m, &dt, &e.samples()).unwrap();
        assert_eq!(t.class, TrappingClass::NotWeaklyTrapped);
    }

    #[test]
    fn mean_curvature_is_reparametrization_invariant() {
        let r = 1.5;
        let e = round_sphere(r);
        let re = FnEmbedding::new(
            2,
            4,
            move |u: &[ScalarJet2]| {
                // θ = s + 0.1 s², φ = w + 0.2 s
                let th = &u[0] + &u[0].powi(2).scale(0.1);
                let ph = &u[1] + &u[0].scale(0.2);
                vec![
                    ScalarJet2::constant(0.0, 2),
                    (th.sin() * ph.cos()).scale(r),
                    (th.sin() * ph.sin()).scale(r),
                    th.cos().scale(r),
                ]
            },
            vec![],
        );
        let s = 0.8_f64;
        let w = 0.3_f64;
        let h1 = extrinsic_data(&e, &minkowski(), &[s + 0.1 * s * s, w + 0.2 * s]).unwrap().mean_curvature;
        let h2 = extrinsic_data(&re, &minkowski(), &[s, w]).unwrap().mean_curvature;
        for (a, b) in h1.iter().zip(&h2) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn null_graph_is_a_mots() {
        // t = x¹ = F(x², x³) has H = ΔF (∂t + ∂₁), a null normal.
        let e = FnEmbedding::new(
            2,
            4,
            |u: &[ScalarJet2]| {
                let f = (u[0].powi(2) + u[1].powi(2)).scale(-0.5);
                vec![f.clone(), f, u[0].clone(), u[1].clone()]
            },
            vec![vec![0.0, 0.0], vec![0.3, -0.2], vec![0.5, 0.5]],
        )
        .with_outward(|_| vec![0.0, 1.0, 0.0, 0.0]);
        let t = trapping_classify(&e, &minkowski(), &dt, &e.samples()).unwrap();
        assert_eq!(t.class, TrappingClass::MotsClass);
        for r in &t.per_point {
            assert!(r.theta_plus.unwrap().abs() < 1e-12);
            assert!(r.hh.abs() < 1e-12);
            assert!((r.hx - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn codimension_and_orientation_errors() {
        let e = FnEmbedding::new(
            1,
            4,
            |u: &[ScalarJet2]| vec![ScalarJet2::constant(0.0, 1), u[0].clone(), ScalarJet2::constant(0.0, 1), ScalarJet2::constant(0.0, 1)],
            vec![vec![0.0]],
        );
        assert!(matches!(
            null_frame(&e, &minkowski(), &dt, &[0.0]),
            Err(GeometryError::CodimensionMismatch { expected: 2, found: 3 })
        ));
        let timelike_curve = FnEmbedding::new(
            1,
            2,
            |u: &[ScalarJet2]| vec![u[0].clone(), ScalarJet2::constant(0.0, 1)],
            vec![vec![0.0]],
        );
        let m2 = FlatMetric {
            dim: 2,
            signature: Signature::Lorentzian,
        };
        assert!(matches!(
            extrinsic_data(&timelike_curve, &m2, &[0.0]),
            Err(GeometryError::NotSpacelike { .. })
        ));
        let degenerate = FnEmbedding::new(
            1,
            2,
            |u: &[ScalarJet2]| vec![ScalarJet2::constant(0.0, 1), u[0].powi(2)],
            vec![vec![0.0]],
        );
        assert!(matches!(
            extrinsic_data(&degenerate, &m2, &[0.0]),
            Err(GeometryError::ImmersionFailure { .. })
        ));
    }

    #[test]
    fn decision_table() {
        let rec = |hh, hx, n, tp| TrappingRecord {
            hh,
            hx,
            h_aux_norm: n,
            theta_plus: tp,
        };
        assert_eq!(classify_records(&[rec(-1.0, 1.0, 1.0, None)], 1e-9), TrappingClass::Trapped);
        assert_eq!(classify_records(&[rec(0.0, 0.0, 0.0, None)], 1e-9), TrappingClass::Extremal);
        assert_eq!(
            classify_records(&[rec(0.0, 1.0, 1.0, Some(0.0)), rec(0.0, 0.0, 0.0, Some(0.0))], 1e-9),
            TrappingClass::MotsClass
        );
        assert_eq!(
            classify_records(&[rec(-1.0, 1.0, 1.0, Some(2.0)), rec(0.0, 0.0, 0.0, Some(0.0))], 1e-9),
            TrappingClass::WeaklyTrappedStrict
        );
        assert_eq!(classify_records(&[rec(0.5, 1.0, 1.0, None)], 1e-9), TrappingClass::NotWeaklyTrapped);
        assert_eq!(classify_records(&[rec(-1.0, -1.0, 1.0, None)], 1e-9), TrappingClass::NotWeaklyTrapped);
    }
}
