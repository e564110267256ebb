//! The MOTS stability operator
//! `L ψ = −Δψ + 2⟨X, grad ψ⟩ + (Q + div X − |X|²) ψ` on closed one- and
//! two-dimensional surfaces, its principal eigenpair, and the deformation of
//! a MOTS along `φν`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::DMatrix;
use rand::Rng;

#[allow(unused_imports)]
use num_traits::Float;

use crate::eigen::{self, Complex};
use crate::error::{GeometryError, Result};
use crate::geometry::{ricci, scalar_curvature};
use crate::initial_data::{constraint_quantities, expansions_from, unit_normal, InitialDataField, SliceMetric};
use crate::jet::ScalarJet2;
use crate::linalg;
use crate::submanifold::{extrinsic_at, extrinsic_from_jets, Embedding, EmbeddingJet2, ExtrinsicData};

pub const MIN_RESOLUTION: usize = 8;
/// `|λ₁|` at or below this is treated as a degenerate MOTS.
pub const DEGENERACY_TOL: f64 = 1e-6;
/// Parameter step for derivatives of `ν` and of `√γ X`.
const PARAM_STEP: f64 = 5e-4;

#[derive(Debug, Clone, PartialEq)]
pub enum GridKind {
    /// Tensor grid on a product of circles with the given periods.
    Periodic { periods: Vec<f64> },
    /// Cell-centered colatitude `θ ∈ (0, π)` times periodic longitude.
    LatLong,
}

/// Nodes of a closed parameter domain, row-major over axes.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceGrid {
    pub kind: GridKind,
    pub resolution: Vec<usize>,
    pub spacing: Vec<f64>,
    pub nodes: Vec<Vec<f64>>,
}

impl SurfaceGrid {
    pub fn periodic(periods: Vec<f64>, resolution: Vec<usize>) -> Result<Self> {
        if periods.len() != resolution.len() || !(1..=2).contains(&periods.len()) {
            return Err(GeometryError::BadParams("periodic grids have one or two axes".into()));
        }
        if let Some(&n) = resolution.iter().find(|n| **n < MIN_RESOLUTION) {
            return Err(GeometryError::ResolutionTooLow {
                found: n,
                minimum: MIN_RESOLUTION,
            });
        }
        let spacing: Vec<f64> = periods.iter().zip(&resolution).map(|(l, n)| l / *n as f64).collect();
        let nodes = tensor_nodes(&resolution, |a, i| i as f64 * spacing[a]);
        Ok(Self {
            kind: GridKind::Periodic { periods },
            resolution,
            spacing,
            nodes,
        })
    }

    pub fn circle(period: f64, n: usize) -> Result<Self> {
        Self::periodic(vec![period], vec![n])
    }

    pub fn lat_long(n_theta: usize, n_phi: usize) -> Result<Self> {
        for n in [n_theta, n_phi] {
            if n < MIN_RESOLUTION {
                return Err(GeometryError::ResolutionTooLow {
                    found: n,
                    minimum: MIN_RESOLUTION,
                });
            }
        }
        if !n_phi.is_multiple_of(2) {
            return Err(GeometryError::BadParams("longitude resolution must be even".into()));
        }
        let spacing = vec![PI / n_theta as f64, 2.0 * PI / n_phi as f64];
        let resolution = vec![n_theta, n_phi];
        let nodes = tensor_nodes(&resolution, |a, i| if a == 0 { (i as f64 + 0.5) * spacing[0] } else { i as f64 * spacing[1] });
        Ok(Self {
            kind: GridKind::LatLong,
            resolution,
            spacing,
            nodes,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.resolution.len()
    }

    fn split(&self, k: usize) -> [usize; 2] {
        if self.dim() == 1 {
            [k, 0]
        } else {
            [k / self.resolution[1], k % self.resolution[1]]
        }
    }

    fn join(&self, i: [usize; 2]) -> usize {
        if self.dim() == 1 {
            i[0]
        } else {
            i[0] * self.resolution[1] + i[1]
        }
    }

    /// Neighbor of node `k` one step along `axis`; `None` marks a pole face.
    /// The second value is the node used for centered differences across a
    /// pole (the reflected node).
    fn neighbor(&self, k: usize, axis: usize, dir: isize) -> (Option<usize>, usize) {
        let mut idx = self.split(k);
        let n = self.resolution[axis] as isize;
        let j = idx[axis] as isize + dir;
        match self.kind {
            GridKind::LatLong if axis == 0 && (j < 0 || j >= n) => {
                let half = self.resolution[1] / 2;
                idx[1] = (idx[1] + half) % self.resolution[1];
                (None, self.join(idx))
            }
            _ => {
                idx[axis] = j.rem_euclid(n) as usize;
                let m = self.join(idx);
                (Some(m), m)
            }
        }
    }

    /// Cell measures for the area density `√γ` at the nodes.
    pub fn weights(&self, sqrt_gamma: &[f64]) -> Vec<f64> {
        let cell: f64 = self.spacing.iter().product();
        match self.kind {
            GridKind::Periodic { .. } => sqrt_gamma.iter().map(|s| s * cell).collect(),
            GridKind::LatLong => {
                let h = self.spacing[0];
                (0..self.len())
                    .map(|k| {
                        let th = self.nodes[k][0];
                        let band = (th - 0.5 * h).cos() - (th + 0.5 * h).cos();
                        sqrt_gamma[k] / th.sin() * band * self.spacing[1]
                    })
                    .collect()
            }
        }
    }
}

fn tensor_nodes(resolution: &[usize], coord: impl Fn(usize, usize) -> f64) -> Vec<Vec<f64>> {
    match resolution.len() {
        1 => (0..resolution[0]).map(|i| vec![coord(0, i)]).collect(),
        _ => (0..resolution[0])
            .flat_map(|i| (0..resolution[1]).map(move |j| (i, j)))
            .map(|(i, j)| vec![coord(0, i), coord(1, j)])
            .collect(),
    }
}

/// Nodal coefficients of the stability operator in parameter coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityCoefficients {
    pub sigma_dim: usize,
    /// Induced metric `γ_ab` per node, row-major.
    pub induced: Vec<Vec<f64>>,
    pub q: Vec<f64>,
    /// Contravariant components `X^a` per node.
    pub x: Vec<Vec<f64>>,
    pub div_x: Vec<f64>,
    pub norm_x_sq: Vec<f64>,
}

impl StabilityCoefficients {
    /// Coefficients over an arclength-parametrized (flat) grid.
    pub fn flat(grid: &SurfaceGrid, q: Vec<f64>, x: Vec<Vec<f64>>, div_x: Vec<f64>) -> Self {
        let m = grid.dim();
        let mut id = vec![0.0; m * m];
        for a in 0..m {
            id[a * m + a] = 1.0;
        }
        let norm_x_sq = x.iter().map(|v| linalg::dot(v, v)).collect();
        Self {
            sigma_dim: m,
            induced: vec![id; grid.len()],
            q,
            x,
            div_x,
            norm_x_sq,
        }
    }

    pub fn sqrt_gamma(&self) -> Vec<f64> {
        let m = self.sigma_dim;
        self.induced
            .iter()
            .map(|g| linalg::to_matrix(g, m).determinant().sqrt())
            .collect()
    }

    /// `Q + div X − |X|²`.
    pub fn potential(&self) -> Vec<f64> {
        (0..self.q.len())
            .map(|k| self.q[k] + self.div_x[k] - self.norm_x_sq[k])
            .collect()
    }

    /// Adds a constant to `Q`.
    pub fn shifted(mut self, c: f64) -> Self {
        self.q.iter_mut().for_each(|q| *q += c);
        self
    }
}

/// Geometric data of a hypersurface of a slice at one node.
#[derive(Debug, Clone)]
pub struct NodeGeometry {
    pub extrinsic: ExtrinsicData,
    pub nu: Vec<f64>,
    /// Scalar second fundamental form `A_ab = −h(ν, ∇_{E_a} E_b)`.
    pub a: Vec<f64>,
    pub h_nu: f64,
    pub scal_sigma: f64,
    pub rho: f64,
    pub j_nu: f64,
    pub a_plus_k_sq: f64,
    pub q: f64,
    /// `X_a = K(ν, E_a)`.
    pub x_lower: Vec<f64>,
    pub x_upper: Vec<f64>,
    pub theta_plus: f64,
}

fn outward(surface: &dyn Embedding, u: &[f64]) -> Result<Vec<f64>> {
    surface
        .outward_hint(u)
        .ok_or_else(|| GeometryError::OrientationFailure("the surface declares no outward side".into()))
}

fn contract2(ginv: &[f64], a: &[f64], b: &[f64], m: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                for l in 0..m {
                    s += ginv[i * m + k] * ginv[j * m + l] * a[i * m + j] * b[k * m + l];
                }
            }
        }
    }
    s
}

/// Evaluates the coefficient geometry of `surface` at parameter `u`.
pub fn node_geometry(data: &dyn InitialDataField, surface: &dyn Embedding, u: &[f64], sample: usize) -> Result<NodeGeometry> {
    let ext = extrinsic_at(surface, &SliceMetric(data), u, sample)?;
    if ext.codimension() != 1 {
        return Err(GeometryError::CodimensionMismatch {
            expected: 1,
            found: ext.codimension(),
        });
    }
    let nu = unit_normal(&ext, Some(&outward(surface, u)?))?;
    node_geometry_from(data, ext, nu)
}

fn node_geometry_from(data: &dyn InitialDataField, ext: ExtrinsicData, nu: Vec<f64>) -> Result<NodeGeometry> {
    let init = data.jet(&ext.point)?;
    let m = ext.sigma_dim();
    let h = &init.h;
    let a: Vec<f64> = ext.second_fundamental_form.iter().map(|ii| -h.inner(&nu, ii)).collect();
    let ginv = &ext.induced_inverse;
    let h_nu: f64 = (0..m * m).map(|ab| ginv[ab] * a[ab]).sum();
    let a_sq = contract2(ginv, &a, &a, m);
    let ric = ricci(h)?;
    let scal = scalar_curvature(h)?;
    let scal_sigma = scal - 2.0 * linalg::bilinear(&ric, &nu, &nu) + h_nu * h_nu - a_sq;
    let c = constraint_quantities(&init)?;
    let j_nu = c.j_of(&nu);
    let apk: Vec<f64> = (0..m * m)
        .map(|ab| a[ab] + init.k_form(&ext.tangents[ab / m], &ext.tangents[ab % m]))
        .collect();
    let a_plus_k_sq = contract2(ginv, &apk, &apk, m);
    let q = 0.5 * scal_sigma - (j_nu + c.rho) - 0.5 * a_plus_k_sq;
    let x_lower: Vec<f64> = ext.tangents.iter().map(|e| init.k_form(&nu, e)).collect();
    let x_upper: Vec<f64> = (0..m).map(|a| (0..m).map(|b| ginv[a * m + b] * x_lower[b]).sum()).collect();
    let theta_plus = expansions_from(&init, &ext, &nu)?.0;
    Ok(NodeGeometry {
        extrinsic: ext,
        nu,
        a,
        h_nu,
        scal_sigma,
        rho: c.rho,
        j_nu,
        a_plus_k_sq,
        q,
        x_lower,
        x_upper,
        theta_plus,
    })
}

/// Stability coefficients of `surface` inside the slice at the grid nodes.
pub fn stability_coefficients(
    data: &dyn InitialDataField,
    surface: &dyn Embedding,
    grid: &SurfaceGrid,
) -> Result<StabilityCoefficients> {
    let m = surface.sigma_dim();
    if m != grid.dim() {
        return Err(GeometryError::DimensionMismatch {
            expected: grid.dim(),
            found: m,
        });
    }
    let mut out = StabilityCoefficients {
        sigma_dim: m,
        induced: Vec::with_capacity(grid.len()),
        q: Vec::with_capacity(grid.len()),
        x: Vec::with_capacity(grid.len()),
        div_x: Vec::with_capacity(grid.len()),
        norm_x_sq: Vec::with_capacity(grid.len()),
    };
    // √γ X^a at a parameter value
    let weighted_x = |u: &[f64]| -> Result<Vec<f64>> {
        let g = node_geometry(data, surface, u, 0)?;
        let s = g.extrinsic.area_density();
        Ok(g.x_upper.iter().map(|x| s * x).collect())
    };
    for (k, u) in grid.nodes.iter().enumerate() {
        let g = node_geometry(data, surface, u, k)?;
        let s = g.extrinsic.area_density();
        let mut div = 0.0;
        if g.x_lower.iter().any(|x| *x != 0.0) || linalg::max_abs(&data.jet(&g.extrinsic.point)?.k) != 0.0 {
            for a in 0..m {
                let mut up = u.clone();
                let mut dn = u.clone();
                up[a] += PARAM_STEP;
                dn[a] -= PARAM_STEP;
                div += (weighted_x(&up)?[a] - weighted_x(&dn)?[a]) / (2.0 * PARAM_STEP);
            }
            div /= s;
        }
        out.norm_x_sq.push(linalg::dot(&g.x_lower, &g.x_upper));
        out.induced.push(g.extrinsic.induced);
        out.q.push(g.q);
        out.x.push(g.x_upper);
        out.div_x.push(div);
    }
    Ok(out)
}

/// Finite-volume discretization of `L` as a dense matrix acting on nodal values.
pub fn assemble_stability_operator(grid: &SurfaceGrid, coeffs: &StabilityCoefficients) -> Result<DMatrix<f64>> {
    if let Some(&n) = grid.resolution.iter().find(|n| **n < MIN_RESOLUTION) {
        return Err(GeometryError::ResolutionTooLow {
            found: n,
            minimum: MIN_RESOLUTION,
        });
    }
    let n = grid.len();
    let m = grid.dim();
    if coeffs.q.len() != n || coeffs.sigma_dim != m {
        return Err(GeometryError::DimensionMismatch {
            expected: n,
            found: coeffs.q.len(),
        });
    }
    let sqrt_gamma = coeffs.sqrt_gamma();
    let cell: f64 = grid.spacing.iter().product();
    let density: Vec<f64> = grid.weights(&sqrt_gamma).iter().map(|w| w / cell).collect();
    // diffusion tensor √γ γ^{ab}
    let mut diff = Vec::with_capacity(n);
    for k in 0..n {
        let inv = linalg::invert(&coeffs.induced[k], m)?;
        diff.push(inv.iter().map(|c| c * sqrt_gamma[k]).collect::<Vec<f64>>());
    }
    let potential = coeffs.potential();
    let h = &grid.spacing;
    let mut mat = DMatrix::zeros(n, n);
    for k in 0..n {
        let rk = 1.0 / density[k];
        for a in 0..m {
            for dir in [1isize, -1] {
                let (face, _) = grid.neighbor(k, a, dir);
                let Some(kp) = face else { continue };
                let d = |b: usize| 0.5 * (diff[k][a * m + b] + diff[kp][a * m + b]);
                // outward flux through this face, F = D_aa ∂_aψ + Σ D_ab ∂_bψ
                // enters −Δψ_k as −dir·F/(h_a ρ_k)
                let s = -(dir as f64) * rk / h[a];
                let daa = d(a) / h[a];
                let sign = dir as f64;
                mat[(k, kp)] += s * sign * daa;
                mat[(k, k)] -= s * sign * daa;
                for b in (0..m).filter(|b| *b != a) {
                    let dab = 0.5 * d(b) / (2.0 * h[b]);
                    for node in [k, kp] {
                        let (_, plus) = grid.neighbor(node, b, 1);
                        let (_, minus) = grid.neighbor(node, b, -1);
                        mat[(k, plus)] += s * dab;
                        mat[(k, minus)] -= s * dab;
                    }
                }
            }
            let xa = coeffs.x[k][a];
            if xa != 0.0 {
                let (_, plus) = grid.neighbor(k, a, 1);
                let (_, minus) = grid.neighbor(k, a, -1);
                mat[(k, plus)] += xa / h[a];
                mat[(k, minus)] -= xa / h[a];
            }
        }
        mat[(k, k)] += potential[k];
    }
    Ok(mat)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalEigen {
    pub lambda1: Complex,
    /// Positive-mean eigenfunction with unit max-norm.
    pub eigenfunction: Vec<f64>,
    /// All eigenvalues, ascending by real part.
    pub spectrum: Vec<Complex>,
    pub positive: bool,
}

impl PrincipalEigen {
    pub fn is_real(&self) -> bool {
        self.lambda1.1.abs() <= 1e-8 * (1.0 + self.lambda1.0.abs())
    }

    /// Largest relative deviation of the eigenfunction from its mean.
    pub fn variation(&self) -> f64 {
        let mean = self.eigenfunction.iter().sum::<f64>() / self.eigenfunction.len() as f64;
        self.eigenfunction.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max) / mean.abs()
    }
}

/// Eigenvalue of minimal real part (ties broken by minimal `|Im|`) and its
/// eigenfunction.
pub fn principal_eigenvalue(matrix: &DMatrix<f64>) -> Result<PrincipalEigen> {
    let mut spectrum = eigen::eigenvalues(matrix)?;
    spectrum.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.abs().total_cmp(&b.1.abs())));
    let scale = 1.0 + matrix.amax();
    let min_re = spectrum[0].0;
    let lambda1 = spectrum
        .iter()
        .take_while(|z| z.0 <= min_re + 1e-12 * scale)
        .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .copied()
        .unwrap_or(spectrum[0]);
    let mut eigenfunction = eigen::inverse_iteration(matrix, lambda1.0)?;
    let mean: f64 = eigenfunction.iter().sum();
    let s = if mean < 0.0 { -1.0 } else { 1.0 };
    let peak = eigenfunction.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    eigenfunction.iter_mut().for_each(|v| *v *= s / peak);
    let positive = eigenfunction.iter().all(|v| *v > 0.0);
    Ok(PrincipalEigen {
        lambda1,
        eigenfunction,
        spectrum,
        positive,
    })
}

/// Trigonometric interpolant of nodal values on a periodic tensor grid.
#[derive(Debug, Clone)]
pub struct TrigInterpolant {
    omega: Vec<f64>,
    offset: Vec<f64>,
    modes: Vec<(Vec<f64>, f64, f64)>,
}

impl TrigInterpolant {
    /// `values` row-major over `resolution`, nodes at `offset_a + i·period_a/N_a`.
    pub fn new(values: &[f64], resolution: &[usize], periods: &[f64], offset: &[f64]) -> Self {
        let dims = resolution.len();
        let omega: Vec<f64> = periods.iter().map(|l| 2.0 * PI / l).collect();
        let freq = |n: usize| -> Vec<(i64, f64)> {
            let half = (n / 2) as i64;
            (-half..=half)
                .map(|k| (k, if n.is_multiple_of(2) && k.abs() == half { 0.5 } else { 1.0 }))
                .collect()
        };
        let axes: Vec<Vec<(i64, f64)>> = resolution.iter().map(|n| freq(*n)).collect();
        let total: usize = resolution.iter().product();
        let mut combos: Vec<(Vec<i64>, f64)> = vec![(Vec::new(), 1.0)];
        for ax in &axes {
            combos = combos
                .into_iter()
                .flat_map(|(ks, w)| ax.iter().map(move |(k, wk)| {
                    let mut ks = ks.clone();
                    ks.push(*k);
                    (ks, w * wk)
                }))
                .collect();
        }
        let idx = |flat: usize| -> Vec<usize> {
            if dims == 1 {
                vec![flat]
            } else {
                vec![flat / resolution[1], flat % resolution[1]]
            }
        };
        let modes = combos
            .into_iter()
            .map(|(ks, w)| {
                let (mut re, mut im) = (0.0, 0.0);
                for (flat, v) in values.iter().enumerate() {
                    let j = idx(flat);
                    let ph: f64 = (0..dims)
                        .map(|a| 2.0 * PI * ks[a] as f64 * j[a] as f64 / resolution[a] as f64)
                        .sum();
                    re += v * ph.cos();
                    im -= v * ph.sin();
                }
                let wk: Vec<f64> = ks.iter().map(|k| *k as f64).collect();
                (wk, w * re / total as f64, w * im / total as f64)
            })
            .collect();
        Self {
            omega,
            offset: offset.to_vec(),
            modes,
        }
    }

    pub fn jet(&self, u: &[f64]) -> ScalarJet2 {
        let m = u.len();
        let mut out = ScalarJet2::constant(0.0, m);
        for (k, re, im) in &self.modes {
            let w: Vec<f64> = (0..m).map(|a| self.omega[a] * k[a]).collect();
            let ph: f64 = (0..m).map(|a| w[a] * (u[a] - self.offset[a])).sum();
            let (s, c) = ph.sin_cos();
            // Re[(re + i im) e^{i ph}] and its derivatives
            let v = re * c - im * s;
            let dv = -(re * s + im * c);
            out.value += v;
            for a in 0..m {
                out.grad[a] += w[a] * dv;
                for b in 0..m {
                    out.hess[a * m + b] -= w[a] * w[b] * v;
                }
            }
        }
        out
    }
}

/// Smooth interpolant of nodal values on `grid`.
pub fn interpolate(grid: &SurfaceGrid, values: &[f64]) -> TrigInterpolant {
    match &grid.kind {
        GridKind::Periodic { periods } => TrigInterpolant::new(values, &grid.resolution, periods, &vec![0.0; grid.dim()]),
        GridKind::LatLong => {
            // extend over θ ∈ (−π, π) using ψ(−θ, φ) = ψ(θ, φ + π)
            let (nt, np) = (grid.resolution[0], grid.resolution[1]);
            let mut ext = Vec::with_capacity(2 * nt * np);
            for i in 0..2 * nt {
                for j in 0..np {
                    let v = if i < nt {
                        values[i * np + j]
                    } else {
                        values[(2 * nt - i - 1) * np + (j + np / 2) % np]
                    };
                    ext.push(v);
                }
            }
            TrigInterpolant::new(&ext, &[2 * nt, np], &[2.0 * PI, 2.0 * PI], &[0.5 * grid.spacing[0], 0.0])
        }
    }
}

/// Direction of the trapping displacement: along `+ν` when `λ₁ < 0`.
pub fn displacement_sign(lambda1: f64) -> f64 {
    if lambda1 < 0.0 {
        1.0
    } else {
        -1.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeformationReport {
    pub lambda1: f64,
    /// Signed displacement parameter used for the trapping test.
    pub step: f64,
    pub fd_step: f64,
    pub theta_plus_initial: Vec<f64>,
    /// Centered difference of `θ₊(Σ_t)` at `t = 0`.
    pub derivative: Vec<f64>,
    /// `λ₁ φ`.
    pub predicted: Vec<f64>,
    pub max_rel_error: f64,
    pub theta_plus_displaced: Vec<f64>,
}

impl DeformationReport {
    pub fn outer_trapped(&self) -> bool {
        self.theta_plus_displaced.iter().all(|t| *t < 0.0)
    }
}

/// Outward unit normal along the surface, with parameter derivatives by
/// central differences.
struct NormalJet {
    value: Vec<f64>,
    d: Vec<Vec<f64>>,
    dd: Vec<Vec<f64>>,
}

fn normal_at(data: &dyn InitialDataField, surface: &dyn Embedding, u: &[f64]) -> Result<Vec<f64>> {
    let ext = extrinsic_at(surface, &SliceMetric(data), u, 0)?;
    unit_normal(&ext, Some(&outward(surface, u)?))
}

fn normal_jet(data: &dyn InitialDataField, surface: &dyn Embedding, u: &[f64]) -> Result<NormalJet> {
    let m = u.len();
    let h = PARAM_STEP;
    let at = |da: &[(usize, f64)]| -> Result<Vec<f64>> {
        let mut v = u.to_vec();
        for (a, s) in da {
            v[*a] += s * h;
        }
        normal_at(data, surface, &v)
    };
    let value = at(&[])?;
    let n = value.len();
    let mut d = Vec::with_capacity(m);
    let mut dd = vec![vec![0.0; n]; m * m];
    for a in 0..m {
        let p = at(&[(a, 1.0)])?;
        let q = at(&[(a, -1.0)])?;
        d.push((0..n).map(|i| (p[i] - q[i]) / (2.0 * h)).collect());
        dd[a * m + a] = (0..n).map(|i| (p[i] - 2.0 * value[i] + q[i]) / (h * h)).collect();
        for b in 0..a {
            let pp = at(&[(a, 1.0), (b, 1.0)])?;
            let pm = at(&[(a, 1.0), (b, -1.0)])?;
            let mp = at(&[(a, -1.0), (b, 1.0)])?;
            let mm = at(&[(a, -1.0), (b, -1.0)])?;
            let v: Vec<f64> = (0..n).map(|i| (pp[i] - pm[i] - mp[i] + mm[i]) / (4.0 * h * h)).collect();
            dd[a * m + b] = v.clone();
            dd[b * m + a] = v;
        }
    }
    Ok(NormalJet { value, d, dd })
}

/// `θ₊` of `x + t φ ν` at one parameter value.
fn displaced_theta(
    data: &dyn InitialDataField,
    base: &EmbeddingJet2,
    nu: &NormalJet,
    phi: &ScalarJet2,
    t: f64,
) -> Result<f64> {
    let m = base.sigma_dim;
    let n = base.ambient_dim;
    let mut jet = base.clone();
    for k in 0..n {
        jet.point[k] += t * phi.value * nu.value[k];
        for a in 0..m {
            jet.d[k * m + a] += t * (phi.grad[a] * nu.value[k] + phi.value * nu.d[a][k]);
            for b in 0..m {
                jet.dd[(k * m + a) * m + b] += t
                    * (phi.hess_at(a, b) * nu.value[k]
                        + phi.grad[a] * nu.d[b][k]
                        + phi.grad[b] * nu.d[a][k]
                        + phi.value * nu.dd[a * m + b][k]);
            }
        }
    }
    let init = data.jet(&jet.point)?;
    let ext = extrinsic_from_jets(&jet, init.h.clone(), 0)?;
    let nu_t = unit_normal(&ext, Some(&nu.value))?;
    Ok(expansions_from(&init, &ext, &nu_t)?.0)
}

/// Deforms the MOTS along `φν` with the principal eigenfunction `φ`.
/// Checks `dθ₊/dt|₀ = λ₁φ` by central differences with `fd_step` and
/// evaluates `θ₊` after a displacement of size `step` in the direction given
/// by [`displacement_sign`].
pub fn deformation_check(
    data: &dyn InitialDataField,
    surface: &dyn Embedding,
    grid: &SurfaceGrid,
    eigen: &PrincipalEigen,
    step: f64,
    fd_step: f64,
) -> Result<DeformationReport> {
    let lambda1 = eigen.lambda1.0;
    if lambda1.abs() <= DEGENERACY_TOL {
        return Err(GeometryError::DegenerateMots { lambda1 });
    }
    if !eigen.positive {
        return Err(GeometryError::BadParams("principal eigenfunction is not positive".into()));
    }
    if eigen.eigenfunction.len() != grid.len() {
        return Err(GeometryError::DimensionMismatch {
            expected: grid.len(),
            found: eigen.eigenfunction.len(),
        });
    }
    let phi = interpolate(grid, &eigen.eigenfunction);
    let t = displacement_sign(lambda1) * step.abs();
    let mut report = DeformationReport {
        lambda1,
        step: t,
        fd_step,
        theta_plus_initial: Vec::with_capacity(grid.len()),
        derivative: Vec::with_capacity(grid.len()),
        predicted: Vec::with_capacity(grid.len()),
        max_rel_error: 0.0,
        theta_plus_displaced: Vec::with_capacity(grid.len()),
    };
    for (k, u) in grid.nodes.iter().enumerate() {
        let base = surface.jet(u);
        let nu = normal_jet(data, surface, u)?;
        let p = phi.jet(u);
        let plus = displaced_theta(data, &base, &nu, &p, fd_step)?;
        let minus = displaced_theta(data, &base, &nu, &p, -fd_step)?;
        let d = (plus - minus) / (2.0 * fd_step);
        let want = lambda1 * eigen.eigenfunction[k];
        report.max_rel_error = report.max_rel_error.max((d - want).abs() / want.abs());
        report.theta_plus_initial.push(displaced_theta(data, &base, &nu, &p, 0.0)?);
        report.derivative.push(d);
        report.predicted.push(want);
        report.theta_plus_displaced.push(displaced_theta(data, &base, &nu, &p, t)?);
    }
    if report.derivative.iter().any(|d| !d.is_finite()) {
        return Err(GeometryError::BadParams(format!("non-finite derivative with fd step {fd_step}")));
    }
    Ok(report)
}

/// Seeded stability operator on a circle of length `2π` with `n` nodes:
/// trigonometric `Q` and, unless `time_symmetric`, a trigonometric `X` with
/// its exact divergence.
pub fn random_circle_instance<R: Rng>(
    rng: &mut R,
    n: usize,
    time_symmetric: bool,
) -> Result<(SurfaceGrid, StabilityCoefficients)> {
    let grid = SurfaceGrid::circle(2.0 * PI, n)?;
    let modes = 3;
    let coeffs = |rng: &mut R, amp: f64| -> Vec<(f64, f64)> {
        (0..=modes).map(|_| (rng.gen_range(-amp..amp), rng.gen_range(-amp..amp))).collect()
    };
    let qc = coeffs(rng, 1.0);
    let xc = if time_symmetric { vec![(0.0, 0.0); modes + 1] } else { coeffs(rng, 0.6) };
    let series = |c: &[(f64, f64)], t: f64| -> (f64, f64) {
        c.iter().enumerate().fold((0.0, 0.0), |(v, d), (k, (a, b))| {
            let k = k as f64;
            let (s, co) = (k * t).sin_cos();
            (v + a * co + b * s, d - a * k * s + b * k * co)
        })
    };
    let mut q = Vec::with_capacity(n);
    let mut x = Vec::with_capacity(n);
    let mut div_x = Vec::with_capacity(n);
    for node in &grid.nodes {
        let t = node[0];
        q.push(series(&qc, t).0);
        let (xv, xd) = series(&xc, t);
        x.push(vec![xv]);
        div_x.push(xd);
    }
    Ok((grid.clone(), StabilityCoefficients::flat(&grid, q, x, div_x)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle_laplacian(n: usize, q: f64) -> (SurfaceGrid, DMatrix<f64>) {
        let grid = SurfaceGrid::circle(2.0 * PI, n).unwrap();
        let c = StabilityCoefficients::flat(&grid, vec![q; n], vec![vec![0.0]; n], vec![0.0; n]);
        let m = assemble_stability_operator(&grid, &c).unwrap();
        (grid, m)
    }

    #[test]
    fn periodic_stencil() {
        let (grid, m) = circle_laplacian(16, 0.0);
        let h = grid.spacing[0];
        assert!((m[(3, 3)] - 2.0 / (h * h)).abs() < 1e-12);
        assert!((m[(3, 4)] + 1.0 / (h * h)).abs() < 1e-12);
        assert!((m[(0, 15)] + 1.0 / (h * h)).abs() < 1e-12);
        let e = principal_eigenvalue(&m).unwrap();
        assert!(e.lambda1.0.abs() < 1e-10);
        assert!(e.variation() < 1e-10);
    }

    #[test]
    fn shift_and_drift() {
        let (_, m) = circle_laplacian(32, -1.0);
        let e = principal_eigenvalue(&m).unwrap();
        assert!((e.lambda1.0 + 1.0).abs() < 1e-10);
        let grid = SurfaceGrid::circle(2.0 * PI, 32).unwrap();
        let c = StabilityCoefficients::flat(&grid, vec![0.3; 32], vec![vec![0.7]; 32], vec![0.0; 32]);
        // constant drift X: potential q − X²
        let e = principal_eigenvalue(&assemble_stability_operator(&grid, &c).unwrap()).unwrap();
        assert!((e.lambda1.0 - (0.3 - 0.49)).abs() < 1e-10);
        assert!(e.positive && e.variation() < 1e-9);
    }

    #[test]
    fn low_resolution_rejected() {
        assert!(matches!(
            SurfaceGrid::circle(1.0, 4),
            Err(GeometryError::ResolutionTooLow { found: 4, minimum: 8 })
        ));
    }

    #[test]
    fn sphere_laplacian_spectrum() {
        let grid = SurfaceGrid::lat_long(16, 32).unwrap();
        let n = grid.len();
        let induced = grid
            .nodes
            .iter()
            .map(|u| vec![1.0, 0.0, 0.0, u[0].sin().powi(2)])
            .collect();
        let c = StabilityCoefficients {
            sigma_dim: 2,
            induced,
            q: vec![0.0; n],
            x: vec![vec![0.0, 0.0]; n],
            div_x: vec![0.0; n],
            norm_x_sq: vec![0.0; n],
        };
        let w = grid.weights(&c.sqrt_gamma());
        assert!((w.iter().sum::<f64>() - 4.0 * PI).abs() < 1e-10);
        let m = assemble_stability_operator(&grid, &c).unwrap();
        let e = principal_eigenvalue(&m).unwrap();
        assert!(e.lambda1.0.abs() < 1e-9);
        // l = 1 triplet
        for k in 1..4 {
            assert!((e.spectrum[k].0 - 2.0).abs() < 3e-2, "{:?}", e.spectrum[k]);
        }
        // weighted symmetry
        for i in 0..n {
            for j in 0..n {
                assert!((w[i] * m[(i, j)] - w[j] * m[(j, i)]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn interpolant_reproduces_smooth_functions() {
        let grid = SurfaceGrid::lat_long(12, 16).unwrap();
        // z = cos θ and x = sin θ cos φ are smooth on the sphere
        let f = |u: &[f64]| u[0].cos() + u[0].sin() * u[1].cos();
        let vals: Vec<f64> = grid.nodes.iter().map(|u| f(u)).collect();
        let it = interpolate(&grid, &vals);
        let j = it.jet(&[0.7, 1.3]);
        assert!((j.value - f(&[0.7, 1.3])).abs() < 1e-12);
        assert!((j.grad[0] - (-(0.7f64).sin() + (0.7f64).cos() * (1.3f64).cos())).abs() < 1e-11);
        assert!((j.hess_at(1, 1) + (0.7f64).sin() * (1.3f64).cos()).abs() < 1e-11);
        let c = SurfaceGrid::circle(2.0, 10).unwrap();
        let vals: Vec<f64> = c.nodes.iter().map(|u| (PI * u[0]).sin()).collect();
        let j = interpolate(&c, &vals).jet(&[0.3]);
        assert!((j.grad[0] - PI * (0.3 * PI).cos()).abs() < 1e-12);
    }
}
