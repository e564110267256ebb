//! Sampled membership tests for the Ricci and sectional-type curvature
//! conditions, and the tidal operator `w ↦ R(w, v)v`.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{GeometryError, Result};
use crate::geometry::{require_timelike, riemann, ricci, CurvatureTensor, MetricField, MetricJet2, ZERO_TOL};
use crate::linalg;

/// Rapidities of the boosted timelike samples.
pub const BOOST_LEVELS: [f64; 4] = [0.0, 1.0, 2.0, 4.0];
/// Directions per point unless overridden.
pub const DEFAULT_DIRECTIONS: usize = 64;
/// Band separating a violation from round-off.
pub const CONDITION_TOL: f64 = 1e-9;
/// Random `w` directions added to the complement basis in the sectional check.
const EXTRA_W: usize = 4;

/// Causal directions at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeSample {
    /// Future causal vectors of unit Euclidean norm.
    pub vectors: Vec<Vec<f64>>,
    pub seed: u64,
    pub boost_levels: Vec<f64>,
}

/// A `g`-orthonormal frame whose first vector is the unit normalization of `x`.
pub fn adapted_frame(m: &MetricJet2, x: &[f64]) -> Result<Vec<Vec<f64>>> {
    require_timelike(m, x)?;
    let s = (-m.inner(x, x)).sqrt();
    let e0: Vec<f64> = x.iter().map(|c| c / s).collect();
    let row = DMatrix::from_row_slice(1, m.dim, &linalg::mat_vec(&m.g, &e0));
    let ker = linalg::null_space(&row, 1e-12);
    let raw: Vec<Vec<f64>> = (0..ker.ncols()).map(|c| ker.column(c).iter().copied().collect()).collect();
    let (spatial, _) = linalg::g_orthonormal_frame(&m.g, &raw)?;
    let mut frame = vec![e0];
    frame.extend(spatial);
    Ok(frame)
}

fn random_unit(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    loop {
        let u: Vec<f64> = (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let r = linalg::norm(&u);
        if r > 1e-3 && r <= 1.0 {
            return u.iter().map(|c| c / r).collect();
        }
    }
}

fn unit_aux(v: Vec<f64>) -> Vec<f64> {
    let r = linalg::norm(&v);
    v.into_iter().map(|c| c / r).collect()
}

/// `count` future causal vectors at a point: exact null vectors `e₀ ± e_i`
/// first, then seeded directions cycling through a null level and the boost
/// levels.
pub fn sample_cone(m: &MetricJet2, x: &[f64], count: usize, seed: u64) -> Result<ConeSample> {
    let frame = adapted_frame(m, x)?;
    let k = frame.len() - 1;
    let mut vectors = Vec::with_capacity(count);
    'exact: for i in 1..=k {
        for s in [1.0, -1.0] {
            if vectors.len() == count {
                break 'exact;
            }
            let mut v = frame[0].clone();
            linalg::axpy(s, &frame[i], &mut v);
            vectors.push(unit_aux(v));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut level = 0usize;
    while vectors.len() < count {
        let u = random_unit(&mut rng, k);
        let (a, b) = match level % (BOOST_LEVELS.len() + 1) {
            0 => (1.0, 1.0),
            l => {
                let r = BOOST_LEVELS[l - 1];
                (r.cosh(), r.sinh())
            }
        };
        level += 1;
        let mut v: Vec<f64> = frame[0].iter().map(|c| a * c).collect();
        for (i, ui) in u.iter().enumerate() {
            linalg::axpy(b * ui, &frame[i + 1], &mut v);
        }
        vectors.push(unit_aux(v));
    }
    Ok(ConeSample {
        vectors,
        seed,
        boost_levels: BOOST_LEVELS.to_vec(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    /// `Ric(v, v) > 0` for causal `v`.
    StrongEnergy,
    /// `Ric(v, v) ≥ 0` for causal `v`.
    Energy,
    /// `Rm(w, v, v, w) > 0` for causal `v` and `w` not collinear with `v`.
    Positive,
    /// `Rm(w, v, v, w) ≥ 0` for causal `v` and all `w`.
    FlatOrPositive,
    /// Tidal operators positive semidefinite for causal `v`.
    Tidal,
}

impl Condition {
    pub fn tag(self) -> &'static str {
        match self {
            Self::StrongEnergy => "SE",
            Self::Energy => "E",
            Self::Positive => "P",
            Self::FlatOrPositive => "FP",
            Self::Tidal => "O",
        }
    }

    pub fn is_strict(self) -> bool {
        matches!(self, Self::StrongEnergy | Self::Positive)
    }

    fn violates(self, value: f64) -> bool {
        if self.is_strict() {
            value <= CONDITION_TOL
        } else {
            value < -CONDITION_TOL
        }
    }
}

/// A sampled counterexample.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub point: Vec<f64>,
    pub v: Vec<f64>,
    pub w: Option<Vec<f64>>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    SatisfiedOnSamples,
    ViolatedAt(Witness),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub condition: Condition,
    pub verdict: Verdict,
    pub min_value: f64,
    pub samples_used: usize,
}

impl ConditionReport {
    pub fn satisfied(&self) -> bool {
        matches!(self.verdict, Verdict::SatisfiedOnSamples)
    }
}

fn point_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_add((index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

struct Tracker {
    condition: Condition,
    best: Option<Witness>,
    used: usize,
}

impl Tracker {
    fn new(condition: Condition) -> Self {
        Self {
            condition,
            best: None,
            used: 0,
        }
    }

    fn push(&mut self, point: &[f64], v: &[f64], w: Option<&[f64]>, value: f64) {
        self.used += 1;
        if self.best.as_ref().is_none_or(|b| value < b.value) {
            self.best = Some(Witness {
                point: point.to_vec(),
                v: v.to_vec(),
                w: w.map(<[f64]>::to_vec),
                value,
            });
        }
    }

    fn finish(self) -> ConditionReport {
        let min_value = self.best.as_ref().map_or(f64::INFINITY, |b| b.value);
        let verdict = match self.best {
            Some(b) if self.condition.violates(b.value) => Verdict::ViolatedAt(b),
            _ => Verdict::SatisfiedOnSamples,
        };
        ConditionReport {
            condition: self.condition,
            verdict,
            min_value,
            samples_used: self.used,
        }
    }
}

/// Tests `Ric(v, v) > 0` (strict) or `≥ 0` on sampled causal directions.
pub fn check_ricci_condition(
    m: &dyn MetricField,
    points: &[Vec<f64>],
    strict: bool,
    x: &dyn Fn(&[f64]) -> Vec<f64>,
    seed: u64,
    count: usize,
) -> Result<ConditionReport> {
    let mut t = Tracker::new(if strict { Condition::StrongEnergy } else { Condition::Energy });
    for (k, p) in points.iter().enumerate() {
        let jet = m.jet(p)?;
        let ric = ricci(&jet)?;
        let cone = sample_cone(&jet, &x(p), count, point_seed(seed, k))?;
        for v in &cone.vectors {
            t.push(p, v, None, linalg::bilinear(&ric, v, v));
        }
    }
    Ok(t.finish())
}

/// Euclidean-orthonormal basis of the complement of `v`, followed by seeded
/// unit combinations of it.
fn w_directions(v: &[f64], rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let row = DMatrix::from_row_slice(1, v.len(), v);
    let ker = linalg::null_space(&row, 1e-12);
    let mut out: Vec<Vec<f64>> = (0..ker.ncols()).map(|c| ker.column(c).iter().copied().collect()).collect();
    let k = out.len();
    for _ in 0..EXTRA_W {
        let c = random_unit(rng, k);
        let mut w = vec![0.0; v.len()];
        for (a, ca) in c.iter().enumerate() {
            linalg::axpy(*ca, &out[a], &mut w);
        }
        out.push(w);
    }
    out
}

/// Tests `Rm(w, v, v, w) > 0` (strict) or `≥ 0` on sampled pairs.
pub fn check_riem_condition(
    m: &dyn MetricField,
    points: &[Vec<f64>],
    strict: bool,
    x: &dyn Fn(&[f64]) -> Vec<f64>,
    seed: u64,
    count: usize,
) -> Result<ConditionReport> {
    let mut t = Tracker::new(if strict { Condition::Positive } else { Condition::FlatOrPositive });
    for (k, p) in points.iter().enumerate() {
        let jet = m.jet(p)?;
        let r = riemann(&jet)?;
        let s = point_seed(seed, k);
        let cone = sample_cone(&jet, &x(p), count, s)?;
        let mut rng = ChaCha8Rng::seed_from_u64(s ^ 0x5555_5555_5555_5555);
        for v in &cone.vectors {
            for w in w_directions(v, &mut rng) {
                t.push(p, v, Some(&w), r.eval(&w, v, v, &w));
            }
        }
    }
    Ok(t.finish())
}

/// Tests positive semidefiniteness of the tidal operators on sampled
/// directions; the recorded value is the smallest eigenvalue.
pub fn check_tidal_condition(
    m: &dyn MetricField,
    points: &[Vec<f64>],
    x: &dyn Fn(&[f64]) -> Vec<f64>,
    seed: u64,
    count: usize,
) -> Result<ConditionReport> {
    let mut t = Tracker::new(Condition::Tidal);
    for (k, p) in points.iter().enumerate() {
        let jet = m.jet(p)?;
        let r = riemann(&jet)?;
        let cone = sample_cone(&jet, &x(p), count, point_seed(seed, k))?;
        for v in &cone.vectors {
            let op = tidal_operator(&jet, &r, v)?;
            t.push(p, v, None, op.min_eigenvalue);
        }
    }
    Ok(t.finish())
}

/// Dispatches on the condition.
pub fn check_condition(
    condition: Condition,
    m: &dyn MetricField,
    points: &[Vec<f64>],
    x: &dyn Fn(&[f64]) -> Vec<f64>,
    seed: u64,
    count: usize,
) -> Result<ConditionReport> {
    match condition {
        Condition::StrongEnergy => check_ricci_condition(m, points, true, x, seed, count),
        Condition::Energy => check_ricci_condition(m, points, false, x, seed, count),
        Condition::Positive => check_riem_condition(m, points, true, x, seed, count),
        Condition::FlatOrPositive => check_riem_condition(m, points, false, x, seed, count),
        Condition::Tidal => check_tidal_condition(m, points, x, seed, count),
    }
}

/// Matrix of `w ↦ R(w, v)v` in an orthonormal basis of `v^⊥` (timelike `v`)
/// or of a screen space representing `v^⊥/ℝv` (null `v`).
#[derive(Debug, Clone, PartialEq)]
pub struct TidalOperator {
    pub basis: Vec<Vec<f64>>,
    /// Row-major, `Rm(e_a, v, v, e_b)`.
    pub matrix: Vec<f64>,
    pub eigenvalues: Vec<f64>,
    pub min_eigenvalue: f64,
    pub null: bool,
}

impl TidalOperator {
    pub fn is_psd(&self) -> bool {
        self.min_eigenvalue >= -CONDITION_TOL
    }

    pub fn trace(&self) -> f64 {
        let k = self.basis.len();
        (0..k).map(|a| self.matrix[a * k + a]).sum()
    }

    /// Largest asymmetry `|M_ab − M_ba|`.
    pub fn asymmetry(&self) -> f64 {
        let k = self.basis.len();
        let mut out = 0.0_f64;
        for a in 0..k {
            for b in 0..k {
                out = out.max((self.matrix[a * k + b] - self.matrix[b * k + a]).abs());
            }
        }
        out
    }
}

fn orthonormal_complement(m: &MetricJet2, rows: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let lowered: Vec<f64> = rows.iter().flat_map(|r| linalg::mat_vec(&m.g, r)).collect();
    let a = DMatrix::from_row_slice(rows.len(), m.dim, &lowered);
    let ker = linalg::null_space(&a, 1e-12);
    let raw: Vec<Vec<f64>> = (0..ker.ncols()).map(|c| ker.column(c).iter().copied().collect()).collect();
    Ok(linalg::g_orthonormal_frame(&m.g, &raw)?.0)
}

pub fn tidal_operator(m: &MetricJet2, r: &CurvatureTensor, v: &[f64]) -> Result<TidalOperator> {
    let aux = linalg::norm(v);
    if aux < ZERO_TOL {
        return Err(GeometryError::ZeroVector);
    }
    let vv = m.inner(v, v);
    let null = vv.abs() <= crate::geometry::NULL_REL_TOL * aux * aux;
    let basis = if null {
        // v = a(T + N) for the unit timelike T of a reference frame
        let frame = linalg::g_orthonormal_frame(&m.g, &(0..m.dim).map(|i| {
            let mut e = vec![0.0; m.dim];
            e[i] = 1.0;
            e
        }).collect::<Vec<_>>())?;
        let k = frame.1.iter().position(|s| *s < 0.0).ok_or_else(|| {
            GeometryError::InvalidJet("tidal operator needs a Lorentzian metric".into())
        })?;
        let t = &frame.0[k];
        let a = -m.inner(v, t);
        let mut nv: Vec<f64> = v.iter().map(|c| c / a).collect();
        linalg::axpy(-1.0, t, &mut nv);
        let mut companion: Vec<f64> = t.clone();
        linalg::axpy(-1.0, &nv, &mut companion);
        let companion: Vec<f64> = companion.iter().map(|c| c / a).collect();
        debug_assert!((m.inner(v, &companion) + 2.0).abs() < 1e-8 * (1.0 + aux));
        orthonormal_complement(m, &[v.to_vec(), companion])?
    } else {
        orthonormal_complement(m, &[v.to_vec()])?
    };
    let k = basis.len();
    let mut matrix = vec![0.0; k * k];
    for a in 0..k {
        for b in 0..k {
            matrix[a * k + b] = r.eval(&basis[a], v, v, &basis[b]);
        }
    }
    let eig = SymmetricEigen::new(linalg::to_matrix(&matrix, k));
    let eigenvalues: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let min_eigenvalue = eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(TidalOperator {
        basis,
        matrix,
        eigenvalues,
        min_eigenvalue,
        null,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{causal_classify, CausalClass, FlatMetric, Signature};

    fn dt(_: &[f64]) -> Vec<f64> {
        vec![1.0, 0.0, 0.0, 0.0]
    }

    #[test]
    fn cone_contract() {
        let m = MetricJet2::flat(Signature::Lorentzian, 4);
        let x = [1.0, 0.0, 0.0, 0.0];
        let c = sample_cone(&m, &x, 8, 0).unwrap();
        assert_eq!(c.vectors.len(), 8);
        assert!(c.vectors.iter().filter(|v| m.inner(v, v) == 0.0).count() >= 2);
        for v in &c.vectors {
            assert!(m.inner(v, v) <= 1e-10);
            let cls = causal_classify(&m, v, &x).unwrap();
            assert!(matches!(cls, CausalClass::TimelikeFuture | CausalClass::NullFuture));
        }
        assert_eq!(c, sample_cone(&m, &x, 8, 0).unwrap());
        assert_ne!(sample_cone(&m, &x, 20, 1).unwrap(), sample_cone(&m, &x, 20, 2).unwrap());
    }

    #[test]
    fn flat_space_verdicts() {
        let m = FlatMetric {
            dim: 4,
            signature: Signature::Lorentzian,
        };
        let pts = vec![vec![0.0; 4], vec![0.3, 0.1, -0.2, 0.5]];
        let e = check_ricci_condition(&m, &pts, false, &dt, 7, 16).unwrap();
        assert!(e.satisfied());
        assert_eq!(e.min_value, 0.0);
        let se = check_ricci_condition(&m, &pts, true, &dt, 7, 16).unwrap();
        assert!(matches!(se.verdict, Verdict::ViolatedAt(ref w) if w.value == 0.0));
        assert!(check_riem_condition(&m, &pts, false, &dt, 7, 16).unwrap().satisfied());
        assert!(!check_riem_condition(&m, &pts, true, &dt, 7, 16).unwrap().satisfied());
        assert!(check_tidal_condition(&m, &pts, &dt, 7, 16).unwrap().satisfied());
    }

    #[test]
    fn tidal_operator_dimensions() {
        let m = MetricJet2::flat(Signature::Lorentzian, 4);
        let r = riemann(&m).unwrap();
        let t = tidal_operator(&m, &r, &[1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!((t.basis.len(), t.null), (3, false));
        let n = tidal_operator(&m, &r, &[1.0, 0.0, 1.0, 0.0]).unwrap();
        assert_eq!((n.basis.len(), n.null), (2, true));
        for e in &n.basis {
            assert!(m.inner(e, &[1.0, 0.0, 1.0, 0.0]).abs() < 1e-12);
            assert!((m.inner(e, e) - 1.0).abs() < 1e-12);
        }
        assert!(n.is_psd());
        assert!(matches!(tidal_operator(&m, &r, &[0.0; 4]), Err(GeometryError::ZeroVector)));
    }
}
