//! Built-in analytic spacetimes and initial data sets with their surfaces.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{GeometryError, Result};
use crate::geometry::{FlatMetric, FnMetricField, MetricField, Signature};
use crate::initial_data::{InitialDataField, TimeSymmetric};
use crate::jet::{FnScalarField, ScalarField, ScalarJet2};
use crate::stability::SurfaceGrid;
use crate::submanifold::{Embedding, FnEmbedding};

pub const SCENARIO_NAMES: [&str; 4] = [
    "minkowski",
    "minkowski_torus_quotient",
    "einstein_cylinder",
    "schwarzschild_slice_isotropic",
];

pub type Params = BTreeMap<String, f64>;
pub type VectorField = Box<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    Spacetime,
    InitialData,
    Both,
}

/// Where a shipped surface lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ambient {
    Spacetime,
    Slice,
}

pub struct NamedEmbedding {
    pub name: String,
    pub ambient: Ambient,
    pub embedding: Box<dyn Embedding + Send + Sync>,
    pub mots_candidate: bool,
    /// Parameter grid whose nodes are the embedding's samples.
    pub grid: Option<SurfaceGrid>,
}

pub struct Scenario {
    pub name: String,
    pub kind: ScenarioKind,
    /// Parameters with defaults filled in.
    pub params: Params,
    pub metric: Option<Box<dyn MetricField + Send + Sync>>,
    pub initial_data: Option<Box<dyn InitialDataField + Send + Sync>>,
    pub time_orientation: VectorField,
    /// A function with future-directed timelike gradient.
    pub temporal_function: Option<Box<dyn ScalarField + Send + Sync>>,
    pub embeddings: Vec<NamedEmbedding>,
    /// Period of each spacetime coordinate, if identified.
    pub periods: Vec<Option<f64>>,
    /// Spacetime points used for curvature-condition sampling.
    pub spacetime_points: Vec<Vec<f64>>,
    /// Slice points used for constraint sampling.
    pub slice_points: Vec<Vec<f64>>,
}

impl core::fmt::Debug for Scenario {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("Scenario")
            .field("name", &self.name)
            .field("kind", &self.kind)
            .field("params", &self.params)
            .field("embeddings", &self.embeddings.iter().map(|e| e.name.as_str()).collect::<Vec<_>>())
            .finish()
    }
}

impl Scenario {
    pub fn signature(&self) -> Signature {
        Signature::Lorentzian
    }

    pub fn embedding(&self, name: &str) -> Result<&NamedEmbedding> {
        self.embeddings
            .iter()
            .find(|e| e.name == name)
            .ok_or_else(|| GeometryError::BadParams(format!("scenario {} has no surface `{name}`", self.name)))
    }

    pub fn metric(&self) -> Result<&(dyn MetricField + Send + Sync)> {
        self.metric
            .as_deref()
            .ok_or_else(|| GeometryError::BadParams(format!("scenario {} has no spacetime metric", self.name)))
    }

    pub fn initial_data(&self) -> Result<&(dyn InitialDataField + Send + Sync)> {
        self.initial_data
            .as_deref()
            .ok_or_else(|| GeometryError::BadParams(format!("scenario {} has no initial data", self.name)))
    }

    pub fn x_at(&self, p: &[f64]) -> Vec<f64> {
        (self.time_orientation)(p)
    }
}

struct ParamReader<'a> {
    params: &'a Params,
    allowed: &'static [&'static str],
    resolved: Params,
}

impl ParamReader<'_> {
    fn check(&self) -> Result<()> {
        for k in self.params.keys() {
            if !self.allowed.contains(&k.as_str()) {
                return Err(GeometryError::BadParams(format!("unknown parameter `{k}`")));
            }
        }
        Ok(())
    }

    fn real(&mut self, key: &str, default: f64) -> Result<f64> {
        let v = self.params.get(key).copied().unwrap_or(default);
        if !v.is_finite() {
            return Err(GeometryError::BadParams(format!("`{key}` must be finite")));
        }
        self.resolved.insert(key.to_string(), v);
        Ok(v)
    }

    fn positive(&mut self, key: &str, default: f64) -> Result<f64> {
        let v = self.real(key, default)?;
        if v <= 0.0 {
            return Err(GeometryError::BadParams(format!("`{key}` must be positive (got {v})")));
        }
        Ok(v)
    }

    fn integer(&mut self, key: &str, default: usize, min: usize, max: usize) -> Result<usize> {
        let v = self.real(key, default as f64)?;
        if v.fract() != 0.0 || v < min as f64 || v > max as f64 {
            return Err(GeometryError::BadParams(format!(
                "`{key}` must be an integer in [{min}, {max}] (got {v})"
            )));
        }
        Ok(v as usize)
    }
}

fn zero(n: usize) -> ScalarJet2 {
    ScalarJet2::constant(0.0, n)
}

fn unit(dim: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; dim];
    v[i] = 1.0;
    v
}

fn dt(dim: usize) -> VectorField {
    Box::new(move |_| unit(dim, 0))
}

fn minus_t(dim: usize) -> Box<dyn ScalarField + Send + Sync> {
    Box::new(FnScalarField::new(dim, |x: &[ScalarJet2]| -&x[0]))
}

fn lattice(dim: usize, per_axis: &[f64]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = vec![Vec::new()];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|p| per_axis.iter().map(move |c| {
                let mut q = p.clone();
                q.push(*c);
                q
            }))
            .collect();
    }
    out
}

/// Builds a scenario by name.
pub fn build_scenario(name: &str, params: &Params) -> Result<Scenario> {
    match name {
        "minkowski" => minkowski(params),
        "minkowski_torus_quotient" => torus_quotient(params),
        "einstein_cylinder" => einstein_cylinder(params),
        "schwarzschild_slice_isotropic" => schwarzschild(params),
        other => Err(GeometryError::UnknownScenario(other.to_string())),
    }
}

fn flat(dim: usize, signature: Signature) -> FlatMetric {
    FlatMetric { dim, signature }
}

fn round_sphere_embedding(
    ambient_dim: usize,
    offset: usize,
    radius: f64,
    grid: &SurfaceGrid,
) -> FnEmbedding<impl Fn(&[ScalarJet2]) -> Vec<ScalarJet2>> {
    FnEmbedding::new(
        2,
        ambient_dim,
        move |u: &[ScalarJet2]| {
            let (th, ph) = (&u[0], &u[1]);
            let mut x = vec![zero(2); ambient_dim];
            x[offset] = (th.sin() * ph.cos()).scale(radius);
            x[offset + 1] = (th.sin() * ph.sin()).scale(radius);
            x[offset + 2] = th.cos().scale(radius);
            x
        },
        grid.nodes.clone(),
    )
    .with_outward(move |x| {
        let mut v = vec![0.0; ambient_dim];
        v[offset..offset + 3].copy_from_slice(&x[offset..offset + 3]);
        v
    })
}

fn minkowski(params: &Params) -> Result<Scenario> {
    let mut r = ParamReader {
        params,
        allowed: &["dim", "radius", "resolution"],
        resolved: Params::new(),
    };
    r.check()?;
    let dim = r.integer("dim", 4, 2, 11)?;
    let radius = r.positive("radius", 1.0)?;
    let res = r.integer("resolution", 8, 8, 256)?;
    let mut embeddings = Vec::new();
    if dim >= 4 {
        let grid = SurfaceGrid::periodic(vec![1.0, 1.0], vec![res, res])?;
        let plane = FnEmbedding::new(
            2,
            dim,
            move |u: &[ScalarJet2]| {
                let mut x = vec![zero(2); dim];
                x[2] = u[0].clone();
                x[3] = u[1].clone();
                x
            },
            grid.nodes.clone(),
        )
        .with_outward(move |_| unit(dim, 1));
        embeddings.push(NamedEmbedding {
            name: "plane".into(),
            ambient: Ambient::Spacetime,
            embedding: Box::new(plane),
            mots_candidate: false,
            grid: Some(grid),
        });
        let sgrid = SurfaceGrid::lat_long(res, 2 * res)?;
        embeddings.push(NamedEmbedding {
            name: "sphere".into(),
            ambient: Ambient::Spacetime,
            embedding: Box::new(round_sphere_embedding(dim, 1, radius, &sgrid)),
            mots_candidate: false,
            grid: Some(sgrid.clone()),
        });
        if dim == 4 {
            embeddings.push(NamedEmbedding {
                name: "slice_sphere".into(),
                ambient: Ambient::Slice,
                embedding: Box::new(round_sphere_embedding(3, 0, radius, &sgrid)),
                mots_candidate: false,
                grid: Some(sgrid),
            });
        }
    }
    let axis = [-0.7, 0.0, 0.9];
    Ok(Scenario {
        name: "minkowski".into(),
        kind: ScenarioKind::Both,
        params: r.resolved,
        metric: Some(Box::new(flat(dim, Signature::Lorentzian))),
        initial_data: Some(Box::new(TimeSymmetric(flat(dim - 1, Signature::Riemannian)))),
        time_orientation: dt(dim),
        temporal_function: Some(minus_t(dim)),
        embeddings,
        periods: vec![None; dim],
        spacetime_points: lattice(dim.min(4), &axis).into_iter().take(9).map(|mut p| {
            p.resize(dim, 0.25);
            p
        }).collect(),
        slice_points: lattice(dim - 1, &[0.1, 0.6]),
    })
}

fn torus_quotient(params: &Params) -> Result<Scenario> {
    let mut r = ParamReader {
        params,
        allowed: &["period", "resolution"],
        resolved: Params::new(),
    };
    r.check()?;
    let l = r.positive("period", 1.0)?;
    let res = r.integer("resolution", 8, 8, 256)?;
    let dim = 4;
    let grid = SurfaceGrid::periodic(vec![l, l], vec![res, res])?;
    let sigma = FnEmbedding::new(
        2,
        dim,
        |u: &[ScalarJet2]| vec![zero(2), zero(2), u[0].clone(), u[1].clone()],
        grid.nodes.clone(),
    )
    .with_outward(|_| unit(4, 1));
    let cube = SurfaceGrid::periodic(vec![l, l], vec![res, res])?;
    let pi_samples: Vec<Vec<f64>> = cube
        .nodes
        .iter()
        .flat_map(|n| [0.0, 0.5 * l].into_iter().map(move |z| vec![z, n[0], n[1]]))
        .collect();
    let pi = FnEmbedding::new(
        3,
        dim,
        |u: &[ScalarJet2]| vec![zero(3), u[0].clone(), u[1].clone(), u[2].clone()],
        pi_samples,
    );
    let slice_torus = FnEmbedding::new(
        2,
        3,
        |u: &[ScalarJet2]| vec![zero(2), u[0].clone(), u[1].clone()],
        grid.nodes.clone(),
    )
    .with_outward(|_| unit(3, 0));
    let coords = [0.0, 0.3 * l, 0.75 * l];
    let spacetime_points = lattice(3, &coords).into_iter().map(|p| {
        let mut q = vec![0.2];
        q.extend(p);
        q
    }).collect();
    Ok(Scenario {
        name: "minkowski_torus_quotient".into(),
        kind: ScenarioKind::Both,
        params: r.resolved,
        metric: Some(Box::new(flat(dim, Signature::Lorentzian))),
        initial_data: Some(Box::new(TimeSymmetric(flat(3, Signature::Riemannian)))),
        time_orientation: dt(dim),
        temporal_function: Some(minus_t(dim)),
        embeddings: vec![
            NamedEmbedding {
                name: "Sigma".into(),
                ambient: Ambient::Spacetime,
                embedding: Box::new(sigma),
                mots_candidate: false,
                grid: Some(grid.clone()),
            },
            NamedEmbedding {
                name: "Pi".into(),
                ambient: Ambient::Spacetime,
                embedding: Box::new(pi),
                mots_candidate: false,
                grid: None,
            },
            NamedEmbedding {
                name: "slice_torus".into(),
                ambient: Ambient::Slice,
                embedding: Box::new(slice_torus),
                mots_candidate: true,
                grid: Some(grid),
            },
        ],
        periods: vec![None, Some(l), Some(l), Some(l)],
        spacetime_points,
        slice_points: lattice(3, &coords),
    })
}

/// Components of the round metric on `S^n` in hyperspherical angles.
fn round_components(x: &[ScalarJet2], n: usize) -> Vec<ScalarJet2> {
    let d = x[0].dim();
    let mut out = vec![ScalarJet2::constant(0.0, d); n * n];
    let mut factor = ScalarJet2::constant(1.0, d);
    for k in 0..n {
        out[k * n + k] = factor.clone();
        factor = &factor * &x[k].sin().powi(2);
    }
    out
}

fn einstein_cylinder(params: &Params) -> Result<Scenario> {
    let mut r = ParamReader {
        params,
        allowed: &["n", "resolution"],
        resolved: Params::new(),
    };
    r.check()?;
    let n = r.integer("n", 2, 2, 8)?;
    let res = r.integer("resolution", 64, 8, 1024)?;
    let dim = n + 1;
    let metric = FnMetricField::new(dim, Signature::Lorentzian, move |x: &[ScalarJet2]| {
        let s = round_components(&x[1..], n);
        let mut g = vec![zero(dim); dim * dim];
        g[0] = ScalarJet2::constant(-1.0, dim);
        for i in 0..n {
            for j in 0..n {
                g[(i + 1) * dim + j + 1] = s[i * n + j].clone();
            }
        }
        g
    });
    let slice = FnMetricField::new(n, Signature::Riemannian, move |x: &[ScalarJet2]| round_components(x, n));
    let mut embeddings = Vec::new();
    if n <= 3 {
        let grid = if n == 2 {
            SurfaceGrid::circle(2.0 * PI, res)?
        } else {
            SurfaceGrid::lat_long(res, 2 * res)?
        };
        let m = n - 1;
        let in_slice = FnEmbedding::new(
            m,
            n,
            move |u: &[ScalarJet2]| {
                let mut x = vec![ScalarJet2::constant(FRAC_PI_2, m)];
                x.extend(u.iter().cloned());
                x
            },
            grid.nodes.clone(),
        )
        .with_outward(move |_| unit(n, 0));
        let in_spacetime = FnEmbedding::new(
            m,
            dim,
            move |u: &[ScalarJet2]| {
                let mut x = vec![zero(m), ScalarJet2::constant(FRAC_PI_2, m)];
                x.extend(u.iter().cloned());
                x
            },
            grid.nodes.clone(),
        )
        .with_outward(move |_| unit(dim, 1));
        embeddings.push(NamedEmbedding {
            name: "equator".into(),
            ambient: Ambient::Slice,
            embedding: Box::new(in_slice),
            mots_candidate: true,
            grid: Some(grid.clone()),
        });
        embeddings.push(NamedEmbedding {
            name: "equator_spacetime".into(),
            ambient: Ambient::Spacetime,
            embedding: Box::new(in_spacetime),
            mots_candidate: false,
            grid: Some(grid),
        });
    }
    let angles = [0.7, 1.4, 2.2];
    let slice_points: Vec<Vec<f64>> = lattice(n, &angles).into_iter().take(27).collect();
    let spacetime_points = slice_points
        .iter()
        .map(|p| {
            let mut q = vec![0.3];
            q.extend(p.iter().copied());
            q
        })
        .collect();
    Ok(Scenario {
        name: "einstein_cylinder".into(),
        kind: ScenarioKind::Both,
        params: r.resolved,
        metric: Some(Box::new(metric)),
        initial_data: Some(Box::new(TimeSymmetric(slice))),
        time_orientation: dt(dim),
        temporal_function: Some(minus_t(dim)),
        embeddings,
        periods: vec![None; dim],
        spacetime_points,
        slice_points,
    })
}

/// Conformal factor `1 + m/(2r)` as a jet in Cartesian coordinates.
fn isotropic_psi(x: &[ScalarJet2], m: f64) -> ScalarJet2 {
    let r = (&x[0] * &x[0] + &x[1] * &x[1] + &x[2] * &x[2]).sqrt();
    r.recip().scale(0.5 * m) + 1.0
}

fn schwarzschild(params: &Params) -> Result<Scenario> {
    let mut r = ParamReader {
        params,
        allowed: &["m", "resolution"],
        resolved: Params::new(),
    };
    r.check()?;
    let mass = r.positive("m", 1.0)?;
    let res = r.integer("resolution", 16, 8, 128)?;
    let slice = FnMetricField::new(3, Signature::Riemannian, move |x: &[ScalarJet2]| {
        let p4 = isotropic_psi(x, mass).powi(4);
        let mut g = vec![zero(3); 9];
        for i in 0..3 {
            g[i * 3 + i] = p4.clone();
        }
        g
    });
    let metric = FnMetricField::new(4, Signature::Lorentzian, move |x: &[ScalarJet2]| {
        let psi = isotropic_psi(&x[1..], mass);
        let chi = -&psi + 2.0; // 1 − m/(2r)
        let lapse = &chi / &psi;
        let p4 = psi.powi(4);
        let mut g = vec![zero(4); 16];
        g[0] = -lapse.powi(2);
        for i in 1..4 {
            g[i * 4 + i] = p4.clone();
        }
        g
    });
    let grid = SurfaceGrid::lat_long(res, 2 * res)?;
    let horizon = round_sphere_embedding(3, 0, 0.5 * mass, &grid);
    let outside = round_sphere_embedding(3, 0, 2.0 * mass, &grid);
    let dirs = [
        [0.6, 0.0, 0.8],
        [-0.48, 0.6, 0.64],
        [0.0, -1.0, 0.0],
        [0.36, 0.48, -0.8],
    ];
    let mut slice_points = Vec::new();
    for k in 0..50 {
        let rad = mass * (0.3 + 0.1 * k as f64);
        for d in dirs {
            slice_points.push(d.iter().map(|c| c * rad).collect::<Vec<f64>>());
        }
    }
    let spacetime_points = slice_points
        .iter()
        .filter(|p| (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt() > 1.2 * mass)
        .take(12)
        .map(|p| vec![0.0, p[0], p[1], p[2]])
        .collect();
    Ok(Scenario {
        name: "schwarzschild_slice_isotropic".into(),
        kind: ScenarioKind::Both,
        params: r.resolved,
        metric: Some(Box::new(metric)),
        initial_data: Some(Box::new(TimeSymmetric(slice))),
        time_orientation: dt(4),
        temporal_function: None,
        embeddings: vec![
            NamedEmbedding {
                name: "horizon".into(),
                ambient: Ambient::Slice,
                embedding: Box::new(horizon),
                mots_candidate: true,
                grid: Some(grid.clone()),
            },
            NamedEmbedding {
                name: "outer_sphere".into(),
                ambient: Ambient::Slice,
                embedding: Box::new(outside),
                mots_candidate: false,
                grid: Some(grid),
            },
        ],
        periods: vec![None; 4],
        spacetime_points,
        slice_points,
    })
}

/// Seeded analytic metric `η + ε·P(x)` (or `δ + ε·P(x)`) with trigonometric
/// components, small enough to keep the signature.
pub fn random_metric<R: Rng>(rng: &mut R, dim: usize, signature: Signature) -> Box<dyn MetricField + Send + Sync> {
    let n = dim;
    let amp: Vec<f64> = (0..n * n * 3).map(|_| rng.gen_range(-0.05..0.05)).collect();
    let freq: Vec<f64> = (0..n * n * 3).map(|_| rng.gen_range(0.3..1.5)).collect();
    let lorentz = signature == Signature::Lorentzian;
    Box::new(FnMetricField::new(dim, signature, move |x: &[ScalarJet2]| {
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let base = if i != j {
                    0.0
                } else if i == 0 && lorentz {
                    -1.0
                } else {
                    1.0
                };
                let (a, b) = (i.min(j), i.max(j));
                let o = (a * n + b) * 3;
                let k = (a + b) % n;
                let l = (a + 2 * b + 1) % n;
                let c = ScalarJet2::constant(base, n)
                    + x[k].scale(freq[o]).sin().scale(amp[o])
                    + (x[l].scale(freq[o + 1]) + x[k].scale(0.5)).cos().scale(amp[o + 1])
                    + (x[k].clone() * x[l].clone()).scale(amp[o + 2] * freq[o + 2]);
                out.push(c);
            }
        }
        out
    }))
}

/// Seeded analytic scalar field, used as a conformal exponent.
pub fn random_scalar<R: Rng>(rng: &mut R, dim: usize) -> Box<dyn ScalarField + Send + Sync> {
    let c: Vec<f64> = (0..3 * dim + 1).map(|_| rng.gen_range(-0.3..0.3)).collect();
    Box::new(FnScalarField::new(dim, move |x: &[ScalarJet2]| {
        let mut f = ScalarJet2::constant(c[0], dim);
        for i in 0..dim {
            let j = (i + 1) % dim;
            f = f
                + x[i].scale(c[1 + i])
                + (x[i].sin() * x[j].cos()).scale(c[1 + dim + i])
                + (x[i].clone() * x[j].clone()).scale(c[1 + 2 * dim + i]);
        }
        f
    }))
}

/// Uniform point in the cube `[-r, r]^dim`.
pub fn random_point<R: Rng>(rng: &mut R, dim: usize, r: f64) -> Vec<f64> {
    (0..dim).map(|_| rng.gen_range(-r..r)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::initial_data::{constraint_quantities, initial_data_expansions};
    use crate::submanifold::{trapping_classify, TrappingClass};

    #[test]
    fn unknown_names_and_params() {
        assert!(matches!(build_scenario("kerr", &Params::new()), Err(GeometryError::UnknownScenario(_))));
        let mut p = Params::new();
        p.insert("m".into(), -1.0);
        assert!(matches!(build_scenario("schwarzschild_slice_isotropic", &p), Err(GeometryError::BadParams(_))));
        let mut p = Params::new();
        p.insert("n".into(), 2.5);
        assert!(matches!(build_scenario("einstein_cylinder", &p), Err(GeometryError::BadParams(_))));
        let mut p = Params::new();
        p.insert("bogus".into(), 1.0);
        assert!(build_scenario("minkowski", &p).is_err());
    }

    #[test]
    fn torus_sigma_is_extremal() {
        let s = build_scenario("minkowski_torus_quotient", &Params::new()).unwrap();
        let e = s.embedding("Sigma").unwrap();
        let x = |p: &[f64]| s.x_at(p);
        let t = trapping_classify(&e.embedding, s.metric().unwrap(), &x, &e.embedding.samples()).unwrap();
        assert_eq!(t.class, TrappingClass::Extremal);
        let pi = s.embedding("Pi").unwrap();
        let t = trapping_classify(&pi.embedding, s.metric().unwrap(), &x, &pi.embedding.samples()).unwrap();
        assert_eq!(t.class, TrappingClass::Extremal);
    }

    #[test]
    fn mots_candidates_have_vanishing_expansion() {
        for (name, surface) in [
            ("einstein_cylinder", "equator"),
            ("schwarzschild_slice_isotropic", "horizon"),
            ("minkowski_torus_quotient", "slice_torus"),
        ] {
            let s = build_scenario(name, &Params::new()).unwrap();
            let e = s.embedding(surface).unwrap();
            assert!(e.mots_candidate);
            for u in e.embedding.samples().iter().step_by(7) {
                let (tp, _) = initial_data_expansions(s.initial_data().unwrap(), &e.embedding, None, u).unwrap();
                assert!(tp.abs() < 1e-8, "{name}: {tp}");
            }
        }
    }

    #[test]
    fn schwarzschild_slice_is_vacuum() {
        let s = build_scenario("schwarzschild_slice_isotropic", &Params::new()).unwrap();
        assert_eq!(s.slice_points.len(), 200);
        for p in &s.slice_points {
            let c = constraint_quantities(&s.initial_data().unwrap().jet(p).unwrap()).unwrap();
            assert!(c.is_vacuum(1e-8), "{p:?}: {c:?}");
        }
    }

    #[test]
    fn einstein_slice_density() {
        for n in [2usize, 3] {
            let mut p = Params::new();
            p.insert("n".into(), n as f64);
            let s = build_scenario("einstein_cylinder", &p).unwrap();
            for q in &s.slice_points {
                let c = constraint_quantities(&s.initial_data().unwrap().jet(q).unwrap()).unwrap();
                let want = 0.5 * (n * (n - 1)) as f64;
                assert!((c.rho - want).abs() < 1e-9);
            }
        }
    }
}
