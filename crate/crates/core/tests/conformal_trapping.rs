use horizon_core::conformal::{
    conformal_h_normsq, conformal_mean_curvature, curvature_perturbation, rescale_metric, trapping_perturbation,
    BumpProfile, ConformalMetric, CurvatureCase,
};
use horizon_core::error::GeometryError;
use horizon_core::geometry::{riemann, Signature};
use horizon_core::jet::{FnScalarField, ScalarField, ScalarJet2};
use horizon_core::scenarios::{build_scenario, Params};
use horizon_core::submanifold::{extrinsic_at, trapping_classify, Embedding, FnEmbedding, TrappingClass};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn torus_profile() -> BumpProfile {
    // Σ lies in a box of side 1 around the origin of the chart
    BumpProfile::new(2.0, 3.0, vec![0.0; 4]).unwrap()
}

#[test]
fn torus_becomes_trapped_with_predicted_values() {
    let s = build_scenario("minkowski_torus_quotient", &Params::new()).unwrap();
    let sigma = s.embedding("Sigma").unwrap();
    let tau = s.temporal_function.as_deref().unwrap();
    let x = |p: &[f64]| s.x_at(p);
    let mut last_dev = f64::INFINITY;
    for n in 1..=32u32 {
        let out = trapping_perturbation(s.metric().unwrap(), &sigma.embedding, tau, &torus_profile(), n, &x).unwrap();
        let nf = n as f64;
        for p in &out.samples {
            assert!((p.hh + 4.0 / (nf * nf)).abs() <= 1e-6 * 4.0 / (nf * nf));
            assert!((p.hx - 2.0 / nf).abs() <= 1e-6 * 2.0 / nf);
            assert!((p.hh - p.hh_formula).abs() < 1e-12 && (p.hx - p.hx_formula).abs() < 1e-12);
        }
        let dev = out.samples.iter().map(|p| p.metric_deviation).fold(0.0, f64::max);
        assert!(dev <= last_dev);
        last_dev = dev;
        assert!(out.strictly_trapped());
        let class = trapping_classify(&sigma.embedding, &out.metric, &x, &sigma.embedding.samples()).unwrap();
        assert_eq!(class.class, TrappingClass::Trapped);
    }
}

#[test]
fn strictly_trapped_input_stays_trapped() {
    // the torus after one perturbation is already trapped; perturb again
    let s = build_scenario("minkowski_torus_quotient", &Params::new()).unwrap();
    let sigma = s.embedding("Sigma").unwrap();
    let tau = s.temporal_function.as_deref().unwrap();
    let x = |p: &[f64]| s.x_at(p);
    let first = trapping_perturbation(s.metric().unwrap(), &sigma.embedding, tau, &torus_profile(), 1, &x).unwrap();
    for n in [1, 3, 10] {
        let second = trapping_perturbation(&first.metric, &sigma.embedding, tau, &torus_profile(), n, &x).unwrap();
        assert!(second.strictly_trapped());
    }
}

#[test]
fn untrapped_input_is_rejected() {
    let s = build_scenario("minkowski", &Params::new()).unwrap();
    let sphere = s.embedding("sphere").unwrap();
    let tau = s.temporal_function.as_deref().unwrap();
    let x = |p: &[f64]| s.x_at(p);
    let r = trapping_perturbation(s.metric().unwrap(), &sphere.embedding, tau, &torus_profile(), 1, &x);
    assert!(matches!(r, Err(GeometryError::NotWeaklyTrapped { .. })));
}

fn random_factor(rng: &mut ChaCha8Rng, dim: usize) -> impl ScalarField + use<> {
    let c: Vec<f64> = (0..2 * dim + 1).map(|_| rng.gen_range(-0.3..0.3)).collect();
    FnScalarField::new(dim, move |x: &[ScalarJet2]| {
        let mut f = ScalarJet2::constant(c[0], dim);
        for i in 0..dim {
            f = f + x[i].scale(c[1 + i]) + (x[i].sin() * x[(i + 1) % dim].cos()).scale(c[1 + dim + i]);
        }
        f
    })
}

#[test]
fn transformation_law_matches_direct_recomputation() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let cases: [(&str, &str); 4] = [
        ("minkowski", "sphere"),
        ("minkowski", "plane"),
        ("minkowski_torus_quotient", "Sigma"),
        ("einstein_cylinder", "equator_spacetime"),
    ];
    for k in 0..20 {
        let (name, surface) = cases[k % cases.len()];
        let s = build_scenario(name, &Params::new()).unwrap();
        let e = s.embedding(surface).unwrap();
        let m = s.metric().unwrap();
        let f = random_factor(&mut rng, m.dim());
        let hat = ConformalMetric::new(m, &f);
        let samples = e.embedding.samples();
        let u = &samples[rng.gen_range(0..samples.len())];
        let base = extrinsic_at(&e.embedding, m, u, 0).unwrap();
        let direct = extrinsic_at(&e.embedding, &hat, u, 0).unwrap();
        let fj = f.jet(&base.point);
        let sd = e.embedding.sigma_dim();
        let h = conformal_mean_curvature(&base.mean_curvature, &fj, sd, &base.metric, &base.projector).unwrap();
        let hh = conformal_h_normsq(&base.mean_curvature, &fj, sd, &base.metric, &base.projector).unwrap();
        let scale = direct.mean_curvature.iter().fold(1e-12_f64, |a, c| a.max(c.abs()));
        for (a, b) in h.iter().zip(&direct.mean_curvature) {
            assert!((a - b).abs() <= 1e-6 * scale, "{name}/{surface}: {a} vs {b}");
        }
        let hh_direct = direct.metric.inner(&direct.mean_curvature, &direct.mean_curvature);
        assert!((hh - hh_direct).abs() <= 1e-6 * hh_direct.abs().max(1e-12));
    }
}

#[test]
fn rescaling_by_opposite_factors_is_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let s = build_scenario("einstein_cylinder", &Params::new()).unwrap();
    let m = s.metric().unwrap();
    for _ in 0..10 {
        let f = random_factor(&mut rng, 3);
        let p = [0.1, rng.gen_range(0.5..2.5), rng.gen_range(0.0..6.0)];
        let g = m.jet(&p).unwrap();
        let fj = f.jet(&p);
        let back = rescale_metric(&rescale_metric(&g, &fj), &-&fj);
        for (a, b) in back.ddg.iter().zip(&g.ddg) {
            assert!((a - b).abs() <= 1e-10 * (1.0 + b.abs()));
        }
    }
}

#[test]
fn curvature_values_and_the_null_spacelike_factor() {
    for n in [1u32, 2, 5, 10] {
        let nf = n as f64;
        let t = curvature_perturbation(CurvatureCase::TimelikeV, n).unwrap();
        assert!((t.measured + (2.0 / nf).exp() / nf).abs() <= 1e-6 * t.measured.abs());
        let nn = curvature_perturbation(CurvatureCase::NullVNullW, n).unwrap();
        assert!((nn.measured + 8.0 / nf).abs() <= 1e-6 * 8.0 / nf);
        let ns = curvature_perturbation(CurvatureCase::NullVSpacelikeW, n).unwrap();
        assert!((ns.measured + 8.0 / nf * ns.gww).abs() <= 1e-6 * 8.0 / nf);
    }
}

#[test]
fn kulkarni_nomizu_oracle_for_perturbed_flat_metric() {
    // For ĝ = e^{2f}η: R̂m = e^{2f}(−(Hess f − df⊗df + ½|df|²η) ⊙ η) on a flat background.
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let f = random_factor(&mut rng, 4);
    let p = [0.2, -0.1, 0.4, 0.3];
    let eta = horizon_core::geometry::MetricJet2::flat(Signature::Lorentzian, 4);
    let fj = f.jet(&p);
    let r = riemann(&rescale_metric(&eta, &fj)).unwrap();
    let df2: f64 = (0..4).map(|i| eta.g(i, i) * fj.grad[i] * fj.grad[i]).sum();
    let a = |i: usize, j: usize| fj.hess_at(i, j) - fj.grad[i] * fj.grad[j] + 0.5 * df2 * eta.g(i, j);
    let w = (2.0 * fj.value).exp();
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                for l in 0..4 {
                    let kn = a(i, l) * eta.g(j, k) + a(j, k) * eta.g(i, l) - a(i, k) * eta.g(j, l) - a(j, l) * eta.g(i, k);
                    assert!((r.get(i, j, k, l) + w * kn).abs() < 1e-9, "{i}{j}{k}{l}");
                }
            }
        }
    }
}

#[test]
fn classification_invariant_under_the_transformation_law() {
    // a spacelike surface that is not trapped in flat space
    let e = FnEmbedding::new(
        2,
        4,
        |u: &[ScalarJet2]| {
            let z = ScalarJet2::constant(0.0, 2);
            vec![(u[0].powi(2) + u[1].powi(2)).scale(0.1), z, u[0].clone(), u[1].clone()]
        },
        vec![vec![0.1, 0.2], vec![-0.3, 0.1], vec![0.0, 0.0]],
    )
    .with_outward(|_| vec![0.0, 1.0, 0.0, 0.0]);
    let s = build_scenario("minkowski", &Params::new()).unwrap();
    let x = |p: &[f64]| s.x_at(p);
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..20 {
        let f = random_factor(&mut rng, 4);
        let hat = ConformalMetric::new(s.metric().unwrap(), &f);
        let direct = trapping_classify(&e, &hat, &x, &e.samples()).unwrap();
        let recs: Vec<_> = e
            .samples()
            .iter()
            .map(|u| {
                let b = extrinsic_at(&e, s.metric().unwrap(), u, 0).unwrap();
                let fj = f.jet(&b.point);
                let h = conformal_mean_curvature(&b.mean_curvature, &fj, 2, &b.metric, &b.projector).unwrap();
                let gh = rescale_metric(&b.metric, &fj);
                (gh.inner(&h, &h), gh.inner(&h, &x(&b.point)))
            })
            .collect();
        for (r, (hh, hx)) in direct.per_point.iter().zip(recs) {
            assert!((r.hh - hh).abs() < 1e-9 && (r.hx - hx).abs() < 1e-9);
        }
    }
}
