use horizon_core::error::GeometryError;
use horizon_core::scenarios::{build_scenario, Params, Scenario};
use horizon_core::stability::{
    assemble_stability_operator, deformation_check, principal_eigenvalue, stability_coefficients, PrincipalEigen,
    SurfaceGrid,
};

fn scenario(name: &str, pairs: &[(&str, f64)]) -> Scenario {
    let params: Params = pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    build_scenario(name, &params).unwrap()
}

fn spectrum(s: &Scenario, surface: &str) -> (SurfaceGrid, PrincipalEigen, Vec<f64>) {
    let e = s.embedding(surface).unwrap();
    let grid = e.grid.clone().unwrap();
    let c = stability_coefficients(s.initial_data().unwrap(), &e.embedding, &grid).unwrap();
    let m = assemble_stability_operator(&grid, &c).unwrap();
    (grid, principal_eigenvalue(&m).unwrap(), c.q)
}

#[test]
fn equator_of_einstein_cylinder() {
    let s = scenario("einstein_cylinder", &[("n", 2.0), ("resolution", 32.0)]);
    let (_, eig, q) = spectrum(&s, "equator");
    for v in q {
        assert!((v + 1.0).abs() < 1e-9);
    }
    assert!((eig.lambda1.0 + 1.0).abs() < 1e-9);
    assert!(eig.is_real() && eig.positive);
    assert!(eig.variation() < 1e-6);
}

#[test]
fn equator_excited_mode_converges_at_second_order() {
    let mut excited = Vec::new();
    for n in [32.0, 64.0, 128.0, 256.0] {
        let s = scenario("einstein_cylinder", &[("n", 2.0), ("resolution", n)]);
        let (_, eig, _) = spectrum(&s, "equator");
        assert!((eig.lambda1.0 + 1.0).abs() < 1e-9);
        // next eigenvalue approximates 1² − 1 = 0
        excited.push(eig.spectrum[1].0);
    }
    for w in excited.windows(3) {
        let ratio = (w[0] - w[1]) / (w[1] - w[2]);
        assert!((3.5..=4.5).contains(&ratio), "{ratio}");
    }
}

#[test]
fn equator_of_three_sphere() {
    let s = scenario("einstein_cylinder", &[("n", 3.0), ("resolution", 12.0)]);
    let (_, eig, q) = spectrum(&s, "equator");
    for v in q {
        assert!((v + 2.0).abs() < 1e-9);
    }
    assert!((eig.lambda1.0 + 2.0).abs() < 1e-9);
}

#[test]
fn equator_deforms_to_outer_trapped() {
    let s = scenario("einstein_cylinder", &[("n", 2.0), ("resolution", 32.0)]);
    let (grid, eig, _) = spectrum(&s, "equator");
    let e = s.embedding("equator").unwrap();
    let rep = deformation_check(s.initial_data().unwrap(), &e.embedding, &grid, &eig, 0.05, 1e-4).unwrap();
    assert!(rep.step > 0.0);
    assert!(rep.max_rel_error < 2e-3, "{}", rep.max_rel_error);
    assert!(rep.outer_trapped());
    // latitude circle at π/2 + t has θ₊ = −tan t
    for t in &rep.theta_plus_displaced {
        assert!((t + 0.05f64.tan()).abs() < 1e-6);
    }
}

#[test]
fn schwarzschild_horizon_is_strictly_stable() {
    let s = scenario("schwarzschild_slice_isotropic", &[("m", 1.0), ("resolution", 12.0)]);
    let (grid, eig, q) = spectrum(&s, "horizon");
    // area radius 2m, totally geodesic: Q = 1/(4m²)
    for v in &q {
        assert!((v - 0.25).abs() < 1e-8, "{v}");
    }
    assert!((eig.lambda1.0 - 0.25).abs() < 1e-8);
    let e = s.embedding("horizon").unwrap();
    let rep = deformation_check(s.initial_data().unwrap(), &e.embedding, &grid, &eig, 0.05, 1e-4).unwrap();
    assert!(rep.step < 0.0);
    assert!(rep.max_rel_error < 2e-3, "{}", rep.max_rel_error);
    assert!(rep.outer_trapped());
}

#[test]
fn flat_torus_slice_is_degenerate() {
    let s = scenario("minkowski_torus_quotient", &[]);
    let (grid, eig, _) = spectrum(&s, "slice_torus");
    assert!(eig.lambda1.0.abs() < 1e-9);
    let e = s.embedding("slice_torus").unwrap();
    assert!(matches!(
        deformation_check(s.initial_data().unwrap(), &e.embedding, &grid, &eig, 0.05, 1e-4),
        Err(GeometryError::DegenerateMots { .. })
    ));
}
