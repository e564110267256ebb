//! Operations behind each subcommand.

use std::time::Instant;

use horizon_core::conformal::{curvature_perturbation, trapping_perturbation, BumpProfile, CurvatureCase};
use horizon_core::energy::{check_condition, Condition, Verdict, DEFAULT_DIRECTIONS};
use horizon_core::initial_data::{initial_data_expansions, mots_classify};
use horizon_core::scenarios::{build_scenario, Ambient, NamedEmbedding, Scenario};
use horizon_core::stability::{deformation_check, MIN_RESOLUTION};
use horizon_core::submanifold::trapping_classify;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::config::{OpParams, RunConfig, Tolerances};
use crate::error::{LabError, Result};
use crate::report::{Check, Report, Table};
use crate::verify::{self, case_name, parse_case, surface_spectrum, Outcome, VerifyContext, CRITERIA};

/// Runs the configured operation. Check failures are reported, not raised.
pub fn run(config: &RunConfig) -> Result<Report> {
    let start = Instant::now();
    config.validate()?;
    let tol = config.tolerances()?;
    let p = config.params();
    let (outcome, table) = match config.operation.name.as_str() {
        "classify" => classify(config, p, &tol)?,
        "perturb" => (perturb(config, p, &tol)?, None),
        "curvature" => (curvature(p, &tol)?, None),
        "energy-check" => (energy_check(config, p)?, None),
        "constraints" => (constraints(config, &tol)?, None),
        "spectrum" => spectrum(config, p, &tol)?,
        "deform" => deform(config, p, &tol)?,
        "linear" => (linear(config, p)?, None),
        "verify" => (run_verify(config, p, tol)?, None),
        other => return Err(LabError::Config(format!("unknown operation `{other}`"))),
    };
    let mut report = Report::new(config.clone());
    report.checks = outcome.checks;
    report.data = outcome.data;
    report.table = table;
    report.wall_time = start.elapsed().as_secs_f64();
    Ok(report)
}

fn scenario(config: &RunConfig) -> Result<Scenario> {
    let s = config.scenario.as_ref().ok_or_else(|| {
        LabError::Config(format!("operation `{}` needs a scenario", config.operation.name))
    })?;
    Ok(build_scenario(&s.name, &s.params)?)
}

/// The named surface, or the first one matching `pick`.
fn surface<'a>(
    s: &'a Scenario,
    p: OpParams,
    pick: impl Fn(&NamedEmbedding) -> bool,
) -> Result<&'a NamedEmbedding> {
    match p.text("surface")? {
        Some(name) => Ok(s.embedding(&name)?),
        None => s
            .embeddings
            .iter()
            .find(|e| pick(e))
            .ok_or_else(|| LabError::Config(format!("scenario {} has no suitable default surface", s.name))),
    }
}

fn expect_label(p: OpParams, name: &str, measured: String) -> Result<Check> {
    Ok(match p.text("expect")? {
        Some(want) => Check::exact(name, "plumbing", measured, want),
        None => Check::info(name, measured),
    })
}

fn classify(config: &RunConfig, p: OpParams, tol: &Tolerances) -> Result<(Outcome, Option<Table>)> {
    let s = scenario(config)?;
    let e = surface(&s, p, |_| true)?;
    let samples = e.embedding.samples();
    let mut out = Outcome::default();
    match e.ambient {
        Ambient::Spacetime => {
            let x = |q: &[f64]| s.x_at(q);
            let t = trapping_classify(&e.embedding, s.metric()?, &x, &samples)?;
            let class = horizon_core::submanifold::classify_records(&t.per_point, tol.get("classification"));
            out.checks.push(expect_label(p, "trapping-class", format!("{class:?}"))?);
            let rows: Vec<Value> = t
                .per_point
                .iter()
                .map(|r| json!({"hh": r.hh, "hx": r.hx, "theta_plus": r.theta_plus}))
                .collect();
            out.data = json!({"surface": e.name, "samples": samples, "records": rows});
        }
        Ambient::Slice => {
            let field = s.initial_data()?;
            let mut plus = Vec::with_capacity(samples.len());
            let mut minus = Vec::with_capacity(samples.len());
            for u in &samples {
                let (a, b) = initial_data_expansions(field, &e.embedding, None, u)?;
                plus.push(a);
                minus.push(b);
            }
            out.checks.push(expect_label(p, "mots-class", format!("{:?}", mots_classify(&plus)))?);
            out.data = json!({"surface": e.name, "samples": samples, "theta_plus": plus, "theta_minus": minus});
        }
    }
    Ok((out, None))
}

fn perturb(config: &RunConfig, p: OpParams, tol: &Tolerances) -> Result<Outcome> {
    let s = scenario(config)?;
    let e = surface(&s, p, |e| e.ambient == Ambient::Spacetime)?;
    let tau = s
        .temporal_function
        .as_deref()
        .ok_or_else(|| LabError::Config(format!("scenario {} has no temporal function", s.name)))?;
    let n0 = p.count_or("n", 1)?;
    let n1 = p.count_or("n_max", n0)?;
    if n0 == 0 || n1 < n0 {
        return Err(LabError::Config(format!("need 1 <= n <= n_max, got n={n0}, n_max={n1}")));
    }
    let dim = s.metric()?.dim();
    let profile = BumpProfile::new(
        p.number_or("inner_radius", 2.0)?,
        p.number_or("outer_radius", 3.0)?,
        vec![0.0; dim],
    )?;
    let x = |q: &[f64]| s.x_at(q);
    let samples = e.embedding.samples();
    let torus = s.name == "minkowski_torus_quotient" && e.name == "Sigma";
    let rel = tol.get("trapping_rel");
    let mut out = Outcome::default();
    let mut rows = Vec::new();
    for n in n0..=n1 {
        let nf = n as f64;
        let r = trapping_perturbation(s.metric()?, &e.embedding, tau, &profile, n as u32, &x)?;
        let gap = r
            .samples
            .iter()
            .map(|q| (q.hh - q.hh_formula).abs().max((q.hx - q.hx_formula).abs()))
            .fold(0.0, f64::max);
        let scale = r.samples.iter().map(|q| q.hh.abs().max(q.hx.abs())).fold(0.0, f64::max);
        out.checks.push(Check::at_most(
            format!("perturb/n={n}/formula-vs-direct"),
            "conformal mean curvature law",
            gap,
            rel * scale.max(1e-12),
        ));
        let class = trapping_classify(&e.embedding, &r.metric, &x, &samples)?;
        out.checks.push(Check::exact(
            format!("perturb/n={n}/class"),
            "perturbation of a weakly trapped surface is trapped",
            format!("{:?}", class.class),
            "Trapped".to_string(),
        ));
        if torus {
            for q in &r.samples {
                let ok = (q.hh + 4.0 / (nf * nf)).abs() <= rel * 4.0 / (nf * nf)
                    && (q.hx - 2.0 / nf).abs() <= rel * 2.0 / nf;
                if !ok {
                    out.checks.push(Check::relative(
                        format!("perturb/n={n}/torus-value"),
                        "torus perturbation value",
                        q.hh,
                        -4.0 / (nf * nf),
                        rel,
                    ));
                    break;
                }
            }
        }
        let values: Vec<Value> = r
            .samples
            .iter()
            .map(|q| json!({"hh": q.hh, "hx": q.hx, "metric_deviation": q.metric_deviation}))
            .collect();
        rows.push(json!({"n": n, "samples": values}));
    }
    out.data = json!({"surface": e.name, "perturbations": rows});
    Ok(out)
}

fn curvature(p: OpParams, tol: &Tolerances) -> Result<Outcome> {
    let cases: Vec<CurvatureCase> = match p.text("case")?.as_deref() {
        None | Some("all") => CurvatureCase::ALL.to_vec(),
        Some(c) => vec![parse_case(c)?],
    };
    let n = p.count_or("n", 1)?;
    if n == 0 {
        return Err(LabError::Config("n must be at least 1".into()));
    }
    let mut out = Outcome::default();
    let mut rows = Vec::new();
    for case in cases {
        let r = curvature_perturbation(case, n as u32)?;
        out.checks.push(Check::relative(
            format!("curvature/{}/n={n}", case_name(case)),
            "conformal perturbation of a flat metric",
            r.measured,
            r.stated,
            tol.get("curvature_rel"),
        ));
        rows.push(json!({"case": case_name(case), "v": r.v, "w": r.w, "gww": r.gww, "measured": r.measured}));
    }
    out.data = Value::from(rows);
    Ok(out)
}

fn parse_condition(s: &str) -> Result<Condition> {
    [
        Condition::StrongEnergy,
        Condition::Energy,
        Condition::Positive,
        Condition::FlatOrPositive,
        Condition::Tidal,
    ]
    .into_iter()
    .find(|c| c.tag().eq_ignore_ascii_case(s))
    .ok_or_else(|| LabError::Config(format!("unknown condition `{s}` (expected SE, E, P, FP, O or all)")))
}

fn energy_check(config: &RunConfig, p: OpParams) -> Result<Outcome> {
    let s = scenario(config)?;
    let conditions: Vec<Condition> = match p.text("condition")?.as_deref() {
        None | Some("all") => vec![
            Condition::Positive,
            Condition::Tidal,
            Condition::FlatOrPositive,
            Condition::Energy,
            Condition::StrongEnergy,
        ],
        Some(c) => vec![parse_condition(c)?],
    };
    let directions = p.count_or("directions", DEFAULT_DIRECTIONS)?;
    let x = |q: &[f64]| s.x_at(q);
    let mut out = Outcome::default();
    let mut rows = Vec::new();
    let mut verdicts = Vec::new();
    for c in conditions {
        let r = check_condition(c, s.metric()?, &s.spacetime_points, &x, config.seed, directions)?;
        let label = if r.satisfied() { "satisfied" } else { "violated" };
        let check_name = format!("energy-check/{}", c.tag());
        out.checks.push(match p.text(&format!("expect_{}", c.tag()))? {
            Some(want) => Check::exact(check_name, "plumbing", label.to_string(), want),
            None => Check::info(check_name, label),
        });
        let witness = match &r.verdict {
            Verdict::ViolatedAt(w) => json!({"point": w.point, "v": w.v, "w": w.w, "value": w.value}),
            Verdict::SatisfiedOnSamples => Value::Null,
        };
        rows.push(json!({"condition": c.tag(), "min_value": r.min_value, "samples": r.samples_used, "witness": witness}));
        verdicts.push((c, r.satisfied()));
    }
    if verdicts.len() == 5 {
        let sat = |c: Condition| verdicts.iter().any(|(d, v)| *d == c && *v);
        let holds = (!sat(Condition::Positive) || sat(Condition::Tidal))
            && (!sat(Condition::Tidal) || sat(Condition::FlatOrPositive))
            && (!sat(Condition::FlatOrPositive) || sat(Condition::Energy))
            && (!sat(Condition::Positive) || sat(Condition::StrongEnergy));
        out.checks.push(Check::exact("energy-check/inclusions", "P in O in FP in E, P in SE", holds, true));
    }
    out.data = Value::from(rows);
    Ok(out)
}

fn constraints(config: &RunConfig, tol: &Tolerances) -> Result<Outcome> {
    let s = scenario(config)?;
    let field = s.initial_data()?;
    let (rho_expected, t, anchor) = match s.name.as_str() {
        "einstein_cylinder" => {
            let n = s.params["n"];
            (0.5 * n * (n - 1.0), tol.get("energy_density"), "round sphere slice density")
        }
        "schwarzschild_slice_isotropic" => (0.0, tol.get("vacuum"), "isotropic slice is vacuum"),
        _ => (0.0, tol.get("vacuum_flat"), "flat data is vacuum"),
    };
    let mut rho = Vec::new();
    let mut jmax: f64 = 0.0;
    for q in &s.slice_points {
        let c = horizon_core::initial_data::constraint_quantities(&field.jet(q)?)?;
        rho.push(c.rho);
        jmax = c.j.iter().fold(jmax, |a, v| a.max(v.abs()));
    }
    let dev = rho.iter().map(|r| (r - rho_expected).abs()).fold(0.0, f64::max);
    Ok(Outcome {
        checks: vec![
            Check::at_most("constraints/rho-deviation", anchor, dev, t),
            Check::at_most("constraints/J", anchor, jmax, t),
        ],
        data: json!({"points": s.slice_points, "rho": rho, "expected_rho": rho_expected}),
    })
}

/// Analytic principal eigenvalue of the shipped MOTS, which is also its
/// constant potential.
fn lambda1_oracle(s: &Scenario, surface: &str) -> Option<f64> {
    match (s.name.as_str(), surface) {
        ("einstein_cylinder", "equator") => Some(1.0 - s.params["n"]),
        ("schwarzschild_slice_isotropic", "horizon") => Some(0.25 / (s.params["m"] * s.params["m"])),
        ("minkowski_torus_quotient", "slice_torus") => Some(0.0),
        _ => None,
    }
}

fn spectrum(config: &RunConfig, p: OpParams, tol: &Tolerances) -> Result<(Outcome, Option<Table>)> {
    let s = scenario(config)?;
    let e = surface(&s, p, |e| e.mots_candidate)?;
    let name = e.name.clone();
    let (grid, eig, q) = surface_spectrum(&s, &name)?;
    let mut out = Outcome::default();
    let (re, im) = eig.lambda1;
    out.checks.push(Check::info("spectrum/lambda1", re));
    out.checks.push(Check::at_most(
        "spectrum/lambda1-imaginary",
        "principal eigenvalue is real",
        im.abs(),
        tol.get("imaginary") * (1.0 + re.abs()),
    ));
    out.checks.push(Check::exact("spectrum/eigenfunction-one-signed", "principal eigenvalue", eig.positive, true));
    if let Some(want) = lambda1_oracle(&s, &name) {
        let dq = q.iter().map(|v| (v - want).abs()).fold(0.0, f64::max);
        out.checks.push(Check::at_most("spectrum/potential", "analytic potential", dq, tol.get("potential")));
        out.checks.push(Check::absolute("spectrum/lambda1-oracle", "analytic spectrum", re, want, tol.get("lambda1")));
    }
    // grid-convergence table over halved resolutions
    let base = s.params.get("resolution").copied().unwrap_or(0.0) as usize;
    let mut levels: Vec<usize> = [base / 4, base / 2, base]
        .into_iter()
        .filter(|r| *r >= MIN_RESOLUTION && r % 2 == 0)
        .collect();
    levels.dedup();
    let mut rows = Vec::new();
    let mut excited = Vec::new();
    if levels.len() > 1 {
        for r in &levels {
            let mut params = s.params.clone();
            params.insert("resolution".into(), *r as f64);
            let sr = build_scenario(&s.name, &params)?;
            let (_, er, _) = surface_spectrum(&sr, &name)?;
            let l2 = er.spectrum.get(1).map_or(f64::NAN, |z| z.0);
            excited.push(l2);
            rows.push(json!({"resolution": r, "lambda1": er.lambda1.0, "lambda2": l2}));
        }
    }
    let ratio = if excited.len() == 3 {
        Some((excited[0] - excited[1]) / (excited[1] - excited[2]))
    } else {
        None
    };
    if let Some(r) = ratio {
        out.checks.push(Check::info("spectrum/lambda2-grid-ratio", r));
    }
    let spectrum: Vec<[f64; 2]> = eig.spectrum.iter().take(12).map(|z| [z.0, z.1]).collect();
    out.data = json!({
        "surface": name,
        "lambda1": [re, im],
        "lowest_spectrum": spectrum,
        "eigenfunction_variation": eig.variation(),
        "convergence": rows,
        "lambda2_grid_ratio": ratio,
    });
    Ok((out, Some(Table::nodal(&grid.nodes, &eig.eigenfunction))))
}

fn deform(config: &RunConfig, p: OpParams, tol: &Tolerances) -> Result<(Outcome, Option<Table>)> {
    let s = scenario(config)?;
    let e = surface(&s, p, |e| e.mots_candidate)?;
    let (grid, eig, _) = surface_spectrum(&s, &e.name)?;
    let step = p.number_or("step", 0.05)?;
    let fd = p.number_or("fd_step", 1e-4)?;
    if !(step > 0.0 && fd > 0.0) {
        return Err(LabError::Config("step and fd_step must be positive".into()));
    }
    let rep = deformation_check(s.initial_data()?, &e.embedding, &grid, &eig, step, fd)?;
    let out = Outcome {
        checks: vec![
            Check::at_most(
                "deform/derivative-vs-lambda1-phi",
                "first variation along the principal eigenfunction",
                rep.max_rel_error,
                tol.get("deformation_rel"),
            ),
            Check::exact("deform/outer-trapped", "deformation to an outer trapped surface", rep.outer_trapped(), true),
        ],
        data: json!({
            "surface": e.name,
            "lambda1": rep.lambda1,
            "step": rep.step,
            "theta_plus_initial": rep.theta_plus_initial,
            "derivative": rep.derivative,
            "predicted": rep.predicted,
        }),
    };
    Ok((out, Some(Table::nodal(&grid.nodes, &rep.theta_plus_displaced))))
}

fn linear(config: &RunConfig, p: OpParams) -> Result<Outcome> {
    let triples = p.count_or("triples", 1000)?;
    let codim = p.count_or("codim", 500)?;
    let projections = p.count_or("projections", 200)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let (counts, surjective) = verify::linear_batch(&mut rng, triples, codim, projections)?;
    Ok(Outcome {
        checks: vec![
            Check::exact("linear/surjectivity-criteria/discrepancies", "sum operator surjectivity", counts[0], 0),
            Check::exact("linear/codimension-formula/discrepancies", "codimension formula", counts[1], 0),
            Check::exact("linear/projection-identities/discrepancies", "kernel projection", counts[2], 0),
        ],
        data: json!({"triples": triples, "surjective": surjective, "codim_instances": codim, "projection_checks": projections}),
    })
}

fn run_verify(config: &RunConfig, p: OpParams, tol: Tolerances) -> Result<Outcome> {
    let mut ctx = VerifyContext::new(tol, config.seed);
    if let Some(c) = p.text("case")? {
        ctx.case = Some(parse_case(&c)?);
    }
    if let Some(n) = p.count("n")? {
        if n == 0 {
            return Err(LabError::Config("n must be at least 1".into()));
        }
        ctx.n = Some(n as u32);
    }
    let which = p.text("criterion")?.unwrap_or_else(|| "all".into());
    let selected: Vec<(&str, _)> = if which == "all" {
        CRITERIA.to_vec()
    } else {
        vec![verify::lookup(&which)?]
    };
    let mut out = Outcome::default();
    let mut data = serde_json::Map::new();
    for (name, f) in selected {
        let o = f(&ctx)?;
        out.checks.extend(o.checks);
        if !o.data.is_null() {
            data.insert(name.to_string(), o.data);
        }
    }
    out.data = Value::Object(data);
    Ok(out)
}
