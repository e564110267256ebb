//! Command-line front end of the `horizon` binary.

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::{split_assignment, Format, ParamValue, RunConfig, ScenarioConfig};
use crate::error::LabError;
use crate::ops::run;
use crate::report::write_atomic;

#[derive(Parser)]
#[command(name = "horizon", version, about = "Trapped-surface and MOTS computations with machine-readable reports")]
pub struct Cli {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Tolerance override, repeatable.
    #[arg(long = "tol", global = true, value_name = "NAME=VALUE")]
    tol: Vec<String>,
    /// Report path; stdout when absent.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Runs the operation named in the config file when absent.
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Args, Default)]
struct Target {
    #[arg(long)]
    scenario: Option<String>,
    #[arg(long)]
    surface: Option<String>,
    /// Scenario parameter, repeatable.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
    #[arg(long)]
    resolution: Option<f64>,
    #[arg(long)]
    m: Option<f64>,
    #[arg(long)]
    dim: Option<f64>,
    #[arg(long)]
    period: Option<f64>,
    #[arg(long)]
    radius: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Trapping class of a spacetime surface or MOTS class of a slice surface.
    Classify {
        #[command(flatten)]
        target: Target,
        /// Expected class name.
        #[arg(long)]
        expect: Option<String>,
    },
    /// Conformal perturbation of a weakly trapped surface.
    Perturb {
        #[command(flatten)]
        target: Target,
        /// Perturbation index.
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        n_max: Option<u32>,
        #[arg(long)]
        inner_radius: Option<f64>,
        #[arg(long)]
        outer_radius: Option<f64>,
    },
    /// Curvature of the conformally perturbed flat metric.
    Curvature {
        /// timelike, null-spacelike, null-null or all.
        #[arg(long)]
        case: Option<String>,
        #[arg(long)]
        n: Option<u32>,
    },
    /// Sampled energy and curvature conditions.
    EnergyCheck {
        #[command(flatten)]
        target: Target,
        /// SE, E, P, FP, O or all.
        #[arg(long)]
        condition: Option<String>,
        #[arg(long)]
        directions: Option<u32>,
    },
    /// Constraint quantities on the slice sample points.
    Constraints {
        #[command(flatten)]
        target: Target,
    },
    /// Principal eigenpair of the stability operator.
    Spectrum {
        #[command(flatten)]
        target: Target,
        /// Scenario parameter `n`.
        #[arg(long)]
        n: Option<f64>,
    },
    /// Deformation of a MOTS along its principal eigenfunction.
    Deform {
        #[command(flatten)]
        target: Target,
        /// Scenario parameter `n`.
        #[arg(long)]
        n: Option<f64>,
        #[arg(long)]
        step: Option<f64>,
        #[arg(long)]
        fd_step: Option<f64>,
    },
    /// Randomized finite-dimensional operator lemmas.
    Linear {
        #[arg(long)]
        triples: Option<u32>,
        #[arg(long)]
        codim: Option<u32>,
        #[arg(long)]
        projections: Option<u32>,
    },
    /// Acceptance criteria by name or number, or `all`.
    Verify {
        #[arg(default_value = "all")]
        criterion: String,
        #[arg(long)]
        case: Option<String>,
        #[arg(long)]
        n: Option<u32>,
    },
}

fn set(cfg: &mut RunConfig, key: &str, value: Option<ParamValue>) {
    if let Some(v) = value {
        cfg.operation.params.insert(key.to_string(), v);
    }
}

fn num<T: Into<f64>>(x: Option<T>) -> Option<ParamValue> {
    x.map(|v| ParamValue::Number(v.into()))
}

fn text(x: Option<String>) -> Option<ParamValue> {
    x.map(ParamValue::Text)
}

fn apply_target(cfg: &mut RunConfig, t: Target, n: Option<f64>) -> Result<(), LabError> {
    let mut extra: Vec<(String, f64)> = Vec::new();
    for (k, v) in [
        ("resolution", t.resolution),
        ("m", t.m),
        ("dim", t.dim),
        ("period", t.period),
        ("radius", t.radius),
        ("n", n),
    ] {
        if let Some(v) = v {
            extra.push((k.to_string(), v));
        }
    }
    for a in &t.params {
        let (k, v) = split_assignment(a)?;
        let v: f64 = v
            .parse()
            .map_err(|_| LabError::Config(format!("scenario parameter `{k}` must be a number, got `{v}`")))?;
        extra.push((k, v));
    }
    if let Some(name) = t.scenario {
        let keep = cfg.scenario.as_ref().is_some_and(|s| s.name == name);
        if !keep {
            cfg.scenario = Some(ScenarioConfig {
                name,
                params: Default::default(),
            });
        }
    }
    if !extra.is_empty() {
        let s = cfg
            .scenario
            .as_mut()
            .ok_or_else(|| LabError::Config("scenario parameters given without a scenario".into()))?;
        s.params.extend(extra);
    }
    set(cfg, "surface", text(t.surface));
    Ok(())
}

fn select(cfg: &mut RunConfig, name: &str) {
    if cfg.operation.name != name {
        cfg.operation.name = name.to_string();
        cfg.operation.params.clear();
    }
}

pub fn build_config(cli: Cli) -> Result<RunConfig, LabError> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    for t in &cli.tol {
        let (k, v) = split_assignment(t)?;
        let v: f64 = v
            .parse()
            .map_err(|_| LabError::Config(format!("tolerance `{k}` must be a number, got `{v}`")))?;
        cfg.tolerances.insert(k, v);
    }
    if let Some(o) = cli.out {
        cfg.out = Some(o);
    }
    if let Some(f) = cli.format {
        cfg.format = f;
    }
    match cli.command {
        None => {
            if cfg.operation.name.is_empty() {
                return Err(LabError::Config("no subcommand and no operation in the config".into()));
            }
        }
        Some(Command::Classify { target, expect }) => {
            select(&mut cfg, "classify");
            apply_target(&mut cfg, target, None)?;
            set(&mut cfg, "expect", text(expect));
        }
        Some(Command::Perturb {
            target,
            n,
            n_max,
            inner_radius,
            outer_radius,
        }) => {
            select(&mut cfg, "perturb");
            apply_target(&mut cfg, target, None)?;
            set(&mut cfg, "n", num(n));
            set(&mut cfg, "n_max", num(n_max));
            set(&mut cfg, "inner_radius", num(inner_radius));
            set(&mut cfg, "outer_radius", num(outer_radius));
        }
        Some(Command::Curvature { case, n }) => {
            select(&mut cfg, "curvature");
            set(&mut cfg, "case", text(case));
            set(&mut cfg, "n", num(n));
        }
        Some(Command::EnergyCheck {
            target,
            condition,
            directions,
        }) => {
            select(&mut cfg, "energy-check");
            apply_target(&mut cfg, target, None)?;
            set(&mut cfg, "condition", text(condition));
            set(&mut cfg, "directions", num(directions));
        }
        Some(Command::Constraints { target }) => {
            select(&mut cfg, "constraints");
            apply_target(&mut cfg, target, None)?;
        }
        Some(Command::Spectrum { target, n }) => {
            select(&mut cfg, "spectrum");
            apply_target(&mut cfg, target, n)?;
        }
        Some(Command::Deform {
            target,
            n,
            step,
            fd_step,
        }) => {
            select(&mut cfg, "deform");
            apply_target(&mut cfg, target, n)?;
            set(&mut cfg, "step", num(step));
            set(&mut cfg, "fd_step", num(fd_step));
        }
        Some(Command::Linear {
            triples,
            codim,
            projections,
        }) => {
            select(&mut cfg, "linear");
            set(&mut cfg, "triples", num(triples));
            set(&mut cfg, "codim", num(codim));
            set(&mut cfg, "projections", num(projections));
        }
        Some(Command::Verify { criterion, case, n }) => {
            select(&mut cfg, "verify");
            set(&mut cfg, "criterion", Some(ParamValue::Text(criterion)));
            set(&mut cfg, "case", text(case));
            set(&mut cfg, "n", num(n));
        }
    }
    Ok(cfg)
}

/// Runs a parsed command line and returns the process exit code.
pub fn execute(cli: Cli) -> i32 {
    match try_execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("horizon: {e}");
            e.exit_code()
        }
    }
}

fn try_execute(cli: Cli) -> Result<i32, LabError> {
    let cfg = build_config(cli)?;
    let report = run(&cfg)?;
    for c in &report.checks {
        eprintln!("{}", c.line());
    }
    let body = report.render(cfg.format)?;
    match &cfg.out {
        Some(path) => write_atomic(path, &body)?,
        None => print!("{body}"),
    }
    Ok(report.exit_code())
}

/// Parses `args` (program name first) and runs; usage errors exit with 2.
pub fn run_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(cli),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                2
            } else {
                0
            }
        }
    }
}

pub fn main() -> ExitCode {
    ExitCode::from(run_args(std::env::args_os()) as u8)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Report;

    fn parse(args: &[&str]) -> RunConfig {
        let argv = std::iter::once("horizon").chain(args.iter().copied());
        build_config(Cli::try_parse_from(argv).unwrap()).unwrap()
    }

    fn run_to(dir: &std::path::Path, file: &str, args: &[&str]) -> (i32, String) {
        let out = dir.join(file);
        let argv: Vec<String> = ["horizon", "--out", out.to_str().unwrap()]
            .iter()
            .chain(args)
            .map(|s| s.to_string())
            .collect();
        let code = run_args(argv);
        (code, std::fs::read_to_string(&out).unwrap_or_default())
    }

    #[test]
    fn flags_map_onto_the_config() {
        let c = parse(&["--seed", "5", "--tol", "lambda1=1e-7", "spectrum", "--scenario", "einstein_cylinder", "--n", "2", "--resolution", "32"]);
        assert_eq!(c.seed, 5);
        assert_eq!(c.tolerances["lambda1"], 1e-7);
        assert_eq!(c.operation.name, "spectrum");
        let s = c.scenario.unwrap();
        assert_eq!(s.params["n"], 2.0);
        assert_eq!(s.params["resolution"], 32.0);
        let c = parse(&["verify", "curvature-perturbation", "--case", "timelike", "--n", "1"]);
        assert_eq!(c.operation.params["criterion"], ParamValue::Text("curvature-perturbation".into()));
        assert_eq!(c.operation.params["n"], ParamValue::Number(1.0));
    }

    #[test]
    fn config_file_with_flag_overrides() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("run.toml");
        std::fs::write(
            &p,
            "seed = 3\n[scenario]\nname = \"einstein_cylinder\"\nparams = { n = 2, resolution = 16 }\n[operation]\nname = \"spectrum\"\n",
        )
        .unwrap();
        let c = parse(&["--config", p.to_str().unwrap(), "--seed", "9"]);
        assert_eq!(c.seed, 9);
        assert_eq!(c.operation.name, "spectrum");
        let c = parse(&["--config", p.to_str().unwrap(), "spectrum", "--resolution", "32"]);
        assert_eq!(c.scenario.unwrap().params["resolution"], 32.0);
    }

    #[test]
    fn exit_codes() {
        let dir = tempfile::tempdir().unwrap();
        let d = dir.path();
        let (code, body) = run_to(d, "a.json", &["classify", "--scenario", "minkowski_torus_quotient", "--surface", "Sigma", "--expect", "Extremal"]);
        assert_eq!(code, 0);
        let r: Report = serde_json::from_str(&body).unwrap();
        assert_eq!(r.checks[0].measured, serde_json::json!("Extremal"));
        assert_eq!(r.signature, "(-,+,...,+)");
        assert_eq!(run_to(d, "b.json", &["curvature", "--case", "null-spacelike", "--n", "2"]).0, 1);
        assert_eq!(run_to(d, "c.json", &["--tol", "lambda1=-1", "linear"]).0, 2);
        assert_eq!(run_to(d, "d.json", &["constraints", "--scenario", "kerr"]).0, 2);
        assert_eq!(run_to(d, "e.json", &["--tol", "nonsense=1", "linear"]).0, 2);
        assert_eq!(run_args(["horizon", "frobnicate"]), 2);
        // λ₁ = 0 on the flat torus slice
        assert_eq!(run_to(d, "f.json", &["deform", "--scenario", "minkowski_torus_quotient"]).0, 3);
        assert_eq!(run_to(d, "g.json", &["constraints", "--scenario", "schwarzschild_slice_isotropic", "--m=-1"]).0, 3);
        assert!(!d.join("f.json").exists());
    }

    #[test]
    fn eigenfunction_csv() {
        let dir = tempfile::tempdir().unwrap();
        let (code, body) = run_to(
            dir.path(),
            "phi.csv",
            &["--format", "csv", "spectrum", "--scenario", "einstein_cylinder", "--n", "2", "--resolution", "32"],
        );
        assert_eq!(code, 0);
        let mut lines = body.lines();
        assert_eq!(lines.next(), Some("coord1,value"));
        assert_eq!(lines.count(), 32);
    }

    #[test]
    fn replays_are_identical_up_to_wall_time() {
        let dir = tempfile::tempdir().unwrap();
        let args = ["--seed", "11", "verify", "conformal-law"];
        let (_, a) = run_to(dir.path(), "r.json", &args);
        let (_, b) = run_to(dir.path(), "r.json", &args);
        let a: Report = serde_json::from_str(&a).unwrap();
        let b: Report = serde_json::from_str(&b).unwrap();
        assert!(a.canonical_json() == b.canonical_json());
    }
}
