mod output;
mod scenario;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use offshell_core::dynamics::{constant_eps_fixed_point, k_positive_part, k_potentials, scalar_rhs};
use offshell_core::integrator::{
    annotate, blowup_time_estimate, integrate, sweep_d, AnnotateWhat, Formulation, OutcomeKind, ScalarForm,
    Trajectory, VectorForm,
};
use offshell_core::real::MIN_PRECISION;
use offshell_core::regcheck::{run_suite, Tolerances};
use offshell_core::stability::{classify_local, eigenvalues, jacobian, JacobianMode};
use offshell_core::{Error as CoreError, ModelParams, Real, ScalarState};
use serde_json::json;

use output::{dec, StateColumns};
use scenario::{Emit, Form, Initial, Scenario, ScenarioSpec};

const DEFAULT_PRECISION: u32 = 256;

#[derive(Parser)]
#[command(name = "offshell", version, about = "Radiation-reaction dynamics of above-mass-shell events")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Scenario file (JSON)
    #[arg(long, conflicts_with = "scenario")]
    config: Option<PathBuf>,
    /// Bundled scenario: converge-fig2, diverge-fig4, vector-converge, vector-diverge
    #[arg(long)]
    scenario: Option<String>,
    /// Output directory
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Mantissa bits; overrides the scenario's precision_bits
    #[arg(long, env = "OFFSHELL_PRECISION")]
    precision: Option<u32>,
    /// Overrides the scenario's form
    #[arg(long, value_enum)]
    form: Option<Form>,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one scenario, writing <name>.csv and <name>.meta.json
    Run(Common),
    /// Run the scenario once per D, plus <name>-sweep.csv
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Comma-separated D values (default: the scenario's d_values)
        #[arg(long, value_delimiter = ',')]
        d_values: Option<Vec<String>>,
    },
    /// Like run, with eigenvalue columns, writing <name>-eigen.csv
    EigenTrace(Common),
    /// Constant-ε fixed point: residual and spectrum
    #[command(allow_negative_numbers = true)]
    FixedPoint {
        eps: String,
        rho: String,
        #[arg(default_value = "1")]
        d: String,
        #[arg(long, env = "OFFSHELL_PRECISION")]
        precision: Option<u32>,
    },
    /// Regularization identities on a fixed seed
    Regdemo {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, env = "OFFSHELL_PRECISION")]
        precision: Option<u32>,
    },
    /// K potentials and positive parts on an (ε, ε̇[, ε̈]) grid
    #[command(allow_negative_numbers = true)]
    KGrid {
        /// lo:hi:n
        #[arg(long, default_value = "0.01:2:100", allow_hyphen_values = true)]
        eps: String,
        /// lo:hi:n
        #[arg(long, default_value = "-1:1:101", allow_hyphen_values = true)]
        deps: String,
        /// value or lo:hi:n
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        ddeps: String,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        rho: String,
        #[arg(long, default_value = "1")]
        d: String,
        #[arg(long, default_value = "kgrid")]
        name: String,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long, env = "OFFSHELL_PRECISION")]
        precision: Option<u32>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

/// 2 for configuration and domain problems, 3 for numeric failures, 1 for I/O.
fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<CoreError>() {
            return match e {
                CoreError::Config(_) | CoreError::Domain(_) | CoreError::Pole(_) => 2,
                CoreError::DomainStep | CoreError::Convergence(_) | CoreError::Fit(_) => 3,
            };
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return 1;
        }
    }
    2
}

fn dispatch(cmd: Command) -> Result<u8> {
    match cmd {
        Command::Run(c) => {
            let sc = resolve(&c)?;
            let (code, _) = run_scenario(&sc, &c.out, &sc.name)?;
            Ok(code)
        }
        Command::EigenTrace(c) => {
            let mut sc = resolve(&c)?;
            sc.emit.insert(Emit::Eigenvalues);
            let stem = format!("{}-eigen", sc.name);
            let (code, _) = run_scenario(&sc, &c.out, &stem)?;
            Ok(code)
        }
        Command::Sweep { common, d_values } => sweep(&common, d_values),
        Command::FixedPoint { eps, rho, d, precision } => fixed_point(&eps, &rho, &d, precision),
        Command::Regdemo { seed, precision } => regdemo(seed, precision),
        Command::KGrid { eps, deps, ddeps, rho, d, name, out, precision } => {
            k_grid(&eps, &deps, &ddeps, &rho, &d, &name, &out, precision)
        }
    }
}

fn check_precision(prec: u32) -> Result<u32> {
    if prec < MIN_PRECISION {
        return Err(CoreError::Config(format!("precision_bits must be >= {MIN_PRECISION}, got {prec}")).into());
    }
    Ok(prec)
}

fn resolve(c: &Common) -> Result<Scenario> {
    let spec: ScenarioSpec = match (&c.config, &c.scenario) {
        (Some(path), _) => scenario::load(path)?,
        (None, Some(name)) => scenario::bundled(name)?,
        (None, None) => {
            return Err(CoreError::Config("give --config PATH or --scenario NAME".into()).into());
        }
    };
    let prec = check_precision(c.precision.or(spec.precision_bits).unwrap_or(DEFAULT_PRECISION))?;
    spec.resolve(prec, c.form)
}

struct RunSummary {
    outcome: OutcomeKind,
    blowup_tau: Option<Real>,
    final_eps: Real,
    tau_end: Real,
}

/// Integrates, annotates, writes `<stem>.csv` and `<stem>.meta.json`.
fn run_scenario(sc: &Scenario, out: &Path, stem: &str) -> Result<(u8, RunSummary)> {
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let traj = match &sc.initial {
        Initial::Scalar(s) => integrate(&ScalarForm, s, &sc.params, &sc.record_every).map(Either::Scalar),
        Initial::Vector(w) => integrate(&VectorForm, w, &sc.params, &sc.record_every).map(Either::Vector),
    };
    finish(sc, traj?, out, stem)
}

enum Either {
    Scalar(Trajectory<ScalarState>),
    Vector(Trajectory<offshell_core::WorldlineState>),
}

fn finish(sc: &Scenario, traj: Either, out: &Path, stem: &str) -> Result<(u8, RunSummary)> {
    match traj {
        Either::Scalar(t) => finish_form(&ScalarForm, sc, t, out, stem),
        Either::Vector(t) => finish_form(&VectorForm, sc, t, out, stem),
    }
}

fn finish_form<F>(form: &F, sc: &Scenario, mut traj: Trajectory<F::State>, out: &Path, stem: &str) -> Result<(u8, RunSummary)>
where
    F: Formulation,
    F::State: StateColumns,
{
    let what = AnnotateWhat {
        k: sc.emit.contains(&Emit::KPotentials),
        spectrum: sc.emit.contains(&Emit::Eigenvalues),
        velocity: sc.emit.contains(&Emit::Velocity),
    };
    annotate(form, &mut traj, &sc.params, what)?;
    let prec = sc.params.prec();
    let csv_path = out.join(format!("{stem}.csv"));
    output::write_trajectory(&csv_path, &traj, &sc.emit, prec)?;

    let fit = blowup_time_estimate(form, &traj).ok();
    let final_eps = form.eps(&traj.last().state);
    let p = &sc.params;
    let initial: serde_json::Map<String, serde_json::Value> = match &sc.initial {
        Initial::Scalar(s) => ScalarState::NAMES.iter().zip(s.components()).map(|(n, v)| (n.to_string(), dec(v))).collect(),
        Initial::Vector(w) => {
            let v = |x: &offshell_core::FourVector| x.components().iter().map(|c| dec(c)).collect::<Vec<_>>();
            [("u", v(&w.u)), ("a", v(&w.a)), ("j", v(&w.j))].into_iter().map(|(k, c)| (k.to_string(), json!(c))).collect()
        }
    };
    let meta = json!({
        "name": sc.name,
        "form": sc.form.as_str(),
        "library_version": offshell_core::VERSION,
        "precision_bits": prec,
        "params": {
            "D": dec(&p.d),
            "eps_floor": dec(&p.eps_floor),
            "eps_cap": dec(&p.eps_cap),
            "abs_tol": dec(&p.abs_tol),
            "rel_tol": dec(&p.rel_tol),
            "tau_max": dec(&p.tau_max),
            "h_min": dec(&p.h_min),
        },
        "record_every": dec(&sc.record_every),
        "emit": sc.emit.iter().collect::<Vec<_>>(),
        "initial": initial,
        "outcome": traj.outcome.kind.as_str(),
        "blowup_tau": traj.outcome.blowup_tau.as_ref().map(dec),
        "blowup_tau_extrapolated": fit.as_ref().map(dec),
        "tau_end": dec(&traj.tau_end),
        "final_eps": dec(&final_eps),
        "samples": traj.samples.len(),
        "steps": {
            "accepted": traj.stats.accepted,
            "rejected": traj.stats.rejected,
            "domain_retries": traj.stats.domain_retries,
        },
        "csv": format!("{stem}.csv"),
        "columns": output::columns::<F::State>(&sc.emit),
    });
    output::write_json(&out.join(format!("{stem}.meta.json")), &meta)?;

    let kind = traj.outcome.kind;
    match &traj.outcome.blowup_tau {
        Some(t) => println!(
            "{stem}: {kind} at tau = {} (extrapolated {}), {} samples -> {}",
            t.to_string_digits(8),
            fit.as_ref().map_or("n/a".into(), |f| f.to_string_digits(8)),
            traj.samples.len(),
            csv_path.display()
        ),
        None => println!(
            "{stem}: {kind} at tau = {}, final eps = {}, {} samples -> {}",
            traj.tau_end.to_string_digits(8),
            final_eps.to_string_digits(8),
            traj.samples.len(),
            csv_path.display()
        ),
    }
    let code = if kind == OutcomeKind::StepCollapse { 3 } else { 0 };
    let summary = RunSummary { outcome: kind, blowup_tau: traj.outcome.blowup_tau.clone(), final_eps, tau_end: traj.tau_end };
    Ok((code, summary))
}

fn sweep(c: &Common, d_flag: Option<Vec<String>>) -> Result<u8> {
    let sc = resolve(c)?;
    let prec = sc.params.prec();
    let ds = match (d_flag, &sc.d_values) {
        (Some(list), _) => scenario::parse_d_list(list.iter().map(String::as_str), prec)?,
        (None, Some(list)) => list.clone(),
        (None, None) => return Err(CoreError::Config("no D values: pass --d-values or set d_values".into()).into()),
    };
    std::fs::create_dir_all(&c.out).with_context(|| format!("creating {}", c.out.display()))?;
    let values: Vec<Real> = ds.iter().map(|(_, d)| d.clone()).collect();
    let results: Vec<_> = match &sc.initial {
        Initial::Scalar(s) => sweep_d(&ScalarForm, s, &values, &sc.params, &sc.record_every)
            .into_iter()
            .map(|i| i.result.map(Either::Scalar))
            .collect(),
        Initial::Vector(w) => sweep_d(&VectorForm, w, &values, &sc.params, &sc.record_every)
            .into_iter()
            .map(|i| i.result.map(Either::Vector))
            .collect(),
    };

    let summary_path = c.out.join(format!("{}-sweep.csv", sc.name));
    let mut w = csv::Writer::from_path(&summary_path).with_context(|| format!("creating {}", summary_path.display()))?;
    w.write_record(["D", "outcome", "blowup_tau", "final_eps", "tau_end"])?;
    let digits = output::digits_for(prec);
    let mut code = 0;
    for ((label, d), result) in ds.iter().zip(results) {
        let mut per_d = Scenario {
            name: sc.name.clone(),
            form: sc.form,
            initial: match &sc.initial {
                Initial::Scalar(s) => Initial::Scalar(s.clone()),
                Initial::Vector(v) => Initial::Vector(v.clone()),
            },
            params: sc.params.clone(),
            record_every: sc.record_every.clone(),
            emit: sc.emit.clone(),
            d_values: None,
        };
        per_d.params.d = d.clone();
        let outcome = result.and_then(|t| finish(&per_d, t, &c.out, &format!("{}-D{label}", sc.name)).map_err(|e| match e.downcast::<CoreError>() {
            Ok(core) => core,
            Err(other) => CoreError::Convergence(format!("{other:#}")),
        }));
        match outcome {
            Ok((run_code, s)) => {
                code = code.max(run_code);
                w.write_record([
                    label.clone(),
                    s.outcome.as_str().to_string(),
                    s.blowup_tau.as_ref().map_or(String::new(), |t| t.to_string_digits(digits)),
                    s.final_eps.to_string_digits(digits),
                    s.tau_end.to_string_digits(digits),
                ])?;
            }
            Err(e) => {
                eprintln!("D = {label}: {e}");
                code = 3;
                w.write_record([label.clone(), "ERROR".into(), String::new(), String::new(), String::new()])?;
            }
        }
    }
    w.flush()?;
    println!("sweep summary -> {}", summary_path.display());
    Ok(code)
}

fn fixed_point(eps: &str, rho: &str, d: &str, precision: Option<u32>) -> Result<u8> {
    let prec = check_precision(precision.unwrap_or(DEFAULT_PRECISION))?;
    let parse = |s: &str, what: &str| Real::parse(prec, s).with_context(|| format!("cannot parse {what} = {s:?}"));
    let dd = parse(d, "D")?;
    let p = ModelParams::new(prec).with_d_real(&dd);
    p.validate()?;
    let fp = constant_eps_fixed_point(&parse(eps, "eps")?, &parse(rho, "rho")?, &p)?;
    let digits = 20;
    for (name, v) in ScalarState::NAMES.iter().zip(fp.components()) {
        println!("{name:>6} = {}", v.to_string_digits(digits));
    }
    let residual = scalar_rhs(&fp, &p)?.iter().map(Real::abs).fold(Real::zero(prec), |a, b| a.max(&b));
    // 1e-30, or 2^16 ulps where the working precision cannot reach that
    let bound = Real::from_f64(prec, 1e-30).max(&Real::exp2i(prec, 16 - prec as i32));
    println!("residual |f(x*)| = {} (bound {})", residual.to_string_digits(6), bound.to_string_digits(3));
    let j = jacobian(&fp, &p, JacobianMode::Analytic)?;
    let spec = eigenvalues(&j)?;
    let tol = j.max_abs().max(&Real::one(prec)) * Real::exp2i(prec, -(prec as i32) / 2);
    println!("eigenvalues (descending real part):");
    for v in &spec.values {
        println!("  {} {:+}i", v.re.to_string_digits(digits), v.im.to_f64());
    }
    let positive = spec.count_positive_real(&tol);
    let class = classify_local(&spec, &tol);
    let verdict = if positive > 0 { "unstable" } else { "not shown unstable" };
    println!("classification: {class}; {positive} positive real part(s): {verdict}");
    Ok(if residual <= bound { 0 } else { 3 })
}

fn regdemo(seed: u64, precision: Option<u32>) -> Result<u8> {
    let prec = check_precision(precision.unwrap_or(DEFAULT_PRECISION))?;
    let t = Tolerances::for_precision(prec);
    println!("regularization identities, precision {prec} bits, seed {seed}");
    println!("tolerances ({}):", if prec >= 128 { "strict" } else { "relaxed" });
    let rows = [
        ("phi'' vs series arithmetic (rel)", t.phi_rel),
        ("residue limit (rel, floor 1)", t.residue_limit),
        ("pairing vs quadrature (rel)", t.quadrature_rel),
        ("analyticity mismatch", t.analyticity),
        ("remainder residue vs b^(5/2) phi'' (rel)", t.remainder_rel),
        ("remainder order (abs)", t.order),
        ("R coefficients (rel, floor 1)", t.r_coeff),
        ("h^2 coefficient (abs)", t.h2_coeff),
    ];
    for (name, v) in rows {
        println!("  {name:<42} {v:.1e}");
    }
    let mut all = true;
    for r in run_suite(prec, seed) {
        all &= r.passed;
        println!(
            "{} {:<24} trials {:>5}  worst {:.2e}  tol {:.1e}  {}",
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.trials,
            r.worst,
            r.tolerance,
            r.detail
        );
    }
    Ok(if all { 0 } else { 3 })
}

/// `lo:hi:n` (n ≥ 1, inclusive ends) or a single value.
fn grid_axis(spec: &str, prec: u32, what: &str) -> Result<Vec<Real>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let parse = |s: &str| Real::parse(prec, s.trim()).with_context(|| format!("{what}: cannot parse {s:?}"));
    match parts.as_slice() {
        [v] => Ok(vec![parse(v)?]),
        [lo, hi, n] => {
            let n: usize = n.trim().parse().with_context(|| format!("{what}: bad point count {n:?}"))?;
            if n == 0 {
                return Err(CoreError::Config(format!("{what}: need at least one point")).into());
            }
            let (lo, hi) = (parse(lo)?, parse(hi)?);
            if n == 1 {
                return Ok(vec![lo]);
            }
            let step = (&hi - &lo) / ((n - 1) as f64);
            Ok((0..n).map(|i| &lo + &step * (i as f64)).collect())
        }
        _ => Err(CoreError::Config(format!("{what}: expected VALUE or LO:HI:N, got {spec:?}")).into()),
    }
}

#[allow(clippy::too_many_arguments)]
fn k_grid(eps: &str, deps: &str, ddeps: &str, rho: &str, d: &str, name: &str, out: &Path, precision: Option<u32>) -> Result<u8> {
    let prec = check_precision(precision.unwrap_or(DEFAULT_PRECISION))?;
    let eps_axis = grid_axis(eps, prec, "eps")?;
    let deps_axis = grid_axis(deps, prec, "deps")?;
    let ddeps_axis = grid_axis(ddeps, prec, "ddeps")?;
    let rho_v = grid_axis(rho, prec, "rho")?;
    let dd = grid_axis(d, prec, "D")?;
    let p = ModelParams::new(prec).with_d_real(&dd[0]);
    p.validate()?;
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let path = out.join(format!("{name}.csv"));
    let mut w = csv::Writer::from_path(&path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(["eps", "deps", "ddeps", "rho", "k1", "k2", "k3", "k1_plus", "k2_plus", "k3_plus"])?;
    let digits = output::digits_for(prec);
    let zero = Real::zero(prec);
    let mut rows = 0usize;
    for e in &eps_axis {
        for de in &deps_axis {
            for dde in &ddeps_axis {
                for r in &rho_v {
                    let s = ScalarState {
                        eps: e.clone(),
                        deps: de.clone(),
                        ddeps: dde.clone(),
                        rho: r.clone(),
                        drho: zero.clone(),
                        eta: zero.clone(),
                    };
                    let k = k_potentials(&s, &p)?;
                    let kp = k_positive_part(&k);
                    let vals = [e, de, dde, r, &k.k1, &k.k2, &k.k3, &kp.k1, &kp.k2, &kp.k3];
                    w.write_record(vals.iter().map(|v| v.to_string_digits(digits)))?;
                    rows += 1;
                }
            }
        }
    }
    w.flush()?;
    println!("{rows} grid points -> {}", path.display());
    Ok(0)
}
