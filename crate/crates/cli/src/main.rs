//! `hjb` — solve the quasilinear Dirichlet problem
//! −(σ²/2)ΔV + C_α|∇V|^p − h = 0, V = g on ∂Ω, and verify the solution by
//! simulating the controlled diffusion it prices.
//!
//! Subcommands: `solve` (box domains), `radial` (balls), `verify`
//! (Monte Carlo pricing of the feedback law), `legendre-check` (closed-form
//! Hamiltonian minimum vs. brute force). Exit codes: 0 success, 1
//! configuration error, 2 runtime failure (non-convergence, capped paths,
//! verification gap, structural violation).

mod config;

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hjb_core::{
    build_barriers, cross_check_1d, grid_for_domain, hamiltonian_min, iterate, simulate_cost,
    solve_radial, to_json_string, write_convergence_csv, write_json_file, write_profile_csv,
    DomainSpec, Error, MCReport, Policy, Result, Solved,
};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use config::{Overrides, PolicyConfig, RunConfig};

#[derive(Parser)]
#[command(name = "hjb", version, about = "Quasilinear HJB Dirichlet solver and verifier")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Monotone-iteration solve on an interval or rectangle
    Solve(RunArgs),
    /// Radial solve on a ball, with the 1-d cross-check when N = 1
    Radial(RunArgs),
    /// Monte Carlo verification of the solved feedback law
    Verify(RunArgs),
    /// Compare the Hamiltonian's closed-form minimum against brute force
    LegendreCheck(LegendreArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Path to the JSON run configuration
    config: PathBuf,
    /// Override solver.eps
    #[arg(long)]
    eps: Option<f64>,
    /// Override mc.seed
    #[arg(long)]
    seed: Option<u64>,
    /// Override every grid.nodes entry with one count
    #[arg(long)]
    nodes: Option<usize>,
    /// Print the parsed configuration as JSON and exit
    #[arg(long)]
    dump_config: bool,
}

#[derive(Args)]
struct LegendreArgs {
    /// Optional JSON run configuration (supplies the default seed)
    config: Option<PathBuf>,
    /// Number of random (ξ, α) samples
    #[arg(long, default_value_t = 200)]
    n_samples: usize,
    /// RNG seed; defaults to mc.seed from the config, else 0
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.cmd {
        Cmd::Solve(a) => with_config(a, cmd_solve),
        Cmd::Radial(a) => with_config(a, cmd_radial),
        Cmd::Verify(a) => with_config(a, cmd_verify),
        Cmd::LegendreCheck(a) => cmd_legendre_check(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

/// Config errors are the user's to fix (exit 1); solver and structural
/// failures are runtime diagnostics (exit 2).
fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Parse { .. } | Error::Eval(_) | Error::Shape(_) | Error::Io(_) => {
            1
        }
        Error::Solver { .. } | Error::Structural(_) => 2,
    }
}

fn with_config(args: &RunArgs, run: impl FnOnce(&RunConfig) -> Result<u8>) -> Result<u8> {
    let mut cfg = RunConfig::load(&args.config)?;
    cfg.apply(&Overrides {
        eps: args.eps,
        seed: args.seed,
        nodes: args.nodes,
    });
    if args.dump_config {
        println!("{}", to_json_string(&cfg)?);
        return Ok(0);
    }
    run(&cfg)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    write_json_file(value, path)
}

// ------------------------------------------------------------------- solve

#[derive(Serialize)]
struct SolveSummary {
    steps: usize,
    converged: bool,
    final_sup_diff: f64,
    max_residual: f64,
    #[serde(rename = "B")]
    b: f64,
    #[serde(rename = "H")]
    h: f64,
}

fn cmd_solve(cfg: &RunConfig) -> Result<u8> {
    let problem = cfg.problem()?;
    if matches!(problem.domain, DomainSpec::Ball { .. }) {
        return Err(Error::Config(
            "solve works on intervals and rectangles; use `hjb radial` for balls".into(),
        ));
    }
    let grid = grid_for_domain(&problem.domain, &cfg.grid.nodes)?;
    let opts = cfg.iterate_options();
    let barriers = build_barriers(&problem, &grid)?;
    let report = iterate(&problem, &grid, &opts)?;

    if let Some(path) = &cfg.output.field_csv {
        report.v.write_csv(&mut create(path)?)?;
    }
    if let Some(path) = &cfg.output.convergence_csv {
        write_convergence_csv(&report, &mut create(path)?)?;
    }
    let last = report.per_step.last();
    let summary = SolveSummary {
        steps: report.steps,
        converged: report.converged,
        final_sup_diff: last.map_or(0.0, |s| s.sup_diff),
        max_residual: last.map_or(0.0, |s| s.max_residual),
        b: opts.barrier_scale * barriers.b,
        h: barriers.h_max,
    };
    if let Some(path) = &cfg.output.summary_json {
        write_json(&summary, path)?;
    }
    println!("{}", to_json_string(&summary)?);
    Ok(if report.converged { 0 } else { 2 })
}

// ------------------------------------------------------------------ radial

#[derive(Serialize)]
struct RadialSummary {
    steps: usize,
    converged: bool,
    final_sup_diff: f64,
    origin_slope: f64,
    /// sup |interval solve − reconstructed profile|, only defined for N = 1.
    cross_check: Option<f64>,
}

fn cmd_radial(cfg: &RunConfig) -> Result<u8> {
    let problem = cfg.problem()?;
    if cfg.grid.nodes.len() != 1 {
        return Err(Error::Config(format!(
            "radial solves take exactly one node count, got {:?}",
            cfg.grid.nodes
        )));
    }
    let nodes = cfg.grid.nodes[0];
    let opts = cfg.iterate_options();
    let sol = solve_radial(&problem, nodes, &opts)?;
    let cross_check = if problem.domain.ndim() == 1 && sol.report.converged {
        Some(cross_check_1d(&problem, nodes, &opts)?)
    } else {
        None
    };

    if let Some(path) = &cfg.output.profile_csv {
        write_profile_csv(&sol, &mut create(path)?)?;
    }
    let summary = RadialSummary {
        steps: sol.report.steps,
        converged: sol.report.converged,
        final_sup_diff: sol.report.per_step.last().map_or(0.0, |s| s.sup_diff),
        origin_slope: sol.origin_slope,
        cross_check,
    };
    if let Some(path) = &cfg.output.summary_json {
        write_json(&summary, path)?;
    }
    println!("{}", to_json_string(&summary)?);
    Ok(if sol.report.converged { 0 } else { 2 })
}

// ------------------------------------------------------------------ verify

#[derive(Serialize)]
struct ComparisonReport {
    policy: &'static str,
    report: MCReport,
    /// mean_cost − V(x₀); admissibility requires ≥ −(3·SE + allowance).
    gap: f64,
}

#[derive(Serialize)]
struct VerifyReport {
    value_at_x0: f64,
    allowance: f64,
    optimal: MCReport,
    optimal_gap: f64,
    comparisons: Vec<ComparisonReport>,
    passed: bool,
}

fn cmd_verify(cfg: &RunConfig) -> Result<u8> {
    let mc = cfg
        .mc
        .as_ref()
        .ok_or_else(|| Error::Config("verify needs an mc block in the config".into()))?;
    let problem = cfg.problem()?;
    let opts = cfg.iterate_options();

    let solved = if matches!(problem.domain, DomainSpec::Ball { .. }) {
        if cfg.grid.nodes.len() != 1 {
            return Err(Error::Config(format!(
                "radial solves take exactly one node count, got {:?}",
                cfg.grid.nodes
            )));
        }
        Solved::from_radial(solve_radial(&problem, cfg.grid.nodes[0], &opts)?)?
    } else {
        let grid = grid_for_domain(&problem.domain, &cfg.grid.nodes)?;
        Solved::from_iteration(&iterate(&problem, &grid, &opts)?)?
    };

    let x0 = mc.x0.clone().unwrap_or_else(|| problem.domain.center());
    let v0 = solved.value_at(&x0)?;

    // Every policy sees the same seed, hence the same driving noise per path
    // index: gap comparisons use common random numbers.
    let optimal = simulate_cost(
        &problem,
        &Policy::Optimal(solved.clone()),
        &x0,
        mc.dt,
        mc.n_paths,
        mc.seed,
    )?;
    let optimal_gap = optimal.mean_cost - v0;

    let mut comparisons = Vec::new();
    for pc in &mc.policies {
        let policy = match pc {
            PolicyConfig::Zero => Policy::Zero,
            PolicyConfig::ConstantDrift(v) => Policy::ConstantDrift(v.clone()),
            PolicyConfig::Custom(exprs) => {
                let n = problem.domain.ndim();
                if exprs.len() != n {
                    return Err(Error::Config(format!(
                        "custom policy needs {n} drift expressions, got {}",
                        exprs.len()
                    )));
                }
                Policy::Custom(
                    exprs
                        .iter()
                        .map(|s| hjb_core::expr::parse(s, n))
                        .collect::<Result<Vec<_>>>()?,
                )
            }
        };
        let report = simulate_cost(&problem, &policy, &x0, mc.dt, mc.n_paths, mc.seed)?;
        let gap = report.mean_cost - v0;
        comparisons.push(ComparisonReport {
            policy: pc.label(),
            report,
            gap,
        });
    }

    let all_valid =
        optimal.is_valid() && comparisons.iter().all(|c| c.report.is_valid());
    let optimal_ok = optimal_gap.abs() <= 3.0 * optimal.std_error + mc.allowance;
    let comparisons_ok = comparisons
        .iter()
        .all(|c| c.gap >= -(3.0 * c.report.std_error + mc.allowance));
    let passed = all_valid && optimal_ok && comparisons_ok;

    let report = VerifyReport {
        value_at_x0: v0,
        allowance: mc.allowance,
        optimal,
        optimal_gap,
        comparisons,
        passed,
    };
    if let Some(path) = &cfg.output.report_json {
        write_json(&report, path)?;
    }
    println!("{}", to_json_string(&report)?);
    Ok(if passed { 0 } else { 2 })
}

// ---------------------------------------------------------- legendre-check

#[derive(Serialize)]
struct LegendreSummary {
    n_samples: usize,
    seed: u64,
    max_deviation: f64,
    passed: bool,
}

/// Brute-force inf over v of ξ·v + |v|^α, independent of the library's
/// closed form: for fixed |v| = t the inner product is smallest with v
/// against ξ, so the infimum is min over t ≥ 0 of t^α − |ξ|t — a strictly
/// convex function, minimized here by golden-section search. Only the
/// bracket's right end uses calculus (a bound on the minimizer).
fn brute_force_min(xi: &[f64], alpha: f64) -> f64 {
    let norm = xi.iter().map(|z| z * z).sum::<f64>().sqrt();
    if norm == 0.0 {
        return 0.0;
    }
    let f = |t: f64| t.powf(alpha) - norm * t;
    let mut a = 0.0f64;
    let mut b = (norm / alpha).powf(1.0 / (alpha - 1.0)) + 1.0;
    let inv_phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    f(0.5 * (a + b))
}

fn cmd_legendre_check(args: &LegendreArgs) -> Result<u8> {
    let config_seed = match &args.config {
        Some(path) => RunConfig::load(path)?.mc.map_or(0, |m| m.seed),
        None => 0,
    };
    let seed = args.seed.unwrap_or(config_seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_deviation = 0.0f64;
    for _ in 0..args.n_samples {
        let n: usize = rng.gen_range(1..=3);
        let xi: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let alpha: f64 = rng.gen_range(1.05..=2.0);
        let closed = hamiltonian_min(&xi, alpha)?;
        max_deviation = max_deviation.max((closed - brute_force_min(&xi, alpha)).abs());
    }
    let passed = max_deviation <= 1e-3;
    let summary = LegendreSummary {
        n_samples: args.n_samples,
        seed,
        max_deviation,
        passed,
    };
    println!("{}", to_json_string(&summary)?);
    Ok(if passed { 0 } else { 2 })
}
