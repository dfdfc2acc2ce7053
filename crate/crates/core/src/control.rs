//! Stochastic-control verification: simulate dX_t = v(X_t)dt + σ dW_t to
//! the first exit from Ω, accumulate the running cost ∫(h(X)+|v|^α)dt plus
//! the exit payment g, and compare the Monte Carlo estimate against the PDE
//! solution. The solved value function certifies itself: the cost of its
//! feedback law matches V(x₀) up to statistical and discretization error,
//! and every other admissible policy costs at least as much.
//!
//! # Determinism
//!
//! Path `i` draws from a counter-based generator seeded with the run seed
//! and the path index as the stream, so the path ensemble is identical no
//! matter how many workers execute it. Aggregation sums per-path results in
//! path order with compensated (Neumaier) addition. For a fixed
//! `(seed, dt, n_paths, policy)` the report is therefore bit-stable across
//! thread counts; `HJB_THREADS` sizes the worker pool without changing
//! results.
//!
//! # Exit detection
//!
//! Exits are detected at discrete steps only. A path that leaves between
//! step points keeps running until a step lands outside, which biases costs
//! high by O(√dt); tolerances in the callers absorb this. No Brownian-bridge
//! correction is attempted.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{self, Expr};
use crate::grid::{gradient, Field};
use crate::iterate::IterationReport;
use crate::model::{optimal_control, DomainSpec, Problem};
use crate::radial::RadialSolution;

/// A converged value function with its gradient, in either representation.
#[derive(Debug, Clone)]
pub enum Solved {
    Grid {
        v: Field,
        grads: Vec<Field>,
    },
    Radial {
        sol: Arc<RadialSolution>,
        /// Nodal u′, cached once; interpolated on every policy evaluation.
        du: Arc<Vec<f64>>,
    },
}

impl Solved {
    /// Wraps a field the caller asserts solves the equation (manufactured
    /// or externally checked); precomputes the nodal gradient.
    pub fn from_field(v: Field) -> Solved {
        let grads = gradient(&v);
        Solved::Grid { v, grads }
    }

    /// From a grid iteration; refuses unconverged reports, since the
    /// verification bound is only meaningful for the solution.
    pub fn from_iteration(report: &IterationReport) -> Result<Solved> {
        if !report.converged {
            return Err(Error::Config(
                "cannot build a feedback policy from an unconverged iteration".into(),
            ));
        }
        Ok(Solved::from_field(report.v.clone()))
    }

    /// From a radial profile; same convergence requirement.
    pub fn from_radial(sol: RadialSolution) -> Result<Solved> {
        if !sol.report.converged {
            return Err(Error::Config(
                "cannot build a feedback policy from an unconverged radial solve".into(),
            ));
        }
        let du = Arc::new(sol.nodal_slopes());
        Ok(Solved::Radial {
            sol: Arc::new(sol),
            du,
        })
    }

    /// Multilinear interpolation of V at `x` (grid) or u(|x-c|) (radial).
    pub fn value_at(&self, x: &[f64]) -> Result<f64> {
        match self {
            Solved::Grid { v, .. } => interp_field(v, x),
            Solved::Radial { sol, .. } => crate::radial::reconstruct(sol, x),
        }
    }

    /// Interpolated ∇V at `x`; radial profiles use u′(r)·(x-c)/r, which
    /// vanishes at the center by symmetry.
    pub fn gradient_at(&self, x: &[f64]) -> Result<Vec<f64>> {
        match self {
            Solved::Grid { grads, .. } => {
                grads.iter().map(|gf| interp_field(gf, x)).collect()
            }
            Solved::Radial { sol, du } => {
                if x.len() != sol.center.len() {
                    return Err(Error::Shape(format!(
                        "point has {} coordinates, ball center has {}",
                        x.len(),
                        sol.center.len()
                    )));
                }
                let r2: f64 = x
                    .iter()
                    .zip(&sol.center)
                    .map(|(xi, ci)| (xi - ci) * (xi - ci))
                    .sum();
                let r = r2.sqrt();
                if r == 0.0 {
                    return Ok(vec![0.0; x.len()]);
                }
                let slope = sol.slope_from_nodal(du, r)?;
                Ok(x.iter()
                    .zip(&sol.center)
                    .map(|(xi, ci)| slope * (xi - ci) / r)
                    .collect())
            }
        }
    }
}

/// Feedback drift law used along simulated paths.
#[derive(Debug, Clone)]
pub enum Policy {
    /// v*(x) from the solved value function's interpolated gradient.
    Optimal(Solved),
    /// No control: pure diffusion.
    Zero,
    /// Fixed drift vector.
    ConstantDrift(Vec<f64>),
    /// One expression per axis, evaluated at the current state. Must be
    /// bounded on the closed domain; checked by sampling (a sufficient
    /// stand-in for the integrability condition true admissibility asks
    /// for, which is not decidable from an expression).
    Custom(Vec<Expr>),
}

/// Monte Carlo estimate of the control cost from a fixed start point.
#[derive(Debug, Clone, Serialize)]
pub struct MCReport {
    pub mean_cost: f64,
    /// Sample standard deviation / √n_paths.
    pub std_error: f64,
    pub n_paths: usize,
    pub dt: f64,
    pub mean_exit_time: f64,
    pub max_exit_time: f64,
    pub seed: u64,
    /// Paths stopped at T_max = 10⁶·dt without exiting; they pay the
    /// running cost plus g as a best-effort value.
    pub capped_paths: usize,
}

impl MCReport {
    /// More than 0.1% capped paths means the estimate cannot be trusted.
    pub fn is_valid(&self) -> bool {
        self.capped_paths * 1000 <= self.n_paths
    }
}

/// Multilinear interpolation on the field's grid; errors off the grid.
fn interp_field(f: &Field, x: &[f64]) -> Result<f64> {
    let grid = f.grid();
    let d = grid.ndim();
    if x.len() != d {
        return Err(Error::Shape(format!(
            "point has {} coordinates, grid has {d}",
            x.len()
        )));
    }
    debug_assert!(d <= 8);
    let mut base = [0usize; 8];
    let mut w = [0.0f64; 8];
    for a in 0..d {
        let n = grid.dims()[a];
        let t = (x[a] - grid.origin()[a]) / grid.spacing()[a];
        let top = (n - 1) as f64;
        if !t.is_finite() || t < -1e-9 || t > top + 1e-9 {
            return Err(Error::Config(format!(
                "point {x:?} lies outside the solved grid on axis {a}"
            )));
        }
        let tc = t.clamp(0.0, top);
        let j = (tc.floor() as usize).min(n - 2);
        base[a] = j;
        w[a] = tc - j as f64;
    }
    let mut acc = 0.0;
    let mut idx = [0usize; 8];
    for corner in 0..(1usize << d) {
        let mut weight = 1.0;
        for a in 0..d {
            if corner >> a & 1 == 1 {
                idx[a] = base[a] + 1;
                weight *= w[a];
            } else {
                idx[a] = base[a];
                weight *= 1.0 - w[a];
            }
        }
        if weight != 0.0 {
            acc += weight * f.values()[grid.flat(&idx[..d])];
        }
    }
    Ok(acc)
}

/// Optimal feedback at a point: v*(∇V(x)).
pub fn feedback_eval(solved: &Solved, x: &[f64], alpha: f64) -> Result<Vec<f64>> {
    let grad = solved.gradient_at(x)?;
    optimal_control(&grad, alpha)
}

/// Compensated (Neumaier) sum; exact enough that the order-dependence of
/// plain floating addition cannot leak scheduling into the report.
fn neumaier_sum<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let mut s = 0.0f64;
    let mut c = 0.0f64;
    for x in xs {
        let t = s + x;
        if s.abs() >= x.abs() {
            c += (s - t) + x;
        } else {
            c += (x - t) + s;
        }
        s = t;
    }
    s + c
}

fn validate_policy(problem: &Problem, policy: &Policy) -> Result<()> {
    let d = problem.domain.ndim();
    match policy {
        Policy::Zero | Policy::Optimal(_) => Ok(()),
        Policy::ConstantDrift(v) => {
            if v.len() != d {
                return Err(Error::Shape(format!(
                    "constant drift has {} components, domain has {d}",
                    v.len()
                )));
            }
            if v.iter().any(|c| !c.is_finite()) {
                return Err(Error::Config("constant drift must be finite".into()));
            }
            Ok(())
        }
        Policy::Custom(exprs) => {
            if exprs.len() != d {
                return Err(Error::Shape(format!(
                    "custom policy has {} components, domain has {d}",
                    exprs.len()
                )));
            }
            sample_policy_bounded(problem, exprs)
        }
    }
}

/// Evaluates every component on a lattice over the closed domain; any
/// evaluation error or non-finite value rejects the policy.
fn sample_policy_bounded(problem: &Problem, exprs: &[Expr]) -> Result<()> {
    let center = problem.domain.center();
    let d = center.len();
    let (lo, hi) = domain_bbox(&problem.domain);
    let per_axis = 9usize;
    let total = per_axis.pow(d as u32);
    for flat in 0..total {
        let mut x = vec![0.0; d];
        let mut rem = flat;
        for a in 0..d {
            let j = rem % per_axis;
            rem /= per_axis;
            let t = j as f64 / (per_axis - 1) as f64;
            x[a] = lo[a] + t * (hi[a] - lo[a]);
        }
        if let DomainSpec::Ball { center, radius } = &problem.domain {
            let r2: f64 = x
                .iter()
                .zip(center)
                .map(|(xi, ci)| (xi - ci) * (xi - ci))
                .sum();
            if r2.sqrt() > *radius {
                continue;
            }
        }
        for e in exprs {
            let v = expr::eval(e, &x, &center).map_err(|err| {
                Error::Config(format!(
                    "custom policy is not bounded on the closed domain: {err} at {x:?}"
                ))
            })?;
            if !v.is_finite() {
                return Err(Error::Config(format!(
                    "custom policy is not finite at {x:?}"
                )));
            }
        }
    }
    Ok(())
}

fn domain_bbox(domain: &DomainSpec) -> (Vec<f64>, Vec<f64>) {
    match domain {
        DomainSpec::Interval { a, b } => (vec![*a], vec![*b]),
        DomainSpec::Rectangle { lo, hi } => (lo.clone(), hi.clone()),
        DomainSpec::Ball { center, radius } => (
            center.iter().map(|c| c - radius).collect(),
            center.iter().map(|c| c + radius).collect(),
        ),
    }
}

struct PathOut {
    cost: f64,
    exit_time: f64,
    capped: bool,
}

fn run_path(
    problem: &Problem,
    policy: &Policy,
    x0: &[f64],
    dt: f64,
    seed: u64,
    index: usize,
) -> Result<PathOut> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    let d = x0.len();
    let sqrt_dt = dt.sqrt();
    let sigma = problem.sigma;
    let alpha = problem.alpha;
    let g = problem.g;
    let center = problem.domain.center();
    let max_steps: usize = 1_000_000;

    let mut x = x0.to_vec();
    let mut v = vec![0.0f64; d];
    let mut cost = 0.0f64;
    for n in 0..max_steps {
        match policy {
            Policy::Zero => v.iter_mut().for_each(|c| *c = 0.0),
            Policy::ConstantDrift(drift) => v.copy_from_slice(drift),
            Policy::Custom(exprs) => {
                for (a, e) in exprs.iter().enumerate() {
                    v[a] = expr::eval(e, &x, &center)?;
                }
            }
            Policy::Optimal(solved) => {
                let fv = feedback_eval(solved, &x, alpha)?;
                v.copy_from_slice(&fv);
            }
        }
        let vnorm2: f64 = v.iter().map(|c| c * c).sum();
        let h = problem.h_at(&x)?;
        cost += (h + vnorm2.sqrt().powf(alpha)) * dt;
        for a in 0..d {
            let xi: f64 = StandardNormal.sample(&mut rng);
            x[a] += v[a] * dt + sigma * sqrt_dt * xi;
        }
        if !problem.domain.contains(&x) {
            cost += g;
            return Ok(PathOut {
                cost,
                exit_time: (n + 1) as f64 * dt,
                capped: false,
            });
        }
    }
    // never exited: pay the terminal cost anyway so the estimate stays a
    // best-effort lower-biased value, and flag the path
    cost += g;
    Ok(PathOut {
        cost,
        exit_time: max_steps as f64 * dt,
        capped: true,
    })
}

fn worker_pool() -> Result<Option<rayon::ThreadPool>> {
    match std::env::var("HJB_THREADS") {
        Err(_) => Ok(None),
        Ok(s) => {
            let n: usize = s.trim().parse().map_err(|_| {
                Error::Config(format!(
                    "HJB_THREADS must be a nonnegative integer (0 = auto), got {s:?}"
                ))
            })?;
            // rayon reads 0 as "pick the default worker count"
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
            Ok(Some(pool))
        }
    }
}

/// Simulates `n_paths` exits and returns the cost statistics. Deterministic
/// for fixed `(seed, dt, n_paths, policy)` whatever the worker count.
pub fn simulate_cost(
    problem: &Problem,
    policy: &Policy,
    x0: &[f64],
    dt: f64,
    n_paths: usize,
    seed: u64,
) -> Result<MCReport> {
    if x0.len() != problem.domain.ndim() {
        return Err(Error::Shape(format!(
            "x0 has {} coordinates, domain has {}",
            x0.len(),
            problem.domain.ndim()
        )));
    }
    if !problem.domain.contains(x0) {
        return Err(Error::Config(format!(
            "x0 = {x0:?} is not strictly interior to the domain"
        )));
    }
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::Config(format!("dt must be > 0, got {dt}")));
    }
    if n_paths < 2 {
        return Err(Error::Config(format!(
            "n_paths must be at least 2, got {n_paths}"
        )));
    }
    validate_policy(problem, policy)?;

    let run = || -> Result<Vec<PathOut>> {
        (0..n_paths)
            .into_par_iter()
            .map(|i| run_path(problem, policy, x0, dt, seed, i))
            .collect()
    };
    let paths = match worker_pool()? {
        Some(pool) => pool.install(run)?,
        None => run()?,
    };

    let mean_cost = neumaier_sum(paths.iter().map(|p| p.cost)) / n_paths as f64;
    let var = neumaier_sum(paths.iter().map(|p| {
        let d = p.cost - mean_cost;
        d * d
    })) / (n_paths - 1) as f64;
    let std_error = (var / n_paths as f64).sqrt();
    let mean_exit_time = neumaier_sum(paths.iter().map(|p| p.exit_time)) / n_paths as f64;
    let max_exit_time = paths.iter().map(|p| p.exit_time).fold(0.0f64, f64::max);
    let capped_paths = paths.iter().filter(|p| p.capped).count();

    Ok(MCReport {
        mean_cost,
        std_error,
        n_paths,
        dt,
        mean_exit_time,
        max_exit_time,
        seed,
        capped_paths,
    })
}

/// mean_cost(policy) − V(x₀): nonnegative up to statistical and
/// discretization error for admissible policies, ≈ 0 for the optimal one.
pub fn policy_value_gap(
    problem: &Problem,
    solved: &Solved,
    policy: &Policy,
    x0: &[f64],
    dt: f64,
    n_paths: usize,
    seed: u64,
) -> Result<f64> {
    let report = simulate_cost(problem, policy, x0, dt, n_paths, seed)?;
    Ok(report.mean_cost - solved.value_at(x0)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::iterate::{iterate, IterateOptions};
    use crate::model::SourceFn;

    fn interval_problem(h: SourceFn, g: f64) -> Problem {
        Problem::new(2.0, 1.0, DomainSpec::Interval { a: -1.0, b: 1.0 }, h, g).unwrap()
    }

    #[test]
    fn pure_exit_cost_is_exact() {
        let p = interval_problem(SourceFn::Constant(0.0), 5.0);
        let r = simulate_cost(&p, &Policy::Zero, &[0.0], 1e-2, 50, 1).unwrap();
        assert_eq!(r.mean_cost, 5.0);
        assert_eq!(r.std_error, 0.0);
        assert_eq!(r.capped_paths, 0);
        assert!(r.is_valid());
    }

    #[test]
    fn seed_determinism_bitwise() {
        let p = interval_problem(SourceFn::Constant(1.0), 0.0);
        let a = simulate_cost(&p, &Policy::Zero, &[0.0], 1e-2, 200, 42).unwrap();
        let b = simulate_cost(&p, &Policy::Zero, &[0.0], 1e-2, 200, 42).unwrap();
        assert_eq!(a.mean_cost.to_bits(), b.mean_cost.to_bits());
        assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
        assert_eq!(a.mean_exit_time.to_bits(), b.mean_exit_time.to_bits());
        let c = simulate_cost(&p, &Policy::Zero, &[0.0], 1e-2, 200, 43).unwrap();
        assert_ne!(a.mean_cost.to_bits(), c.mean_cost.to_bits());
    }

    #[test]
    fn worker_count_does_not_change_results() {
        // par_iter picks up whatever pool is installed, so explicit pools
        // exercise scheduling invariance without touching the environment
        let p = interval_problem(SourceFn::Constant(1.0), 0.0);
        let base = simulate_cost(&p, &Policy::Zero, &[0.0], 1e-2, 200, 7).unwrap();
        for threads in [1, 2, 5] {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            let r = pool
                .install(|| simulate_cost(&p, &Policy::Zero, &[0.0], 1e-2, 200, 7))
                .unwrap();
            assert_eq!(
                r.mean_cost.to_bits(),
                base.mean_cost.to_bits(),
                "{threads} threads"
            );
            assert_eq!(r.std_error.to_bits(), base.std_error.to_bits());
        }
    }

    #[test]
    fn exit_time_matches_torsion_identity() {
        // E[τ] = 2φ(x₀)/σ² = 1 - x₀² on (-1,1) with σ = 1
        let p = interval_problem(SourceFn::Constant(1.0), 0.0);
        let r = simulate_cost(&p, &Policy::Zero, &[0.0], 1e-3, 4000, 11).unwrap();
        // with h ≡ 1, g = 0, v ≡ 0 the cost is τ itself, up to the rounding
        // difference between step-wise accumulation and (n+1)·dt
        let se_tau = r.std_error;
        assert!((r.mean_cost - r.mean_exit_time).abs() < 1e-9);
        assert!(
            (r.mean_exit_time - 1.0).abs() <= 3.0 * se_tau + 0.05,
            "E[tau] = {}, SE = {}",
            r.mean_exit_time,
            se_tau
        );
        // discrete exit overshoots, never undershoots, on average
        assert!(r.mean_exit_time > 0.9);
        assert!(r.max_exit_time >= r.mean_exit_time);
        assert!(r.is_valid());
    }

    #[test]
    fn input_validation() {
        let p = interval_problem(SourceFn::Constant(1.0), 0.0);
        assert!(matches!(
            simulate_cost(&p, &Policy::Zero, &[1.0], 1e-2, 10, 1),
            Err(Error::Config(_)) // on the boundary
        ));
        assert!(matches!(
            simulate_cost(&p, &Policy::Zero, &[0.0], 0.0, 10, 1),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            simulate_cost(&p, &Policy::Zero, &[0.0], 1e-2, 1, 1),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            simulate_cost(&p, &Policy::ConstantDrift(vec![0.0, 0.0]), &[0.0], 1e-2, 10, 1),
            Err(Error::Shape(_))
        ));
        assert!(matches!(
            simulate_cost(&p, &Policy::Zero, &[0.0, 0.0], 1e-2, 10, 1),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn custom_policy_sampled_admissibility() {
        let p = interval_problem(SourceFn::Constant(1.0), 0.0);
        // 1/x1 blows up inside the closed domain: rejected at setup
        let bad = Policy::Custom(vec![expr::parse("1/x1", 1).unwrap()]);
        assert!(matches!(
            simulate_cost(&p, &bad, &[0.5], 1e-2, 10, 1),
            Err(Error::Config(_))
        ));
        let ok = Policy::Custom(vec![expr::parse("-x1", 1).unwrap()]);
        assert!(simulate_cost(&p, &ok, &[0.5], 1e-2, 10, 1).is_ok());
    }

    #[test]
    fn capped_paths_flag_invalid() {
        // strong mean reversion with a small σ: exit from (-1,1) is
        // astronomically unlikely, every path hits T_max
        let p = Problem::new(
            2.0,
            0.05,
            DomainSpec::Interval { a: -1.0, b: 1.0 },
            SourceFn::Constant(0.0),
            1.0,
        )
        .unwrap();
        let pull = Policy::Custom(vec![expr::parse("-50*x1", 1).unwrap()]);
        let r = simulate_cost(&p, &pull, &[0.0], 1e-3, 2, 3).unwrap();
        assert_eq!(r.capped_paths, 2);
        assert!(!r.is_valid());
        assert_eq!(r.max_exit_time, 1e6 * 1e-3);
    }

    #[test]
    fn feedback_law_examples() {
        // constant V: no drift anywhere
        let grid = Grid::interval(0.0, 1.0, 11).unwrap();
        let flat = Solved::from_field(Field::constant(&grid, 2.0));
        assert_eq!(feedback_eval(&flat, &[0.3], 2.0).unwrap(), vec![0.0]);

        // V = x(1-x), α = 2: v*(x) = -∇V/2 = -(1-2x)/2; x = 0.25 is a node
        let grid = Grid::interval(0.0, 1.0, 101).unwrap();
        let v = Field::from_fn(&grid, |x| x[0] * (1.0 - x[0]));
        let s = Solved::from_field(v);
        let fv = feedback_eval(&s, &[0.25], 2.0).unwrap();
        assert!((fv[0] + 0.25).abs() < 1e-12, "{}", fv[0]);

        // radial profile: zero drift at the center by symmetry
        let ball = Problem::new(
            1.5,
            1.0,
            DomainSpec::Ball {
                center: vec![0.0, 0.0],
                radius: 1.0,
            },
            SourceFn::ManufacturedRadial,
            0.0,
        )
        .unwrap();
        let sol =
            crate::radial::solve_radial(&ball, 101, &IterateOptions::default()).unwrap();
        let rs = Solved::from_radial(sol).unwrap();
        assert_eq!(feedback_eval(&rs, &[0.0, 0.0], 1.5).unwrap(), vec![0.0, 0.0]);
        // off-center it points inward (u decreasing in r)
        let fv = feedback_eval(&rs, &[0.5, 0.0], 1.5).unwrap();
        assert!(fv[0] > 0.0 || fv[0].abs() < 1e-12);
    }

    #[test]
    fn interpolation_is_exact_on_nodes_and_linear_between() {
        let grid = Grid::rectangle(&[0.0, 0.0], &[1.0, 1.0], &[5, 5]).unwrap();
        let f = Field::from_fn(&grid, |x| 1.0 + 2.0 * x[0] - 3.0 * x[1]);
        // multilinear interpolation reproduces affine functions exactly
        for x in [[0.0, 0.0], [0.3, 0.7], [0.125, 0.9], [1.0, 1.0]] {
            let got = interp_field(&f, &x).unwrap();
            let want = 1.0 + 2.0 * x[0] - 3.0 * x[1];
            assert!((got - want).abs() < 1e-14, "{x:?}");
        }
        assert!(interp_field(&f, &[1.5, 0.5]).is_err());
    }

    #[test]
    fn zero_source_gap_is_zero() {
        let p = interval_problem(SourceFn::Constant(0.0), 2.0);
        let grid = Grid::interval(-1.0, 1.0, 41).unwrap();
        let rep = iterate(&p, &grid, &IterateOptions::default()).unwrap();
        let solved = Solved::from_iteration(&rep).unwrap();
        let gap =
            policy_value_gap(&p, &solved, &Policy::Zero, &[0.0], 1e-2, 50, 5).unwrap();
        // every path pays exactly g; the PDE side carries solver rounding
        assert!(gap.abs() < 1e-12, "{gap:.3e}");
    }

    #[test]
    fn unconverged_solutions_are_refused() {
        let p = interval_problem(SourceFn::Constant(1.0), 0.0);
        let grid = Grid::interval(-1.0, 1.0, 101).unwrap();
        let opts = IterateOptions {
            max_iters: 1,
            ..Default::default()
        };
        let rep = iterate(&p, &grid, &opts).unwrap();
        assert!(!rep.converged);
        assert!(Solved::from_iteration(&rep).is_err());
    }

    #[test]
    fn report_serializes_with_spec_keys() {
        let p = interval_problem(SourceFn::Constant(0.0), 1.0);
        let r = simulate_cost(&p, &Policy::Zero, &[0.0], 1e-2, 2, 9).unwrap();
        let json = crate::export::to_json_string(&r).unwrap();
        for key in [
            "mean_cost",
            "std_error",
            "n_paths",
            "dt",
            "mean_exit_time",
            "max_exit_time",
            "seed",
            "capped_paths",
        ] {
            assert!(json.contains(&format!("\"{key}\":")), "{json}");
        }
    }
}
