//! JSON run configuration: one document describes the problem, the grid,
//! the solver knobs, the optional Monte Carlo block, and the output paths.
//! Unknown keys are rejected everywhere so typos fail loudly, and
//! `--dump-config` echoes the parsed document for round-trip checks.

use std::path::PathBuf;

use hjb_core::{expr, DomainSpec, Error, IterateOptions, LinearSolveSettings, Problem, Result, SourceFn};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemConfig,
    pub grid: GridConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mc: Option<McConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub alpha: f64,
    pub sigma: f64,
    pub g: f64,
    pub h: HSpec,
    pub domain: DomainConfig,
}

/// The running cost: a bare number, the string "manufactured" for the
/// built-in radial source with known exact solution, or {"expr": "..."}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HSpec {
    Constant(f64),
    Named(String),
    Expr(ExprSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExprSpec {
    pub expr: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainConfig {
    Interval { a: f64, b: f64 },
    Rectangle { lo: Vec<f64>, hi: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    /// Nodes per axis for box domains; a single entry (the profile length)
    /// for balls.
    pub nodes: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub eps: f64,
    pub max_iters: usize,
    pub linear_tol: f64,
    /// None lets the linear solver pick 10 × node count.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_linear_iters: Option<usize>,
    pub keep_history: bool,
    pub strict_monotone: bool,
    pub barrier_scale: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let opts = IterateOptions::default();
        SolverConfig {
            eps: opts.eps,
            max_iters: opts.max_iters,
            linear_tol: opts.linear.rel_residual_tol,
            max_linear_iters: opts.linear.max_linear_iters,
            keep_history: opts.keep_history,
            strict_monotone: opts.strict_monotone,
            barrier_scale: opts.barrier_scale,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McConfig {
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_n_paths")]
    pub n_paths: usize,
    #[serde(default)]
    pub seed: u64,
    /// Starting point; defaults to the domain center.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
    /// Comparison policies simulated alongside the optimal feedback law.
    #[serde(default)]
    pub policies: Vec<PolicyConfig>,
    /// Discretization allowance added to 3·SE in the verification verdict.
    #[serde(default = "default_allowance")]
    pub allowance: f64,
}

fn default_dt() -> f64 {
    1e-3
}

fn default_n_paths() -> usize {
    10_000
}

fn default_allowance() -> f64 {
    0.03
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PolicyConfig {
    Zero,
    ConstantDrift(Vec<f64>),
    /// One drift expression per axis, in the variables x1..xN and r.
    Custom(Vec<String>),
}

impl PolicyConfig {
    pub fn label(&self) -> &'static str {
        match self {
            PolicyConfig::Zero => "zero",
            PolicyConfig::ConstantDrift(_) => "constant_drift",
            PolicyConfig::Custom(_) => "custom",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field_csv: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convergence_csv: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profile_csv: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summary_json: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report_json: Option<PathBuf>,
}

/// Scalar command-line overrides applied after parsing.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub eps: Option<f64>,
    pub seed: Option<u64>,
    pub nodes: Option<usize>,
}

impl RunConfig {
    pub fn load(path: &std::path::Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(eps) = o.eps {
            self.solver.eps = eps;
        }
        if let Some(seed) = o.seed {
            if let Some(mc) = &mut self.mc {
                mc.seed = seed;
            }
        }
        if let Some(n) = o.nodes {
            for slot in &mut self.grid.nodes {
                *slot = n;
            }
        }
    }

    pub fn problem(&self) -> Result<Problem> {
        let domain = match &self.problem.domain {
            DomainConfig::Interval { a, b } => DomainSpec::Interval { a: *a, b: *b },
            DomainConfig::Rectangle { lo, hi } => DomainSpec::Rectangle {
                lo: lo.clone(),
                hi: hi.clone(),
            },
            DomainConfig::Ball { center, radius } => DomainSpec::Ball {
                center: center.clone(),
                radius: *radius,
            },
        };
        let h = match &self.problem.h {
            HSpec::Constant(c) => SourceFn::Constant(*c),
            HSpec::Named(name) if name == "manufactured" => SourceFn::ManufacturedRadial,
            HSpec::Named(name) => {
                return Err(Error::Config(format!(
                    "unknown named source {name:?}; the only named source is \"manufactured\""
                )))
            }
            HSpec::Expr(spec) => SourceFn::Expr(expr::parse(&spec.expr, domain.ndim())?),
        };
        Problem::new(
            self.problem.alpha,
            self.problem.sigma,
            domain,
            h,
            self.problem.g,
        )
    }

    pub fn iterate_options(&self) -> IterateOptions {
        IterateOptions {
            eps: self.solver.eps,
            max_iters: self.solver.max_iters,
            linear: LinearSolveSettings {
                rel_residual_tol: self.solver.linear_tol,
                max_linear_iters: self.solver.max_linear_iters,
            },
            keep_history: self.solver.keep_history,
            strict_monotone: self.solver.strict_monotone,
            barrier_scale: self.solver.barrier_scale,
        }
    }
}
