//! Problem definition and the pointwise control theory: derived constants,
//! the Hamiltonian minimum via convex duality, and the feedback law.
//!
//! The equation solved by this toolkit is
//!
//! ```text
//! -(σ²/2) ΔV + C_α |∇V|^p - h = 0  in Ω,    V = g  on ∂Ω,
//! ```
//!
//! with p = α/(α-1) and C_α = (α-1)/α^p for α ∈ (1, 2]. The |∇V|^p term is
//! the minimized Hamiltonian of the control cost |v|^α:
//! inf_v { ξ·v + |v|^α } = -C_α |ξ|^p.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::expr::{self, Expr};
use crate::grid::{self, Field, Grid};

#[derive(Debug, Clone, PartialEq)]
pub enum DomainSpec {
    Interval { a: f64, b: f64 },
    Rectangle { lo: Vec<f64>, hi: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
}

impl DomainSpec {
    pub fn ndim(&self) -> usize {
        match self {
            DomainSpec::Interval { .. } => 1,
            DomainSpec::Rectangle { lo, .. } => lo.len(),
            DomainSpec::Ball { center, .. } => center.len(),
        }
    }

    pub fn center(&self) -> Vec<f64> {
        match self {
            DomainSpec::Interval { a, b } => vec![(a + b) / 2.0],
            DomainSpec::Rectangle { lo, hi } => {
                lo.iter().zip(hi).map(|(l, h)| (l + h) / 2.0).collect()
            }
            DomainSpec::Ball { center, .. } => center.clone(),
        }
    }

    /// Strict interior test; boundary points count as exited.
    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            DomainSpec::Interval { a, b } => x[0] > *a && x[0] < *b,
            DomainSpec::Rectangle { lo, hi } => x
                .iter()
                .zip(lo.iter().zip(hi))
                .all(|(xi, (l, h))| xi > l && xi < h),
            DomainSpec::Ball { center, radius } => {
                let r2: f64 = x
                    .iter()
                    .zip(center)
                    .map(|(xi, ci)| (xi - ci) * (xi - ci))
                    .sum();
                r2 < radius * radius
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            DomainSpec::Interval { a, b } => {
                if !(a < b) || !a.is_finite() || !b.is_finite() {
                    return Err(Error::Config(format!(
                        "interval needs finite a < b, got [{a}, {b}]"
                    )));
                }
            }
            DomainSpec::Rectangle { lo, hi } => {
                if lo.is_empty() || lo.len() != hi.len() {
                    return Err(Error::Config("rectangle lo/hi lengths differ".into()));
                }
                if lo.iter().zip(hi).any(|(l, h)| !(l < h)) {
                    return Err(Error::Config(format!(
                        "rectangle needs lo < hi componentwise, got {lo:?} .. {hi:?}"
                    )));
                }
            }
            DomainSpec::Ball { center, radius } => {
                if center.is_empty() {
                    return Err(Error::Config("ball center must be non-empty".into()));
                }
                if !(*radius > 0.0) || !radius.is_finite() {
                    return Err(Error::Config(format!(
                        "ball radius must be positive, got {radius}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Source term h: either a literal, a parsed expression over x1..xN and r,
/// or the built-in radial source whose exact solution is u = g + (R² - r²).
#[derive(Debug, Clone)]
pub enum SourceFn {
    Constant(f64),
    Expr(Expr),
    /// σ²N + C_α (2r)^p, manufactured so that g + (R² - r²) is the exact
    /// solution on a ball (or interval) of radius R.
    ManufacturedRadial,
}

impl SourceFn {
    /// True when evaluation depends on position only through r = |x - center|.
    pub fn is_radial(&self) -> bool {
        match self {
            SourceFn::Constant(_) => true,
            SourceFn::ManufacturedRadial => true,
            SourceFn::Expr(e) => expr::is_radial(e),
        }
    }
}

/// Immutable problem instance; safe to share across threads.
#[derive(Debug, Clone)]
pub struct Problem {
    pub alpha: f64,
    pub sigma: f64,
    pub domain: DomainSpec,
    pub h: SourceFn,
    pub g: f64,
    p: f64,
    c_alpha: f64,
}

impl Problem {
    pub fn new(alpha: f64, sigma: f64, domain: DomainSpec, h: SourceFn, g: f64) -> Result<Problem> {
        let p = conjugate_exponent(alpha)?;
        let c_alpha = cost_constant(alpha)?;
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::Config(format!("sigma must be > 0, got {sigma}")));
        }
        if !(g >= 0.0) || !g.is_finite() {
            return Err(Error::Config(format!("g must be >= 0, got {g}")));
        }
        domain.validate()?;
        // The manufactured source encodes the exact solution g + (R² - r²);
        // that solution meets the Dirichlet data only where the boundary is a
        // sphere about the center: balls, and intervals (1-d balls).
        if matches!(h, SourceFn::ManufacturedRadial)
            && matches!(domain, DomainSpec::Rectangle { .. })
        {
            return Err(Error::Config(
                "the manufactured source is defined on balls and intervals only".into(),
            ));
        }
        Ok(Problem {
            alpha,
            sigma,
            domain,
            h,
            g,
            p,
            c_alpha,
        })
    }

    /// Conjugate exponent p = α/(α-1).
    pub fn p(&self) -> f64 {
        self.p
    }

    /// C_α = (α-1)/α^p.
    pub fn c_alpha(&self) -> f64 {
        self.c_alpha
    }

    /// Evaluates h at a point of the closed domain.
    pub fn h_at(&self, x: &[f64]) -> Result<f64> {
        match &self.h {
            SourceFn::Constant(c) => Ok(*c),
            SourceFn::Expr(e) => expr::eval(e, x, &self.domain.center()),
            SourceFn::ManufacturedRadial => {
                let center = self.domain.center();
                let r2: f64 = x
                    .iter()
                    .zip(&center)
                    .map(|(xi, ci)| (xi - ci) * (xi - ci))
                    .sum();
                let n = self.domain.ndim() as f64;
                Ok(self.sigma * self.sigma * n + self.c_alpha * (2.0 * r2.sqrt()).powf(self.p))
            }
        }
    }

    /// Samples h on every node of `grid`, enforcing nonnegativity.
    pub fn sample_h(&self, grid: &Arc<Grid>) -> Result<Field> {
        let f = Field::try_from_fn(grid, |x| self.h_at(x))?;
        for i in 0..grid.len() {
            let v = f.values()[i];
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::Config(format!(
                    "h must be nonnegative on the closed domain; h({:?}) = {v}",
                    grid.coords(i)
                )));
            }
        }
        Ok(f)
    }
}

/// p = α/(α-1), defined for α ∈ (1, 2]; always ≥ 2 there.
pub fn conjugate_exponent(alpha: f64) -> Result<f64> {
    if !(alpha > 1.0 && alpha <= 2.0) {
        return Err(Error::Config(format!(
            "alpha must lie in (1, 2], got {alpha}"
        )));
    }
    Ok(alpha / (alpha - 1.0))
}

/// C_α = (α-1)/α^p ∈ (0, 1/4], with equality iff α = 2.
pub fn cost_constant(alpha: f64) -> Result<f64> {
    let p = conjugate_exponent(alpha)?;
    Ok((alpha - 1.0) / alpha.powf(p))
}

fn norm(xi: &[f64]) -> f64 {
    xi.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Exact infimum of v ↦ ξ·v + |v|^α, which is -C_α |ξ|^p.
pub fn hamiltonian_min(xi: &[f64], alpha: f64) -> Result<f64> {
    let p = conjugate_exponent(alpha)?;
    let c = cost_constant(alpha)?;
    Ok(-c * norm(xi).powf(p))
}

/// Unique minimizer of v ↦ ξ·v + |v|^α: antiparallel to ξ with magnitude
/// (|ξ|/α)^{1/(α-1)}, satisfying ξ + α|v*|^{α-2} v* = 0. Returns 0 at
/// ξ = 0, where the closed form's |v|^{α-2} factor is a removable
/// singularity for α < 2.
pub fn optimal_control(xi: &[f64], alpha: f64) -> Result<Vec<f64>> {
    conjugate_exponent(alpha)?;
    let m = norm(xi);
    if m == 0.0 {
        return Ok(vec![0.0; xi.len()]);
    }
    let t = (m / alpha).powf(1.0 / (alpha - 1.0));
    Ok(xi.iter().map(|v| -t * v / m).collect())
}

/// Builds the uniform grid discretizing a box domain with `nodes` nodes
/// per axis. Ball domains have no box grid; use the radial solver.
pub fn grid_for_domain(domain: &DomainSpec, nodes: &[usize]) -> Result<Arc<Grid>> {
    match domain {
        DomainSpec::Interval { a, b } => {
            if nodes.len() != 1 {
                return Err(Error::Config(format!(
                    "interval takes one node count, got {nodes:?}"
                )));
            }
            Grid::interval(*a, *b, nodes[0])
        }
        DomainSpec::Rectangle { lo, hi } => Grid::rectangle(lo, hi, nodes),
        DomainSpec::Ball { .. } => Err(Error::Config(
            "ball domains are solved radially; no box grid exists".into(),
        )),
    }
}

/// Checks that `grid` discretizes the problem's box domain (same origin and
/// extent per axis, up to roundoff).
pub fn grid_matches_domain(grid: &Grid, domain: &DomainSpec) -> bool {
    let (lo, hi): (Vec<f64>, Vec<f64>) = match domain {
        DomainSpec::Interval { a, b } => (vec![*a], vec![*b]),
        DomainSpec::Rectangle { lo, hi } => (lo.clone(), hi.clone()),
        DomainSpec::Ball { .. } => return false,
    };
    if grid.ndim() != lo.len() {
        return false;
    }
    for a in 0..lo.len() {
        let scale = 1.0 + lo[a].abs().max(hi[a].abs());
        if (grid.origin()[a] - lo[a]).abs() > 1e-12 * scale {
            return false;
        }
        let top = grid.origin()[a] + (grid.dims()[a] - 1) as f64 * grid.spacing()[a];
        if (top - hi[a]).abs() > 1e-12 * scale {
            return false;
        }
    }
    true
}

/// Discrete residual -(σ²/2)Δ_h V + C_α|∇_h V|^p - h at interior nodes;
/// boundary entries are 0 by the same convention as the Laplacian.
pub fn pde_residual(problem: &Problem, v: &Field) -> Result<Field> {
    if !grid_matches_domain(v.grid(), &problem.domain) {
        return Err(Error::Shape(
            "field grid does not discretize the problem domain".into(),
        ));
    }
    let grid = v.grid();
    let lap = grid::laplacian(v);
    let gp = grid::grad_p_norm(v, problem.p());
    let h = problem.sample_h(grid)?;
    let k = problem.sigma * problem.sigma / 2.0;
    let c = problem.c_alpha();
    let mut out = vec![0.0; grid.len()];
    for (i, o) in out.iter_mut().enumerate() {
        if !grid.is_boundary(i) {
            *o = -k * lap.values()[i] + c * gp.values()[i] - h.values()[i];
        }
    }
    Field::from_values(grid, out)
}
