//! Solver toolkit for the quasilinear Dirichlet problem
//!
//! ```text
//! -(σ²/2) ΔV + C_α |∇V|^p = h   in Ω,      V = g   on ∂Ω,
//! ```
//!
//! the stationary value function of an exit-time stochastic control
//! problem: steer dX_t = v_t dt + σ dW_t until it leaves Ω while paying
//! h(X_t) + |v_t|^α per unit time and g at the exit. The gradient term is
//! the Hamiltonian inf_v {ξ·v + |v|^α} = -C_α|ξ|^p with p the conjugate
//! exponent of α ∈ (1, 2].
//!
//! The pieces:
//!
//! * [`model`] — problem data, the α ↔ p Legendre pair, the feedback law;
//! * [`grid`] — tensor grids, fields, second-order stencils;
//! * [`poisson`] — the linear Dirichlet solves (direct in 1-d, matrix-free
//!   CG in 2-d/3-d) and the torsion function used for barriers;
//! * [`iterate`] — the frozen-gradient sweep between the explicit
//!   sub/supersolution pair g and g + Bφ;
//! * [`radial`] — the ODE reduction on balls with its 1-d cross-check;
//! * [`control`] — a Monte Carlo verifier that simulates the controlled
//!   diffusion and compares simulated costs with the computed V;
//! * [`expr`] — a small expression language for sources and policies;
//! * [`export`] — CSV/JSON writers with reproducible float formatting.
//!
//! Numerical outputs are deterministic: solves are sequential or
//! order-independent, and the Monte Carlo sampler derives one generator
//! stream per path from the seed, so reports are bit-stable for a fixed
//! seed regardless of thread count.

// Validation throughout uses `!(x > 0.0)` instead of `x <= 0.0` on purpose:
// the negated form also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod control;
pub mod error;
pub mod export;
pub mod expr;
pub mod grid;
pub mod iterate;
pub mod model;
pub mod poisson;
pub mod radial;

pub use control::{feedback_eval, policy_value_gap, simulate_cost, MCReport, Policy, Solved};
pub use error::{Error, Result};
pub use export::{to_json_string, write_json_file};
pub use expr::Expr;
pub use grid::{Field, Grid};
pub use iterate::{
    build_barriers, check_subsolution, check_supersolution, iterate, write_convergence_csv,
    Barriers, IterateOptions, IterationReport, StepStats,
};
pub use model::{
    conjugate_exponent, cost_constant, grid_for_domain, grid_matches_domain, hamiltonian_min,
    optimal_control, pde_residual, DomainSpec, Problem, SourceFn,
};
pub use poisson::{solve_poisson, solve_torsion, LinearSolveSettings, TorsionField};
pub use radial::{
    cross_check_1d, radial_torsion, reconstruct, solve_radial, write_profile_csv, RadialReport,
    RadialSolution,
};
