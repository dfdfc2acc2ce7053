use thiserror::Error;

/// Crate-wide error type. Variants map to the failure classes the CLI
/// translates into exit codes: configuration problems are user-fixable,
/// solver/structural failures are runtime diagnostics.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid problem setup or parameters (bad alpha, negative h sample,
    /// wrong domain kind for a solver, malformed config value).
    #[error("config: {0}")]
    Config(String),

    /// Expression syntax error. `offset` is a byte offset into the source.
    #[error("parse error at byte {offset}: {msg}")]
    Parse { offset: usize, msg: String },

    /// Expression evaluation error (log of non-positive, division by zero,
    /// negative base with fractional exponent, overflow).
    #[error("eval: {0}")]
    Eval(String),

    /// Mismatched grids or a grid that does not discretize the domain.
    #[error("shape: {0}")]
    Shape(String),

    /// Linear solver failed to reach the residual tolerance.
    #[error("linear solver: residual {residual:.3e} after {iters} iterations (tol {tol:.3e})")]
    Solver {
        residual: f64,
        iters: usize,
        tol: f64,
    },

    /// A discrete invariant that the scheme guarantees was violated;
    /// indicates a discretization or solver bug, not bad user input.
    #[error("structural: {0}")]
    Structural(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
