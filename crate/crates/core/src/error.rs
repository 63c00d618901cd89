use thiserror::Error;

/// Errors produced by the rate model, the matching solver and the scenario
/// runner.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("quadrature did not converge after {subdivisions} subdivisions (estimate {estimate:e}, error {error:e})")]
    Convergence {
        estimate: f64,
        error: f64,
        subdivisions: usize,
    },

    #[error("invalid bracket [{lo:e}, {hi:e}]: residuals {f_lo:e} and {f_hi:e} do not straddle zero")]
    Bracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("iteration limit of {0} reached")]
    IterationLimit(usize),

    #[error("numerical consistency violated: {0}")]
    Numerical(String),

    #[error("no feasible matching network: {reason}")]
    Infeasible { reason: String, scan: Vec<(f64, f64)> },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
