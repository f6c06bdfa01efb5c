use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("grid needs at least 3 interior nodes, got {0}")]
    GridTooCoarse(usize),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("positivity condition for {0} violated")]
    ConditionViolated(&'static str),
    #[error("x1 + alpha*x2 = {0} is too close to zero for the ratio-dependent Jacobian")]
    RatioSingular(f64),
    #[error("Newton iteration did not converge after {iters} iterations (residual {residual:e})")]
    NoConvergence { iters: usize, residual: f64 },
    #[error("Newton linear solve failed: singular Jacobian at iteration {0}")]
    SingularJacobian(usize),
    #[error("converged root leaves [0, 1] (min {min}, max {max}); not an admissible human distribution")]
    InadmissibleRoot { min: f64, max: f64, residual: f64 },
    #[error("hypothesis violated: {0}")]
    Hypothesis(&'static str),
    #[error("time step {dt} exceeds the stability limit {limit}")]
    InvalidDt { dt: f64, limit: f64 },
    #[error("solution blew up at t = {t}")]
    Blowup { t: f64 },
    #[error("density {value:e} became negative at t = {t}")]
    NegativeDensity { t: f64, value: f64 },
    #[error("decay rate delta = {0} is not positive; energy bound does not apply")]
    DecayHypothesisFailed(f64),
    #[error("malformed observation data: {0}")]
    MalformedData(&'static str),
    #[error("expected {expected} values, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("invalid input: {0}")]
    InvalidInput(&'static str),
}
