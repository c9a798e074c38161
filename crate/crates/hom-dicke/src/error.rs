use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("coupling {lambda} is not above the critical value {critical}")]
    BelowCritical { lambda: f64, critical: f64 },
    #[error("steady state residual {0:e} too large")]
    NonStationaryInput(f64),
    #[error("lower polariton frequency is imaginary above the critical coupling")]
    ImaginaryBranch,
    #[error("linear solve near singular (condition estimate {0:e})")]
    NearSingular(f64),
    #[error("unstable branch (max eigenvalue real part {0:e})")]
    UnstableBranch(f64),
    #[error("quadrature failed: {0}")]
    QuadratureFailure(String),
    #[error("no stable branch at lambda = {0}")]
    BranchUnavailable(f64),
    #[error("delay grid is not uniform")]
    NonUniformGrid,
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
