use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("negative density at node ({i}, {j}): {value}")]
    NegativeDensity { i: usize, j: usize, value: f64 },

    #[error("not nearly incompressible at this resolution: residual {residual:e} exceeds {tol:e}")]
    NotNearlyIncompressible { residual: f64, tol: f64 },

    #[error(
        "potential not well-defined: continuity residual too large (discrepancy {discrepancy:e}, allowed {allowed:e})"
    )]
    PathInconsistent { discrepancy: f64, allowed: f64 },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("empty input")]
    Empty,

    #[error("restriction point must be a contact point")]
    NotContact,

    #[error("interior base point required")]
    BoundaryBase,

    #[error("outside domain: {0}")]
    Domain(String),

    #[error("no curve reaches the initial line at t = {0}")]
    EmptyDivision(f64),

    #[error("step-size underflow in characteristic integration")]
    StepUnderflow,

    #[error("invalid data: {0}")]
    Data(String),

    #[error("csv: {0}")]
    Csv(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
