use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("function is not monotone (worst violation {0:.3e})")]
    NotMonotone(f64),
    #[error("transform support [{0}, {1}] does not match axis domain [{2}, {3}]")]
    SupportMismatch(f64, f64, f64, f64),
    #[error("symmetrization needs equal dims, got {0:?}")]
    DimsUnequal(Vec<usize>),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("point is infeasible (violation {0:.3e})")]
    InfeasiblePoint(f64),
    #[error("marginals are not rationalizable")]
    NotRationalizable,
    #[error("no convergence after {iterations} sweeps (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("not of the required form at index {0}")]
    NotOfForm(usize),
    #[error("structure violation: {0}")]
    StructureViolation(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("conditional slice {0} has zero mass")]
    DegenerateConditional(usize),
    #[error("fractional region is not a rectangle")]
    NotRectangle,
    #[error("not a markup-pooling mechanism: {0}")]
    NotMarkupPooling(String),
    #[error("mechanism is not deterministic")]
    NotDeterministic,
    #[error("theorem violation: {0}")]
    TheoremViolation(String),
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
