use thiserror::Error;

/// Errors raised by the matrix layer, the geometries and the solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite matrix")]
    NonFiniteMatrix,
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("spectrum outside domain")]
    SpectrumOutsideDomain,
    #[error("not positive definite")]
    NotPositiveDefinite,
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),
    #[error("tangent vectors live at different base points")]
    BaseMismatch,
    #[error("non-finite cost at iteration {iteration}")]
    NonFiniteCost { iteration: usize },
    #[error("direction is not a descent direction (slope {slope})")]
    NotDescentDirection { slope: f64 },
    #[error("line search stalled after {backtracks} backtracks")]
    LinesearchStalled { backtracks: usize },
    #[error("Frank-Wolfe requires feasible start")]
    InfeasibleStart,
    #[error("degenerate box")]
    DegenerateBox,
    #[error("grid conjugate intractable (dimension {0})")]
    GridIntractable(usize),
    #[error("empty grid")]
    EmptyGrid,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
