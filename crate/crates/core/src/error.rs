use thiserror::Error;

/// Everything that can go wrong inside the solver stack.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unknown domain `{0}`")]
    UnknownDomain(alloc::string::String),
    #[error("unknown problem `{0}`")]
    UnknownProblem(alloc::string::String),
    #[error("element {0} out of range (mesh has {1} elements)")]
    ElementOutOfRange(usize, usize),
    #[error("degenerate element {0}: area {1:e}")]
    DegenerateElement(usize, f64),
    #[error("refinement closure did not terminate within {0} sweeps")]
    ClosureDiverged(usize),
    #[error("unsupported polynomial degree {0} (supported: 1..=4)")]
    UnsupportedDegree(usize),
    #[error("meshes are not related by one refinement step")]
    UnrelatedMeshes,
    #[error("point ({0}, {1}) is outside the mesh")]
    PointOutsideMesh(f64, f64),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("conjugate gradients did not converge: {iterations} iterations, relative residual {residual:e}")]
    SolverDiverged { iterations: usize, residual: f64 },
    #[error("matrix is not positive definite (pivot at unknown {0})")]
    NotPositiveDefinite(usize),
    #[error("parameter `{name}` = {value} outside admissible range: {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("right-hand side vanishes (M = 0); nothing to solve")]
    TrivialData,
    #[error("more than {0} consecutive energy-guard discards on level {1}")]
    TooManyDiscards(usize, usize),
    #[error("inner linearization loop exceeded {0} steps on level {1}")]
    InnerLoopCap(usize, usize),
    #[error("need at least {needed} data points, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("element {0} straddles the boundary of a characteristic-function subdomain")]
    Misaligned(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

pub type Result<T> = core::result::Result<T, Error>;
