use alloc::string::String;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("gamma function pole at x = {0}")]
    GammaPole(f64),
    #[error("{what}: no convergence within {terms} terms")]
    NonConvergence { what: &'static str, terms: usize },
    #[error("quadrature missed tolerance {tolerance:e} (error estimate {estimate:e})")]
    Quadrature { tolerance: f64, estimate: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("degenerate mesh: cell {cell} has width {width:e}")]
    DegenerateMesh { cell: usize, width: f64 },
    #[error("diffusion coefficient is not uniformly elliptic: D({x}) = {value}")]
    NonElliptic { x: f64, value: f64 },
    #[error("matrix is singular or not positive definite")]
    Singular,
    #[error("eigenvalue iteration did not converge")]
    EigenIteration,
    #[error("eigenbasis is ill-conditioned (condition estimate {0:e}); use the quadrature oracle path")]
    IllConditioned(f64),
    #[error("eigenpair {index} residual {residual:e} exceeds {bound:e}")]
    EigenResidual { index: usize, residual: f64, bound: f64 },
    #[error("operation requires a self-adjoint operator with real spectrum")]
    NotSelfAdjoint,
    #[error("operator is not coercive: eigenvalue with real part {0:e}")]
    NotCoercive(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("propagator cache has no entry for t = {0}")]
    CacheMiss(f64),
    #[error("non-finite state at step {step}")]
    BlowUp { step: usize },
    #[error("coarsening factor {factor} does not divide {intervals} intervals")]
    Coarsen { factor: usize, intervals: usize },
    #[error("linear reference requires F = B = G = 0")]
    NotLinear,
    #[error("mesh mismatch: {0}")]
    MeshMismatch(String),
    #[error("time grid mismatch: {0}")]
    GridMismatch(String),
    #[error("empty input: {0}")]
    Empty(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
