use thiserror::Error;

use crate::poly::MultiPoly;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed graph: {0}")]
    MalformedGraph(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("not a subgraph: {0}")]
    NotASubgraph(String),
    #[error("enumeration exceeds the cap of {cap} items")]
    TooLarge { cap: usize },
    #[error("arity mismatch: {left} vs {right}")]
    ArityMismatch { left: usize, right: usize },
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("step budget exhausted after {steps} steps")]
    Timeout { steps: usize, partial: Vec<MultiPoly> },
    #[error("external momenta do not conserve: {0}")]
    MomentumNotConserved(String),
    #[error("bad external leg configuration: {0}")]
    BadLegConfiguration(String),
    #[error("reduced vertex matrix is singular at the evaluation point")]
    SingularAtPoint,
    #[error("odd spacetime dimension D = {0} is not supported by the case tables")]
    OddDimension(i64),
    #[error("decoration of dimension {dim} exceeds the cap {cap}")]
    DecorationDimension { dim: usize, cap: usize },
    #[error("truncation underflow: {0}")]
    TruncationUnderflow(String),
    #[error("could not generate a full-rank slice after {0} attempts")]
    CannotGenerate(usize),
    #[error("the Jacobian ideal is positive dimensional (non-isolated singularities)")]
    PositiveDimensional,
    #[error("point is not singular")]
    NotSingular,
    #[error("regime violation: {0}")]
    RegimeViolation(String),
    #[error("tolerance not reached: estimate {value} +- {error}")]
    ToleranceNotReached { value: f64, error: f64 },
    #[error("divergent configuration: {0}")]
    DivergentConfiguration(String),
    #[error("z = {z} outside the convergence domain Re z > {bound}")]
    ConvergenceDomain { z: f64, bound: f64 },
    #[error("asymptotic fit unstable: best residual {0}")]
    FitUnstable(f64),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("parse error: {0}")]
    Parse(String),
}
