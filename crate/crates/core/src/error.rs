use thiserror::Error;

/// Errors shared by every solver entry point.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("breakpoints must be strictly increasing and end at n (problem at constraint {index})")]
    NonMonotoneSigma { index: usize },
    #[error("bound order violated: {which}[{index}] lower {lower} > upper {upper}")]
    BoundOrderViolation {
        which: &'static str,
        index: usize,
        lower: f64,
        upper: f64,
    },
    #[error("instance is infeasible: prefix constraints {from} and {to} cannot both hold")]
    Infeasible { from: usize, to: usize },
    #[error("value {value} at variable {index} is not integral")]
    NotIntegral { index: usize, value: f64 },
    #[error("instance is malformed: {0}")]
    Malformed(String),
    #[error("objective undefined at x[{index}] = {x}")]
    DomainError { index: usize, x: f64 },
    #[error("subproblem over ranges {v}..={w} with L={left}, R={right} has no solution")]
    InfeasibleSubproblem {
        v: usize,
        w: usize,
        left: f64,
        right: f64,
    },
    #[error("objective is not convex at variable {index}")]
    NonConvexDetected { index: usize },
    #[error("scaled instance (s = {scale}) is infeasible; try a smaller epsilon")]
    ScaledInfeasible { scale: f64 },
    #[error("scale factor {scale} overflows 64-bit integer bounds")]
    ScaleOverflow { scale: f64 },
    #[error("instance too large for the brute-force oracle: {0}")]
    SizeLimitExceeded(String),
    #[error("negative bound in period {period}: demand cannot be met or inventory overflows")]
    NegativeBound { period: usize },
    #[error("time window at port {port} cannot be reached")]
    WindowInfeasible { port: usize },
    #[error("operation not supported: {0}")]
    Unsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal invariant failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
