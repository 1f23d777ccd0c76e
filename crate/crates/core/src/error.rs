use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("division by a ball that contains zero")]
    DivisionByZero,

    #[error("point outside the domain: {0}")]
    Domain(String),

    #[error("truncation plan too short: need at least {needed} terms, got {got}")]
    PlanTooShort { needed: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{0} and {1} are not coprime")]
    NotCoprime(String, String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A proven identity failed to verify. Never expected; surfaces loudly.
    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("contour too close to a zero near {near}: segment length {length:e} reached the refinement limit")]
    ContourTooClose { near: Complex64, length: f64 },

    #[error("Newton iteration failed ({reason}); last iterate {last}")]
    NewtonFailed { last: Complex64, reason: String },

    #[error("not certified: contour floor {floor:e} does not exceed bound {bound:e}")]
    NotCertified { floor: f64, bound: f64 },

    #[error("Taylor bound invalid: Im w0 = {t0} must exceed 2e*rho = {limit}")]
    BoundInvalid { t0: f64, limit: f64 },

    #[error("degenerate certificate request: {0}")]
    Degenerate(String),
}
