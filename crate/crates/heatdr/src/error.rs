use thiserror::Error;

/// Errors produced by group validation, evaluation and verification routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix J_{0} is not skew-symmetric")]
    NotSkew(usize),
    #[error("J matrices violate the anticommutation relation at pair ({0}, {1})")]
    NotCliffordAnticommuting(usize, usize),
    #[error("first-layer dimension mu = {0} must be even")]
    OddMu(usize),
    #[error("unknown group family `{0}`")]
    UnknownFamily(String),
    #[error("bad family parameter m = {0}, must be >= 1")]
    BadParameter(i64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("radial operation requested at a singular point (r too close to 0)")]
    SingularPoint,
    #[error("probe system ill-conditioned (estimated condition number {0:.3e})")]
    IllConditioned(f64),
    #[error("argument out of range: {0}")]
    OutOfRange(String),
    #[error("kernel formula called with the wrong parity of nu (nu = {0})")]
    WrongParity(usize),
    #[error("adaptive quadrature did not converge within {0} panels")]
    QuadratureNoConvergence(usize),
    #[error("expression has a genuine pole at r = {0}")]
    PoleAtPoint(f64),
    #[error("structural check failed: {0}")]
    StructuralViolation(String),
    #[error("verification region is empty")]
    RegionEmpty,
    #[error("not applicable: {0}")]
    NotApplicable(String),
}

pub type Result<T> = std::result::Result<T, Error>;
