use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A point or parameter lies outside the set where an operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Integer cone order with a curvature pair that violates the parity rule
    /// (c1 = c2 for even order, c1 = -c2 for odd order).
    #[error(
        "incompatible curvatures for integer alpha = {alpha}: parity constraint requires {required} \
         (got c1 = {c1}, c2 = {c2})"
    )]
    IncompatibleCurvatures {
        alpha: f64,
        c1: f64,
        c2: f64,
        required: &'static str,
    },

    #[error("inversion identity is only defined for center z0 = 0 (got z0 = ({s0}, {t0}))")]
    CenterNotAtOrigin { s0: f64, t0: f64 },

    /// Adaptive quadrature exhausted its subdivision budget.
    #[error(
        "quadrature did not converge after {subdivisions} subdivisions \
         (estimate {estimate:e}, error {error:e}, monotone growth: {monotone_growth})"
    )]
    NonConvergence {
        estimate: f64,
        error: f64,
        subdivisions: usize,
        monotone_growth: bool,
    },

    /// Newton or Gauss-Newton iteration budget exhausted or damping floor hit.
    #[error("iteration did not converge: {0}")]
    NoConvergence(String),

    #[error("linearized operator is numerically singular: {0}")]
    IllPosed(String),

    #[error("samples are not explained by the family: rms residual {rms:e} exceeds {threshold:e}")]
    NotInFamily { rms: f64, threshold: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
