use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("port {port} out of range for vertex {vertex} of degree {degree}")]
    PortOutOfRange {
        vertex: usize,
        port: usize,
        degree: usize,
    },

    #[error("declared volume {declared} does not match the degree sum {actual}")]
    VolumeMismatch { declared: u64, actual: u64 },

    #[error("vertex set is empty")]
    EmptySet,

    #[error("vertex set has zero volume")]
    ZeroVolume,

    #[error("graph has no edges")]
    EmptyGraph,

    #[error("{query} queries are not available in the {mode} model")]
    ForbiddenQuery {
        query: &'static str,
        mode: &'static str,
    },

    #[error("vertex {vertex} has degree {degree} above the bound {bound}")]
    DegreeBoundExceeded {
        vertex: usize,
        degree: usize,
        bound: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("inner graph on {size} vertices has eta_2 = {eta2:.6}, above the allowed {limit:.6}")]
    InnerGapTooSmall { size: usize, eta2: f64, limit: f64 },

    #[error("{what} exceeds the limit of {limit}")]
    CapExceeded { what: &'static str, limit: usize },

    #[error("matrix is not symmetric: |M[{row}][{col}] - M[{col}][{row}]| = {gap:e}")]
    NotSymmetric { row: usize, col: usize, gap: f64 },

    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal norm {off:e})")]
    NoConvergence { sweeps: usize, off: f64 },

    #[error("identity check failed: {0}")]
    IdentityViolation(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// True for errors caused by the caller's input rather than by a bug.
    pub fn is_input_error(&self) -> bool {
        !matches!(
            self,
            Error::Invariant(_) | Error::IdentityViolation(_) | Error::NoConvergence { .. }
        )
    }
}
