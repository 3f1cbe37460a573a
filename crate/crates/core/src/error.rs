use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    /// The unit-time flow leaves the core interval before time 1.
    #[error("flow escapes the core interval after time {escape_time}")]
    Escape { escape_time: f64 },

    #[error("integration interval [{from}, {to}] contains a zero of the field")]
    SingularIntegral { from: f64, to: f64 },

    #[error("construction violates invariant: {0}")]
    Construction(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("iteration budget of {budget} exceeded ({context})")]
    Budget { budget: u64, context: String },

    /// Orbit leaves the region where the requested derivative formula is exact.
    #[error("orbit leaves the pure-flow piece: {0}")]
    Scope(String),

    /// Point lies in the basin of the attracting fixed point and never escapes above.
    #[error("point {y} is in the basin of the attracting fixed point")]
    Basin { y: f64 },

    #[error("identity distance {value:e} below 1e-9; map too close to identity off I")]
    DegenerateGap { value: f64 },

    #[error("no sigma-tilde satisfies both conditions: {0}")]
    Geometry(String),

    #[error("point has no preimage inside the rectangle")]
    NoPreimageInR,

    #[error("no certified jacobian outside the strips")]
    NoCertifiedJacobian,

    #[error("operation requires mu = 0, got {0}")]
    WrongParameter(f64),

    #[error("certificate failure: {0}")]
    CertificateFailure(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("config parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
