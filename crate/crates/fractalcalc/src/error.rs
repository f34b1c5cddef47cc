use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Spec(String),
    #[error("malformed interval: lo {lo} > hi {hi}")]
    MalformedInterval { lo: f64, hi: f64 },
    #[error("x = {x} outside [{a}, {b}]")]
    OutOfDomain { x: f64, a: f64, b: f64 },
    #[error("alpha = {0} outside (0, 1]")]
    AlphaRange(f64),
    #[error("depth {depth} exceeds depth_max {max}")]
    DepthExceeded { depth: u32, max: u32 },
    #[error("delta = {delta} below resolution {resolution} at depth {depth}")]
    Resolution { delta: f64, resolution: f64, depth: u32 },
    #[error("dimension trend ambiguous on [{lo}, {hi}]")]
    DimensionAmbiguous { lo: f64, hi: f64 },
    #[error("difference quotients did not settle: last iterates {prev}, {last}")]
    NonDifferentiable { prev: f64, last: f64 },
    #[error("integrand not finite near coordinate {at}")]
    Integrand { at: f64 },
    #[error("leading coefficient must be nonzero")]
    DegenerateOrder,
    #[error("root finder did not converge")]
    RootFinding,
    #[error("basis is linearly dependent: |W({t})| = {det:e}")]
    DependentBasis { t: f64, det: f64 },
    #[error("invalid problem: {0}")]
    Problem(String),
    #[error("unknown demo '{0}'")]
    UnknownDemo(String),
    #[error("json: {0}")]
    Json(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

impl Error {
    /// Exit code for the CLI: 2 for input errors, 3 for numeric failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Resolution { .. }
            | Error::DimensionAmbiguous { .. }
            | Error::NonDifferentiable { .. }
            | Error::Integrand { .. }
            | Error::RootFinding
            | Error::DependentBasis { .. } => 3,
            _ => 2,
        }
    }
}
