use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("length mismatch: {alphas} angle ratios but {prevertices} prevertices")]
    LengthMismatch { alphas: usize, prevertices: usize },
    #[error("angle ratio alpha[{index}] = {value} lies outside (0, 1)")]
    AngleOutOfRange { index: usize, value: f64 },
    #[error("angle sum {sum} differs from n - 2 = {expected}")]
    AngleSum { sum: f64, expected: f64 },
    #[error("prevertices are not strictly increasing at index {0}")]
    NonMonotonePrevertices(usize),
    #[error("normalized polygon requires a1 = 0 and a2 = 1")]
    Normalization,
    #[error("non-finite input: {0}")]
    NonFinite(&'static str),
    #[error("scale constant d1 must be nonzero")]
    ZeroScale,
    #[error("evaluation point lies within {tol:e} of pole {index}")]
    NearPole { index: usize, tol: f64 },
    #[error("expansion has double or cross terms; a log-derivative was expected")]
    NotLogDerivative,
    #[error("parameter t = {0} outside (0, 1]")]
    ParameterRange(f64),
    #[error("point {0} lies outside the closed upper half-plane")]
    OutsideDomain(String),
    #[error("quadrature failed: {0}")]
    Quadrature(String),
    #[error("step size underflow near z = {0}")]
    StepUnderflow(String),
    #[error("Wronskian drift {0:e} exceeds the abort threshold")]
    WronskianDrift(f64),
    #[error("path passes within {distance:e} of a singularity (minimum {required:e})")]
    PathNearSingularity { distance: f64, required: f64 },
    #[error("too few samples: got {got}, need at least {need}")]
    TooFewSamples { got: usize, need: usize },
    #[error("leading coefficient {0} deviates from 1")]
    NotNormalized(f64),
    #[error("group ball exceeds the element cap {0}")]
    BallTooLarge(usize),
    #[error("determinant {0} is not 1")]
    Determinant(f64),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("format error: {0}")]
    Format(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}

impl From<toml::de::Error> for Error {
    fn from(e: toml::de::Error) -> Self {
        Error::Format(e.to_string())
    }
}
