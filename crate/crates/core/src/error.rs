use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("denominator vanishes at n = {0}")]
    PoleAtPoint(i64),

    #[error("matrix is singular over the coefficient field")]
    SingularMatrix,

    #[error("no polynomial of degree <= {max_degree} fits the data")]
    NoPolynomialFit { max_degree: usize },

    #[error("no rational function with degrees <= ({max_num}, {max_den}) fits the data; stabilization may not be reached")]
    NoRationalFit { max_num: usize, max_den: usize },

    #[error("need at least {needed} points, got {got}")]
    InsufficientPoints { needed: usize, got: usize },

    #[error("n = {n} is below the minimum {min} for this family")]
    TooSmallN { n: i64, min: i64 },

    #[error("unknown family `{0}`")]
    UnknownFamily(String),

    #[error("invalid spec: {0}")]
    InvalidSpec(String),

    #[error("family is disconnected at n = {0}")]
    DisconnectedFamily(i64),

    #[error("hold probability must lie in [0, 1): {0}")]
    InvalidHold(String),

    #[error("walk is not reversible; detailed balance fails on {witness}")]
    NotReversible { witness: String },

    #[error("chain is periodic at n = {n} (period {period}); use a lazy walk")]
    PeriodicChain { n: i64, period: u64 },

    #[error("residual {residual:e} exceeds tolerance {tolerance:e}")]
    ToleranceExceeded { residual: f64, tolerance: f64 },

    #[error("spectrum has non-real eigenvalues (imaginary part {0:e})")]
    ComplexSpectrum(f64),

    #[error("invalid transition relation: {0}")]
    InvalidTransition(String),

    #[error("failed to parse expression `{0}`")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Stable snake-case name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::PoleAtPoint(_) => "pole_at_point",
            Error::SingularMatrix => "singular_matrix",
            Error::NoPolynomialFit { .. } => "no_polynomial_fit",
            Error::NoRationalFit { .. } => "no_rational_fit",
            Error::InsufficientPoints { .. } => "insufficient_points",
            Error::TooSmallN { .. } => "too_small_n",
            Error::UnknownFamily(_) => "unknown_family",
            Error::InvalidSpec(_) => "invalid_spec",
            Error::DisconnectedFamily(_) => "disconnected_family",
            Error::InvalidHold(_) => "invalid_hold",
            Error::NotReversible { .. } => "not_reversible",
            Error::PeriodicChain { .. } => "periodic_chain",
            Error::ToleranceExceeded { .. } => "tolerance_exceeded",
            Error::ComplexSpectrum(_) => "complex_spectrum",
            Error::InvalidTransition(_) => "invalid_transition",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }
}
