use thiserror::Error;

/// Every failure the library can report.
///
/// Variants carry enough context to be turned into a structured record by
/// the command-line front end; [`Error::code`] gives a stable identifier.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("segments do not tile [0, {b}]: {detail}")]
    GapOrOverlap { b: f64, detail: String },
    #[error("profile is discontinuous at x = {x}: left {left}, right {right}")]
    DiscontinuousJunction { x: f64, left: f64, right: f64 },
    #[error("profile is not positive at x = {x} (rho = {value})")]
    NonPositive { x: f64, value: f64 },
    #[error("invalid parameters: {0}")]
    BadParams(String),

    #[error("integrator could not meet tolerance near x = {x} (k = {k})")]
    StepFailure { x: f64, k: String },
    #[error("solution samples are taken at different points ({0} vs {1})")]
    MismatchedPoint(f64, f64),

    #[error("contour passes through (or too close to) a zero near {0}")]
    ContourThroughZero(String),
    #[error("winding number estimate {0} is not an integer; refine the quadrature")]
    NonIntegerWinding(f64),

    #[error("adaptive quadrature failed on [{lo}, {hi}]")]
    QuadratureFailure { lo: f64, hi: f64 },
    #[error("zero-energy Jost solution is not positive at y = {y} (value {value})")]
    NonPositiveJost { y: f64, value: f64 },

    #[error("sample grid too short: need |Re k| <= K/10 = {limit}, got {k}")]
    GridTooShort { k: f64, limit: f64 },
    #[error("jump data is not odd: max |G(k)+G(-k)| = {0}")]
    AsymmetricJump(f64),
    #[error("sample grid is not uniform and symmetric: {0}")]
    BadGrid(String),
    #[error("asymptotic fit is degenerate: {0}")]
    FitDegenerate(String),

    #[error("f(0;k) vanishes at real k = {0}")]
    ZeroDenominator(f64),
    #[error("i*Res(S, i{beta}) = {value} is not positive real")]
    ResidueNotPositiveReal { beta: f64, value: String },
    #[error("Marchenko kernel does not vanish beyond 2a: |M({xi})| = {value}")]
    SupportLeak { xi: f64, value: f64 },
    #[error("Marchenko system at y = {y} is singular (condition estimate {cond:e})")]
    SingularSystem { y: f64, cond: f64 },

    #[error("regime a > b is not supported: reconstruction for a > b is an open problem (fitted b - a = {0})")]
    Unsupported(f64),
    #[error("regime classification is inconclusive (envelope decay exponent {0}); widen the grid")]
    Ambiguous(f64),
    #[error("gamma is zero: the data describe the trivial medium rho = 1, for which D(k) vanishes identically")]
    GammaZero,
    #[error("Q(0) = {0} gives a non-positive f(0;0); data inconsistent with a positive profile")]
    QZeroOutOfRange(f64),
    #[error("identity check failed: {0}")]
    IdentityMismatch(String),

    #[error("io error on {path}: {message}")]
    Io { path: String, message: String },
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::GapOrOverlap { .. } => "GapOrOverlap",
            Error::DiscontinuousJunction { .. } => "DiscontinuousJunction",
            Error::NonPositive { .. } => "NonPositive",
            Error::BadParams(_) => "BadParams",
            Error::StepFailure { .. } => "StepFailure",
            Error::MismatchedPoint(..) => "MismatchedPoint",
            Error::ContourThroughZero(_) => "ContourThroughZero",
            Error::NonIntegerWinding(_) => "NonIntegerWinding",
            Error::QuadratureFailure { .. } => "QuadratureFailure",
            Error::NonPositiveJost { .. } => "NonPositiveJost",
            Error::GridTooShort { .. } => "GridTooShort",
            Error::AsymmetricJump(_) => "AsymmetricJump",
            Error::BadGrid(_) => "BadGrid",
            Error::FitDegenerate(_) => "FitDegenerate",
            Error::ZeroDenominator(_) => "ZeroDenominator",
            Error::ResidueNotPositiveReal { .. } => "ResidueNotPositiveReal",
            Error::SupportLeak { .. } => "SupportLeak",
            Error::SingularSystem { .. } => "SingularSystem",
            Error::Unsupported(_) => "Unsupported",
            Error::Ambiguous(_) => "Ambiguous",
            Error::GammaZero => "GammaZero",
            Error::QZeroOutOfRange(_) => "QZeroOutOfRange",
            Error::IdentityMismatch(_) => "IdentityMismatch",
            Error::Io { .. } => "Io",
            Error::Parse(_) => "Parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
