use thiserror::Error;

/// Invariant violations reported by [`crate::domain::validate_config`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ValidationError {
    #[error("coupling constant nu0 must be positive (got {0})")]
    CouplingNotPositive(f64),
    #[error("background amplitude omega0 must be positive (got {0})")]
    BackgroundNotPositive(f64),
    #[error("decay constant must be positive (got {0})")]
    DecayNotPositive(f64),
    #[error("cut-off time t1 must satisfy 0 < t1 <= t_revive (got t1={t1}, t_revive={t_revive})")]
    BadCutoff { t1: f64, t_revive: f64 },
    #[error("soliton amplitude zero: Im(lambda) must be nonzero")]
    SolitonAmplitudeZero,
    #[error("lambda coincides with the detuning")]
    LambdaEqualsDetuning,
    #[error("Bessel index gamma = {re}{im:+}i is an integer; J_gamma and J_-gamma are dependent")]
    IntegerBesselIndex { re: f64, im: f64 },
    #[error("parameter {0} is not finite")]
    NotFinite(&'static str),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error("domain error: {0}")]
    Domain(&'static str),
    #[error("series for J_nu did not converge within {terms} terms")]
    Accuracy { terms: usize },
    #[error("degenerate parameters: {0}")]
    Degenerate(&'static str),
    #[error("spectral function w has a pole at tau = {tau}")]
    Pole { tau: f64 },
    #[error("step-size guard violated at tau = {tau}: h*|Omega| = {product:.3} >= 0.5")]
    StepSize { tau: f64, product: f64 },
    #[error("non-finite value at zeta = {zeta}, tau = {tau}")]
    Divergence { zeta: f64, tau: f64 },
    #[error("grid of {nodes} nodes exceeds the cap of {cap}")]
    Resource { nodes: usize, cap: usize },
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("config line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
