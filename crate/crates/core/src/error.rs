use thiserror::Error;

/// Errors produced by the solver library and the command-line front end.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of a function (momentum outside
    /// `[-b, b]`, physical momentum outside `[-a, a]`, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A configuration value is malformed or inconsistent.
    #[error("configuration error: {0}")]
    Config(String),

    /// A documented precondition of an operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The relative-momentum support is empty for the requested `p0`.
    #[error("empty momentum support for p0 = {p0}")]
    EmptySupport { p0: f64 },

    /// The spectral parameter sits on or below the minimum of `-G^2`, where
    /// the integrand has a non-integrable pole.
    #[error("spectral parameter s = {s} is at or below the threshold -Gmin2 = {threshold}")]
    Pole { s: f64, threshold: f64 },

    /// Adaptive quadrature or root finding failed to reach its tolerance.
    #[error("convergence failure: {0}")]
    Convergence(String),

    /// The quantization condition has no solution for this configuration.
    #[error("no bound state: {0}")]
    NoBoundState(String),

    /// Coulomb level `n = 0` with `delta = 0` has an empty quantization target.
    #[error("invalid Coulomb level n = {n} for delta = {delta}")]
    InvalidLevel { n: u32, delta: f64 },

    /// A wavefunction was requested for a state whose root residual is too large.
    #[error("state is not solved (residual {residual:e})")]
    UnsolvedState { residual: f64 },

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
