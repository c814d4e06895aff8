use thiserror::Error;

/// Errors raised by the solvers, verifiers and configuration layer.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature failed: {0}")]
    Quadrature(String),

    #[error("inversion failed: {0}")]
    Inversion(String),

    #[error("ODE singularity at theta={theta:e}, action={action:e}: {reason}")]
    Singularity {
        theta: f64,
        action: f64,
        reason: String,
    },

    #[error("no default seed for this environment: {0}")]
    Seeding(String),

    #[error("incentive compatibility violated: type {theta:e} gains {gain:e} by mimicking {mimic:e}")]
    IcViolation {
        theta: f64,
        mimic: f64,
        gain: f64,
    },

    #[error("ratio condition violated: {reason}")]
    RatioCondition {
        reason: String,
        /// Set when the cost collapses to a single isoelastic term; carries that term's waste.
        isoelastic_waste: Option<f64>,
    },

    #[error("root finding failed: {0}")]
    Root(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
