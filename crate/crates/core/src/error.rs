use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A caller supplied a value outside the documented domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A feedback table was queried at a cell that no consistent simulation
    /// can reach (an included 0-literal inside a clause that evaluated to 1).
    #[error("contract violation: {0}")]
    ContractViolation(String),

    /// The chain has a zero leftward rate, so the stationary mass collapses
    /// onto an end state instead of spreading geometrically.
    #[error("degenerate chain: {0}")]
    DegenerateChain(String),

    /// A threshold ratio evaluated to 0/0.
    #[error("undefined threshold {name}: 0/0")]
    UndefinedThreshold { name: &'static str },

    #[error("failed to write output: {0}")]
    Output(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

pub(crate) fn check_probability(name: &str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must lie in [0, 1], got {value}")))
    }
}

pub(crate) fn check_granularity(s: f64) -> Result<()> {
    if s >= 1.0 && s.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("granularity s must be a finite real >= 1, got {s}")))
    }
}
