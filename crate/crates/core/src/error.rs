use thiserror::Error;

/// Errors raised by the analytic model, the simulator and the sweep runner.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input violated a type invariant (`field` names the offending input).
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    /// A special function was evaluated outside its domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// The auction almost never succeeds; downstream divisions by p_T would overflow.
    #[error("success probability {p:e} is below 1e-300; the auction design is degenerate")]
    Underflow { p: f64 },

    /// An iterative kernel failed to converge.
    #[error("{routine} did not converge for s={s}, x={x}")]
    NoConvergence { routine: &'static str, s: f64, x: f64 },

    /// Unknown report format or similar configuration mistake.
    #[error("configuration error: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }

    /// True for errors that stem from numerics rather than bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::Domain(_) | Error::Underflow { .. } | Error::NoConvergence { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
