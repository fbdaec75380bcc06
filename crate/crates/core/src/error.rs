use thiserror::Error;

/// Failure modes of the models.
///
/// Errors carry `f64` diagnostics regardless of the working scalar so the
/// type stays non-generic.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid {name}: {reason}")]
    Domain { name: &'static str, reason: String },

    #[error("at/above threshold: sigma_n = {sigma_n}")]
    Threshold { sigma_n: f64 },

    #[error("degenerate cavity: total decay and pump detuning both vanish")]
    DegenerateCavity,

    #[error("singular transfer system (condition number {condition:e})")]
    Singular { condition: f64 },

    #[error("sensitivity pole: {0}")]
    Pole(String),

    #[error("integration diverged at t = {time:e} s")]
    Divergence { time: f64 },

    #[error("no steady state within t_max = {t_max:e} s (last relative rate {residual:e})")]
    NotConverged { t_max: f64, residual: f64 },
}

impl Error {
    pub(crate) fn domain(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
