use thiserror::Error;

/// Failures reported by the numerical routines and the command-line front end.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("parameter `{name}` = {value} is outside the admissible range {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("spectral grids do not match ({left} vs {right} modes)")]
    GridMismatch { left: usize, right: usize },

    #[error("Newton iteration did not converge after {iterations} steps (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("Newton iteration collapsed onto the trivial state")]
    TrivialCollapse,

    #[error("spectral gap {gap:.4} at sigma = {sigma} does not exceed the required margin {delta}")]
    GapViolation { sigma: f64, gap: f64, delta: f64 },

    #[error("the reduced band degenerates at |omega| = 1/2 (omega = {omega})")]
    DegenerateBand { omega: f64 },

    #[error("solution blew up at t = {time:.3} (perturbation norm {norm:.3e})")]
    BlowUp { time: f64, norm: f64 },

    #[error("time step {dt} fails the stability estimate ({bound:.3} > {limit})")]
    StepReject { dt: f64, bound: f64, limit: f64 },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures caused by the inputs rather than by the numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. }
                | Error::OutOfRange { .. }
                | Error::GridMismatch { .. }
                | Error::StepReject { .. }
                | Error::Io(_)
                | Error::Json(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn require_finite(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: format!("must be finite, got {value}"),
        })
    }
}
