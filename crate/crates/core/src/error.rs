use alloc::string::String;

use crate::channels::Channel;

/// Errors raised by the scattering core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("oscillator order {n} exceeds the configured maximum {max}")]
    OrderOutOfRange { n: u32, max: u32 },

    #[error("non-finite value for `{0}`")]
    NonFinite(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("Jacobi-matrix eigen-decomposition did not converge (order {order})")]
    QuadratureNoConvergence { order: usize },

    #[error("energy {energy} lies on the threshold of channel {channel}")]
    ThresholdDegenerate { channel: Channel, energy: f64 },

    #[error(
        "cannot reach a_perp/a_s = {target}: achievable interval on the one-bound-state branch is ({min}, {max})"
    )]
    CalibrationFailed { target: f64, min: f64, max: f64 },

    #[error(
        "log-derivative propagation unstable: half-step disagreement {defect:.3e} at h = {step:.3e}; \
         retry with h <= {suggested:.3e}"
    )]
    StepInstability { defect: f64, step: f64, suggested: f64 },

    #[error("asymptotic matching system is singular at z = {z_max} (after {attempts} shifts)")]
    SingularMatching { z_max: f64, attempts: u32 },

    #[error("(iI - K) is numerically singular: S-matrix pole")]
    SMatrixPole,

    #[error("entrance channel {0} is closed at this energy")]
    ClosedEntrance(Channel),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("band eigensolver failed: {0}")]
    Eigen(String),

    #[error("at a_perp/a_s = {ratio}, E = {energy}: {source}")]
    AtPoint {
        ratio: f64,
        energy: f64,
        source: alloc::boxed::Box<Error>,
    },
}

impl Error {
    /// Attaches the sweep-point identity to an error.
    pub fn at_point(self, ratio: f64, energy: f64) -> Self {
        match self {
            e @ Error::AtPoint { .. } => e,
            e => Error::AtPoint {
                ratio,
                energy,
                source: alloc::boxed::Box::new(e),
            },
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;
