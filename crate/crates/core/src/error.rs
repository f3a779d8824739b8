use thiserror::Error;

use crate::jumps::JumpLabel;

pub type Result<T> = std::result::Result<T, JcError>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum JcError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error(
        "Bohr frequency of the manifold {upper} -> {lower} channel is not positive: \
         omega0 = {omega0} must exceed (sqrt({upper}) + sqrt({lower}))*Omega = {bound}"
    )]
    NonPositiveBohrFrequency {
        upper: usize,
        lower: usize,
        omega0: f64,
        bound: f64,
    },

    #[error("jump label {label} lies outside the truncation n_max = {n_max}")]
    LabelOutsideTruncation { label: JumpLabel, n_max: usize },

    #[error("Lamb shift at omega = {omega} is divergent: {reason}")]
    DivergentLambShift { omega: f64, reason: String },

    #[error(
        "principal-value quadrature at omega = {omega} did not converge: \
         error estimate {residual:e} exceeds tolerance {tolerance:e}"
    )]
    QuadratureNonConvergence {
        omega: f64,
        residual: f64,
        tolerance: f64,
    },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("time step {dt} exceeds the stability limit {limit}")]
    StepTooLarge { dt: f64, limit: f64 },

    #[error("non-finite state encountered; last valid time {last_valid_time}")]
    NonFinite { last_valid_time: f64 },

    #[error("trace drifted by {deviation:e} at t = {time}; last valid time {last_valid_time}")]
    TraceDrift {
        time: f64,
        deviation: f64,
        last_valid_time: f64,
    },

    #[error("unknown observable `{0}`")]
    UnknownObservable(String),

    #[error(
        "fit did not converge: {reason} (initial frequency {initial_frequency}, \
         initial decay {initial_decay})"
    )]
    FitFailed {
        reason: String,
        initial_frequency: f64,
        initial_decay: f64,
    },
}
