use thiserror::Error;

use crate::Mu;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid exponent base: {0}")]
    InvalidMu(String),
    #[error("point with |z| = {r} lies outside the open unit disk")]
    OutsideDisk { r: f64 },
    #[error("angle {theta} lies on the branch cut (theta must be in (-pi, pi))")]
    OnSlit { theta: f64 },
    #[error("exponent bases differ: {left} vs {right}")]
    MuMismatch { left: Mu, right: Mu },
    #[error("invalid series: {0}")]
    InvalidSeries(String),
    #[error("invalid class parameters: {0}")]
    InvalidParams(String),
    #[error("operator domain violation: {0}")]
    Domain(String),
    #[error("denominator vanishes at r = {r}, theta = {theta}")]
    Pole { r: f64, theta: f64 },
    #[error("Mobius inversion blows up at r = {r}, theta = {theta}")]
    MobiusBlowUp { r: f64, theta: f64 },
    #[error("minimum of the functional is not monotone in r near r = {r}")]
    NonMonotonic { r: f64 },
    #[error("series is not a certified member (eta_1 = {eta1})")]
    NotMember { eta1: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Stable snake_case name for machine-readable diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidMu(_) => "invalid_mu",
            Error::OutsideDisk { .. } => "outside_disk",
            Error::OnSlit { .. } => "on_slit",
            Error::MuMismatch { .. } => "mu_mismatch",
            Error::InvalidSeries(_) => "invalid_series",
            Error::InvalidParams(_) => "invalid_params",
            Error::Domain(_) => "domain",
            Error::Pole { .. } => "pole",
            Error::MobiusBlowUp { .. } => "mobius_blow_up",
            Error::NonMonotonic { .. } => "non_monotonic",
            Error::NotMember { .. } => "not_member",
            Error::InvalidGrid(_) => "invalid_grid",
            Error::InvalidArgument(_) => "invalid_argument",
        }
    }

    /// Failures of the numerical checks themselves, as opposed to bad input.
    pub fn is_violation(&self) -> bool {
        matches!(
            self,
            Error::Pole { .. } | Error::MobiusBlowUp { .. } | Error::NonMonotonic { .. } | Error::NotMember { .. }
        )
    }
}
