use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),

    #[error("invalid path-loss thresholds: need 0 < d0 < d1, got d0={d0}, d1={d1}")]
    InvalidThresholds { d0: f64, d1: f64 },

    /// A subnetwork ended up without a BS or without a user (or, for ZF,
    /// without more antennas than users). The caller resamples the network.
    #[error("degenerate clustering: subnetwork {subnetwork} is not usable")]
    Degenerate { subnetwork: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(&'static str),

    #[error("singular Gram matrix (condition estimate {condition:e})")]
    Singular { condition: f64 },

    #[error("precoder has zero power")]
    ZeroPrecoder,

    #[error("non-finite value in fixed-point iteration at sweep {sweep}")]
    NonFinite { sweep: usize },

    #[error("non-positive transmit-power normalization in subnetwork {subnetwork}")]
    NonPositivePower { subnetwork: usize },
}
