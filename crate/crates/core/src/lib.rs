//! Downlink ergodic-rate estimation for clustered cell-free networks.
//!
//! Two estimators share one network model:
//!
//! - a Monte Carlo oracle ([`linkops`]) that draws small-scale fading, builds
//!   regularized zero-forcing precoders per subnetwork and measures the exact
//!   SINR of every user, and
//! - a deterministic-equivalent estimator ([`sere`]) that replaces the random
//!   resolvent diagonals by the solutions of element-wise fixed-point
//!   equations, evaluated in stabilized variables so that the same iteration
//!   covers both RZF (`alpha > 0`) and ZF (`alpha = 0`).
//!
//! The crate is `no_std` (it needs `alloc`). The `std` feature only switches
//! on runtime CPU feature detection in the matrix kernels; IO, timing and
//! parallel orchestration live in the companion `cfnet` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod channel;
pub mod config;
pub mod error;
pub mod linalg;
pub mod linkops;
pub mod rng;
pub mod sere;
pub mod topology;

pub use channel::{assemble_channel, draw_small_scale, ChannelRealization};
pub use config::{NetworkConfig, RegPolicy};
pub use error::{Error, Result};
pub use linalg::CMatrix;
pub use linkops::{PrecoderSet, RateSample, UserScope};
pub use sere::{DeterministicRate, FixedPointSolution};
pub use topology::{LargeScaleProfile, Point, Topology};

pub use num_complex::Complex64;
