//! Element-wise deterministic equivalents of the downlink rate.
//!
//! For each subnetwork the diagonals of the resolvent `Q^m(z)` and of its
//! square `S^m(z)` are replaced by the solutions `phi`, `lambda` of coupled
//! fixed-point equations over the variance profile `theta^{m,m}`, evaluated
//! at `z = -alpha_m`. The co-resolvent variables are carried in the
//! stabilized form
//!
//! ```text
//! psi_hat = z psi          in [-1, 0)
//! mu_hat  = psi + z mu     >= 0
//! ```
//!
//! which stays bounded as `alpha -> 0` and makes ZF (`alpha = 0`) a regular
//! case of the same iteration. [`original`] keeps the unstabilized
//! iteration for comparison.

mod equivalents;
pub mod original;
mod stabilized;

pub use equivalents::{det_equivalents, sere_rate, DeterministicRate};
pub use original::{solve_original, OriginalSolution};
pub use stabilized::{solve_lambda_muhat, solve_phi_psihat, solve_subnetwork, LambdaMuIteration, PhiPsiIteration};

use alloc::vec::Vec;

/// Sweeps stop early once the largest update falls below this.
pub const EARLY_STOP: f64 = 1e-12;

/// How a fixed-point stage ended.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Convergence {
    pub sweeps: usize,
    /// Largest update of the last sweep, relative to the magnitude of the
    /// entry (`psi_hat` is dimensionless and compared absolutely).
    pub residual: f64,
}

/// Stabilized fixed point of one subnetwork at `z = -alpha`.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointSolution {
    pub alpha: f64,
    /// Approximates `[Q(z)]_ii`, length `K_m`.
    pub phi: Vec<f64>,
    /// `z psi_j`, length `N_m`.
    pub psi_hat: Vec<f64>,
    /// Approximates `[S(z)]_ii`.
    pub lambda: Vec<f64>,
    /// `psi_j + z mu_j`.
    pub mu_hat: Vec<f64>,
    pub phi_stage: Convergence,
    pub lambda_stage: Convergence,
}

impl FixedPointSolution {
    pub fn iterations_run(&self) -> usize {
        self.phi_stage.sweeps + self.lambda_stage.sweeps
    }

    pub fn residual(&self) -> f64 {
        self.phi_stage.residual.max(self.lambda_stage.residual)
    }

    /// `phi > 0`, `-1 <= psi_hat < 0`, `lambda >= phi^2`, `mu_hat >= 0`,
    /// everything finite. `lambda >= phi^2` is checked with a relative slack
    /// of a few ulps.
    pub fn in_range(&self) -> bool {
        phi_psi_in_range(&self.phi, &self.psi_hat) && lambda_mu_in_range(&self.phi, &self.lambda, &self.mu_hat)
    }
}

pub(crate) fn phi_psi_in_range(phi: &[f64], psi_hat: &[f64]) -> bool {
    phi.iter().all(|&p| p.is_finite() && p > 0.0) && psi_hat.iter().all(|&p| p.is_finite() && (-1.0..0.0).contains(&p))
}

pub(crate) fn lambda_mu_in_range(phi: &[f64], lambda: &[f64], mu_hat: &[f64]) -> bool {
    lambda
        .iter()
        .zip(phi)
        .all(|(&l, &p)| l.is_finite() && l >= p * p * (1.0 - 4.0 * f64::EPSILON))
        && mu_hat.iter().all(|&m| m.is_finite() && m >= 0.0)
}

/// `|a - b| / max(|a|, |b|)`, zero when equal.
#[inline]
pub(crate) fn rel_change(old: f64, new: f64) -> f64 {
    if old == new {
        0.0
    } else {
        (new - old).abs() / old.abs().max(new.abs())
    }
}
