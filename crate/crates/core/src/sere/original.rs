//! The unstabilized iteration in `(phi, psi, lambda, mu)`.
//!
//! Here `psi ~ 1/alpha` and `mu ~ 1/alpha^2`, and the quantities the rate
//! needs are recovered as differences such as `psi - alpha mu`. For small
//! `alpha` this cancels catastrophically. Non-finite values are recorded in
//! the `stable` flag rather than returned as errors.

use alloc::vec;
use alloc::vec::Vec;

use super::{rel_change, Convergence, FixedPointSolution, EARLY_STOP};
use crate::error::{Error, Result};
use crate::linalg::RMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct OriginalSolution {
    pub alpha: f64,
    pub phi: Vec<f64>,
    pub psi: Vec<f64>,
    pub lambda: Vec<f64>,
    pub mu: Vec<f64>,
    pub phi_stage: Convergence,
    pub lambda_stage: Convergence,
    /// False if any iterate became non-finite or the recovered stabilized
    /// variables left their admissible range.
    pub stable: bool,
}

impl OriginalSolution {
    /// `psi_hat = -alpha psi`, `mu_hat = psi - alpha mu`.
    pub fn to_stabilized(&self) -> FixedPointSolution {
        let a = self.alpha;
        FixedPointSolution {
            alpha: a,
            phi: self.phi.clone(),
            psi_hat: self.psi.iter().map(|&p| -a * p).collect(),
            lambda: self.lambda.clone(),
            mu_hat: self.psi.iter().zip(&self.mu).map(|(&p, &m)| p - a * m).collect(),
            phi_stage: self.phi_stage,
            lambda_stage: self.lambda_stage,
        }
    }
}

/// Sweeps stop early on a residual below [`EARLY_STOP`], or once it turns NaN.
pub fn solve_original(theta: &RMatrix, alpha: f64, max_sweeps: usize) -> Result<OriginalSolution> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidConfig("the original iteration needs alpha > 0"));
    }
    let (k, n) = (theta.rows(), theta.cols());
    if k == 0 || n == 0 {
        return Err(Error::DimensionMismatch("empty variance profile"));
    }
    let inv_n = 1.0 / n as f64;
    let mut row = vec![0.0; k];
    let mut col = vec![0.0; n];
    let mut finite = true;

    let mut phi = vec![1.0; k];
    let mut psi = vec![0.0; n];
    let mut phi_stage = Convergence {
        sweeps: 0,
        residual: f64::INFINITY,
    };
    while phi_stage.sweeps < max_sweeps {
        let mut r = 0.0f64;
        theta.tr_mul_vec_into(&phi, &mut col);
        for (p, &s) in psi.iter_mut().zip(&col) {
            let next = 1.0 / (alpha * (1.0 + inv_n * s));
            r = r.max(rel_change(*p, next));
            *p = next;
        }
        theta.mul_vec_into(&psi, &mut row);
        for (p, &s) in phi.iter_mut().zip(&row) {
            let next = 1.0 / (alpha * (1.0 + inv_n * s));
            r = r.max(rel_change(*p, next));
            *p = next;
        }
        phi_stage.sweeps += 1;
        phi_stage.residual = r;
        finite &= phi.iter().chain(&psi).all(|x| x.is_finite());
        if !(r >= EARLY_STOP) {
            break;
        }
    }

    let mut lambda = vec![1.0; k];
    let mut mu = vec![0.0; n];
    let mut tmp_k = vec![0.0; k];
    let mut tmp_n = vec![0.0; n];
    let mut lambda_stage = Convergence {
        sweeps: 0,
        residual: f64::INFINITY,
    };
    while lambda_stage.sweeps < max_sweeps {
        let mut r = 0.0f64;
        for ((t, &p), &l) in tmp_k.iter_mut().zip(&phi).zip(&lambda) {
            *t = p - alpha * l;
        }
        theta.tr_mul_vec_into(&tmp_k, &mut col);
        for ((m, &s), &p) in mu.iter_mut().zip(&col).zip(&psi) {
            let next = p * p * (1.0 + inv_n * s);
            r = r.max(rel_change(*m, next));
            *m = next;
        }
        for ((t, &p), &m) in tmp_n.iter_mut().zip(&psi).zip(&mu) {
            *t = p - alpha * m;
        }
        theta.mul_vec_into(&tmp_n, &mut row);
        for ((l, &s), &p) in lambda.iter_mut().zip(&row).zip(&phi) {
            let next = p * p * (1.0 + inv_n * s);
            r = r.max(rel_change(*l, next));
            *l = next;
        }
        lambda_stage.sweeps += 1;
        lambda_stage.residual = r;
        finite &= lambda.iter().chain(&mu).all(|x| x.is_finite());
        if !(r >= EARLY_STOP) {
            break;
        }
    }

    let mut sol = OriginalSolution {
        alpha,
        phi,
        psi,
        lambda,
        mu,
        phi_stage,
        lambda_stage,
        stable: finite,
    };
    sol.stable = finite && sol.to_stabilized().in_range();
    Ok(sol)
}
