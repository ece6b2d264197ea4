use alloc::vec;
use alloc::vec::Vec;

use super::{lambda_mu_in_range, phi_psi_in_range, rel_change, Convergence, FixedPointSolution, EARLY_STOP};
use crate::error::{Error, Result};
use crate::linalg::RMatrix;

/// Sweep-by-sweep solver for `(phi, psi_hat)` at `z = -alpha`:
///
/// ```text
/// psi_hat_j = -1 / (1 + N^-1 sum_i theta_ij phi_i)
/// 1/phi_i   = alpha - N^-1 sum_j theta_ij psi_hat_j
/// ```
///
/// `psi_hat` is refreshed from the current `phi` first, then `phi` from the
/// new `psi_hat`. Starts from `phi = 1`.
#[derive(Debug, Clone)]
pub struct PhiPsiIteration<'a> {
    theta: &'a RMatrix,
    alpha: f64,
    phi: Vec<f64>,
    psi_hat: Vec<f64>,
    scratch: Vec<f64>,
    sweeps: usize,
}

impl<'a> PhiPsiIteration<'a> {
    pub fn new(theta: &'a RMatrix, alpha: f64) -> Self {
        Self {
            theta,
            alpha,
            phi: vec![1.0; theta.rows()],
            psi_hat: vec![-1.0; theta.cols()],
            scratch: vec![0.0; theta.rows().max(theta.cols())],
            sweeps: 0,
        }
    }

    /// One sweep; returns the residual.
    pub fn sweep(&mut self) -> Result<f64> {
        self.sweeps += 1;
        let inv_n = 1.0 / self.theta.cols() as f64;
        let (k, n) = (self.theta.rows(), self.theta.cols());
        let mut residual = 0.0f64;

        let col = &mut self.scratch[..n];
        self.theta.tr_mul_vec_into(&self.phi, col);
        for (p, &s) in self.psi_hat.iter_mut().zip(col.iter()) {
            let next = -1.0 / (1.0 + inv_n * s);
            residual = residual.max((next - *p).abs());
            *p = next;
        }

        let row = &mut self.scratch[..k];
        self.theta.mul_vec_into(&self.psi_hat, row);
        for (p, &s) in self.phi.iter_mut().zip(row.iter()) {
            let next = 1.0 / (self.alpha - inv_n * s);
            residual = residual.max(rel_change(*p, next));
            *p = next;
        }

        if !residual.is_finite() || !phi_psi_in_range(&self.phi, &self.psi_hat) {
            return Err(Error::NonFinite { sweep: self.sweeps });
        }
        Ok(residual)
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn psi_hat(&self) -> &[f64] {
        &self.psi_hat
    }

    pub fn sweeps(&self) -> usize {
        self.sweeps
    }

    pub fn into_parts(self) -> (Vec<f64>, Vec<f64>) {
        (self.phi, self.psi_hat)
    }
}

/// Sweep-by-sweep solver for `(lambda, mu_hat)` given converged
/// `(phi, psi_hat)`:
///
/// ```text
/// mu_hat_j = psi_hat_j^2 N^-1 sum_i theta_ij lambda_i
/// lambda_i = phi_i^2 (1 + N^-1 sum_j theta_ij mu_hat_j)
/// ```
///
/// Starts from `lambda = 1`.
#[derive(Debug, Clone)]
pub struct LambdaMuIteration<'a> {
    theta: &'a RMatrix,
    phi: &'a [f64],
    psi_hat: &'a [f64],
    lambda: Vec<f64>,
    mu_hat: Vec<f64>,
    scratch: Vec<f64>,
    sweeps: usize,
}

impl<'a> LambdaMuIteration<'a> {
    pub fn new(theta: &'a RMatrix, phi: &'a [f64], psi_hat: &'a [f64]) -> Result<Self> {
        if phi.len() != theta.rows() || psi_hat.len() != theta.cols() {
            return Err(Error::DimensionMismatch("phi/psi_hat length vs theta"));
        }
        Ok(Self {
            theta,
            phi,
            psi_hat,
            lambda: vec![1.0; theta.rows()],
            mu_hat: vec![0.0; theta.cols()],
            scratch: vec![0.0; theta.rows().max(theta.cols())],
            sweeps: 0,
        })
    }

    pub fn sweep(&mut self) -> Result<f64> {
        self.sweeps += 1;
        let inv_n = 1.0 / self.theta.cols() as f64;
        let (k, n) = (self.theta.rows(), self.theta.cols());
        let mut residual = 0.0f64;

        let col = &mut self.scratch[..n];
        self.theta.tr_mul_vec_into(&self.lambda, col);
        for ((m, &s), &ph) in self.mu_hat.iter_mut().zip(col.iter()).zip(self.psi_hat) {
            let next = ph * ph * inv_n * s;
            residual = residual.max(rel_change(*m, next));
            *m = next;
        }

        let row = &mut self.scratch[..k];
        self.theta.mul_vec_into(&self.mu_hat, row);
        for ((l, &s), &p) in self.lambda.iter_mut().zip(row.iter()).zip(self.phi) {
            let next = p * p * (1.0 + inv_n * s);
            residual = residual.max(rel_change(*l, next));
            *l = next;
        }

        if !residual.is_finite() || !lambda_mu_in_range(self.phi, &self.lambda, &self.mu_hat) {
            return Err(Error::NonFinite { sweep: self.sweeps });
        }
        Ok(residual)
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn mu_hat(&self) -> &[f64] {
        &self.mu_hat
    }

    pub fn into_parts(self) -> (Vec<f64>, Vec<f64>) {
        (self.lambda, self.mu_hat)
    }
}

fn run(mut sweep: impl FnMut() -> Result<f64>, max_sweeps: usize) -> Result<Convergence> {
    let mut c = Convergence {
        sweeps: 0,
        residual: f64::INFINITY,
    };
    while c.sweeps < max_sweeps {
        c.residual = sweep()?;
        c.sweeps += 1;
        if c.residual < EARLY_STOP {
            break;
        }
    }
    Ok(c)
}

fn check_inputs(theta: &RMatrix, alpha: f64) -> Result<()> {
    if theta.rows() == 0 || theta.cols() == 0 {
        return Err(Error::DimensionMismatch("empty variance profile"));
    }
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidConfig("regularization must be finite and >= 0"));
    }
    if theta.as_slice().iter().any(|&t| !(t >= 0.0 && t.is_finite())) {
        return Err(Error::InvalidConfig("variance profile entries must be finite and >= 0"));
    }
    Ok(())
}

/// Runs [`PhiPsiIteration`] for up to `max_sweeps` sweeps.
pub fn solve_phi_psihat(theta: &RMatrix, alpha: f64, max_sweeps: usize) -> Result<(Vec<f64>, Vec<f64>, Convergence)> {
    check_inputs(theta, alpha)?;
    let mut it = PhiPsiIteration::new(theta, alpha);
    let c = run(|| it.sweep(), max_sweeps)?;
    let (phi, psi_hat) = it.into_parts();
    Ok((phi, psi_hat, c))
}

/// Runs [`LambdaMuIteration`] for up to `max_sweeps` sweeps.
pub fn solve_lambda_muhat(
    theta: &RMatrix,
    phi: &[f64],
    psi_hat: &[f64],
    max_sweeps: usize,
) -> Result<(Vec<f64>, Vec<f64>, Convergence)> {
    let mut it = LambdaMuIteration::new(theta, phi, psi_hat)?;
    let c = run(|| it.sweep(), max_sweeps)?;
    let (lambda, mu_hat) = it.into_parts();
    Ok((lambda, mu_hat, c))
}

/// Both stages for one subnetwork.
pub fn solve_subnetwork(theta: &RMatrix, alpha: f64, max_sweeps: usize) -> Result<FixedPointSolution> {
    let (phi, psi_hat, phi_stage) = solve_phi_psihat(theta, alpha, max_sweeps)?;
    let (lambda, mu_hat, lambda_stage) = solve_lambda_muhat(theta, &phi, &psi_hat, max_sweeps)?;
    Ok(FixedPointSolution {
        alpha,
        phi,
        psi_hat,
        lambda,
        mu_hat,
        phi_stage,
        lambda_stage,
    })
}
