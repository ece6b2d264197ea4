use alloc::vec::Vec;

use super::{solve_subnetwork, FixedPointSolution};
use crate::error::{Error, Result};
use crate::linkops::RateSample;
use crate::topology::LargeScaleProfile;

/// Deterministic equivalents for every user. `per_user[m][k]` holds
/// `D`, `I_intra`, `I_inter`, the noise term `N0 / xi_m^2`, the SINR and the
/// rate.
#[derive(Debug, Clone, PartialEq)]
pub struct DeterministicRate {
    pub per_user: Vec<Vec<RateSample>>,
    /// `xi_bar_m`.
    pub xi: Vec<f64>,
}

impl DeterministicRate {
    pub fn subnetwork_mean(&self, m: usize) -> f64 {
        let u = &self.per_user[m];
        u.iter().map(|s| s.rate).sum::<f64>() / u.len() as f64
    }

    pub fn rates(&self, m: usize) -> Vec<f64> {
        self.per_user[m].iter().map(|s| s.rate).collect()
    }
}

/// Combines per-subnetwork fixed points into rate equivalents:
///
/// ```text
/// D_k       = (1 - alpha_m phi_k)^2
/// I_intra_k = alpha_m^2 (lambda_k - phi_k^2)
/// xi_m^2    = P / (N_m^-1 sum_j mu_hat_j)
/// I_inter_k = sum_{n != m} xi_n^2 / xi_m^2  N_n^-1 sum_j theta^{m,n}_kj mu_hat_{n,j}
/// R_k       = log2(1 + D_k / (N0 / xi_m^2 + I_intra_k + I_inter_k))
/// ```
pub fn det_equivalents(
    solutions: &[FixedPointSolution],
    profile: &LargeScaleProfile,
    tx_power: f64,
    noise_power: f64,
) -> Result<DeterministicRate> {
    let mm = profile.num_subnetworks();
    if solutions.len() != mm {
        return Err(Error::DimensionMismatch("one fixed point per subnetwork"));
    }
    for (m, s) in solutions.iter().enumerate() {
        if s.phi.len() != profile.users(m) || s.mu_hat.len() != profile.antennas(m) || s.lambda.len() != s.phi.len() {
            return Err(Error::DimensionMismatch("fixed point size vs profile"));
        }
    }

    let mut xi2 = Vec::with_capacity(mm);
    for (m, s) in solutions.iter().enumerate() {
        let mean_mu = s.mu_hat.iter().sum::<f64>() / s.mu_hat.len() as f64;
        if !(mean_mu > 0.0 && mean_mu.is_finite()) {
            return Err(Error::NonPositivePower { subnetwork: m });
        }
        xi2.push(tx_power / mean_mu);
    }

    let mut per_user = Vec::with_capacity(mm);
    let mut scratch = Vec::new();
    for (m, s) in solutions.iter().enumerate() {
        let a = s.alpha;
        let mut inter = alloc::vec![0.0; s.phi.len()];
        for (n, sn) in solutions.iter().enumerate().filter(|&(n, _)| n != m) {
            let theta = profile.theta(m, n);
            scratch.resize(theta.rows(), 0.0);
            theta.mul_vec_into(&sn.mu_hat, &mut scratch);
            let w = xi2[n] / xi2[m] / theta.cols() as f64;
            for (acc, &v) in inter.iter_mut().zip(&scratch) {
                *acc += w * v;
            }
        }
        let noise = noise_power / xi2[m];
        let users = s
            .phi
            .iter()
            .zip(&s.lambda)
            .zip(&inter)
            .map(|((&phi, &lambda), &inter)| {
                let d = 1.0 - a * phi;
                let intra = (a * a * (lambda - phi * phi)).max(0.0);
                RateSample::from_terms(d * d, intra, inter, noise)
            })
            .collect();
        per_user.push(users);
    }
    Ok(DeterministicRate {
        per_user,
        xi: xi2.into_iter().map(libm::sqrt).collect(),
    })
}

/// Solves every subnetwork in order and forms the equivalents.
pub fn sere_rate(
    profile: &LargeScaleProfile,
    alpha: &[f64],
    tx_power: f64,
    noise_power: f64,
    max_sweeps: usize,
) -> Result<(Vec<FixedPointSolution>, DeterministicRate)> {
    if alpha.len() != profile.num_subnetworks() {
        return Err(Error::DimensionMismatch("one alpha per subnetwork"));
    }
    let solutions = alpha
        .iter()
        .enumerate()
        .map(|(m, &a)| solve_subnetwork(profile.theta(m, m), a, max_sweeps))
        .collect::<Result<Vec<_>>>()?;
    let rate = det_equivalents(&solutions, profile, tx_power, noise_power)?;
    Ok((solutions, rate))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::RMatrix;

    fn profile(mm: usize) -> LargeScaleProfile {
        let mut blocks = Vec::new();
        for m in 0..mm {
            for n in 0..mm {
                blocks.push(RMatrix::from_fn(3 + m, 8 + n, |k, j| {
                    0.3 + 0.05 * ((k * 7 + j * 3 + m + n) % 5) as f64
                }));
            }
        }
        LargeScaleProfile::from_amplitudes(mm, blocks).unwrap()
    }

    #[test]
    fn zf_terms_are_exact() {
        let p = profile(2);
        let (_, r) = sere_rate(&p, &[0.0, 0.0], 1.0, 1e-3, 50).unwrap();
        for users in &r.per_user {
            for u in users {
                assert_eq!(u.desired, 1.0);
                assert_eq!(u.intra, 0.0);
            }
        }
    }

    #[test]
    fn single_subnetwork_has_no_inter() {
        let p = profile(1);
        let (_, r) = sere_rate(&p, &[0.1], 1.0, 1e-3, 50).unwrap();
        assert!(r.per_user[0].iter().all(|u| u.inter == 0.0));
    }

    #[test]
    fn zero_power_is_rejected() {
        let p = profile(1);
        let mut s = solve_subnetwork(p.theta(0, 0), 0.1, 50).unwrap();
        s.mu_hat.iter_mut().for_each(|m| *m = 0.0);
        assert_eq!(
            det_equivalents(&[s], &p, 1.0, 1e-3),
            Err(Error::NonPositivePower { subnetwork: 0 })
        );
    }
}
