//! Property checks on one scenario: network realization 0 and its first
//! fading draw.

use cfnet_core::linalg::{matmul, CMatrix};
use cfnet_core::linkops::{compute_sinr, compute_sinr_normalized, regularization, subnetwork_sinrs};
use cfnet_core::sere::{det_equivalents, solve_original, solve_subnetwork, LambdaMuIteration, PhiPsiIteration};
use cfnet_core::topology::sample_network;
use cfnet_core::{ChannelRealization, NetworkConfig, PrecoderSet};
use serde::Serialize;

use crate::error::Result;

/// Sweeps used where a fully converged fixed point is needed.
const CONVERGED_SWEEPS: usize = 5000;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    /// Advisory checks are reported but do not fail the suite.
    pub advisory: bool,
    pub detail: String,
}

impl Check {
    pub fn failed(&self) -> bool {
        !self.passed && !self.advisory
    }
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check {
        name,
        passed,
        advisory: false,
        detail,
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn max_rel(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(&x, &y)| rel(x, y)).fold(0.0, f64::max)
}

fn max_abs(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(&x, &y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn run_validation(config: &NetworkConfig) -> Result<Vec<Check>> {
    let network = sample_network(config, 0)?;
    let profile = &network.profile;
    let topo = &network.topology;
    let mm = profile.num_subnetworks();
    let alpha = regularization(profile, config.reg_policy, config.tx_power, config.noise_power);
    let mut checks = Vec::new();

    let mut bs_seen = vec![0usize; topo.bs_positions.len()];
    let mut users_seen = vec![0usize; topo.user_positions.len()];
    for s in &topo.subnetworks {
        s.bs.iter().for_each(|&b| bs_seen[b] += 1);
        s.users.iter().for_each(|&u| users_seen[u] += 1);
    }
    checks.push(check(
        "partition",
        bs_seen.iter().chain(&users_seen).all(|&c| c == 1) && topo.central_index < mm,
        format!(
            "{} BSs, {} users in {mm} subnetworks, central {}",
            bs_seen.len(),
            users_seen.len(),
            topo.central_index
        ),
    ));

    // Ranges after every sweep; the sweep itself errors on a violation.
    let mut range_ok = true;
    let mut worst_residual: f64 = 0.0;
    let mut detail = String::new();
    for (m, &a) in alpha.iter().enumerate() {
        let theta = profile.theta(m, m);
        let mut pp = PhiPsiIteration::new(theta, a);
        let mut res = f64::INFINITY;
        for _ in 0..config.fp_iterations {
            match pp.sweep() {
                Ok(r) => res = r,
                Err(e) => {
                    range_ok = false;
                    detail = format!("subnetwork {m}: {e}");
                    break;
                }
            }
        }
        if !range_ok {
            break;
        }
        let (phi, psi_hat) = (pp.phi().to_vec(), pp.psi_hat().to_vec());
        let mut lm = LambdaMuIteration::new(theta, &phi, &psi_hat)?;
        let mut lm_res = f64::INFINITY;
        for _ in 0..config.fp_iterations {
            match lm.sweep() {
                Ok(r) => lm_res = r,
                Err(e) => {
                    range_ok = false;
                    detail = format!("subnetwork {m}: {e}");
                    break;
                }
            }
        }
        worst_residual = worst_residual.max(res).max(lm_res);
    }
    checks.push(check("fixed_point_ranges", range_ok, detail));
    // Convergence is linear and slows down for small, strongly
    // heterogeneous subnetworks, so the bound is not guaranteed at Tmax.
    checks.push(Check {
        advisory: true,
        ..check(
            "fixed_point_residual",
            range_ok && worst_residual < 1e-10,
            format!(
                "largest update after {} sweeps: {worst_residual:.3e}",
                config.fp_iterations
            ),
        )
    });

    // Moderate regularization on the profile's own scale.
    let mut worst_identity: f64 = 0.0;
    let mut worst_derivative: f64 = 0.0;
    for m in 0..mm {
        let theta = profile.theta(m, m);
        let a = 0.1 * theta.as_slice().iter().sum::<f64>() / theta.as_slice().len() as f64;
        let svt = solve_subnetwork(theta, a, CONVERGED_SWEEPS)?;
        let orig = solve_original(theta, a, CONVERGED_SWEEPS)?.to_stabilized();
        worst_identity = worst_identity
            .max(max_rel(&orig.phi, &svt.phi))
            .max(max_abs(&orig.psi_hat, &svt.psi_hat))
            .max(max_rel(&orig.lambda, &svt.lambda))
            .max(max_rel(&orig.mu_hat, &svt.mu_hat));

        // lambda = d phi / dz with z = -alpha
        let h = 1e-6 * a;
        let lo = solve_subnetwork(theta, a + h, CONVERGED_SWEEPS)?;
        let hi = solve_subnetwork(theta, a - h, CONVERGED_SWEEPS)?;
        for (i, &l) in svt.lambda.iter().enumerate() {
            let fd = (hi.phi[i] - lo.phi[i]) / (2.0 * h);
            worst_derivative = worst_derivative.max(rel(fd, l));
        }
    }
    checks.push(check(
        "svt_original_identity",
        worst_identity <= 1e-8,
        format!("max deviation {worst_identity:.3e}"),
    ));
    checks.push(check(
        "lambda_is_phi_derivative",
        worst_derivative <= 1e-4,
        format!("max relative deviation {worst_derivative:.3e}"),
    ));

    let channel = ChannelRealization::keyed(profile, config.seed, 0, 0, |_, _| true);
    let precoders = PrecoderSet::build(&channel, &alpha, config.tx_power)?;
    let mut herm: f64 = 0.0;
    let mut power: f64 = 0.0;
    let mut zf: f64 = 0.0;
    for (m, &a) in alpha.iter().enumerate() {
        let gf = matmul(channel.own(m), &precoders.f[m]);
        herm = herm.max(gf.hermitian_defect());
        power = power.max(rel(precoders.w(m).frobenius_sq(), config.tx_power));
        if a == 0.0 {
            zf = zf.max(gf.max_abs_diff(&CMatrix::identity(gf.rows())));
        }
    }
    checks.push(check("hermitian_gf", herm <= 1e-10, format!("max defect {herm:.3e}")));
    checks.push(check(
        "power_constraint",
        power <= 1e-8,
        format!("max relative deviation {power:.3e}"),
    ));
    if config.reg_policy.is_zf() {
        checks.push(check("zf_identity", zf <= 1e-8, format!("max |GF - I| {zf:.3e}")));
    }

    let mut decomposition_ok = true;
    let mut forms: f64 = 0.0;
    for m in 0..mm {
        let batch = subnetwork_sinrs(m, &channel, &precoders, config.noise_power)?;
        for (k, s) in batch.iter().enumerate() {
            let terms = [s.desired, s.intra, s.inter, s.noise];
            decomposition_ok &=
                terms.iter().all(|t| t.is_finite() && *t >= 0.0) && s.sinr == s.desired / (s.noise + s.intra + s.inter);
            let single = compute_sinr(m, k, &channel, &precoders, config.noise_power)?;
            let normalized = compute_sinr_normalized(m, k, &channel, &precoders, config.noise_power)?;
            forms = forms.max(rel(single.sinr, s.sinr)).max(rel(normalized, s.sinr));
        }
    }
    checks.push(check("sinr_decomposition", decomposition_ok, String::new()));
    checks.push(check(
        "sinr_forms_agree",
        forms <= 1e-10,
        format!("max relative deviation {forms:.3e}"),
    ));

    let solutions = alpha
        .iter()
        .enumerate()
        .map(|(m, &a)| solve_subnetwork(profile.theta(m, m), a, config.fp_iterations))
        .collect::<cfnet_core::Result<Vec<_>>>();
    let sere_ok = match solutions.and_then(|s| det_equivalents(&s, profile, config.tx_power, config.noise_power)) {
        Ok(r) => r.per_user.iter().flatten().all(|s| s.rate.is_finite() && s.rate >= 0.0),
        Err(_) => false,
    };
    checks.push(check("sere_finite", sere_ok, String::new()));
    Ok(checks)
}
