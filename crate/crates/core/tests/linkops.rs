mod common;

use cfnet_core::linkops::{empirical_resolvent_diag, mc_ergodic_rate, regularization, McSetup};
use cfnet_core::topology::sample_network;
use cfnet_core::{ChannelRealization, Complex64, NetworkConfig, UserScope};
use common::{adjoint, cn, from_lib, inverse, mul, Dense};

fn rzf_reference(g: &Dense, alpha: f64) -> Dense {
    let n = g[0].len() as f64;
    let mut a = mul(g, &adjoint(g));
    for (i, row) in a.iter_mut().enumerate() {
        row[i] += n * alpha;
    }
    mul(&adjoint(g), &inverse(&a))
}

/// Receiver-side simulation: synthesize data symbols and noise, then measure
/// the energy of the desired component and of everything else.
#[test]
fn matches_signal_level_simulation() {
    let cfg = NetworkConfig {
        num_subnetworks: 2,
        total_users: 8,
        antenna_ratio: 2.0,
        ..NetworkConfig::default()
    };
    let net = sample_network(&cfg, 0).unwrap();
    let profile = &net.profile;
    let alpha = regularization(profile, cfg.reg_policy, cfg.tx_power, cfg.noise_power);
    let draws = 200;
    let setup = McSetup {
        profile,
        alpha: &alpha,
        tx_power: cfg.tx_power,
        noise_power: cfg.noise_power,
        seed: cfg.seed,
        network: 0,
        scope: UserScope::All,
    };
    let mc = mc_ergodic_rate(&setup, draws).unwrap();

    let symbols = 400;
    let mut r = common::rng(2024);
    let mut oracle = vec![vec![0.0; 0]; 2];
    for m in 0..2 {
        oracle[m] = vec![0.0; profile.users(m)];
    }
    for d in 0..draws as u64 {
        let ch = ChannelRealization::keyed(profile, cfg.seed, 0, d, |_, _| true);
        let mut w = Vec::new();
        for n in 0..2 {
            let f = rzf_reference(&from_lib(ch.own(n)), alpha[n]);
            let tr: f64 = f.iter().flatten().map(|z| z.norm_sqr()).sum();
            let xi = (cfg.tx_power / tr).sqrt();
            w.push(
                f.into_iter()
                    .map(|row| row.into_iter().map(|z| z * xi).collect::<Vec<_>>())
                    .collect::<Dense>(),
            );
        }
        for m in 0..2 {
            for k in 0..profile.users(m) {
                let mut e_signal = 0.0;
                let mut e_rest = 0.0;
                for _ in 0..symbols {
                    let mut y = Complex64::new(0.0, 0.0);
                    let mut desired = Complex64::new(0.0, 0.0);
                    for n in 0..2 {
                        let g = from_lib(ch.block(m, n));
                        let s: Vec<Complex64> = (0..profile.users(n)).map(|_| cn(&mut r)).collect();
                        for (j, gj) in g[k].iter().enumerate() {
                            let x: Complex64 = w[n][j].iter().zip(&s).map(|(a, b)| a * b).sum();
                            y += gj * x;
                            if n == m {
                                desired += gj * w[n][j][k] * s[k];
                            }
                        }
                    }
                    y += cn(&mut r) * cfg.noise_power.sqrt();
                    e_signal += desired.norm_sqr();
                    e_rest += (y - desired).norm_sqr();
                }
                oracle[m][k] += (1.0 + e_signal / e_rest).log2() / draws as f64;
            }
        }
    }
    for m in 0..2 {
        let a = oracle[m].iter().sum::<f64>() / oracle[m].len() as f64;
        let b = mc.subnetwork_mean(m);
        assert!(
            (a - b).abs() <= 0.02 * b,
            "subnetwork {m}: signal-level {a} vs formula {b}"
        );
    }
}

#[test]
fn block_inversion_identity() {
    let mut r = common::rng(11);
    for &(k, n, z) in &[(6usize, 15usize, -0.3f64), (10, 12, -1e-2), (4, 30, -2.0)] {
        let theta = common::uniform_profile(k, n, 1.0, &mut r);
        let g = common::channel_from_profile(&theta, &mut r);
        let q = empirical_resolvent_diag(&g, z).unwrap().q;
        let dense = from_lib(&g);
        let g1 = &dense[0];
        let rest: Dense = dense[1..].to_vec();
        let nn = n as f64;
        let mut t = mul(&adjoint(&rest), &rest);
        for (i, row) in t.iter_mut().enumerate() {
            for x in row.iter_mut() {
                *x /= nn;
            }
            row[i] -= z;
        }
        let t = inverse(&t);
        let mut quad = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                quad += g1[i] * t[i][j] * g1[j].conj();
            }
        }
        let inv_q11 = -z - z / nn * quad.re;
        assert!(
            (1.0 / q[0] - inv_q11).abs() <= 1e-8 * inv_q11.abs(),
            "{} vs {inv_q11}",
            1.0 / q[0]
        );
    }
}

#[test]
fn rzf_matches_reference_inverse() {
    let mut r = common::rng(3);
    let theta = common::uniform_profile(7, 20, 1.0, &mut r);
    let g = common::channel_from_profile(&theta, &mut r);
    for alpha in [0.0, 1e-3, 0.5] {
        let f = cfnet_core::linkops::rzf_matrix(&g, alpha).unwrap();
        let reference = rzf_reference(&from_lib(&g), alpha);
        for (row, rrow) in from_lib(&f).iter().zip(&reference) {
            for (a, b) in row.iter().zip(rrow) {
                assert!((a - b).norm() < 1e-10);
            }
        }
    }
}

#[test]
fn monte_carlo_is_reproducible() {
    let cfg = NetworkConfig {
        num_subnetworks: 3,
        total_users: 30,
        ..NetworkConfig::default()
    };
    let net = sample_network(&cfg, 1).unwrap();
    let alpha = regularization(&net.profile, cfg.reg_policy, 1.0, cfg.noise_power);
    let setup = McSetup {
        profile: &net.profile,
        alpha: &alpha,
        tx_power: 1.0,
        noise_power: cfg.noise_power,
        seed: 4,
        network: 1,
        scope: UserScope::Subnetwork(net.topology.central_index),
    };
    let a = mc_ergodic_rate(&setup, 5).unwrap();
    let b = mc_ergodic_rate(&setup, 5).unwrap();
    assert_eq!(a, b);
    let other = McSetup { seed: 5, ..setup };
    assert_ne!(mc_ergodic_rate(&other, 5).unwrap(), a);
}
