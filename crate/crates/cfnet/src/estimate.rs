//! Per-network estimators with wall-clock timing.

use std::time::Instant;

use cfnet_core::linkops::{average_draws, mc_draw, regularization, McRates, McSetup};
use cfnet_core::sere::{det_equivalents, solve_original, solve_subnetwork, FixedPointSolution};
use cfnet_core::topology::Network;
use cfnet_core::{DeterministicRate, NetworkConfig, UserScope};
use rayon::prelude::*;

use crate::error::Result;

#[derive(Debug, Clone)]
pub struct Timed<T> {
    pub value: T,
    pub seconds: f64,
}

pub fn timed<T>(f: impl FnOnce() -> T) -> Timed<T> {
    let start = Instant::now();
    let value = f();
    Timed {
        value,
        seconds: start.elapsed().as_secs_f64(),
    }
}

pub fn alphas(config: &NetworkConfig, network: &Network) -> Vec<f64> {
    regularization(&network.profile, config.reg_policy, config.tx_power, config.noise_power)
}

/// Monte Carlo rates over `draws` fading draws, evaluated concurrently and
/// averaged in draw order.
pub fn monte_carlo(
    config: &NetworkConfig,
    network: &Network,
    index: u64,
    scope: UserScope,
    draws: usize,
) -> Result<Timed<McRates>> {
    let alpha = alphas(config, network);
    let setup = McSetup {
        profile: &network.profile,
        alpha: &alpha,
        tx_power: config.tx_power,
        noise_power: config.noise_power,
        seed: config.seed,
        network: index,
        scope,
    };
    let run = timed(|| -> Result<McRates> {
        let outcomes = (0..draws as u64)
            .into_par_iter()
            .map(|d| mc_draw(&setup, d))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(average_draws(network.profile.num_subnetworks(), outcomes))
    });
    let rates = run.value?;
    if rates.resampled > 0 {
        log::warn!("network {index}: {} singular fading draws resampled", rates.resampled);
    }
    Ok(Timed {
        value: rates,
        seconds: run.seconds,
    })
}

/// SERE fixed points and rate equivalents, subnetworks solved concurrently.
pub fn sere(config: &NetworkConfig, network: &Network) -> Result<Timed<(Vec<FixedPointSolution>, DeterministicRate)>> {
    let alpha = alphas(config, network);
    let profile = &network.profile;
    let run = timed(|| -> Result<_> {
        let solutions = alpha
            .par_iter()
            .enumerate()
            .map(|(m, &a)| solve_subnetwork(profile.theta(m, m), a, config.fp_iterations))
            .collect::<Result<Vec<_>, _>>()?;
        let rate = det_equivalents(&solutions, profile, config.tx_power, config.noise_power)?;
        Ok((solutions, rate))
    });
    Ok(Timed {
        value: run.value?,
        seconds: run.seconds,
    })
}

/// Rate equivalents through the unstabilized iteration.
#[derive(Debug, Clone)]
pub struct OriginalOutcome {
    /// `None` when the iterates could not be turned into a rate.
    pub rate: Option<DeterministicRate>,
    pub stable: bool,
}

pub fn sere_original(config: &NetworkConfig, network: &Network) -> Result<Timed<OriginalOutcome>> {
    let alpha = alphas(config, network);
    let profile = &network.profile;
    let run = timed(|| -> Result<OriginalOutcome> {
        let solutions = alpha
            .par_iter()
            .enumerate()
            .map(|(m, &a)| solve_original(profile.theta(m, m), a, config.fp_iterations))
            .collect::<Result<Vec<_>, _>>()?;
        let stable = solutions.iter().all(|s| s.stable);
        let stabilized: Vec<_> = solutions.iter().map(|s| s.to_stabilized()).collect();
        let rate = det_equivalents(&stabilized, profile, config.tx_power, config.noise_power).ok();
        Ok(OriginalOutcome { rate, stable })
    });
    Ok(Timed {
        value: run.value?,
        seconds: run.seconds,
    })
}
