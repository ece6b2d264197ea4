//! The four figure-family sweeps.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use cfnet_core::topology::sample_network;
use cfnet_core::{NetworkConfig, RegPolicy, UserScope};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{HarnessError, Result};
use crate::estimate;
use crate::report;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    /// Rate against `K` (fig2).
    RateVsK,
    /// Relative error and wall time against `K` (fig3).
    ErrorAndTiming,
    /// Stabilized against original iteration over the SNR (fig4).
    SvtVsSnr,
    /// ZF accuracy (fig5).
    ZfError,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 4] = [
        ExperimentKind::RateVsK,
        ExperimentKind::ErrorAndTiming,
        ExperimentKind::SvtVsSnr,
        ExperimentKind::ZfError,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::RateVsK => "rate_vs_k",
            ExperimentKind::ErrorAndTiming => "error_and_timing",
            ExperimentKind::SvtVsSnr => "svt_vs_snr",
            ExperimentKind::ZfError => "zf_error",
        }
    }

    pub fn figure(&self) -> &'static str {
        match self {
            ExperimentKind::RateVsK => "fig2",
            ExperimentKind::ErrorAndTiming => "fig3",
            ExperimentKind::SvtVsSnr => "fig4",
            ExperimentKind::ZfError => "fig5",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentKind {
    type Err = HarnessError;

    /// Accepts either the figure name or the kind name.
    fn from_str(s: &str) -> Result<Self> {
        ExperimentKind::ALL
            .into_iter()
            .find(|k| k.figure() == s || k.as_str() == s)
            .ok_or_else(|| HarnessError::InvalidSpec(format!("unknown experiment {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    /// Scenario fields not swept (area, powers, thresholds, draws...).
    pub base: NetworkConfig,
    pub k_list: Vec<usize>,
    pub beta_list: Vec<f64>,
    pub m_list: Vec<usize>,
    /// Only used by [`ExperimentKind::SvtVsSnr`].
    pub rho_db_list: Vec<f64>,
    pub realizations: usize,
    pub mc_draws: usize,
    pub seed: u64,
    pub record_timing: bool,
}

/// One point of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub k: usize,
    pub beta: f64,
    pub m: usize,
    pub rho_db: Option<f64>,
}

impl ExperimentSpec {
    /// Fills lists missing from `config` with the desk-scale defaults of `kind`.
    pub fn from_config(kind: ExperimentKind, config: &RunConfig) -> Self {
        let s = &config.sweep;
        let (k, beta, rho): (Vec<usize>, Vec<f64>, Vec<f64>) = match kind {
            ExperimentKind::RateVsK | ExperimentKind::ErrorAndTiming => {
                (vec![128, 256, 512], vec![2.0, 4.0, 8.0], Vec::new())
            }
            ExperimentKind::SvtVsSnr => (vec![256], vec![4.0], vec![0.0, 10.0, 20.0, 30.0, 40.0]),
            ExperimentKind::ZfError => (vec![128, 256], vec![2.0, 4.0, 8.0], Vec::new()),
        };
        Self {
            kind,
            base: config.network.clone(),
            k_list: s.k_list.clone().unwrap_or(k),
            beta_list: s.beta_list.clone().unwrap_or(beta),
            m_list: s.m_list.clone().unwrap_or_else(|| vec![config.network.num_subnetworks]),
            rho_db_list: s.rho_db_list.clone().unwrap_or(rho),
            realizations: config.network.network_realizations,
            mc_draws: config.network.mc_realizations,
            seed: config.network.seed,
            record_timing: s.record_timing.unwrap_or(true),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(HarnessError::InvalidSpec(format!("{}: {msg}", self.kind)));
        if self.k_list.is_empty() || self.beta_list.is_empty() || self.m_list.is_empty() {
            return bad("k_list, beta_list and m_list must be non-empty");
        }
        if self.kind == ExperimentKind::SvtVsSnr && self.rho_db_list.is_empty() {
            return bad("rho_db_list must be non-empty");
        }
        if self.rho_db_list.iter().any(|r| !r.is_finite()) {
            return bad("rho_db_list entries must be finite");
        }
        if self.kind == ExperimentKind::ZfError && self.beta_list.iter().any(|&b| !(b > 1.0)) {
            return bad("ZF needs every beta > 1");
        }
        if self.realizations == 0 || self.mc_draws == 0 {
            return bad("network_realizations and mc_realizations must be positive");
        }
        for p in self.points() {
            self.scenario(&p).validate()?;
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<SweepPoint> {
        let rho: Vec<Option<f64>> = match self.kind {
            ExperimentKind::SvtVsSnr => self.rho_db_list.iter().map(|&r| Some(r)).collect(),
            _ => vec![None],
        };
        let mut out = Vec::new();
        for &m in &self.m_list {
            for &beta in &self.beta_list {
                for &k in &self.k_list {
                    for &rho_db in &rho {
                        out.push(SweepPoint { k, beta, m, rho_db });
                    }
                }
            }
        }
        out
    }

    pub fn policy(&self, point: &SweepPoint) -> RegPolicy {
        match (self.kind, point.rho_db) {
            (ExperimentKind::ZfError, _) => RegPolicy::Zf,
            (ExperimentKind::SvtVsSnr, Some(r)) => RegPolicy::Snr(r),
            _ => self.base.reg_policy,
        }
    }

    pub fn scenario(&self, point: &SweepPoint) -> NetworkConfig {
        NetworkConfig {
            total_users: point.k,
            antenna_ratio: point.beta,
            num_subnetworks: point.m,
            reg_policy: self.policy(point),
            seed: self.seed,
            mc_realizations: self.mc_draws,
            network_realizations: self.realizations,
            ..self.base.clone()
        }
    }
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub kind: ExperimentKind,
    #[serde(rename = "K")]
    pub k: usize,
    pub beta: f64,
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "rho_dB")]
    pub rho_db: Option<f64>,
    pub precoder: String,
    pub solver: String,
    pub mean_rate: f64,
    pub rel_error: Option<f64>,
    pub time_s: Option<f64>,
    pub unstable_flag: u8,
    pub seed: u64,
}

/// Central-subnetwork results of one network realization.
#[derive(Debug, Clone)]
struct NetworkResult {
    mc: f64,
    mc_time: f64,
    svt: f64,
    svt_time: f64,
    original: Option<(f64, bool, f64)>,
}

fn evaluate_network(config: &NetworkConfig, index: u64, with_original: bool) -> Result<NetworkResult> {
    let network = sample_network(config, index)?;
    if network.resamples > 0 {
        log::info!("network {index}: {} topology draws rejected", network.resamples);
    }
    let c = network.topology.central_index;
    let mc = estimate::monte_carlo(
        config,
        &network,
        index,
        UserScope::Subnetwork(c),
        config.mc_realizations,
    )?;
    let svt = estimate::sere(config, &network)?;
    let original = if with_original {
        let o = estimate::sere_original(config, &network)?;
        let rate = o.value.rate.as_ref().map_or(f64::NAN, |r| r.subnetwork_mean(c));
        Some((rate, o.value.stable && rate.is_finite(), o.seconds))
    } else {
        None
    };
    Ok(NetworkResult {
        mc: mc.value.subnetwork_mean(c),
        mc_time: mc.seconds,
        svt: svt.value.1.subnetwork_mean(c),
        svt_time: svt.seconds,
        original,
    })
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    sum / n as f64
}

/// Rows for one sweep point: MC, SVT and, for the SNR sweep, the original
/// iteration.
pub fn run_point(spec: &ExperimentSpec, point: &SweepPoint) -> Result<Vec<ResultRow>> {
    let config = spec.scenario(point);
    let with_original = spec.kind == ExperimentKind::SvtVsSnr;
    let results = (0..spec.realizations as u64)
        .into_par_iter()
        .map(|i| evaluate_network(&config, i, with_original))
        .collect::<Result<Vec<_>, _>>()?;

    let precoder = if config.reg_policy.is_zf() { "zf" } else { "rzf" };
    let time = |t: f64| spec.record_timing.then_some(t);
    let row = |solver: &str, rate: f64, rel: Option<f64>, t: f64, unstable: bool| ResultRow {
        kind: spec.kind,
        k: point.k,
        beta: point.beta,
        m: point.m,
        rho_db: point.rho_db,
        precoder: precoder.to_string(),
        solver: solver.to_string(),
        mean_rate: rate,
        rel_error: rel,
        time_s: time(t),
        unstable_flag: unstable as u8,
        seed: spec.seed,
    };

    let mc = mean(results.iter().map(|r| r.mc));
    let svt = mean(results.iter().map(|r| r.svt));
    let rel = |x: f64| (x - mc).abs() / mc;
    let mut rows = vec![
        row("mc", mc, None, results.iter().map(|r| r.mc_time).sum(), false),
        row(
            "svt",
            svt,
            Some(rel(svt)),
            results.iter().map(|r| r.svt_time).sum(),
            !svt.is_finite(),
        ),
    ];
    if with_original {
        let orig = results.iter().map(|r| r.original.expect("requested"));
        let rate = mean(orig.clone().map(|o| o.0));
        let stable = orig.clone().all(|o| o.1);
        let t = orig.map(|o| o.2).sum();
        rows.push(row("original", rate, Some(rel(rate)), t, !stable || !rate.is_finite()));
    }
    Ok(rows)
}

/// Runs every sweep point in order. When `out_dir` is given the CSV and SVG
/// charts are written there as `<figure>.csv` and `<figure>*.svg`.
pub fn run_experiment(spec: &ExperimentSpec, out_dir: Option<&Path>) -> Result<Vec<ResultRow>> {
    spec.validate()?;
    let mut rows = Vec::new();
    for point in spec.points() {
        log::info!(
            "{}: K={} beta={} M={} rho={:?}",
            spec.kind,
            point.k,
            point.beta,
            point.m,
            point.rho_db
        );
        rows.extend(run_point(spec, &point)?);
    }
    if let Some(dir) = out_dir {
        report::write_outputs(spec.kind, &rows, dir)?;
    }
    Ok(rows)
}
