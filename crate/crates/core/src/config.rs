//! Scenario parameters.

use crate::error::{Error, Result};

/// How the regularization scalar `alpha_m` of each subnetwork is chosen.
///
/// `Snr` is expressed in noise-normalized channel units: the large-scale gains
/// are measured relative to `N0 / P_m`, so `alpha_m = N0 / (P_m * 10^(rho/10) * beta_m)`.
/// `Snr(0.0)` therefore coincides with `Table1`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum RegPolicy {
    /// `alpha_m = N0 / (P_m * beta_m)`.
    Table1,
    /// SNR in dB.
    Snr(f64),
    /// The same `alpha` in every subnetwork.
    Fixed(f64),
    /// Zero forcing, `alpha = 0`; needs `beta_m > 1` everywhere.
    Zf,
}

impl RegPolicy {
    /// Regularization for a subnetwork with antenna ratio `beta_m`.
    pub fn alpha(&self, beta_m: f64, tx_power: f64, noise_power: f64) -> f64 {
        match *self {
            RegPolicy::Table1 => noise_power / (tx_power * beta_m),
            RegPolicy::Snr(rho_db) => noise_power / (tx_power * libm::pow(10.0, rho_db / 10.0) * beta_m),
            RegPolicy::Fixed(alpha) => alpha,
            RegPolicy::Zf => 0.0,
        }
    }

    pub fn is_zf(&self) -> bool {
        matches!(self, RegPolicy::Zf)
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct NetworkConfig {
    /// Side of the square coverage area, meters.
    #[cfg_attr(feature = "serde", serde(rename = "area_side_D"))]
    pub area_side: f64,
    #[cfg_attr(feature = "serde", serde(rename = "num_subnetworks_M"))]
    pub num_subnetworks: usize,
    #[cfg_attr(feature = "serde", serde(rename = "total_users_K"))]
    pub total_users: usize,
    /// Total antennas over total users.
    #[cfg_attr(feature = "serde", serde(rename = "antenna_ratio_beta"))]
    pub antenna_ratio: f64,
    pub antennas_per_bs: usize,
    #[cfg_attr(feature = "serde", serde(rename = "near_threshold_d0"))]
    pub near_threshold: f64,
    #[cfg_attr(feature = "serde", serde(rename = "far_threshold_d1"))]
    pub far_threshold: f64,
    /// Watts per subnetwork.
    #[cfg_attr(feature = "serde", serde(rename = "tx_power_P"))]
    pub tx_power: f64,
    #[cfg_attr(feature = "serde", serde(rename = "noise_power_N0"))]
    pub noise_power: f64,
    pub reg_policy: RegPolicy,
    pub seed: u64,
    pub mc_realizations: usize,
    #[cfg_attr(feature = "serde", serde(rename = "fp_iterations_Tmax"))]
    pub fp_iterations: usize,
    pub network_realizations: usize,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        Self {
            area_side: 2000.0,
            num_subnetworks: 4,
            total_users: 256,
            antenna_ratio: 4.0,
            antennas_per_bs: 1,
            near_threshold: 10.0,
            far_threshold: 50.0,
            tx_power: 1.0,
            noise_power: 1e-12,
            reg_policy: RegPolicy::Table1,
            seed: 1,
            mc_realizations: 50,
            fp_iterations: 50,
            network_realizations: 10,
        }
    }
}

impl NetworkConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if !positive(self.area_side) {
            return Err(Error::InvalidConfig("area_side_D must be positive"));
        }
        if !(positive(self.near_threshold) && self.near_threshold < self.far_threshold)
            || !self.far_threshold.is_finite()
        {
            return Err(Error::InvalidThresholds {
                d0: self.near_threshold,
                d1: self.far_threshold,
            });
        }
        if self.num_subnetworks == 0 {
            return Err(Error::InvalidConfig("num_subnetworks_M must be at least 1"));
        }
        if self.total_users < self.num_subnetworks {
            return Err(Error::InvalidConfig("total_users_K must be >= num_subnetworks_M"));
        }
        if !positive(self.antenna_ratio) {
            return Err(Error::InvalidConfig("antenna_ratio_beta must be positive"));
        }
        if self.antennas_per_bs == 0 {
            return Err(Error::InvalidConfig("antennas_per_bs must be at least 1"));
        }
        if !positive(self.tx_power) {
            return Err(Error::InvalidConfig("tx_power_P must be positive"));
        }
        if !(self.noise_power.is_finite() && self.noise_power >= 0.0) {
            return Err(Error::InvalidConfig("noise_power_N0 must be non-negative"));
        }
        match self.reg_policy {
            RegPolicy::Fixed(a) if !(a.is_finite() && a >= 0.0) => {
                return Err(Error::InvalidConfig("fixed regularization must be >= 0"));
            }
            RegPolicy::Snr(rho) if !rho.is_finite() => {
                return Err(Error::InvalidConfig("snr must be finite"));
            }
            _ => {}
        }
        if self.mc_realizations == 0 || self.network_realizations == 0 {
            return Err(Error::InvalidConfig("realization counts must be at least 1"));
        }
        if self.fp_iterations == 0 {
            return Err(Error::InvalidConfig("fp_iterations_Tmax must be at least 1"));
        }
        Ok(())
    }

    /// Number of BSs, `ceil(beta * K / antennas_per_bs)`.
    pub fn num_bs(&self) -> usize {
        let antennas = libm::ceil(self.antenna_ratio * self.total_users as f64 - 1e-9);
        let per = self.antennas_per_bs as f64;
        libm::ceil(antennas / per - 1e-9) as usize
    }
}
