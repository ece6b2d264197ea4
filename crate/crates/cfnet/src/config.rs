//! JSON run configuration: the network fields plus optional sweep lists.

use std::path::Path;

use cfnet_core::NetworkConfig;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::experiment::ExperimentKind;

/// Environment variable consulted for a seed when no `--seed` is given.
pub const SEED_ENV: &str = "CFNET_SEED";

/// Sweep lists; missing entries fall back to per-experiment defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepLists {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<ExperimentKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_list: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta_list: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_list: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho_db_list: Option<Vec<f64>>,
    /// Write wall times into the CSV (default true). With `false` the
    /// `time_s` column is left empty and the file is byte-reproducible.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub record_timing: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub network: NetworkConfig,
    #[serde(flatten)]
    pub sweep: SweepLists,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.network.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_json(&text)
    }

    /// Seed precedence: explicit flag, then `CFNET_SEED`, then the file.
    pub fn apply_seed_override(&mut self, flag: Option<u64>) -> Result<()> {
        if let Some(seed) = flag {
            self.network.seed = seed;
        } else if let Ok(value) = std::env::var(SEED_ENV) {
            self.network.seed = value
                .trim()
                .parse()
                .map_err(|_| HarnessError::Config(format!("{SEED_ENV}={value:?} is not an unsigned integer")))?;
        }
        Ok(())
    }
}
