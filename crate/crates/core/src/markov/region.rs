use serde::{Deserialize, Serialize};

use super::security::check_adversary_security;
use crate::error::{Error, Result};
use crate::malice::{longrange_necessary_bound, malice_boundary};
use crate::params::{ImprovementPair, NetworkParams};
use crate::reward::RewardFunction;

/// How `p0` and `q0` are chosen for a given overhead ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum EtaMode {
    /// Keep `p0 + q0` fixed.
    FixSum { total: f64 },
    /// Keep `q0` fixed and scale `p0`.
    FixQ0 { q0: f64 },
}

impl Default for EtaMode {
    fn default() -> Self {
        EtaMode::FixSum { total: 0.006 }
    }
}

impl EtaMode {
    pub fn params(&self, lambda1: f64, eta: f64) -> Result<NetworkParams> {
        match *self {
            EtaMode::FixSum { total } => NetworkParams::from_eta_total(lambda1, eta, total),
            EtaMode::FixQ0 { q0 } => NetworkParams::from_eta_q0(lambda1, eta, q0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RegionConfig {
    pub eta_grid: Vec<f64>,
    /// Step of the `lambda_s` scan.
    pub resolution: f64,
    pub mode: EtaMode,
}

impl Default for RegionConfig {
    fn default() -> Self {
        Self {
            eta_grid: (50..=95).map(|i| i as f64 / 100.0).collect(),
            resolution: 1e-3,
            mode: EtaMode::default(),
        }
    }
}

/// Boundaries at one overhead ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionPoint {
    pub eta: f64,
    /// Largest `lambda_s` such that every grid share up to it is secure
    /// against selfish deviation; 0 when the smallest share already fails.
    pub selfish_boundary: f64,
    /// Largest attacker share the single-block race tolerates.
    pub malice_boundary: Option<f64>,
    /// `eta / (1 + eta)`
    pub longrange_bound: f64,
}

/// Scans `lambda_s = res, 2 res, ...` up to 1/2 and returns the last share
/// before the first insecure one.
pub fn selfish_boundary(
    network: &NetworkParams,
    reward: &RewardFunction,
    s: &ImprovementPair,
    resolution: f64,
) -> Result<f64> {
    if !(resolution > 0.0 && resolution <= 0.5) {
        return Err(Error::domain(
            "resolution",
            resolution,
            "must lie in (0, 0.5]",
        ));
    }
    let steps = (0.5 / resolution + 1e-9).floor() as usize;
    let mut boundary = 0.0;
    for i in 1..=steps {
        let lambda_s = i as f64 * resolution;
        if !check_adversary_security(network, lambda_s, reward, s)?.secure() {
            break;
        }
        boundary = lambda_s;
    }
    Ok(boundary)
}

pub fn secure_region(
    reward: &RewardFunction,
    s: &ImprovementPair,
    config: &RegionConfig,
) -> Result<Vec<RegionPoint>> {
    if config.eta_grid.is_empty() {
        return Err(Error::Config("eta grid is empty".into()));
    }
    config
        .eta_grid
        .iter()
        .map(|&eta| {
            if !(eta > 0.0 && eta < 1.0) {
                return Err(Error::domain("eta", eta, "must lie in (0, 1)"));
            }
            let network = config.mode.params(0.5, eta)?;
            Ok(RegionPoint {
                eta,
                selfish_boundary: selfish_boundary(&network, reward, s, config.resolution)?,
                malice_boundary: malice_boundary(&network)?,
                longrange_bound: longrange_necessary_bound(eta)?,
            })
        })
        .collect()
}
