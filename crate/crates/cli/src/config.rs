//! Experiment configuration files.

use std::path::{Path, PathBuf};

use pouw_core::markov::{EtaMode, RegionConfig};
use pouw_core::sim::{SimMode, TieRule};
use pouw_core::{ImprovementPair, NetworkParams, RewardFunction, StrategyProfile};
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::error::{invalid, CliError, Result};
use crate::output::Format;

pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSpec {
    pub lambda1: f64,
    pub p0: f64,
    pub q0: f64,
}

impl NetworkSpec {
    pub fn params(&self) -> Result<NetworkParams> {
        NetworkParams::new(self.lambda1, self.p0, self.q0).map_err(invalid("network"))
    }
}

/// Output destination shared by every command.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyzeConfig {
    pub network: NetworkSpec,
    pub reward: RewardFunction,
    pub improvement: ImprovementPair,
    /// Points in the reward-principle scan.
    #[serde(default = "default_grid")]
    pub grid: usize,
    #[serde(default)]
    pub output: OutputSpec,
}

fn default_grid() -> usize {
    pouw_core::reward::DEFAULT_GRID
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub network: Option<NetworkSpec>,
    pub reward: Option<RewardFunction>,
    pub improvement: Option<ImprovementPair>,
    #[serde(default = "all_profiles")]
    pub profiles: Vec<StrategyProfile>,
    #[serde(default)]
    pub mode: SimMode,
    #[serde(default = "default_rounds")]
    pub rounds: u64,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default = "yes")]
    pub truncate: bool,
    #[serde(default)]
    pub tie_rule: TieRule,
    /// Present for a long-range attack simulation instead of mining.
    pub longrange: Option<LongrangeSpec>,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LongrangeSpec {
    pub depths: Vec<u32>,
    pub trials: u64,
    /// Per-block honest probability of a plain random walk; without it the
    /// block race is simulated on the network rates.
    pub p_h: Option<f64>,
    pub abandon_at: Option<u32>,
    pub step_cap: Option<u64>,
}

fn all_profiles() -> Vec<StrategyProfile> {
    StrategyProfile::ALL.to_vec()
}

fn default_rounds() -> u64 {
    1_000_000
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}

fn yes() -> bool {
    true
}

/// Values of one sweep axis: an explicit list or an inclusive range.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Axis {
    List(Vec<f64>),
    Range { start: f64, stop: f64, step: f64 },
}

impl Axis {
    /// Sorted, de-duplicated grid values.
    pub fn values(&self, name: &str) -> Result<Vec<f64>> {
        let bad = |msg: &str| CliError::Config(format!("axis {name}: {msg}"));
        let mut v = match *self {
            Axis::List(ref xs) => xs.clone(),
            Axis::Range { start, stop, step } => {
                if !(step > 0.0) || !step.is_finite() {
                    return Err(bad("step must be positive"));
                }
                if !(stop >= start) || !start.is_finite() || !stop.is_finite() {
                    return Err(bad("stop must not be below start"));
                }
                let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
                if n > 10_000_000 {
                    return Err(bad("range has too many points"));
                }
                (0..n).map(|i| start + i as f64 * step).collect()
            }
        };
        if v.is_empty() {
            return Err(bad("no values"));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(bad("values must be finite"));
        }
        v.sort_by(f64::total_cmp);
        v.dedup();
        Ok(v)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axes {
    pub lambda_s: Axis,
    pub p0: Option<Axis>,
    pub q0: Option<Axis>,
    pub eta: Option<Axis>,
    /// Slope of a linear reward; requires a linear `reward`.
    pub k: Option<Axis>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSim {
    #[serde(default = "default_rounds")]
    pub rounds: u64,
    #[serde(default)]
    pub mode: SimMode,
    #[serde(default = "yes")]
    pub truncate: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub axes: Axes,
    /// How `p0` and `q0` follow an `eta` axis.
    #[serde(default)]
    pub eta_mode: EtaMode,
    pub reward: RewardFunction,
    pub improvement: ImprovementPair,
    pub simulation: Option<SweepSim>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Debug, Clone, Deserialize)]
pub struct NamedReward {
    pub name: String,
    #[serde(flatten)]
    pub reward: RewardFunction,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionFileConfig {
    #[serde(default)]
    pub region: RegionConfig,
    pub rewards: Vec<NamedReward>,
    pub improvement: ImprovementPair,
    #[serde(default)]
    pub output: OutputSpec,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_axis_hits_stop() {
        let a = Axis::Range {
            start: 0.05,
            stop: 0.5,
            step: 0.05,
        };
        let v = a.values("lambda_s").unwrap();
        assert_eq!(v.len(), 10);
        assert!((v[9] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn bad_axes() {
        assert!(Axis::List(vec![]).values("x").is_err());
        assert!(Axis::Range {
            start: 0.0,
            stop: 1.0,
            step: 0.0
        }
        .values("x")
        .is_err());
        assert!(Axis::Range {
            start: 1.0,
            stop: 0.0,
            step: 0.1
        }
        .values("x")
        .is_err());
    }

    #[test]
    fn sweep_parses() {
        let c: SweepConfig = toml::from_str(
            r#"
            seed = 7
            [axes]
            lambda_s = { start = 0.05, stop = 0.5, step = 0.05 }
            p0 = [0.0005, 0.001]
            q0 = [0.001]
            [reward]
            kind = "constant"
            b = 1.0
            s_max = 3.0
            [improvement]
            s1 = 2.0
            s2 = 3.0
            "#,
        )
        .unwrap();
        assert_eq!(c.seed, 7);
        assert!(c.simulation.is_none());
    }

    #[test]
    fn named_rewards_parse() {
        let c: RegionFileConfig = toml::from_str(
            r#"
            [[rewards]]
            name = "flat"
            kind = "constant"
            b = 1.0
            s_max = 2.0
            [improvement]
            s1 = 1.0
            s2 = 1.5
            "#,
        )
        .unwrap();
        assert_eq!(c.rewards[0].name, "flat");
        assert_eq!(c.region.resolution, 1e-3);
    }
}
