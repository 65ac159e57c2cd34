//! Round-based Monte-Carlo simulation of the two-party mining process and of
//! the long-range race.

mod behavioral;
mod chain_exact;
mod longrange;
mod stats;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::markov::{StateId, StrategyProfile};
use crate::params::{ImprovementPair, NetworkParams, RewardArg};
use crate::reward::RewardFunction;

pub use longrange::{run_longrange_sim, run_random_walk_sim, LongrangeConfig, LongrangeResult};
pub use stats::Estimate;

pub(crate) use stats::CycleStats;

/// Seed of sweep point `index`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    seed ^ index
}

/// Generator for one run: `seed` selects the key, `stream` an independent
/// keystream under it.
pub fn sim_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SimMode {
    /// Sample the analytic chain's transitions directly.
    #[default]
    ChainExact,
    /// Per-miner Bernoulli events and protocol logic.
    Behavioral,
}

/// Who publishes when both parties complete a block in the same round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieRule {
    #[default]
    Coin,
    Party1,
    Party2,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimConfig {
    pub profile: StrategyProfile,
    pub params: NetworkParams,
    pub reward: RewardFunction,
    pub s: ImprovementPair,
    pub rounds: u64,
    pub seed: u64,
    pub mode: SimMode,
    /// Behavioral only: drop all pending solutions after the fourth block of
    /// a competition, as the analytic chain does.
    pub truncate_at_state9: bool,
    pub tie_rule: TieRule,
}

impl SimConfig {
    pub fn new(
        profile: StrategyProfile,
        params: NetworkParams,
        reward: RewardFunction,
        s: ImprovementPair,
        rounds: u64,
        seed: u64,
    ) -> Self {
        Self {
            profile,
            params,
            reward,
            s,
            rounds,
            seed,
            mode: SimMode::ChainExact,
            truncate_at_state9: true,
            tie_rule: TieRule::Coin,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.rounds == 0 {
            return Err(Error::Config("rounds must be at least 1".into()));
        }
        for arg in [
            RewardArg::S1,
            RewardArg::S2,
            RewardArg::S2MinusS1,
            RewardArg::TwoS1MinusS2,
            RewardArg::TwoS2MinusTwoS1,
        ] {
            self.reward.evaluate(self.s.arg(arg))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimResult {
    pub profile: StrategyProfile,
    pub mode: SimMode,
    pub rounds: u64,
    pub seed_used: u64,
    pub total_reward: [f64; 2],
    pub reward_per_round: [Estimate; 2],
    /// Blocks that ended up on the final chain, per party.
    pub blocks_mined: [u64; 2],
    pub forks_attempted: u64,
    pub forks_succeeded: u64,
    /// Fraction of rounds started in each of the profile's states.
    pub occupancy: Vec<(StateId, f64)>,
    /// Fraction of rounds started in a configuration the chain has no state
    /// for (behavioral mode only).
    pub unclassified: f64,
    /// Completed returns to state 0.
    pub cycles: u64,
}

impl SimResult {
    pub fn occupancy_of(&self, state: StateId) -> Option<f64> {
        self.occupancy.iter().find(|o| o.0 == state).map(|o| o.1)
    }
}

/// Per-round bookkeeping shared by both modes.
pub(crate) struct Recorder {
    profile: StrategyProfile,
    visits: [u64; 22],
    other: u64,
    totals: [f64; 2],
    pub blocks: [u64; 2],
    pub forks_attempted: u64,
    pub forks_succeeded: u64,
    cycles: CycleStats,
    prev_zero: bool,
    rounds: u64,
}

impl Recorder {
    pub fn new(profile: StrategyProfile) -> Self {
        Self {
            profile,
            visits: [0; 22],
            other: 0,
            totals: [0.0; 2],
            blocks: [0; 2],
            forks_attempted: 0,
            forks_succeeded: 0,
            cycles: CycleStats::default(),
            prev_zero: true,
            rounds: 0,
        }
    }

    /// One round that started in `state` and paid `reward`.
    pub fn round(&mut self, state: Option<StateId>, reward: [f64; 2]) {
        match state {
            Some(s) if self.profile.states().contains(&s) => self.visits[s as usize] += 1,
            _ => self.other += 1,
        }
        let at_zero = state == Some(0);
        self.cycles.round(at_zero, self.prev_zero, reward);
        self.prev_zero = at_zero;
        self.totals[0] += reward[0];
        self.totals[1] += reward[1];
        self.rounds += 1;
    }

    pub fn finish(self, config: &SimConfig) -> SimResult {
        let n = self.rounds as f64;
        let estimate = |i: usize| Estimate {
            mean: self.totals[i] / n,
            stderr: self.cycles.stderr(i),
            n: self.rounds,
        };
        SimResult {
            profile: config.profile,
            mode: config.mode,
            rounds: self.rounds,
            seed_used: config.seed,
            total_reward: self.totals,
            reward_per_round: [estimate(0), estimate(1)],
            blocks_mined: self.blocks,
            forks_attempted: self.forks_attempted,
            forks_succeeded: self.forks_succeeded,
            occupancy: self
                .profile
                .states()
                .iter()
                .map(|&s| (s, self.visits[s as usize] as f64 / n))
                .collect(),
            unclassified: self.other as f64 / n,
            cycles: self.cycles.completed() as u64,
        }
    }
}

/// Runs one simulation on stream 0 of `config.seed`.
pub fn run_mining_sim(config: &SimConfig) -> Result<SimResult> {
    run_on_stream(config, 0)
}

fn run_on_stream(config: &SimConfig, stream: u64) -> Result<SimResult> {
    config.validate()?;
    let mut rng = sim_rng(config.seed, stream);
    match config.mode {
        SimMode::ChainExact => chain_exact::run(config, &mut rng),
        SimMode::Behavioral => behavioral::run(config, &mut rng),
    }
}

/// Reward rates over `reps` independent runs of `config`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Replicated {
    /// Across-replicate mean and standard error per party.
    pub reward_per_round: [Estimate; 2],
    pub runs: Vec<SimResult>,
}

/// Runs `reps` replicates on streams `1..=reps` of `config.seed` in
/// parallel. Results are in stream order regardless of scheduling.
pub fn run_replicated(config: &SimConfig, reps: usize) -> Result<Replicated> {
    if reps < 2 {
        return Err(Error::Config("replication needs at least 2 runs".into()));
    }
    let runs: Vec<SimResult> = (1..=reps as u64)
        .into_par_iter()
        .map(|stream| run_on_stream(config, stream))
        .collect::<Result<_>>()?;
    let rate = |i: usize| {
        let xs: Vec<f64> = runs.iter().map(|r| r.reward_per_round[i].mean).collect();
        Estimate::from_samples(&xs)
    };
    Ok(Replicated {
        reward_per_round: [rate(0), rate(1)],
        runs,
    })
}
