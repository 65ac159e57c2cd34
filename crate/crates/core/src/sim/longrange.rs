use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};
use serde::{Deserialize, Serialize};

use super::{sim_rng, Estimate};
use crate::error::{Error, Result};
use crate::params::NetworkParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LongrangeConfig {
    /// How many blocks deep the attack starts.
    pub k: u32,
    pub trials: u64,
    pub seed: u64,
    /// Walk steps after which a trial is counted as censored.
    pub step_cap: u64,
    /// The attacker gives up once this many blocks behind.
    pub abandon_at: u32,
}

impl LongrangeConfig {
    pub fn new(k: u32, trials: u64, seed: u64) -> Self {
        Self {
            k,
            trials,
            seed,
            step_cap: 10_000_000,
            abandon_at: 100,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.k >= self.abandon_at {
            return Err(Error::Config(format!(
                "attack depth {} must be below the abandon threshold {}",
                self.k, self.abandon_at
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LongrangeResult {
    pub trials: u64,
    pub successes: u64,
    pub abandoned: u64,
    pub censored: u64,
    /// Success rate over the trials that finished.
    pub success_rate: Estimate,
}

enum Outcome {
    Success,
    Abandoned,
    Censored,
}

/// Walks the honest lead from `k` until it hits -1 (attacker ahead),
/// reaches the abandon threshold, or the step cap runs out.
fn walk(
    config: &LongrangeConfig,
    rng: &mut ChaCha8Rng,
    mut honest_wins: impl FnMut(&mut ChaCha8Rng) -> bool,
) -> Outcome {
    let mut lead = config.k as i64;
    for _ in 0..config.step_cap {
        lead += if honest_wins(rng) { 1 } else { -1 };
        if lead < 0 {
            return Outcome::Success;
        }
        if lead >= config.abandon_at as i64 {
            return Outcome::Abandoned;
        }
    }
    Outcome::Censored
}

fn tally(
    config: &LongrangeConfig,
    mut trial: impl FnMut(&mut ChaCha8Rng) -> Outcome,
) -> LongrangeResult {
    let mut rng = sim_rng(config.seed, 0);
    let (mut successes, mut abandoned, mut censored) = (0, 0, 0);
    for _ in 0..config.trials {
        match trial(&mut rng) {
            Outcome::Success => successes += 1,
            Outcome::Abandoned => abandoned += 1,
            Outcome::Censored => censored += 1,
        }
    }
    LongrangeResult {
        trials: config.trials,
        successes,
        abandoned,
        censored,
        success_rate: Estimate::proportion(successes, successes + abandoned),
    }
}

/// Simulates the long-range race block by block. The honest side needs a
/// solution (`p2` per round) and then a nonce (`q2`); the attacker copies the
/// solution and only needs a nonce (`q1`). A block goes to the honest side
/// only if it finishes strictly first.
pub fn run_longrange_sim(
    params: &NetworkParams,
    config: &LongrangeConfig,
) -> Result<LongrangeResult> {
    config.validate()?;
    if params.q1() == 0.0 {
        return Ok(LongrangeResult {
            trials: config.trials,
            successes: 0,
            abandoned: config.trials,
            censored: 0,
            success_rate: Estimate::proportion(0, config.trials),
        });
    }
    let geo = |p: f64| -> Result<Option<Geometric>> {
        if p == 0.0 {
            return Ok(None);
        }
        Geometric::new(p)
            .map(Some)
            .map_err(|e| Error::Config(format!("geometric({p}): {e}")))
    };
    let (solve, hash, attack) = (geo(params.p2())?, geo(params.q2())?, geo(params.q1())?);
    let attack = attack.expect("q1 > 0 checked above");
    Ok(tally(config, |rng| {
        walk(config, rng, |rng| {
            let a = attack.sample(rng) + 1;
            match (&solve, &hash) {
                (Some(s), Some(h)) => s.sample(rng) + 1 + h.sample(rng) + 1 < a,
                _ => false,
            }
        })
    }))
}

/// Gambler's-ruin walk in which each block goes to the honest side with
/// probability `p_h`.
pub fn run_random_walk_sim(p_h: f64, config: &LongrangeConfig) -> Result<LongrangeResult> {
    config.validate()?;
    if !(0.0..=1.0).contains(&p_h) {
        return Err(Error::domain("p_h", p_h, "must lie in [0, 1]"));
    }
    Ok(tally(config, |rng| {
        walk(config, rng, |rng| rng.random_bool(p_h))
    }))
}
