use serde::Serialize;

use super::chain::{build_chain, ChainSpec, Party, StrategyProfile};
use super::values::{relative_values, steady_state};
use crate::error::Result;
use crate::params::{ImprovementPair, NetworkParams, RewardArg};
use crate::reward::RewardFunction;

/// Expected reward per round of `party` under `profile`.
///
/// The two deviating payoffs and both honest-profile payoffs use their
/// closed forms; the honest party's payoff under a deviation is read off the
/// chain's reward events.
pub fn payoff(
    profile: StrategyProfile,
    party: Party,
    params: &NetworkParams,
    reward: &RewardFunction,
    s: &ImprovementPair,
) -> Result<f64> {
    let r = |arg| reward.evaluate(s.arg(arg));
    let v = relative_values(params)?;
    let w = |i: usize| v[i] / v.total(profile);
    let (q1, q2) = (params.q1(), params.q2());
    use RewardArg::*;
    let value = match (profile, party) {
        (StrategyProfile::HH, Party::One) => {
            q1 * (w(2) + w(3) + w(5) + w(9)) * r(S1)? + q1 * (w(6) + w(7)) * r(TwoS1MinusS2)?
        }
        (StrategyProfile::HH, Party::Two) => {
            q2 * (w(1) + w(3) + w(7)) * r(S2)?
                + q2 * (w(4) + w(5)) * r(S2MinusS1)?
                + q2 * (w(8) + w(9)) * r(TwoS2MinusTwoS1)?
        }
        (StrategyProfile::FSH, Party::One) => {
            q1 * (w(2) + w(3) + w(5) + w(9)) * r(S1)?
                + q1 * (w(6) + w(7)) * r(TwoS1MinusS2)?
                + q1 * (w(12) + w(13)) * (r(S2MinusS1)? + r(S1)?)
        }
        (StrategyProfile::HIF, Party::Two) => {
            q2 * (w(1) + w(3) + 2.0 * w(16) + 2.0 * w(19)) * r(S2)?
                + q2 * (w(20) + w(21)) * r(TwoS2MinusTwoS1)?
        }
        _ => return payoff_from_events(&build_chain(profile, params), party, reward, s),
    };
    Ok(value)
}

/// Expected reward per round of `party`, summed over the chain's reward
/// events weighted by the stationary distribution.
pub fn payoff_from_events(
    chain: &ChainSpec,
    party: Party,
    reward: &RewardFunction,
    s: &ImprovementPair,
) -> Result<f64> {
    let w = steady_state(chain)?;
    let mut total = 0.0;
    for (t, c) in chain.reward_events() {
        if c.party != party {
            continue;
        }
        let i = chain.index_of(t.from).expect("event from unknown state");
        total += w[i] * t.prob * c.count as f64 * reward.evaluate(s.arg(c.arg))?;
    }
    Ok(total)
}

/// Both parties' payoffs under all three profiles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PayoffTable {
    pub hh: [f64; 2],
    pub fsh: [f64; 2],
    pub hif: [f64; 2],
}

impl PayoffTable {
    pub fn get(&self, profile: StrategyProfile) -> [f64; 2] {
        match profile {
            StrategyProfile::HH => self.hh,
            StrategyProfile::FSH => self.fsh,
            StrategyProfile::HIF => self.hif,
        }
    }
}

pub fn payoff_table(
    params: &NetworkParams,
    reward: &RewardFunction,
    s: &ImprovementPair,
) -> Result<PayoffTable> {
    let both = |profile| -> Result<[f64; 2]> {
        Ok([
            payoff(profile, Party::One, params, reward, s)?,
            payoff(profile, Party::Two, params, reward, s)?,
        ])
    };
    Ok(PayoffTable {
        hh: both(StrategyProfile::HH)?,
        fsh: both(StrategyProfile::FSH)?,
        hif: both(StrategyProfile::HIF)?,
    })
}
