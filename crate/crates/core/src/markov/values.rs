use serde::Serialize;

use super::chain::{ChainSpec, StateId, StrategyProfile};
use crate::error::{Error, Result};
use crate::params::NetworkParams;

/// Relative values `v_i = w_i / w_0` for all 22 states of the three chains.
///
/// States 0-9 are shared by every profile (4-9 are unreachable under HIF),
/// 10-13 belong to FSH and 14-21 to HIF.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RelativeValues(pub [f64; 22]);

impl std::ops::Index<usize> for RelativeValues {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl RelativeValues {
    pub fn sum(&self, range: std::ops::RangeInclusive<usize>) -> f64 {
        self.0[range].iter().sum()
    }

    /// Normalizing constant of a profile's chain.
    pub fn total(&self, profile: StrategyProfile) -> f64 {
        profile.states().iter().map(|&s| self.0[s as usize]).sum()
    }

    /// Steady-state probability of `state` under `profile`.
    pub fn weight(&self, profile: StrategyProfile, state: StateId) -> f64 {
        self.0[state as usize] / self.total(profile)
    }
}

fn ratio(num: f64, den: f64, what: &str) -> Result<f64> {
    if den > 0.0 {
        Ok(num / den)
    } else {
        Err(Error::Degenerate(format!("{what} is zero")))
    }
}

/// Evaluates the closed-form recursions for every state.
pub fn relative_values(params: &NetworkParams) -> Result<RelativeValues> {
    let (p1, p2, q1, q2) = (params.p1(), params.p2(), params.q1(), params.q2());
    let p1q2 = ratio(1.0, p1 + q2, "p1 + q2")?;
    let q1p2 = ratio(1.0, q1 + p2, "q1 + p2")?;
    let q1q2 = ratio(1.0, q1 + q2, "q1 + q2")?;
    let p1p2 = ratio(1.0, p1 + p2, "p1 + p2")?;

    let mut v = [0.0; 22];
    v[0] = 1.0;
    v[1] = p2 * p1q2;
    v[2] = p1 * q1p2;
    v[3] = (p1 * v[1] + p2 * v[2]) * q1q2;
    v[4] = q1 * p1q2 * v[3];
    v[5] = p1 * q1q2 * v[4];
    v[6] = q2 * q1p2 * v[5];
    v[7] = p2 * q1q2 * v[6];
    v[8] = q1 * p1q2 * v[7];
    v[9] = p1 * q1q2 * v[8];
    v[10] = q2 * q1p2 * v[3];
    v[11] = p2 * q1q2 * v[10];
    v[12] = q1 * q1p2 * v[10];
    v[13] = (q1 * v[11] + p2 * v[12]) * q1q2;
    v[14] = q1 * p1q2 * v[3];
    v[15] = q2 * p1p2 * v[14];
    v[16] = p2 * p1q2 * v[15];
    v[17] = p1 * q1q2 * v[14];
    v[18] = (p1 * v[15] + q2 * v[17]) * q1p2;
    v[19] = (p1 * v[16] + p2 * v[18]) * q1q2;
    v[20] = q1 * p1q2 * v[19];
    v[21] = p1 * q1q2 * v[20];
    Ok(RelativeValues(v))
}

/// Relative values restricted to a profile's states, in chain order.
pub fn profile_values(profile: StrategyProfile, params: &NetworkParams) -> Result<Vec<f64>> {
    let v = relative_values(params)?;
    Ok(profile.states().iter().map(|&s| v[s as usize]).collect())
}

/// Stationary distribution of `chain`, indexed like `chain.states`.
pub fn steady_state(chain: &ChainSpec) -> Result<Vec<f64>> {
    let v = profile_values(chain.profile, &chain.params)?;
    let total: f64 = v.iter().sum();
    Ok(v.into_iter().map(|x| x / total).collect())
}
