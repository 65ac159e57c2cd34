//! Long-range attack analysis: an attacker copies the honest chain's
//! solutions and only redoes proof of work, racing the honest party which has
//! to find a better solution before hashing.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::NetworkParams;

/// Largest attacker share for which the honest chain grows faster in
/// expectation: `eta / (1 + eta)`. Necessary, not sufficient.
pub fn longrange_necessary_bound(eta: f64) -> Result<f64> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::domain("eta", eta, "must lie in (0, 1)"));
    }
    Ok(eta / (1.0 + eta))
}

/// Probability that an attacker `k` blocks behind ever overtakes, when each
/// block goes to the honest side with probability `p_h`.
pub fn longrange_success_prob(k: u32, p_h: f64) -> Result<f64> {
    if !(p_h > 0.0 && p_h < 1.0) {
        return Err(Error::domain("p_h", p_h, "must lie in (0, 1)"));
    }
    let rho = (1.0 - p_h) / p_h;
    Ok(if rho < 1.0 {
        rho.powi(k as i32 + 1)
    } else {
        1.0
    })
}

/// Hit probabilities per round of the three geometric race times: honest
/// solution (`p2`), honest proof of work (`q2`), attacker proof of work
/// (`q1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RaceVariables {
    pub p2: f64,
    pub q2: f64,
    pub q1: f64,
}

impl RaceVariables {
    pub fn new(p2: f64, q2: f64, q1: f64) -> Result<Self> {
        for (field, v) in [("p2", p2), ("q2", q2), ("q1", q1)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::domain(field, v, "must lie in (0, 1)"));
            }
        }
        Ok(Self { p2, q2, q1 })
    }

    pub fn from_params(params: &NetworkParams) -> Result<Self> {
        Self::new(params.p2(), params.q2(), params.q1())
    }

    fn require_distinct(&self) -> Result<()> {
        if self.p2 == self.q2 {
            return Err(Error::Degenerate(
                "p2 = q2 (eta = 1/2): the closed form divides by p2 - q2".into(),
            ));
        }
        Ok(())
    }

    /// `P(T2o + T2p <= t)`, the chance the honest side finishes a block
    /// within `t` rounds. Both times count rounds from 1.
    pub fn honest_block_cdf(&self, t: u64) -> Result<f64> {
        self.require_distinct()?;
        if t < 2 {
            return Ok(0.0);
        }
        let (a, b) = (self.p2, self.q2);
        let ta = (1.0 - a).powf((t - 1) as f64);
        let tb = (1.0 - b).powf(t as f64);
        Ok(1.0 - ta - a * (tb - (1.0 - b) * ta) / (a - b))
    }

    /// `P(T2o + T2p < T1p)`: the honest side completes a block strictly
    /// before the attacker.
    pub fn honest_wins_prob(&self) -> Result<f64> {
        self.require_distinct()?;
        let (p2, q2, q1) = (self.p2, self.q2, self.q1);
        let k = (1.0 - q1).powi(2) / (p2 - q2);
        Ok(
            (1.0 - q1).powi(2) - k * q1 * p2 * (1.0 - q2).powi(2) / (q1 + q2 - q1 * q2)
                + k * q1 * q2 * (1.0 - p2).powi(2) / (q1 + p2 - q1 * p2),
        )
    }
}

pub fn honest_wins_prob(params: &NetworkParams) -> Result<f64> {
    RaceVariables::from_params(params)?.honest_wins_prob()
}

/// True when the honest side wins a single-block race more often than not.
pub fn check_malice_security(params: &NetworkParams) -> Result<bool> {
    Ok(honest_wins_prob(params)? > 0.5)
}

/// Scale-free approximation of `honest_wins_prob - 1/2` for small rates.
pub fn approx_malice_margin(lambda1: f64, eta: f64) -> Result<f64> {
    if !(lambda1 > 0.0 && lambda1 < 1.0) {
        return Err(Error::domain("lambda1", lambda1, "must lie in (0, 1)"));
    }
    if !(eta > 0.5 && eta < 1.0) {
        return Err(Error::domain("eta", eta, "must lie in (1/2, 1)"));
    }
    let x = eta / (1.0 - eta);
    Ok(0.5 - lambda1 / (2.0 - 1.0 / eta) + 1.0 / ((x - 1.0) * (1.0 + x * (1.0 / lambda1 - 1.0))))
}

pub fn approx_malice_condition(lambda1: f64, eta: f64) -> Result<bool> {
    Ok(approx_malice_margin(lambda1, eta)? >= 0.0)
}

const BISECT_TOL: f64 = 1e-10;
const MAX_SHARE: f64 = 0.5;

/// Bisects for the boundary of a predicate that holds near zero and fails
/// above some point in `(0, 0.5]`.
fn bisect(mut holds: impl FnMut(f64) -> Result<bool>) -> Result<f64> {
    if holds(MAX_SHARE)? {
        return Ok(MAX_SHARE);
    }
    let (mut lo, mut hi) = (0.0, MAX_SHARE);
    while hi - lo > BISECT_TOL {
        let mid = 0.5 * (lo + hi);
        if holds(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Largest attacker share in `(0, 0.5]` the exact race condition tolerates
/// on `network`'s rates. `None` when `eta = 1/2`.
pub fn malice_boundary(network: &NetworkParams) -> Result<Option<f64>> {
    if network.p0() == network.q0() {
        return Ok(None);
    }
    bisect(|l| {
        if l == 0.0 {
            return Ok(true);
        }
        check_malice_security(&network.with_lambda1(l)?)
    })
    .map(Some)
}

/// Boundary share of the small-rate approximation at `eta > 1/2`.
pub fn approx_malice_boundary(eta: f64) -> Result<f64> {
    if !(eta > 0.5 && eta < 1.0) {
        return Err(Error::domain("eta", eta, "must lie in (1/2, 1)"));
    }
    bisect(|l| {
        if l == 0.0 {
            Ok(true)
        } else {
            approx_malice_condition(l, eta)
        }
    })
}
