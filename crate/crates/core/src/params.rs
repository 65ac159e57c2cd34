//! Round-level network parameters and the small modeling formulas built on
//! them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Probabilities per round for the whole network and their split between the
/// two parties.
///
/// Party 1 is always the one with the smaller optimization improvement. All
/// derived fields are computed once in [`NetworkParams::new`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NetworkParams {
    p0: f64,
    q0: f64,
    lambda1: f64,
    lambda2: f64,
    p1: f64,
    p2: f64,
    q1: f64,
    q2: f64,
    eta: f64,
}

impl NetworkParams {
    /// Builds the parameter set from party 1's power share and the network
    /// probabilities of finding a better solution (`p0`) and a valid nonce
    /// (`q0`) in one round.
    pub fn new(lambda1: f64, p0: f64, q0: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda1) {
            return Err(Error::domain("lambda1", lambda1, "must lie in [0, 1]"));
        }
        if !(0.0..1.0).contains(&p0) {
            return Err(Error::domain("p0", p0, "must lie in [0, 1)"));
        }
        if !(0.0..1.0).contains(&q0) {
            return Err(Error::domain("q0", q0, "must lie in [0, 1)"));
        }
        if p0 + q0 <= 0.0 {
            return Err(Error::domain("p0 + q0", p0 + q0, "must be positive"));
        }
        let lambda2 = 1.0 - lambda1;
        Ok(Self {
            p0,
            q0,
            lambda1,
            lambda2,
            p1: lambda1 * p0,
            p2: lambda2 * p0,
            q1: lambda1 * q0,
            q2: lambda2 * q0,
            eta: p0 / (p0 + q0),
        })
    }

    /// Builds parameters from a security-overhead ratio and a total per-round
    /// event budget `p0 + q0`.
    pub fn from_eta_total(lambda1: f64, eta: f64, total: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::domain("eta", eta, "must lie in [0, 1]"));
        }
        if !(total > 0.0) {
            return Err(Error::domain("p0 + q0", total, "must be positive"));
        }
        Self::new(lambda1, eta * total, (1.0 - eta) * total)
    }

    /// Builds parameters from a security-overhead ratio with `q0` held fixed.
    pub fn from_eta_q0(lambda1: f64, eta: f64, q0: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&eta) {
            return Err(Error::domain("eta", eta, "must lie in [0, 1)"));
        }
        Self::new(lambda1, eta * q0 / (1.0 - eta), q0)
    }

    pub fn p0(&self) -> f64 {
        self.p0
    }
    pub fn q0(&self) -> f64 {
        self.q0
    }
    pub fn lambda1(&self) -> f64 {
        self.lambda1
    }
    pub fn lambda2(&self) -> f64 {
        self.lambda2
    }
    pub fn p1(&self) -> f64 {
        self.p1
    }
    pub fn p2(&self) -> f64 {
        self.p2
    }
    pub fn q1(&self) -> f64 {
        self.q1
    }
    pub fn q2(&self) -> f64 {
        self.q2
    }

    /// Security-overhead ratio `p0 / (p0 + q0)`.
    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// The same network with the power split swapped between the parties.
    pub fn with_lambda1(&self, lambda1: f64) -> Result<Self> {
        Self::new(lambda1, self.p0, self.q0)
    }
}

/// Optimization improvements of the two parties, with `s1 < s2 < 2 * s1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPair")]
pub struct ImprovementPair {
    s1: f64,
    s2: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPair {
    s1: f64,
    s2: f64,
}

impl TryFrom<RawPair> for ImprovementPair {
    type Error = Error;

    fn try_from(raw: RawPair) -> Result<Self> {
        Self::new(raw.s1, raw.s2)
    }
}

impl ImprovementPair {
    pub fn new(s1: f64, s2: f64) -> Result<Self> {
        if !(s1 > 0.0) || !s1.is_finite() {
            return Err(Error::domain("s1", s1, "must be positive"));
        }
        if !(s2 > s1 && s2 < 2.0 * s1) {
            return Err(Error::domain("s2", s2, "must satisfy s1 < s2 < 2 * s1"));
        }
        Ok(Self { s1, s2 })
    }

    pub fn s1(&self) -> f64 {
        self.s1
    }

    pub fn s2(&self) -> f64 {
        self.s2
    }

    /// Value of a reward argument for this pair.
    pub fn arg(&self, arg: RewardArg) -> f64 {
        match arg {
            RewardArg::S1 => self.s1,
            RewardArg::S2 => self.s2,
            RewardArg::S2MinusS1 => self.s2 - self.s1,
            RewardArg::TwoS1MinusS2 => 2.0 * self.s1 - self.s2,
            RewardArg::TwoS2MinusTwoS1 => 2.0 * self.s2 - 2.0 * self.s1,
        }
    }
}

/// The improvement expressions a block reward can be evaluated at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RewardArg {
    S1,
    S2,
    S2MinusS1,
    TwoS1MinusS2,
    TwoS2MinusTwoS1,
}

/// Above this hit ratio `q_total * T / 2^L` stops approximating the
/// per-round success probability.
pub const MAX_TARGET_RATIO: f64 = 0.01;

/// Approximate per-round nonce probability from the number of hash trials per
/// round and the per-trial hit ratio `T / 2^L`.
pub fn difficulty_to_q0(q_total: f64, target_ratio: f64) -> Result<f64> {
    if !(q_total >= 0.0) {
        return Err(Error::domain("q_total", q_total, "must be non-negative"));
    }
    if !(target_ratio >= 0.0) {
        return Err(Error::domain(
            "target_ratio",
            target_ratio,
            "must be non-negative",
        ));
    }
    if target_ratio > MAX_TARGET_RATIO {
        return Err(Error::domain(
            "target_ratio",
            target_ratio,
            "must be <= 0.01 for the linear approximation to hold",
        ));
    }
    let q0 = q_total * target_ratio;
    Ok(q0.min(1.0 - f64::EPSILON / 2.0))
}

/// Order of convergence from four consecutive objective values, newest
/// first.
pub fn estimate_convergence_order(y3: f64, y2: f64, y1: f64, y0: f64) -> Result<f64> {
    let d3 = y3 - y2;
    let d2 = y2 - y1;
    let d1 = y1 - y0;
    if !(d3 > 0.0 && d2 > 0.0 && d1 > 0.0) {
        return Err(Error::Degenerate(
            "objective sequence must strictly improve at every step".into(),
        ));
    }
    let den = (d2 / d1).ln();
    if den == 0.0 {
        return Err(Error::Degenerate(
            "successive improvement ratio is exactly 1".into(),
        ));
    }
    Ok((d3 / d2).ln() / den)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_split() {
        let p = NetworkParams::new(0.5, 0.001, 0.001).unwrap();
        for v in [p.p1(), p.q1(), p.p2(), p.q2()] {
            assert_eq!(v, 0.0005);
        }
        assert_eq!(p.eta(), 0.5);
    }

    #[test]
    fn fig5_point() {
        let p = NetworkParams::new(0.3, 0.005, 0.001).unwrap();
        assert!((p.eta() - 5.0 / 6.0).abs() < 1e-15);
        assert!((p.p1() - 0.0015).abs() < 1e-15);
        assert!((p.q2() - 0.0007).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_share() {
        match NetworkParams::new(1.2, 0.001, 0.001) {
            Err(Error::Domain { field, .. }) => assert_eq!(field, "lambda1"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(NetworkParams::new(0.5, 0.0, 0.0).is_err());
        assert!(NetworkParams::new(0.5, 1.0, 0.1).is_err());
        assert!(NetworkParams::new(0.5, 0.1, -0.1).is_err());
    }

    #[test]
    fn eta_constructors() {
        let p = NetworkParams::from_eta_total(0.4, 0.75, 0.004).unwrap();
        assert!((p.p0() - 0.003).abs() < 1e-15);
        assert!((p.eta() - 0.75).abs() < 1e-12);
        let p = NetworkParams::from_eta_q0(0.4, 5.0 / 6.0, 0.001).unwrap();
        assert!((p.p0() - 0.005).abs() < 1e-12);
    }

    #[test]
    fn improvement_pair_bounds() {
        assert!(ImprovementPair::new(1.0, 1.0001).is_ok());
        assert!(ImprovementPair::new(1.0, 1.0).is_err());
        assert!(ImprovementPair::new(1.0, 2.0).is_err());
        assert!(ImprovementPair::new(0.0, 0.5).is_err());
        let s = ImprovementPair::new(2.0, 3.0).unwrap();
        assert_eq!(s.arg(RewardArg::TwoS1MinusS2), 1.0);
        assert_eq!(s.arg(RewardArg::TwoS2MinusTwoS1), 2.0);
    }

    #[test]
    fn q0_from_difficulty() {
        assert!((difficulty_to_q0(1000.0, 1e-6).unwrap() - 1e-3).abs() < 1e-18);
        assert_eq!(difficulty_to_q0(12345.0, 0.0).unwrap(), 0.0);
        assert!(difficulty_to_q0(-1.0, 1e-6).is_err());
        assert!(difficulty_to_q0(10.0, 0.02).is_err());
        // exact Bernoulli complement for 500 trials
        let approx = difficulty_to_q0(500.0, 2e-6).unwrap();
        let exact = 1.0 - (1.0 - 2e-6f64).powi(500);
        assert!((approx - 1e-3).abs() < 1e-15);
        assert!((approx - exact).abs() < 1e-6);
        assert!(difficulty_to_q0(1e9, 0.01).unwrap() < 1.0);
    }

    #[test]
    fn convergence_order() {
        let y: Vec<f64> = (1..=4).map(|n| 1.0 - 2f64.powi(-n)).collect();
        let s = estimate_convergence_order(y[3], y[2], y[1], y[0]).unwrap();
        assert!((s - 1.0).abs() < 1e-12);

        // e_{n+1} = e_n^2 from e_0 = 0.5, taken at n = 2..5
        let mut e = vec![0.5f64];
        for _ in 0..5 {
            let last = *e.last().unwrap();
            e.push(last * last);
        }
        let y: Vec<f64> = e.iter().map(|e| 1.0 - e).collect();
        let s = estimate_convergence_order(y[5], y[4], y[3], y[2]).unwrap();
        assert!((s - 2.0).abs() < 0.05, "s = {s}");

        assert!(matches!(
            estimate_convergence_order(1.0, 1.0, 1.0, 1.0),
            Err(Error::Degenerate(_))
        ));
        assert!(matches!(
            estimate_convergence_order(4.0, 3.0, 2.0, 1.0),
            Err(Error::Degenerate(_))
        ));
    }
}
