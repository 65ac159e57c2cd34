use serde::Serialize;

use super::chain::{Party, StrategyProfile};
use super::payoff::payoff;
use super::values::relative_values;
use crate::error::{Error, Result};
use crate::params::{ImprovementPair, NetworkParams, RewardArg};
use crate::reward::RewardFunction;

/// Coefficients of the two selfishness conditions
///
/// ```text
/// α1 R(s1) + β1 R(2s1 − s2) − γ1 R(s2 − s1) > 0
/// α2 R(s2) + β2 R(s2 − s1) + γ2 R(2s2 − 2s1) > 0
/// ```
///
/// The first compares party 1's honest and fork-and-steal payoffs, the second
/// party 2's honest and ignore-and-fork payoffs, both cross-multiplied by the
/// chains' normalizing constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SecurityCoefficients {
    pub alpha1: f64,
    pub beta1: f64,
    pub gamma1: f64,
    pub alpha2: f64,
    pub beta2: f64,
    pub gamma2: f64,
    /// Overhead ratio of the parameters the coefficients were computed at.
    pub eta: f64,
}

pub fn security_coefficients(params: &NetworkParams) -> Result<SecurityCoefficients> {
    let v = relative_values(params)?;
    let s03 = v.sum(0..=3);
    let s49 = v.sum(4..=9);
    let s_fs = v.sum(10..=13);
    let s_if = v.sum(14..=21);
    let hh = s03 + s49;
    let hif = s03 + s_if;
    Ok(SecurityCoefficients {
        alpha1: s_fs * (v[2] + v[3] + v[5] + v[9]) - hh * (v[12] + v[13]),
        beta1: s_fs * (v[6] + v[7]),
        gamma1: hh * (v[12] + v[13]),
        alpha2: (s_if - s49) * (v[1] + v[3]) + hif * v[7] - 2.0 * hh * (v[16] + v[19]),
        beta2: hif * (v[4] + v[5]),
        gamma2: hif * (v[8] + v[9]) - hh * (v[20] + v[21]),
        eta: params.eta(),
    })
}

impl SecurityCoefficients {
    /// Left-hand side of the fork-and-steal condition.
    pub fn fs_lhs(&self, reward: &RewardFunction, s: &ImprovementPair) -> Result<f64> {
        let r = |arg| reward.evaluate(s.arg(arg));
        Ok(
            self.alpha1 * r(RewardArg::S1)? + self.beta1 * r(RewardArg::TwoS1MinusS2)?
                - self.gamma1 * r(RewardArg::S2MinusS1)?,
        )
    }

    /// Left-hand side of the ignore-and-fork condition.
    pub fn if_lhs(&self, reward: &RewardFunction, s: &ImprovementPair) -> Result<f64> {
        let r = |arg| reward.evaluate(s.arg(arg));
        Ok(self.alpha2 * r(RewardArg::S2)?
            + self.beta2 * r(RewardArg::S2MinusS1)?
            + self.gamma2 * r(RewardArg::TwoS2MinusTwoS1)?)
    }

    /// `(γ1 − α1) / β1`
    pub fn fs_ratio(&self) -> Result<f64> {
        if !(self.beta1 > 0.0) {
            return Err(Error::Degenerate(format!(
                "beta1 = {} is not positive",
                self.beta1
            )));
        }
        Ok((self.gamma1 - self.alpha1) / self.beta1)
    }

    /// `−α2 / (β2 + γ2)`
    pub fn if_ratio(&self) -> Result<f64> {
        let den = self.beta2 + self.gamma2;
        if den == 0.0 {
            return Err(Error::Degenerate("beta2 + gamma2 is zero".into()));
        }
        Ok(-self.alpha2 / den)
    }

    /// The larger of the two ratios; `R(0)` must exceed it times every `R(s)`.
    pub fn binding_ratio(&self) -> Result<f64> {
        Ok(self.fs_ratio()?.max(self.if_ratio()?))
    }
}

/// `(α1 + β1 − γ1 > 0, α2 + β2 + γ2 > 0)`
pub fn check_necessary_conditions(coeffs: &SecurityCoefficients) -> (bool, bool) {
    (
        coeffs.alpha1 + coeffs.beta1 - coeffs.gamma1 > 0.0,
        coeffs.alpha2 + coeffs.beta2 + coeffs.gamma2 > 0.0,
    )
}

/// Both forms of the selfishness check at one parameter point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SelfishVerdict {
    pub coeffs: SecurityCoefficients,
    pub fs_lhs: f64,
    pub if_lhs: f64,
    /// `π1(H,H) − π1(FS,H)`
    pub fs_gap: f64,
    /// `π2(H,H) − π2(H,IF)`
    pub if_gap: f64,
}

impl SelfishVerdict {
    pub fn fs_secure(&self) -> bool {
        self.fs_lhs > 0.0
    }

    pub fn if_secure(&self) -> bool {
        self.if_lhs > 0.0
    }

    /// Coefficient form: both conditions hold.
    pub fn secure(&self) -> bool {
        self.fs_secure() && self.if_secure()
    }

    /// Payoff form: honest mining pays strictly more for both parties.
    pub fn payoff_secure(&self) -> bool {
        self.fs_gap > 0.0 && self.if_gap > 0.0
    }

    pub fn forms_agree(&self) -> bool {
        self.secure() == self.payoff_secure()
    }
}

pub fn check_selfish_security(
    params: &NetworkParams,
    reward: &RewardFunction,
    s: &ImprovementPair,
) -> Result<SelfishVerdict> {
    let coeffs = security_coefficients(params)?;
    let pi = |profile, party| payoff(profile, party, params, reward, s);
    Ok(SelfishVerdict {
        coeffs,
        fs_lhs: coeffs.fs_lhs(reward, s)?,
        if_lhs: coeffs.if_lhs(reward, s)?,
        fs_gap: pi(StrategyProfile::HH, Party::One)? - pi(StrategyProfile::FSH, Party::One)?,
        if_gap: pi(StrategyProfile::HH, Party::Two)? - pi(StrategyProfile::HIF, Party::Two)?,
    })
}

/// Security against a selfish adversary controlling share `lambda_s`.
///
/// The adversary may act as party 1 (forking and stealing with
/// `lambda1 = lambda_s`) or as party 2 (ignoring and forking with
/// `lambda2 = lambda_s`); the network is secure only if neither pays.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdversaryVerdict {
    pub lambda_s: f64,
    pub fs_lhs: f64,
    pub if_lhs: f64,
}

impl AdversaryVerdict {
    pub fn secure(&self) -> bool {
        self.fs_lhs > 0.0 && self.if_lhs > 0.0
    }
}

pub fn check_adversary_security(
    network: &NetworkParams,
    lambda_s: f64,
    reward: &RewardFunction,
    s: &ImprovementPair,
) -> Result<AdversaryVerdict> {
    let as_one = security_coefficients(&network.with_lambda1(lambda_s)?)?;
    let as_two = security_coefficients(&network.with_lambda1(1.0 - lambda_s)?)?;
    Ok(AdversaryVerdict {
        lambda_s,
        fs_lhs: as_one.fs_lhs(reward, s)?,
        if_lhs: as_two.if_lhs(reward, s)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fs_coefficients_positive() {
        for lambda1 in [0.05, 0.3, 0.5, 0.9] {
            let c =
                security_coefficients(&NetworkParams::new(lambda1, 0.002, 0.003).unwrap()).unwrap();
            assert!(c.beta1 > 0.0 && c.gamma1 > 0.0 && c.beta2 > 0.0);
        }
    }

    #[test]
    fn lemma_bound_on_beta2() {
        for lambda1 in [0.1, 0.25, 0.5, 0.75] {
            for (p0, q0) in [(0.005, 0.001), (0.002, 0.0015)] {
                let c =
                    security_coefficients(&NetworkParams::new(lambda1, p0, q0).unwrap()).unwrap();
                assert!(c.beta2 > -16.0 / 5.0 * c.gamma2);
            }
        }
    }

    #[test]
    fn fs_fails_when_rates_equal() {
        let r = RewardFunction::constant(1.0, 1.5).unwrap();
        let s = ImprovementPair::new(1.0, 1.5).unwrap();
        for lambda1 in [0.1, 0.3, 0.5] {
            let c =
                security_coefficients(&NetworkParams::new(lambda1, 0.001, 0.001).unwrap()).unwrap();
            let lhs = c.alpha1 * r.evaluate(1.0).unwrap()
                + (c.beta1 - c.gamma1) * r.evaluate(0.5).unwrap();
            assert!(lhs < 0.0);
            assert_eq!(lhs, c.fs_lhs(&r, &s).unwrap());
        }
    }

    #[test]
    fn necessary_conditions_at_high_eta() {
        let c = security_coefficients(&NetworkParams::new(0.5, 0.005, 0.001).unwrap()).unwrap();
        assert_eq!(check_necessary_conditions(&c), (true, true));
        assert!(c.binding_ratio().unwrap() < 1.0);
    }

    #[test]
    fn necessary_condition_fails_at_equal_rates() {
        let fails = [0.1, 0.3, 0.5].iter().any(|&l| {
            let c = security_coefficients(&NetworkParams::new(l, 0.001, 0.001).unwrap()).unwrap();
            !check_necessary_conditions(&c).0
        });
        assert!(fails);
    }

    #[test]
    fn gap_is_scaled_lhs() {
        let r = RewardFunction::power(1.2, 0.5, 1.0, 3.0).unwrap();
        let s = ImprovementPair::new(2.0, 3.0).unwrap();
        let p = NetworkParams::new(0.42, 0.003, 0.0017).unwrap();
        let verdict = check_selfish_security(&p, &r, &s).unwrap();
        let v = relative_values(&p).unwrap();
        let (hh, fs, hif) = (
            v.total(StrategyProfile::HH),
            v.total(StrategyProfile::FSH),
            v.total(StrategyProfile::HIF),
        );
        let fs_scaled = verdict.fs_gap * hh * fs / p.q1();
        let if_scaled = verdict.if_gap * hh * hif / p.q2();
        assert!((fs_scaled - verdict.fs_lhs).abs() < 1e-9 * verdict.fs_lhs.abs());
        assert!((if_scaled - verdict.if_lhs).abs() < 1e-9 * verdict.if_lhs.abs());
    }
}
