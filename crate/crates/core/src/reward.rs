//! Block-reward curves `R(s)` and the design rules that bound them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::markov::SecurityCoefficients;

/// Default number of grid points used when a reward curve is scanned.
pub const DEFAULT_GRID: usize = 1000;

/// Functional form of a reward curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RewardShape {
    /// `R(s) = b`
    Constant { b: f64 },
    /// `R(s) = k * s + b`
    Linear { k: f64, b: f64 },
    /// `R(s) = c * s^e + b`
    Power { c: f64, e: f64, b: f64 },
    /// Piecewise-linear interpolation between `(s, R)` knots.
    Table { knots: Vec<(f64, f64)> },
}

#[derive(Deserialize)]
struct RawReward {
    #[serde(flatten)]
    shape: RewardShape,
    s_max: f64,
}

/// A block-reward curve on the improvement domain `[0, s_max]`.
///
/// Construction guarantees `R(s) > 0` and that `R` is non-decreasing on the
/// domain. Concavity is not required; see [`RewardFunction::properties`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawReward")]
pub struct RewardFunction {
    #[serde(flatten)]
    shape: RewardShape,
    s_max: f64,
}

impl TryFrom<RawReward> for RewardFunction {
    type Error = Error;

    fn try_from(raw: RawReward) -> Result<Self> {
        Self::new(raw.shape, raw.s_max)
    }
}

impl RewardFunction {
    pub fn new(shape: RewardShape, s_max: f64) -> Result<Self> {
        if !(s_max > 0.0) || !s_max.is_finite() {
            return Err(Error::domain("s_max", s_max, "must be positive and finite"));
        }
        match &shape {
            RewardShape::Constant { b } => check_intercept(*b)?,
            RewardShape::Linear { k, b } => {
                check_intercept(*b)?;
                if !(*k >= 0.0) || !k.is_finite() {
                    return Err(Error::domain("k", *k, "slope must be non-negative"));
                }
            }
            RewardShape::Power { c, e, b } => {
                check_intercept(*b)?;
                if !(*c >= 0.0) || !c.is_finite() {
                    return Err(Error::domain("c", *c, "coefficient must be non-negative"));
                }
                if !(*e > 0.0 && *e <= 1.0) {
                    return Err(Error::domain("e", *e, "exponent must lie in (0, 1]"));
                }
            }
            RewardShape::Table { knots } => check_table(knots, s_max)?,
        }
        Ok(Self { shape, s_max })
    }

    pub fn constant(b: f64, s_max: f64) -> Result<Self> {
        Self::new(RewardShape::Constant { b }, s_max)
    }

    pub fn linear(k: f64, b: f64, s_max: f64) -> Result<Self> {
        Self::new(RewardShape::Linear { k, b }, s_max)
    }

    pub fn power(c: f64, e: f64, b: f64, s_max: f64) -> Result<Self> {
        Self::new(RewardShape::Power { c, e, b }, s_max)
    }

    pub fn table(knots: Vec<(f64, f64)>, s_max: f64) -> Result<Self> {
        Self::new(RewardShape::Table { knots }, s_max)
    }

    pub fn shape(&self) -> &RewardShape {
        &self.shape
    }

    pub fn s_max(&self) -> f64 {
        self.s_max
    }

    /// `R(s)` for `s` in `[0, s_max]`.
    pub fn evaluate(&self, s: f64) -> Result<f64> {
        if !(0.0..=self.s_max).contains(&s) {
            return Err(Error::domain("s", s, "must lie in [0, s_max]"));
        }
        Ok(self.eval_unchecked(s))
    }

    /// `R(0)`, the constant part of every block reward.
    pub fn base(&self) -> f64 {
        self.eval_unchecked(0.0)
    }

    pub(crate) fn eval_unchecked(&self, s: f64) -> f64 {
        match &self.shape {
            RewardShape::Constant { b } => *b,
            RewardShape::Linear { k, b } => k * s + b,
            RewardShape::Power { c, e, b } => c * s.powf(*e) + b,
            RewardShape::Table { knots } => interpolate(knots, s),
        }
    }

    /// Grid of `n` points `s_max * i / n`, `i = 1..=n`, covering `(0, s_max]`.
    fn open_grid(&self, n: usize) -> impl Iterator<Item = f64> + '_ {
        (1..=n).map(move |i| self.s_max * i as f64 / n as f64)
    }

    /// Positivity, monotonicity and concavity read off an evenly spaced grid
    /// of `grid` points on `[0, s_max]`.
    pub fn properties(&self, grid: usize) -> Result<PropertyReport> {
        if grid < 3 {
            return Err(Error::domain(
                "grid",
                grid as f64,
                "needs at least 3 points",
            ));
        }
        let values: Vec<f64> = (0..grid)
            .map(|i| self.eval_unchecked(self.s_max * i as f64 / (grid - 1) as f64))
            .collect();
        let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
        let tol = 1e-12 * scale;

        let positive = values[1..].iter().all(|&v| v > 0.0);
        let monotone = values.windows(2).all(|w| w[1] >= w[0] - tol);
        let mut concave = values.windows(3).all(|w| w[0] - 2.0 * w[1] + w[2] <= tol);
        if let RewardShape::Table { knots } = &self.shape {
            concave &= knots
                .windows(3)
                .all(|k| slope(k[1], k[2]) <= slope(k[0], k[1]) + tol);
        }
        Ok(PropertyReport {
            positive,
            monotone,
            concave,
        })
    }

    /// Checks `R(0) > binding_ratio * R(s)` for every `s` on the grid.
    ///
    /// Only meaningful for `eta > 1/2`. For non-concave curves the check is a
    /// necessary condition, not an equivalence, and the verdict says so.
    pub fn check_principle(
        &self,
        coeffs: &SecurityCoefficients,
        grid: usize,
    ) -> Result<RewardVerdict> {
        if !(coeffs.eta > 0.5) {
            return Err(Error::NotApplicable(format!(
                "reward principle requires eta > 1/2, got {}",
                coeffs.eta
            )));
        }
        if grid == 0 {
            return Err(Error::domain("grid", 0.0, "needs at least 1 point"));
        }
        let ratio = coeffs.binding_ratio()?;
        let (worst_s, worst) = self
            .open_grid(grid)
            .map(|s| (s, ratio * self.eval_unchecked(s)))
            .fold((f64::NAN, f64::NEG_INFINITY), |acc, cur| {
                if cur.1 > acc.1 {
                    cur
                } else {
                    acc
                }
            });
        let concave = self.properties(grid.max(3))?.concave;
        Ok(RewardVerdict {
            principle_holds: self.base() > worst,
            binding_ratio: ratio,
            mu: mu_from_ratio(ratio),
            worst_s,
            necessary_only: !concave,
        })
    }
}

fn check_intercept(b: f64) -> Result<()> {
    if !(b > 0.0) || !b.is_finite() {
        return Err(Error::domain("b", b, "intercept R(0) must be positive"));
    }
    Ok(())
}

fn check_table(knots: &[(f64, f64)], s_max: f64) -> Result<()> {
    if knots.len() < 2 {
        return Err(Error::Config(
            "reward table needs at least two knots".into(),
        ));
    }
    if knots[0].0 != 0.0 {
        return Err(Error::domain(
            "table[0].s",
            knots[0].0,
            "first knot must be at s = 0",
        ));
    }
    let last = knots[knots.len() - 1].0;
    if last < s_max {
        return Err(Error::domain(
            "table[last].s",
            last,
            "knots must cover [0, s_max]",
        ));
    }
    for w in knots.windows(2) {
        if !(w[1].0 > w[0].0) {
            return Err(Error::domain(
                "table.s",
                w[1].0,
                "knot positions must strictly increase",
            ));
        }
        if !(w[1].1 >= w[0].1) {
            return Err(Error::domain(
                "table.R",
                w[1].1,
                "reward must be non-decreasing",
            ));
        }
    }
    if knots
        .iter()
        .any(|k| !(k.1 > 0.0) || !k.1.is_finite() || !k.0.is_finite())
    {
        return Err(Error::Config(
            "reward table values must be finite and positive".into(),
        ));
    }
    Ok(())
}

fn slope(a: (f64, f64), b: (f64, f64)) -> f64 {
    (b.1 - a.1) / (b.0 - a.0)
}

fn interpolate(knots: &[(f64, f64)], s: f64) -> f64 {
    let i = knots.partition_point(|k| k.0 <= s);
    if i == 0 {
        return knots[0].1;
    }
    if i == knots.len() {
        return knots[knots.len() - 1].1;
    }
    let (a, b) = (knots[i - 1], knots[i]);
    a.1 + (s - a.0) * slope(a, b)
}

/// Result of the grid scan in [`RewardFunction::properties`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PropertyReport {
    pub positive: bool,
    pub monotone: bool,
    pub concave: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RewardVerdict {
    pub principle_holds: bool,
    /// `max{(γ1 − α1)/β1, −α2/(β2 + γ2)}`
    pub binding_ratio: f64,
    /// Largest admissible `R(s) / R(0)`; infinite when the ratio is not positive.
    pub mu: f64,
    /// Grid point where `binding_ratio * R(s)` peaks.
    pub worst_s: f64,
    /// Set when `R` is not concave: the principle is then necessary only.
    pub necessary_only: bool,
}

fn mu_from_ratio(ratio: f64) -> f64 {
    if ratio > 0.0 {
        1.0 / ratio
    } else {
        f64::INFINITY
    }
}

/// Upper bound `mu` on `R(s) / R(0)`.
pub fn compute_mu(coeffs: &SecurityCoefficients) -> Result<f64> {
    Ok(mu_from_ratio(coeffs.binding_ratio()?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SlopeVerdict {
    /// `0 <= k < (mu - 1) * b / s_max`
    pub sufficient: bool,
    /// `mu <= 1`: no reward curve can satisfy the principle.
    pub necessary_violated: bool,
}

/// Sufficient slope bound for a linear reward `k * s + b` on `[0, s_max]`.
pub fn check_linear_slope(k: f64, b: f64, s_max: f64, mu: f64) -> Result<SlopeVerdict> {
    if !(b > 0.0) {
        return Err(Error::domain("b", b, "intercept must be positive"));
    }
    if !(s_max > 0.0) {
        return Err(Error::domain("s_max", s_max, "must be positive"));
    }
    if mu.is_nan() {
        return Err(Error::domain("mu", mu, "must be a number"));
    }
    if mu <= 1.0 {
        return Ok(SlopeVerdict {
            sufficient: false,
            necessary_violated: true,
        });
    }
    let sufficient = k >= 0.0 && (mu.is_infinite() || k < (mu - 1.0) * b / s_max);
    Ok(SlopeVerdict {
        sufficient,
        necessary_violated: false,
    })
}

/// The five example curves `1`, `s + 1`, `1.2√s + 1`, `1.5√s + 1`, `2s + 1`.
pub fn example_rewards(s_max: f64) -> Result<[(&'static str, RewardFunction); 5]> {
    Ok([
        ("R1", RewardFunction::constant(1.0, s_max)?),
        ("R2", RewardFunction::linear(1.0, 1.0, s_max)?),
        ("R3", RewardFunction::power(1.2, 0.5, 1.0, s_max)?),
        ("R4", RewardFunction::power(1.5, 0.5, 1.0, s_max)?),
        ("R5", RewardFunction::linear(2.0, 1.0, s_max)?),
    ])
}
