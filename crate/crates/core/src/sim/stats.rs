use serde::Serialize;

/// A sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub n: u64,
}

impl Estimate {
    /// Number of standard errors between the estimate and `target`.
    pub fn z(&self, target: f64) -> f64 {
        (self.mean - target) / self.stderr
    }

    pub fn within(&self, target: f64, sigmas: f64) -> bool {
        (self.mean - target).abs() <= sigmas * self.stderr
    }

    /// Mean and standard error of independent replicate values.
    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            f64::NAN
        };
        Self {
            mean,
            stderr: (var / n as f64).sqrt(),
            n: n as u64,
        }
    }

    /// Bernoulli proportion `hits / n` with its binomial standard error.
    pub fn proportion(hits: u64, n: u64) -> Self {
        let p = hits as f64 / n as f64;
        Self {
            mean: p,
            stderr: (p * (1.0 - p) / n as f64).sqrt(),
            n,
        }
    }
}

/// Reward totals split into regeneration cycles (returns to state 0), for
/// the ratio-estimator standard error of a per-round reward rate.
#[derive(Debug, Clone, Default)]
pub(crate) struct CycleStats {
    cycles: Vec<(u64, [f64; 2])>,
    open_len: u64,
    open_reward: [f64; 2],
}

impl CycleStats {
    /// Records one round; `at_zero` says whether the round started in the
    /// regeneration state.
    pub fn round(&mut self, at_zero: bool, prev_at_zero: bool, reward: [f64; 2]) {
        if at_zero && !prev_at_zero && self.open_len > 0 {
            self.cycles.push((self.open_len, self.open_reward));
            self.open_len = 0;
            self.open_reward = [0.0; 2];
        }
        self.open_len += 1;
        self.open_reward[0] += reward[0];
        self.open_reward[1] += reward[1];
    }

    pub fn completed(&self) -> usize {
        self.cycles.len()
    }

    /// Standard error of `total / rounds` for party `i`. The unfinished final
    /// cycle is left out.
    pub fn stderr(&self, i: usize) -> f64 {
        let n = self.cycles.len();
        if n < 2 {
            return f64::NAN;
        }
        let len: f64 = self.cycles.iter().map(|c| c.0 as f64).sum();
        let rew: f64 = self.cycles.iter().map(|c| c.1[i]).sum();
        let r = rew / len;
        let mean_len = len / n as f64;
        let ss: f64 = self
            .cycles
            .iter()
            .map(|c| (c.1[i] - r * c.0 as f64).powi(2))
            .sum();
        (ss / (n - 1) as f64 / n as f64).sqrt() / mean_len
    }
}
