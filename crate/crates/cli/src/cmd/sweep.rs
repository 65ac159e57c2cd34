use pouw_core::malice::check_malice_security;
use pouw_core::markov::{check_adversary_security, payoff, security_coefficients, EtaMode};
use pouw_core::reward::{compute_mu, RewardShape};
use pouw_core::sim::{derive_seed, run_mining_sim, Estimate, SimConfig};
use pouw_core::{
    Error, ImprovementPair, NetworkParams, Party, RewardArg, RewardFunction, StrategyProfile,
};
use rayon::prelude::*;

use crate::config::{SweepConfig, SweepSim};
use crate::error::{invalid, CliError, Result};
use crate::output::{Cell, Table};

struct Point {
    /// Axis values in column order.
    axes: Vec<f64>,
    lambda_s: f64,
    eta: Option<f64>,
    k: Option<f64>,
    /// Party 1 holds the adversary's share.
    as_one: NetworkParams,
    /// Party 2 holds the adversary's share.
    as_two: NetworkParams,
    reward: RewardFunction,
    seed: u64,
}

pub struct Plan {
    axis_names: Vec<&'static str>,
    points: Vec<Point>,
    s: ImprovementPair,
    sim: Option<SweepSim>,
    has_eta: bool,
}

const ARGS: [RewardArg; 5] = [
    RewardArg::S1,
    RewardArg::S2,
    RewardArg::S2MinusS1,
    RewardArg::TwoS1MinusS2,
    RewardArg::TwoS2MinusTwoS1,
];

pub fn prepare(config: SweepConfig) -> Result<Plan> {
    let axes = &config.axes;
    let lambdas = axes.lambda_s.values("lambda_s")?;
    if let Some(bad) = lambdas.iter().find(|&&l| !(l > 0.0 && l < 1.0)) {
        return Err(CliError::Config(format!(
            "lambda_s = {bad} must lie in (0, 1)"
        )));
    }
    let opt =
        |a: &Option<crate::config::Axis>, name| a.as_ref().map(|a| a.values(name)).transpose();
    let (p0s, q0s, etas, ks) = (
        opt(&axes.p0, "p0")?,
        opt(&axes.q0, "q0")?,
        opt(&axes.eta, "eta")?,
        opt(&axes.k, "k")?,
    );
    let rates = match (&p0s, &q0s, &etas) {
        (Some(p), Some(q), None) => Rates::Direct(p.clone(), q.clone()),
        (None, None, Some(e)) => Rates::Eta(e.clone(), config.eta_mode),
        _ => {
            return Err(CliError::Config(
                "sweep needs either both p0 and q0 axes or an eta axis".into(),
            ))
        }
    };
    let intercept = match (config.reward.shape(), &ks) {
        (_, None) => None,
        (RewardShape::Linear { b, .. }, Some(_)) => Some(*b),
        _ => return Err(CliError::Config("a k axis needs a linear reward".into())),
    };

    let mut axis_names = vec!["lambda_s"];
    match rates {
        Rates::Direct(..) => axis_names.extend(["p0", "q0"]),
        Rates::Eta(..) => axis_names.push("eta"),
    }
    if ks.is_some() {
        axis_names.push("k");
    }

    let s = config.improvement;
    let k_values: Vec<Option<f64>> = ks.map_or(vec![None], |v| v.into_iter().map(Some).collect());
    let mut points = Vec::new();
    for &lambda_s in &lambdas {
        for (rate_axes, eta, base) in rates.expand(lambda_s)? {
            for &k in &k_values {
                let reward = match (k, intercept) {
                    (Some(k), Some(b)) => RewardFunction::linear(k, b, config.reward.s_max())
                        .map_err(invalid("reward"))?,
                    _ => config.reward.clone(),
                };
                for arg in ARGS {
                    reward.evaluate(s.arg(arg)).map_err(invalid("reward"))?;
                }
                let mut axes = vec![lambda_s];
                axes.extend(&rate_axes);
                axes.extend(k);
                let seed = derive_seed(config.seed, points.len() as u64);
                points.push(Point {
                    axes,
                    lambda_s,
                    eta,
                    k,
                    as_one: base,
                    as_two: base
                        .with_lambda1(1.0 - lambda_s)
                        .map_err(invalid("network"))?,
                    reward,
                    seed,
                });
            }
        }
    }
    if let Some(sim) = &config.simulation {
        if sim.rounds == 0 {
            return Err(CliError::Config(
                "simulation.rounds must be at least 1".into(),
            ));
        }
    }
    Ok(Plan {
        axis_names,
        points,
        s,
        sim: config.simulation,
        has_eta: matches!(rates, Rates::Eta(..)),
    })
}

/// Rate-axis values, the eta value if swept, and the parameters.
type RatePoint = (Vec<f64>, Option<f64>, NetworkParams);

enum Rates {
    Direct(Vec<f64>, Vec<f64>),
    Eta(Vec<f64>, EtaMode),
}

impl Rates {
    /// Rate-axis values, the eta axis value if any, and parameters with
    /// `lambda1 = lambda_s`, in nested grid order.
    fn expand(&self, lambda_s: f64) -> Result<Vec<RatePoint>> {
        match self {
            Rates::Direct(p0s, q0s) => {
                let mut out = Vec::new();
                for &p0 in p0s {
                    for &q0 in q0s {
                        let p = NetworkParams::new(lambda_s, p0, q0).map_err(invalid("network"))?;
                        out.push((vec![p0, q0], None, p));
                    }
                }
                Ok(out)
            }
            Rates::Eta(etas, mode) => etas
                .iter()
                .map(|&eta| {
                    let p = mode.params(lambda_s, eta).map_err(invalid("network"))?;
                    Ok((vec![eta], Some(eta), p))
                })
                .collect(),
        }
    }
}

struct Analytic {
    eta: f64,
    hh_fs: f64,
    fs: f64,
    hh_if: f64,
    iff: f64,
    fs_lhs: f64,
    if_lhs: f64,
    binding: Option<f64>,
    mu: Option<f64>,
    malice: Option<bool>,
    sim: Option<[Estimate; 2]>,
}

fn undefined_to_none<T>(r: pouw_core::Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::Degenerate(_) | Error::NotApplicable(_) | Error::Domain { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

/// Difference of two runs on the same seed. The runs share random numbers,
/// so adding variances overstates the error.
fn gap(honest: &SimConfig, selfish: &SimConfig, party: usize) -> Result<Estimate> {
    let a = run_mining_sim(honest)?.reward_per_round[party];
    let b = run_mining_sim(selfish)?.reward_per_round[party];
    Ok(Estimate {
        mean: a.mean - b.mean,
        stderr: a.stderr.hypot(b.stderr),
        n: a.n.min(b.n),
    })
}

fn evaluate(point: &Point, s: &ImprovementPair, sim: Option<&SweepSim>) -> Result<Analytic> {
    let r = &point.reward;
    let pi = |profile, party, p: &NetworkParams| payoff(profile, party, p, r, s);
    let verdict = check_adversary_security(&point.as_one, point.lambda_s, r, s)?;
    let coeffs = security_coefficients(&point.as_one)?;
    let sim = match sim {
        None => None,
        Some(sim) => {
            let cfg = |profile, params| {
                let mut c = SimConfig::new(profile, params, r.clone(), *s, sim.rounds, point.seed);
                c.mode = sim.mode;
                c.truncate_at_state9 = sim.truncate;
                c
            };
            let fs = gap(
                &cfg(StrategyProfile::HH, point.as_one),
                &cfg(StrategyProfile::FSH, point.as_one),
                0,
            )?;
            let iff = gap(
                &cfg(StrategyProfile::HH, point.as_two),
                &cfg(StrategyProfile::HIF, point.as_two),
                1,
            )?;
            Some([fs, iff])
        }
    };
    Ok(Analytic {
        eta: point.as_one.eta(),
        hh_fs: pi(StrategyProfile::HH, Party::One, &point.as_one)?,
        fs: pi(StrategyProfile::FSH, Party::One, &point.as_one)?,
        hh_if: pi(StrategyProfile::HH, Party::Two, &point.as_two)?,
        iff: pi(StrategyProfile::HIF, Party::Two, &point.as_two)?,
        fs_lhs: verdict.fs_lhs,
        if_lhs: verdict.if_lhs,
        binding: undefined_to_none(coeffs.binding_ratio())?,
        mu: undefined_to_none(compute_mu(&coeffs))?,
        malice: undefined_to_none(check_malice_security(&point.as_one))?,
        sim,
    })
}

pub fn run(plan: &Plan) -> Result<Table> {
    let results: Vec<Analytic> = plan
        .points
        .par_iter()
        .map(|p| evaluate(p, &plan.s, plan.sim.as_ref()))
        .collect::<Result<_>>()?;

    // smallest grid eta at which honest mining beats forking and stealing,
    // per (lambda_s, k)
    let fs_min_eta = |point: &Point| -> Option<f64> {
        plan.points
            .iter()
            .zip(&results)
            .filter(|(q, a)| q.lambda_s == point.lambda_s && q.k == point.k && a.hh_fs > a.fs)
            .filter_map(|(q, _)| q.eta)
            .reduce(f64::min)
    };

    let mut columns: Vec<String> = plan.axis_names.iter().map(|s| s.to_string()).collect();
    if !plan.has_eta {
        columns.push("eta".into());
    }
    columns.extend(
        [
            "payoff_hh_1",
            "payoff_fsh_1",
            "payoff_hh_2",
            "payoff_hif_2",
            "fs_gap",
            "if_gap",
            "fs_lhs",
            "if_lhs",
            "binding_ratio",
            "mu",
        ]
        .map(String::from),
    );
    if plan.has_eta {
        columns.push("fs_min_eta".into());
    }
    if plan.sim.is_some() {
        for side in ["fs", "if"] {
            for stat in ["mean", "stderr", "n"] {
                columns.push(format!("sim_{side}_gap_{stat}"));
            }
        }
    }
    columns.extend(["fs_secure", "if_secure", "secure", "malice_secure"].map(String::from));

    let mut table = Table::new(columns);
    for (point, a) in plan.points.iter().zip(&results) {
        let mut row: Vec<Cell> = point.axes.iter().map(|&x| x.into()).collect();
        if !plan.has_eta {
            row.push(a.eta.into());
        }
        row.extend([
            a.hh_fs.into(),
            a.fs.into(),
            a.hh_if.into(),
            a.iff.into(),
            (a.hh_fs - a.fs).into(),
            (a.hh_if - a.iff).into(),
            a.fs_lhs.into(),
            a.if_lhs.into(),
            a.binding.into(),
            a.mu.into(),
        ]);
        if plan.has_eta {
            row.push(fs_min_eta(point).into());
        }
        if let Some(sim) = a.sim {
            for e in sim {
                row.extend([e.mean.into(), e.stderr.into(), e.n.into()]);
            }
        }
        row.extend([
            (a.fs_lhs > 0.0).into(),
            (a.if_lhs > 0.0).into(),
            (a.fs_lhs > 0.0 && a.if_lhs > 0.0).into(),
            a.malice.into(),
        ]);
        table.push(row);
    }
    Ok(table)
}
