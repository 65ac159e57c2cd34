use pouw_core::malice::{honest_wins_prob, longrange_success_prob};
use pouw_core::markov::{payoff_table, PayoffTable};
use pouw_core::sim::{
    run_longrange_sim, run_mining_sim, run_random_walk_sim, LongrangeConfig, SimConfig,
};
use pouw_core::NetworkParams;
use rayon::prelude::*;

use crate::config::{LongrangeSpec, SimulateConfig};
use crate::error::{invalid, CliError, Result};
use crate::output::{Cell, Table};

pub enum Plan {
    Mining {
        runs: Vec<SimConfig>,
        analytic: PayoffTable,
    },
    Longrange {
        /// `None` for the plain random walk.
        params: Option<NetworkParams>,
        p_h: f64,
        runs: Vec<LongrangeConfig>,
    },
}

fn need<T>(v: Option<T>, what: &str) -> Result<T> {
    v.ok_or_else(|| CliError::Config(format!("missing [{what}] section")))
}

pub fn prepare(config: SimulateConfig) -> Result<Plan> {
    if config.seeds.is_empty() {
        return Err(CliError::Config("seeds must not be empty".into()));
    }
    let mut seeds = config.seeds.clone();
    seeds.sort_unstable();
    seeds.dedup();
    if let Some(lr) = &config.longrange {
        return prepare_longrange(&config, lr, &seeds);
    }
    let params = need(config.network, "network")?.params()?;
    let reward = need(config.reward.clone(), "reward")?;
    let s = need(config.improvement, "improvement")?;
    if config.profiles.is_empty() {
        return Err(CliError::Config("profiles must not be empty".into()));
    }
    let mut profiles = config.profiles.clone();
    profiles.sort_by_key(|p| p.label());
    profiles.dedup();
    let mut runs = Vec::new();
    for &profile in &profiles {
        for &seed in &seeds {
            let mut c = SimConfig::new(profile, params, reward.clone(), s, config.rounds, seed);
            c.mode = config.mode;
            c.truncate_at_state9 = config.truncate;
            c.tie_rule = config.tie_rule;
            c.validate().map_err(invalid("simulation"))?;
            runs.push(c);
        }
    }
    let analytic = payoff_table(&params, &reward, &s).map_err(invalid("analytic payoffs"))?;
    Ok(Plan::Mining { runs, analytic })
}

fn prepare_longrange(config: &SimulateConfig, lr: &LongrangeSpec, seeds: &[u64]) -> Result<Plan> {
    if lr.depths.is_empty() {
        return Err(CliError::Config(
            "longrange.depths must not be empty".into(),
        ));
    }
    if lr.trials == 0 {
        return Err(CliError::Config(
            "longrange.trials must be at least 1".into(),
        ));
    }
    let (params, p_h) = match lr.p_h {
        Some(p_h) => {
            if !(0.0..=1.0).contains(&p_h) {
                return Err(CliError::Config(format!(
                    "longrange.p_h = {p_h} must lie in [0, 1]"
                )));
            }
            (None, p_h)
        }
        None => {
            let params = need(config.network, "network")?.params()?;
            let p_h = honest_wins_prob(&params).map_err(invalid("block race"))?;
            (Some(params), p_h)
        }
    };
    let mut depths = lr.depths.clone();
    depths.sort_unstable();
    depths.dedup();
    let mut runs = Vec::new();
    for &k in &depths {
        for &seed in seeds {
            let mut c = LongrangeConfig::new(k, lr.trials, seed);
            if let Some(a) = lr.abandon_at {
                c.abandon_at = a;
            }
            if let Some(cap) = lr.step_cap {
                c.step_cap = cap;
            }
            if k >= c.abandon_at {
                return Err(CliError::Config(format!(
                    "depth {k} must be below abandon_at = {}",
                    c.abandon_at
                )));
            }
            runs.push(c);
        }
    }
    Ok(Plan::Longrange { params, p_h, runs })
}

pub fn run(plan: &Plan) -> Result<Table> {
    match plan {
        Plan::Mining { runs, analytic } => run_mining(runs, analytic),
        Plan::Longrange { params, p_h, runs } => run_longrange(params.as_ref(), *p_h, runs),
    }
}

fn run_mining(runs: &[SimConfig], analytic: &PayoffTable) -> Result<Table> {
    let results = runs
        .par_iter()
        .map(run_mining_sim)
        .collect::<pouw_core::Result<Vec<_>>>()?;
    let mut table = Table::new(
        [
            "profile",
            "seed",
            "analytic_1",
            "analytic_2",
            "sim_1_mean",
            "sim_1_stderr",
            "sim_1_n",
            "sim_2_mean",
            "sim_2_stderr",
            "sim_2_n",
            "blocks_1",
            "blocks_2",
            "forks_attempted",
            "forks_succeeded",
            "cycles",
            "unclassified",
            "within_3se_1",
            "within_3se_2",
        ]
        .map(String::from)
        .to_vec(),
    );
    for (c, r) in runs.iter().zip(&results) {
        let want = analytic.get(c.profile);
        let [e1, e2] = r.reward_per_round;
        table.push(vec![
            c.profile.label().into(),
            c.seed.into(),
            want[0].into(),
            want[1].into(),
            e1.mean.into(),
            e1.stderr.into(),
            e1.n.into(),
            e2.mean.into(),
            e2.stderr.into(),
            e2.n.into(),
            r.blocks_mined[0].into(),
            r.blocks_mined[1].into(),
            r.forks_attempted.into(),
            r.forks_succeeded.into(),
            r.cycles.into(),
            r.unclassified.into(),
            e1.within(want[0], 3.0).into(),
            e2.within(want[1], 3.0).into(),
        ]);
    }
    Ok(table)
}

fn run_longrange(
    params: Option<&NetworkParams>,
    p_h: f64,
    runs: &[LongrangeConfig],
) -> Result<Table> {
    let results = runs
        .par_iter()
        .map(|c| match params {
            Some(p) => run_longrange_sim(p, c),
            None => run_random_walk_sim(p_h, c),
        })
        .collect::<pouw_core::Result<Vec<_>>>()?;
    let mut table = Table::new(
        [
            "depth",
            "seed",
            "p_h",
            "analytic",
            "sim_mean",
            "sim_stderr",
            "sim_n",
            "successes",
            "abandoned",
            "censored",
            "within_3se",
        ]
        .map(String::from)
        .to_vec(),
    );
    for (c, r) in runs.iter().zip(&results) {
        let analytic = longrange_success_prob(c.k, p_h).ok();
        let est = r.success_rate;
        table.push(vec![
            u64::from(c.k).into(),
            c.seed.into(),
            p_h.into(),
            analytic.into(),
            est.mean.into(),
            est.stderr.into(),
            est.n.into(),
            r.successes.into(),
            r.abandoned.into(),
            r.censored.into(),
            analytic
                .map(|a| est.within(a, 3.0))
                .map_or(Cell::Empty, Cell::from),
        ]);
    }
    Ok(table)
}
