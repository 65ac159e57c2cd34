use pouw_core::markov::secure_region;
use pouw_core::RewardArg;
use rayon::prelude::*;

use crate::config::RegionFileConfig;
use crate::error::{invalid, CliError, Result};
use crate::output::{Cell, Table};

pub struct Plan {
    config: RegionFileConfig,
}

pub fn prepare(config: RegionFileConfig) -> Result<Plan> {
    if config.rewards.is_empty() {
        return Err(CliError::Config(
            "at least one [[rewards]] entry is required".into(),
        ));
    }
    let region = &config.region;
    if region.eta_grid.is_empty() {
        return Err(CliError::Config("region.eta_grid must not be empty".into()));
    }
    if let Some(bad) = region.eta_grid.iter().find(|&&e| !(e > 0.0 && e < 1.0)) {
        return Err(CliError::Config(format!("eta = {bad} must lie in (0, 1)")));
    }
    if !(region.resolution > 0.0 && region.resolution <= 0.5) {
        return Err(CliError::Config(
            "region.resolution must lie in (0, 0.5]".into(),
        ));
    }
    for eta in &region.eta_grid {
        region
            .mode
            .params(0.5, *eta)
            .map_err(invalid("region.mode"))?;
    }
    let mut names: Vec<&str> = config.rewards.iter().map(|r| r.name.as_str()).collect();
    names.sort_unstable();
    if names.windows(2).any(|w| w[0] == w[1]) {
        return Err(CliError::Config("reward names must be unique".into()));
    }
    let s = config.improvement;
    for named in &config.rewards {
        for arg in [RewardArg::S1, RewardArg::S2, RewardArg::TwoS2MinusTwoS1] {
            named
                .reward
                .evaluate(s.arg(arg))
                .map_err(invalid(&named.name))?;
        }
    }
    Ok(Plan { config })
}

/// One row per eta: the selfish boundary of every reward curve, then the
/// race boundary, the necessary long-range bound and the `eta = 1/2` line.
pub fn run(plan: &Plan) -> Result<Table> {
    let c = &plan.config;
    let mut grid = c.region.clone();
    grid.eta_grid.sort_by(f64::total_cmp);
    grid.eta_grid.dedup();
    let per_reward = c
        .rewards
        .par_iter()
        .map(|r| secure_region(&r.reward, &c.improvement, &grid))
        .collect::<pouw_core::Result<Vec<_>>>()?;

    let mut columns = vec!["eta".to_string()];
    columns.extend(c.rewards.iter().map(|r| format!("selfish_{}", r.name)));
    columns.extend(["malice", "longrange_bound", "half"].map(String::from));
    let mut table = Table::new(columns);
    for (i, &eta) in grid.eta_grid.iter().enumerate() {
        let first = &per_reward[0][i];
        let mut row: Vec<Cell> = vec![eta.into()];
        row.extend(
            per_reward
                .iter()
                .map(|points| points[i].selfish_boundary.into()),
        );
        row.extend([
            first.malice_boundary.into(),
            first.longrange_bound.into(),
            0.5.into(),
        ]);
        table.push(row);
    }
    Ok(table)
}
