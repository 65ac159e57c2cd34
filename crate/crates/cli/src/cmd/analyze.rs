use pouw_core::malice::{
    approx_malice_condition, check_malice_security, honest_wins_prob, longrange_necessary_bound,
};
use pouw_core::markov::{
    check_necessary_conditions, check_selfish_security, payoff_table, security_coefficients,
};
use pouw_core::reward::{check_linear_slope, compute_mu, RewardShape};
use pouw_core::{Error, NetworkParams};

use crate::config::AnalyzeConfig;
use crate::error::{CliError, Result};
use crate::output::{Cell, Table};

pub struct Plan {
    params: NetworkParams,
    config: AnalyzeConfig,
}

pub fn prepare(config: AnalyzeConfig) -> Result<Plan> {
    let params = config.network.params()?;
    if config.grid == 0 {
        return Err(CliError::Config("grid must be at least 1".into()));
    }
    if config.reward.s_max() < config.improvement.s2() {
        return Err(CliError::Config(format!(
            "reward s_max = {} does not cover s2 = {}",
            config.reward.s_max(),
            config.improvement.s2()
        )));
    }
    Ok(Plan { params, config })
}

/// `None` for quantities the inputs leave undefined.
fn defined<T>(r: pouw_core::Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::Degenerate(_) | Error::NotApplicable(_) | Error::Domain { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

pub fn run(plan: &Plan) -> Result<Table> {
    let (p, r, s) = (&plan.params, &plan.config.reward, &plan.config.improvement);
    let c = security_coefficients(p)?;
    let pay = payoff_table(p, r, s)?;
    let verdict = check_selfish_security(p, r, s)?;
    let (fs_nec, if_nec) = check_necessary_conditions(&c);
    let principle = defined(r.check_principle(&c, plan.config.grid))?;
    let binding = defined(c.binding_ratio())?;
    let mu = defined(compute_mu(&c))?;
    let slope = match (r.shape(), mu) {
        (RewardShape::Linear { k, b }, Some(mu)) => {
            Some(check_linear_slope(*k, *b, r.s_max(), mu)?)
        }
        _ => None,
    };
    let race = defined(honest_wins_prob(p))?;
    let malice = defined(check_malice_security(p))?;
    let approx = defined(approx_malice_condition(p.lambda1(), p.eta()))?;

    let mut cols: Vec<(&str, Cell)> = vec![
        ("lambda1", p.lambda1().into()),
        ("p0", p.p0().into()),
        ("q0", p.q0().into()),
        ("s1", s.s1().into()),
        ("s2", s.s2().into()),
        ("eta", p.eta().into()),
        ("alpha1", c.alpha1.into()),
        ("beta1", c.beta1.into()),
        ("gamma1", c.gamma1.into()),
        ("alpha2", c.alpha2.into()),
        ("beta2", c.beta2.into()),
        ("gamma2", c.gamma2.into()),
        ("payoff_hh_1", pay.hh[0].into()),
        ("payoff_hh_2", pay.hh[1].into()),
        ("payoff_fsh_1", pay.fsh[0].into()),
        ("payoff_fsh_2", pay.fsh[1].into()),
        ("payoff_hif_1", pay.hif[0].into()),
        ("payoff_hif_2", pay.hif[1].into()),
        ("fs_lhs", verdict.fs_lhs.into()),
        ("if_lhs", verdict.if_lhs.into()),
        ("fs_gap", verdict.fs_gap.into()),
        ("if_gap", verdict.if_gap.into()),
        ("binding_ratio", binding.into()),
        ("mu", mu.into()),
        ("worst_s", principle.map(|v| v.worst_s).into()),
        (
            "longrange_bound",
            defined(longrange_necessary_bound(p.eta()))?.into(),
        ),
        ("honest_wins_prob", race.into()),
    ];
    cols.extend([
        ("fs_secure", verdict.fs_secure().into()),
        ("if_secure", verdict.if_secure().into()),
        ("selfish_secure", verdict.secure().into()),
        ("payoff_secure", verdict.payoff_secure().into()),
        ("fs_necessary", fs_nec.into()),
        ("if_necessary", if_nec.into()),
        (
            "principle_holds",
            principle.map(|v| v.principle_holds).into(),
        ),
        (
            "principle_necessary_only",
            principle.map(|v| v.necessary_only).into(),
        ),
        ("slope_sufficient", slope.map(|v| v.sufficient).into()),
        ("malice_secure", malice.into()),
        ("approx_malice_secure", approx.into()),
    ]);
    let (names, row): (Vec<_>, Vec<_>) = cols.into_iter().unzip();
    let mut table = Table::new(names.into_iter().map(String::from).collect());
    table.push(row);
    table.single = true;
    Ok(table)
}
