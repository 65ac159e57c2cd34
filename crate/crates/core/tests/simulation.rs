use pouw_core::malice::honest_wins_prob;
use pouw_core::markov::{build_chain, payoff_table, steady_state};
use pouw_core::sim::{
    run_longrange_sim, run_mining_sim, run_random_walk_sim, run_replicated, Estimate,
    LongrangeConfig, SimConfig, SimMode,
};
use pouw_core::{ImprovementPair, NetworkParams, RewardFunction, StrategyProfile};

fn config(profile: StrategyProfile, params: NetworkParams, rounds: u64, seed: u64) -> SimConfig {
    SimConfig::new(
        profile,
        params,
        RewardFunction::linear(0.5, 1.0, 3.0).unwrap(),
        ImprovementPair::new(2.0, 3.0).unwrap(),
        rounds,
        seed,
    )
}

fn fast_params(lambda1: f64) -> NetworkParams {
    NetworkParams::new(lambda1, 0.05, 0.02).unwrap()
}

#[test]
fn chain_exact_matches_payoffs() {
    for (lambda1, seed) in [(0.3, 11), (0.45, 12)] {
        let params = fast_params(lambda1);
        let base = config(StrategyProfile::HH, params, 1_000_000, seed);
        let table = payoff_table(&params, &base.reward, &base.s).unwrap();
        for profile in StrategyProfile::ALL {
            let r = run_mining_sim(&SimConfig {
                profile,
                ..base.clone()
            })
            .unwrap();
            for party in 0..2 {
                let est = r.reward_per_round[party];
                let want = table.get(profile)[party];
                assert!(
                    est.within(want, 3.0),
                    "{profile} party {}: {est:?} vs {want}",
                    party + 1
                );
            }
        }
    }
}

/// Sojourns are long, so single-run occupancy fractions are strongly
/// autocorrelated; the spread across replicates gives an honest error bar.
#[test]
fn occupancy_matches_stationary_distribution() {
    let params = fast_params(0.35);
    for profile in StrategyProfile::ALL {
        let rep = run_replicated(&config(profile, params, 200_000, 21), 30).unwrap();
        let chain = build_chain(profile, &params);
        let w = steady_state(&chain).unwrap();
        for (i, &state) in chain.states.iter().enumerate() {
            let xs: Vec<f64> = rep
                .runs
                .iter()
                .map(|r| r.occupancy_of(state).unwrap())
                .collect();
            let est = Estimate::from_samples(&xs);
            assert!(
                est.within(w[i], 4.0),
                "{profile} state {state}: {est:?} vs {}",
                w[i]
            );
        }
    }
}

#[test]
fn same_seed_same_run() {
    for mode in [SimMode::ChainExact, SimMode::Behavioral] {
        let c = SimConfig {
            mode,
            ..config(StrategyProfile::FSH, fast_params(0.4), 50_000, 5)
        };
        assert_eq!(run_mining_sim(&c).unwrap(), run_mining_sim(&c).unwrap());
        let other = SimConfig {
            seed: 6,
            ..c.clone()
        };
        assert_ne!(
            run_mining_sim(&c).unwrap().total_reward,
            run_mining_sim(&other).unwrap().total_reward
        );
    }
}

#[test]
fn replicates_are_independent_of_thread_count() {
    let c = config(StrategyProfile::HIF, fast_params(0.4), 20_000, 8);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(3)
        .build()
        .unwrap();
    let wide = pool.install(|| run_replicated(&c, 6).unwrap());
    let narrow = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(|| run_replicated(&c, 6).unwrap());
    assert_eq!(wide, narrow);
}

#[test]
fn powerless_party_earns_nothing() {
    for mode in [SimMode::ChainExact, SimMode::Behavioral] {
        for profile in StrategyProfile::ALL {
            let c = SimConfig {
                mode,
                ..config(profile, fast_params(0.0), 100_000, 2)
            };
            let r = run_mining_sim(&c).unwrap();
            assert_eq!(r.total_reward[0], 0.0, "{profile} {mode:?}");
            assert_eq!(r.blocks_mined[0], 0);
            assert!(r.total_reward[1] > 0.0);
        }
    }
}

#[test]
fn behavioral_agrees_with_analytic_payoffs() {
    let params = fast_params(0.4);
    let base = SimConfig {
        mode: SimMode::Behavioral,
        ..config(StrategyProfile::HH, params, 200_000, 31)
    };
    let table = payoff_table(&params, &base.reward, &base.s).unwrap();
    for profile in StrategyProfile::ALL {
        let rep = run_replicated(
            &SimConfig {
                profile,
                ..base.clone()
            },
            40,
        )
        .unwrap();
        for party in 0..2 {
            let est = rep.reward_per_round[party];
            let want = table.get(profile)[party];
            assert!(
                est.within(want, 3.0),
                "{profile} party {}: {est:?} vs {want}",
                party + 1
            );
        }
        let unclassified: f64 = rep.runs.iter().map(|r| r.unclassified).sum();
        assert_eq!(unclassified, 0.0, "{profile}");
    }
}

/// With `s1 : s2 = 2 : 3` no competition reaches a fourth block, so the
/// truncation switch never fires.
#[test]
fn truncation_is_inert_at_two_to_three() {
    for profile in StrategyProfile::ALL {
        let on = SimConfig {
            mode: SimMode::Behavioral,
            ..config(profile, fast_params(0.4), 100_000, 4)
        };
        let off = SimConfig {
            truncate_at_state9: false,
            ..on.clone()
        };
        assert_eq!(
            run_mining_sim(&on).unwrap(),
            run_mining_sim(&off).unwrap(),
            "{profile}"
        );
    }
}

/// Ruin probability with an absorbing barrier at `top`.
fn ruin_with_barrier(k: u32, p_h: f64, top: u32) -> f64 {
    let rho = (1.0 - p_h) / p_h;
    (rho.powi(k as i32 + 1) - rho.powi(top as i32 + 1)) / (1.0 - rho.powi(top as i32 + 1))
}

#[test]
fn random_walk_matches_ruin_formula() {
    for (k, p_h, seed) in [(0, 0.6, 1), (2, 0.55, 2), (4, 0.7, 3)] {
        let c = LongrangeConfig::new(k, 50_000, seed);
        let r = run_random_walk_sim(p_h, &c).unwrap();
        assert_eq!(r.censored, 0);
        let want = ruin_with_barrier(k, p_h, c.abandon_at);
        assert!(
            r.success_rate.within(want, 3.0),
            "k {k}: {:?} vs {want}",
            r.success_rate
        );
    }
}

#[test]
fn fair_walk_from_even_almost_always_overtakes() {
    let r = run_random_walk_sim(0.5, &LongrangeConfig::new(0, 20_000, 7)).unwrap();
    assert!(r.success_rate.mean > 0.95, "{:?}", r.success_rate);
}

#[test]
fn longrange_race_matches_block_probability() {
    let params = NetworkParams::new(0.3, 0.005, 0.001).unwrap();
    let p_h = honest_wins_prob(&params).unwrap();
    for (k, seed) in [(0, 41), (1, 42), (3, 43)] {
        let c = LongrangeConfig::new(k, 40_000, seed);
        let r = run_longrange_sim(&params, &c).unwrap();
        let want = ruin_with_barrier(k, p_h, c.abandon_at);
        assert!(
            r.success_rate.within(want, 3.0),
            "k {k}: {:?} vs {want}",
            r.success_rate
        );
    }
}
