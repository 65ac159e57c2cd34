//! The closed-form relative values against a dense linear solve of each
//! chain's balance equations.

use nalgebra::{DMatrix, DVector};
use pouw_core::markov::{
    build_chain, payoff, payoff_from_events, steady_state, ChainSpec, Party, StrategyProfile,
};
use pouw_core::{ImprovementPair, NetworkParams, RewardFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Solves `w P = w`, `sum w = 1` by replacing one balance row with the
/// normalization.
fn dense_stationary(chain: &ChainSpec) -> Vec<f64> {
    let p = chain.transition_matrix();
    let n = p.len();
    let mut a = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            a[(j, i)] = p[i][j] - if i == j { 1.0 } else { 0.0 };
        }
    }
    for j in 0..n {
        a[(n - 1, j)] = 1.0;
    }
    let mut b = DVector::<f64>::zeros(n);
    b[n - 1] = 1.0;
    a.lu()
        .solve(&b)
        .expect("singular balance system")
        .iter()
        .copied()
        .collect()
}

fn random_params(rng: &mut ChaCha8Rng) -> NetworkParams {
    NetworkParams::new(
        rng.random_range(0.01..0.99),
        rng.random_range(1e-4..0.05),
        rng.random_range(1e-4..0.05),
    )
    .unwrap()
}

#[test]
fn recursions_match_dense_solve() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for profile in StrategyProfile::ALL {
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let chain = build_chain(profile, &random_params(&mut rng));
            let w = steady_state(&chain).unwrap();
            let oracle = dense_stationary(&chain);
            for (a, b) in w.iter().zip(&oracle) {
                worst = worst.max((a - b).abs());
            }
        }
        assert!(worst < 1e-10, "{profile}: max diff {worst:e}");
    }
}

#[test]
fn paper_scale_rates() {
    // rates two orders of magnitude smaller stress the conditioning
    let p = NetworkParams::new(0.3, 0.005, 0.001).unwrap();
    for profile in StrategyProfile::ALL {
        let chain = build_chain(profile, &p);
        let w = steady_state(&chain).unwrap();
        let oracle = dense_stationary(&chain);
        for (a, b) in w.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-10);
        }
    }
}

#[test]
fn payoffs_from_dense_solution() {
    let r = RewardFunction::power(1.2, 0.5, 1.0, 3.0).unwrap();
    let s = ImprovementPair::new(2.0, 2.9).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let params = random_params(&mut rng);
        for profile in StrategyProfile::ALL {
            let chain = build_chain(profile, &params);
            let w = dense_stationary(&chain);
            for party in [Party::One, Party::Two] {
                let mut oracle = 0.0;
                for (t, c) in chain.reward_events() {
                    if c.party == party {
                        let i = chain.index_of(t.from).unwrap();
                        oracle +=
                            w[i] * t.prob * c.count as f64 * r.evaluate(s.arg(c.arg)).unwrap();
                    }
                }
                let closed = payoff(profile, party, &params, &r, &s).unwrap();
                assert!(
                    (closed - oracle).abs() < 1e-9 * oracle.max(1e-12),
                    "{profile} {party:?}"
                );
            }
        }
    }
}

#[test]
fn constant_reward_splits_block_rate() {
    // with R = 1 the two payoffs add up to the rate of finalized blocks
    let r = RewardFunction::constant(1.0, 2.0).unwrap();
    let s = ImprovementPair::new(1.0, 1.7).unwrap();
    let params = NetworkParams::new(0.4, 0.003, 0.002).unwrap();
    let chain = build_chain(StrategyProfile::HH, &params);
    let w = steady_state(&chain).unwrap();
    let block_rate: f64 = chain
        .transitions
        .iter()
        .filter(|t| !t.credits.is_empty())
        .map(|t| w[chain.index_of(t.from).unwrap()] * t.prob)
        .sum();
    let total = payoff_from_events(&chain, Party::One, &r, &s).unwrap()
        + payoff_from_events(&chain, Party::Two, &r, &s).unwrap();
    assert!((total - block_rate).abs() < 1e-15);
    // every edge back to 0 finalizes exactly one block in HH
    let into_zero: f64 = chain
        .transitions
        .iter()
        .filter(|t| t.to == 0)
        .map(|t| w[chain.index_of(t.from).unwrap()] * t.prob)
        .sum();
    assert!(into_zero < block_rate);
}
