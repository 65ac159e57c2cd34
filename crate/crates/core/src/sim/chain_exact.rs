use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{Recorder, SimConfig, SimResult};
use crate::error::Result;
use crate::markov::{build_chain, EdgeKind};

struct Edge {
    cum: f64,
    to: usize,
    reward: [f64; 2],
    blocks: [u64; 2],
    kind: EdgeKind,
}

pub(super) fn run(config: &SimConfig, rng: &mut ChaCha8Rng) -> Result<SimResult> {
    let chain = build_chain(config.profile, &config.params);
    let mut table: Vec<Vec<Edge>> = Vec::with_capacity(chain.len());
    for &state in &chain.states {
        let mut cum = 0.0;
        let mut edges = Vec::new();
        for t in chain.outgoing(state) {
            cum += t.prob;
            let mut reward = [0.0; 2];
            let mut blocks = [0; 2];
            for c in t.credits {
                let i = c.party.index();
                reward[i] += c.count as f64 * config.reward.evaluate(config.s.arg(c.arg))?;
                blocks[i] += c.count as u64;
            }
            edges.push(Edge {
                cum,
                to: chain.index_of(t.to).expect("edge to unknown state"),
                reward,
                blocks,
                kind: t.kind,
            });
        }
        table.push(edges);
    }

    let mut rec = Recorder::new(config.profile);
    let mut at = 0usize;
    for _ in 0..config.rounds {
        let start = chain.states[at];
        let u: f64 = rng.random();
        let mut paid = [0.0; 2];
        if let Some(e) = table[at].iter().find(|e| u < e.cum) {
            paid = e.reward;
            rec.blocks[0] += e.blocks[0];
            rec.blocks[1] += e.blocks[1];
            match e.kind {
                EdgeKind::ForkStart => rec.forks_attempted += 1,
                EdgeKind::ForkSuccess => rec.forks_succeeded += 1,
                _ => {}
            }
            at = e.to;
        }
        rec.round(Some(start), paid);
    }
    Ok(rec.finish(config))
}
