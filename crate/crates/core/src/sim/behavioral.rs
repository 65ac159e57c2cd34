//! Protocol-level simulation. Each round every miner either tries to find a
//! better solution or hashes the one it holds, independently of the other.
//!
//! Solution values are kept as integer combinations `a * s1 + b * s2` so
//! improvements come out exactly as the reward arguments of the analytic
//! model, without drift from an ever-growing benchmark.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{Recorder, SimConfig, SimResult, TieRule};
use crate::error::Result;
use crate::markov::{StateId, StrategyProfile};

type Value = (i64, i64);

const UNIT: [Value; 2] = [(1, 0), (0, 1)];

fn sub(a: Value, b: Value) -> Value {
    (a.0 - b.0, a.1 - b.1)
}

fn add(a: Value, b: Value) -> Value {
    (a.0 + b.0, a.1 + b.1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Task {
    Solving,
    Hashing(Value),
}

#[derive(Debug, Clone, Copy)]
enum Fork {
    None,
    /// Party 1 withholds a block on its own solution, then one on the
    /// solution the honest party just published.
    Steal {
        base: Value,
        own: Value,
        stolen: Value,
        private: u8,
    },
    /// Party 2 keeps mining on the tip the honest block replaced: a private
    /// block on `first`, then a second solution on top of it.
    Ignore {
        base: Value,
        first: Value,
        private: u8,
    },
}

struct World<'a> {
    config: &'a SimConfig,
    bench: Value,
    tasks: [Task; 2],
    /// Blocks mined since the last return to state 0, private ones included.
    count: u32,
    fork: Fork,
    /// Public blocks a running fork may still orphan.
    pending: Vec<(usize, Value)>,
    rec: Recorder,
    paid: [f64; 2],
}

impl<'a> World<'a> {
    fn value(&self, v: Value) -> f64 {
        v.0 as f64 * self.config.s.s1() + v.1 as f64 * self.config.s.s2()
    }

    fn better(&self, sol: Value, bench: Value) -> bool {
        self.value(sub(sol, bench)) > 0.0
    }

    fn credit(&mut self, party: usize, improvement: Value) -> Result<()> {
        self.paid[party] += self.config.reward.evaluate(self.value(improvement))?;
        self.rec.blocks[party] += 1;
        Ok(())
    }

    fn held(&self, i: usize) -> Value {
        match self.tasks[i] {
            Task::Hashing(v) => v,
            Task::Solving => unreachable!("miner {i} holds no solution"),
        }
    }

    /// Tip a solving miner builds on.
    fn base_for(&self, i: usize) -> Value {
        match self.fork {
            Fork::Ignore {
                first, private: 1, ..
            } if i == 1 => first,
            _ => self.bench,
        }
    }

    /// Keeps `i`'s solution only if it still improves the public benchmark.
    fn revalidate(&mut self, i: usize) {
        if let Task::Hashing(v) = self.tasks[i] {
            if !self.better(v, self.bench) {
                self.tasks[i] = Task::Solving;
            }
        }
    }

    fn after_public_block(&mut self) {
        self.count += 1;
        if self.config.truncate_at_state9 && self.count >= 4 {
            self.tasks = [Task::Solving; 2];
        }
    }

    fn classify(&self) -> Option<StateId> {
        use Task::*;
        let h = |t: Task| matches!(t, Hashing(_));
        match self.fork {
            Fork::None => {
                let hif = self.config.profile == StrategyProfile::HIF;
                match (h(self.tasks[0]), h(self.tasks[1]), self.count) {
                    (false, false, _) => Some(0),
                    (false, true, 0) => Some(1),
                    (true, false, 0) => Some(2),
                    (true, true, 0) => Some(3),
                    (false, true, 1) => Some(4),
                    (true, true, 1) => Some(5),
                    (true, false, 2) => Some(6),
                    (true, true, 2) => Some(7),
                    (false, true, 3) => Some(if hif { 20 } else { 8 }),
                    (true, true, 3) => Some(if hif { 21 } else { 9 }),
                    _ => None,
                }
            }
            Fork::Steal { private, .. } => Some(10 + 2 * private + h(self.tasks[1]) as u8),
            Fork::Ignore { private, .. } => {
                let stage = match (private, self.tasks[1]) {
                    (0, _) => 0,
                    (_, Solving) => 1,
                    (_, Hashing(_)) => 2,
                };
                Some(14 + stage + 3 * h(self.tasks[0]) as u8)
            }
        }
    }

    fn block(&mut self, i: usize) -> Result<()> {
        match self.fork {
            Fork::None => self.public_block(i),
            Fork::Steal { .. } if i == 0 => self.steal_private(),
            Fork::Ignore { .. } if i == 1 => self.ignore_private(),
            _ => self.honest_beats_fork(i),
        }
    }

    fn public_block(&mut self, i: usize) -> Result<()> {
        let sol = self.held(i);
        let other = 1 - i;
        if self.count == 0 && matches!(self.tasks[other], Task::Hashing(_)) {
            let attack = match (self.config.profile, i) {
                (StrategyProfile::FSH, 1) => Some(Fork::Steal {
                    base: self.bench,
                    own: self.held(0),
                    stolen: sol,
                    private: 0,
                }),
                (StrategyProfile::HIF, 0) => Some(Fork::Ignore {
                    base: self.bench,
                    first: self.held(1),
                    private: 0,
                }),
                _ => None,
            };
            if let Some(fork) = attack {
                self.pending.push((i, sub(sol, self.bench)));
                self.fork = fork;
                self.bench = sol;
                self.tasks[i] = Task::Solving;
                self.count = 1;
                self.rec.forks_attempted += 1;
                return Ok(());
            }
        }
        self.credit(i, sub(sol, self.bench))?;
        self.bench = sol;
        self.tasks[i] = Task::Solving;
        self.revalidate(other);
        self.after_public_block();
        Ok(())
    }

    fn steal_private(&mut self) -> Result<()> {
        let Fork::Steal {
            base,
            own,
            stolen,
            private,
        } = self.fork
        else {
            unreachable!()
        };
        if private == 0 {
            self.fork = Fork::Steal {
                base,
                own,
                stolen,
                private: 1,
            };
            self.tasks[0] = Task::Hashing(stolen);
            self.count += 1;
            return Ok(());
        }
        self.credit(0, sub(own, base))?;
        self.credit(0, sub(stolen, own))?;
        self.pending.clear();
        self.bench = stolen;
        // the honest party gives up its pending solution after losing
        self.tasks = [Task::Solving; 2];
        self.fork = Fork::None;
        self.rec.forks_succeeded += 1;
        Ok(())
    }

    fn ignore_private(&mut self) -> Result<()> {
        let Fork::Ignore {
            base,
            first,
            private,
        } = self.fork
        else {
            unreachable!()
        };
        if private == 0 {
            self.fork = Fork::Ignore {
                base,
                first,
                private: 1,
            };
            self.tasks[1] = Task::Solving;
            self.count += 1;
            return Ok(());
        }
        let second = self.held(1);
        self.credit(1, sub(first, base))?;
        self.credit(1, sub(second, first))?;
        self.pending.clear();
        self.bench = second;
        self.tasks[1] = Task::Solving;
        self.revalidate(0);
        self.fork = Fork::None;
        self.rec.forks_succeeded += 1;
        Ok(())
    }

    /// The honest party extends the public chain to two blocks past the
    /// fork point, which the attacker cannot overtake any more.
    fn honest_beats_fork(&mut self, i: usize) -> Result<()> {
        for (party, imp) in std::mem::take(&mut self.pending) {
            self.credit(party, imp)?;
        }
        let sol = self.held(i);
        self.credit(i, sub(sol, self.bench))?;
        self.bench = sol;
        self.tasks[i] = Task::Solving;
        self.fork = Fork::None;
        self.revalidate(1 - i);
        self.after_public_block();
        Ok(())
    }

    fn round(&mut self, rng: &mut ChaCha8Rng) -> Result<()> {
        let start = self.classify();
        let p = [self.config.params.p1(), self.config.params.p2()];
        let q = [self.config.params.q1(), self.config.params.q2()];
        let mut found = [false; 2];
        let mut mined = [false; 2];
        for i in 0..2 {
            let u: f64 = rng.random();
            match self.tasks[i] {
                Task::Solving => found[i] = u < p[i],
                Task::Hashing(_) => mined[i] = u < q[i],
            }
        }
        for i in 0..2 {
            if found[i] {
                self.tasks[i] = Task::Hashing(add(self.base_for(i), UNIT[i]));
            }
        }
        let winner = match mined {
            [true, true] => Some(match self.config.tie_rule {
                TieRule::Party1 => 0,
                TieRule::Party2 => 1,
                TieRule::Coin => rng.random_bool(0.5) as usize,
            }),
            [true, false] => Some(0),
            [false, true] => Some(1),
            [false, false] => None,
        };
        if let Some(i) = winner {
            self.block(i)?;
        }
        if matches!(self.fork, Fork::None) && self.tasks == [Task::Solving; 2] {
            self.count = 0;
            self.bench = (0, 0);
        }
        let paid = std::mem::take(&mut self.paid);
        self.rec.round(start, paid);
        Ok(())
    }
}

pub(super) fn run(config: &SimConfig, rng: &mut ChaCha8Rng) -> Result<SimResult> {
    let mut world = World {
        config,
        bench: (0, 0),
        tasks: [Task::Solving; 2],
        count: 0,
        fork: Fork::None,
        pending: Vec::new(),
        rec: Recorder::new(config.profile),
        paid: [0.0; 2],
    };
    for _ in 0..config.rounds {
        world.round(rng)?;
    }
    Ok(world.rec.finish(config))
}
