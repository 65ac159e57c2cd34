//! Transition tables for the three strategy-profile chains.
//!
//! Each table lists only the outgoing transitions that leave a state; the
//! residual probability is an implicit self-loop. Rewards are attached to the
//! transition on which a block becomes final, so a block that a fork attempt
//! could still orphan is credited when the attempt resolves.

use serde::{Deserialize, Serialize};

use crate::params::{NetworkParams, RewardArg};

pub type StateId = u8;

/// Which party plays which strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StrategyProfile {
    /// Both parties mine honestly.
    #[serde(alias = "h,h")]
    HH,
    /// Party 1 (smaller improvement) forks and steals.
    #[serde(alias = "fs,h")]
    FSH,
    /// Party 2 (larger improvement) ignores and forks.
    #[serde(alias = "h,if")]
    HIF,
}

impl StrategyProfile {
    pub const ALL: [StrategyProfile; 3] = [Self::HH, Self::FSH, Self::HIF];

    /// State ids of the profile's chain in ascending order.
    pub fn states(self) -> &'static [StateId] {
        match self {
            Self::HH => &[0, 1, 2, 3, 4, 5, 6, 7, 8, 9],
            Self::FSH => &[0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13],
            Self::HIF => &[0, 1, 2, 3, 14, 15, 16, 17, 18, 19, 20, 21],
        }
    }

    /// The party that deviates, if any.
    pub fn selfish_party(self) -> Option<Party> {
        match self {
            Self::HH => None,
            Self::FSH => Some(Party::One),
            Self::HIF => Some(Party::Two),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::HH => "hh",
            Self::FSH => "fsh",
            Self::HIF => "hif",
        }
    }
}

impl std::fmt::Display for StrategyProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::HH => "(H, H)",
            Self::FSH => "(FS, H)",
            Self::HIF => "(H, IF)",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Party {
    One,
    Two,
}

impl Party {
    pub fn index(self) -> usize {
        match self {
            Party::One => 0,
            Party::Two => 1,
        }
    }

    pub fn other(self) -> Party {
        match self {
            Party::One => Party::Two,
            Party::Two => Party::One,
        }
    }
}

/// Symbolic per-round probability of a transition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Rate {
    P1,
    P2,
    Q1,
    Q2,
}

impl Rate {
    pub fn value(self, params: &NetworkParams) -> f64 {
        match self {
            Rate::P1 => params.p1(),
            Rate::P2 => params.p2(),
            Rate::Q1 => params.q1(),
            Rate::Q2 => params.q2(),
        }
    }
}

/// `count` blocks rewarded `R(arg)` each to `party`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Credit {
    pub party: Party,
    pub arg: RewardArg,
    pub count: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EdgeKind {
    Normal,
    ForkStart,
    ForkSuccess,
    ForkFailure,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Transition {
    pub from: StateId,
    pub to: StateId,
    pub rate: Rate,
    pub prob: f64,
    pub credits: &'static [Credit],
    pub kind: EdgeKind,
}

struct Edge(StateId, StateId, Rate, &'static [Credit], EdgeKind);

const fn c(party: Party, arg: RewardArg, count: u32) -> Credit {
    Credit { party, arg, count }
}

use EdgeKind::{ForkFailure, ForkStart, ForkSuccess, Normal};
use Party::{One, Two};
use Rate::{P1, P2, Q1, Q2};
use RewardArg::{S2MinusS1, TwoS1MinusS2, TwoS2MinusTwoS1, S1, S2};

const ONE_S1: &[Credit] = &[c(One, S1, 1)];
const ONE_2S1: &[Credit] = &[c(One, S1, 2)];
const ONE_2S1_S2: &[Credit] = &[c(One, TwoS1MinusS2, 1)];
const ONE_STEAL: &[Credit] = &[c(One, S1, 1), c(One, S2MinusS1, 1)];
const TWO_S2: &[Credit] = &[c(Two, S2, 1)];
const TWO_2S2: &[Credit] = &[c(Two, S2, 2)];
const TWO_S2_S1: &[Credit] = &[c(Two, S2MinusS1, 1)];
const TWO_2S2_2S1: &[Credit] = &[c(Two, TwoS2MinusTwoS1, 1)];
const NONE: &[Credit] = &[];

/// States 0-2, shared by every profile.
const PREFIX: &[Edge] = &[
    Edge(0, 2, P1, NONE, Normal),
    Edge(0, 1, P2, NONE, Normal),
    Edge(1, 3, P1, NONE, Normal),
    Edge(1, 0, Q2, TWO_S2, Normal),
    Edge(2, 3, P2, NONE, Normal),
    Edge(2, 0, Q1, ONE_S1, Normal),
];

/// States 4-9: the honest competition after party 1 wins the first block
/// while party 2 still holds a better solution.
const CARRY: &[Edge] = &[
    Edge(4, 5, P1, NONE, Normal),
    Edge(4, 0, Q2, TWO_S2_S1, Normal),
    Edge(5, 0, Q1, ONE_S1, Normal),
    Edge(5, 6, Q2, TWO_S2_S1, Normal),
    Edge(6, 0, Q1, ONE_2S1_S2, Normal),
    Edge(6, 7, P2, NONE, Normal),
    Edge(7, 8, Q1, ONE_2S1_S2, Normal),
    Edge(7, 0, Q2, TWO_S2, Normal),
    Edge(8, 9, P1, NONE, Normal),
    Edge(8, 0, Q2, TWO_2S2_2S1, Normal),
    // truncated: state 9 only returns to 0
    Edge(9, 0, Q1, ONE_S1, Normal),
    Edge(9, 0, Q2, TWO_2S2_2S1, Normal),
];

const HH_STATE3: &[Edge] = &[
    Edge(3, 4, Q1, ONE_S1, Normal),
    Edge(3, 0, Q2, TWO_S2, Normal),
];

// 10: party 1 hashes its own solution, party 2 solves
// 11: party 1 hashes its own solution, party 2 hashes its next block
// 12: party 1 hashes the stolen solution, party 2 solves
// 13: party 1 hashes the stolen solution, party 2 hashes its next block
const FSH_STATES: &[Edge] = &[
    Edge(3, 4, Q1, ONE_S1, Normal),
    Edge(3, 10, Q2, NONE, ForkStart),
    Edge(10, 11, P2, NONE, Normal),
    Edge(10, 12, Q1, NONE, Normal),
    Edge(11, 13, Q1, NONE, Normal),
    Edge(11, 0, Q2, TWO_2S2, ForkFailure),
    Edge(12, 0, Q1, ONE_STEAL, ForkSuccess),
    Edge(12, 13, P2, NONE, Normal),
    // the honest party drops its pending solution after a successful steal
    Edge(13, 0, Q1, ONE_STEAL, ForkSuccess),
    Edge(13, 0, Q2, TWO_2S2, ForkFailure),
];

// Party 2 secretly hashes block one (H1), solves block two (S2) or hashes
// block two (H2); party 1 either solves (S) or hashes (H) its second block.
// 14: H1/S, 15: S2/S, 16: H2/S, 17: H1/H, 18: S2/H, 19: H2/H.
// 20, 21 mirror states 8, 9 after a failed attempt.
const HIF_STATES: &[Edge] = &[
    Edge(3, 14, Q1, NONE, ForkStart),
    Edge(3, 0, Q2, TWO_S2, Normal),
    Edge(14, 15, Q2, NONE, Normal),
    Edge(14, 17, P1, NONE, Normal),
    Edge(15, 16, P2, NONE, Normal),
    Edge(15, 18, P1, NONE, Normal),
    Edge(16, 0, Q2, TWO_2S2, ForkSuccess),
    Edge(16, 19, P1, NONE, Normal),
    Edge(17, 18, Q2, NONE, Normal),
    Edge(17, 0, Q1, ONE_2S1, ForkFailure),
    Edge(18, 19, P2, NONE, Normal),
    Edge(18, 0, Q1, ONE_2S1, ForkFailure),
    Edge(19, 0, Q2, TWO_2S2, ForkSuccess),
    Edge(19, 20, Q1, ONE_2S1, ForkFailure),
    Edge(20, 0, Q2, TWO_2S2_2S1, Normal),
    Edge(20, 21, P1, NONE, Normal),
    Edge(21, 0, Q2, TWO_2S2_2S1, Normal),
    Edge(21, 0, Q1, ONE_S1, Normal),
];

/// A strategy-profile chain with probabilities resolved for one parameter
/// set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainSpec {
    pub profile: StrategyProfile,
    pub params: NetworkParams,
    pub states: Vec<StateId>,
    pub transitions: Vec<Transition>,
}

/// Builds the transition table of `profile` under `params`.
pub fn build_chain(profile: StrategyProfile, params: &NetworkParams) -> ChainSpec {
    let tables: &[&[Edge]] = match profile {
        StrategyProfile::HH => &[PREFIX, HH_STATE3, CARRY],
        StrategyProfile::FSH => &[PREFIX, FSH_STATES, CARRY],
        StrategyProfile::HIF => &[PREFIX, HIF_STATES],
    };
    let mut transitions: Vec<Transition> = tables
        .iter()
        .flat_map(|t| t.iter())
        .map(|e| Transition {
            from: e.0,
            to: e.1,
            rate: e.2,
            prob: e.2.value(params),
            credits: e.3,
            kind: e.4,
        })
        .collect();
    transitions.sort_by_key(|t| t.from);
    ChainSpec {
        profile,
        params: *params,
        states: profile.states().to_vec(),
        transitions,
    }
}

impl ChainSpec {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Dense index of a state id.
    pub fn index_of(&self, state: StateId) -> Option<usize> {
        self.states.binary_search(&state).ok()
    }

    pub fn outgoing(&self, state: StateId) -> impl Iterator<Item = &Transition> {
        self.transitions.iter().filter(move |t| t.from == state)
    }

    /// Probability of staying put for one round.
    pub fn self_loop(&self, state: StateId) -> f64 {
        1.0 - self.outgoing(state).map(|t| t.prob).sum::<f64>()
    }

    /// Every `(transition, credit)` pair, i.e. every way a reward is paid.
    pub fn reward_events(&self) -> impl Iterator<Item = (&Transition, &Credit)> {
        self.transitions
            .iter()
            .flat_map(|t| t.credits.iter().map(move |c| (t, c)))
    }

    /// Row-stochastic matrix over `states` (dense indices), self-loops
    /// included.
    pub fn transition_matrix(&self) -> Vec<Vec<f64>> {
        let n = self.len();
        let mut m = vec![vec![0.0; n]; n];
        for t in &self.transitions {
            let (i, j) = (
                self.index_of(t.from).expect("edge from unknown state"),
                self.index_of(t.to).expect("edge to unknown state"),
            );
            m[i][j] += t.prob;
        }
        for (i, &s) in self.states.iter().enumerate() {
            m[i][i] += self.self_loop(s);
        }
        m
    }
}
