//! Markov-chain model of the two-party mining process under honest and
//! selfish strategy profiles.

mod chain;
mod payoff;
mod region;
mod security;
mod values;

pub use chain::{
    build_chain, ChainSpec, Credit, EdgeKind, Party, Rate, StateId, StrategyProfile, Transition,
};
pub use payoff::{payoff, payoff_from_events, payoff_table, PayoffTable};
pub use region::{secure_region, selfish_boundary, EtaMode, RegionConfig, RegionPoint};
pub use security::{
    check_adversary_security, check_necessary_conditions, check_selfish_security,
    security_coefficients, AdversaryVerdict, SecurityCoefficients, SelfishVerdict,
};
pub use values::{profile_values, relative_values, steady_state, RelativeValues};
