//! Cadet-branch matching with price-responsive priorities.
//!
//! The crate models economies where cadets can obtain higher claims on a
//! branch by committing to an increased price, implements the multi-price
//! cumulative offer mechanism together with the deployed and comparison
//! mechanisms, and provides axiom checkers, equilibrium analysis and
//! exhaustive verification drivers for small economies.

pub mod axioms;
pub mod choice;
pub mod error;
pub mod gametheory;
pub mod harness;
pub mod mechanisms;
pub mod model;
pub mod policy;
pub mod preference;
pub mod scalar;

pub use choice::{cmp_choice, ChoiceResult};
pub use error::{Error, Result};
pub use mechanisms::{
    counterexample_mechanism, da, mpco, mpco_allocation, phi_mp, usma2006, usma2020,
    CounterexampleKind, MechanismTrace, QuasiStrategy,
};
pub use model::{
    Allocation, Assignment, BranchId, BranchSpec, CadetId, Contract, Instance, PolicySpec,
    Position, PriceLadder, PriceLevel, PriorityOrder,
};
pub use policy::{
    build_baseline_policy, build_scoring_policy, build_tiered_policy, build_ultimate_policy,
    count_policies, enumerate_policies, is_valid_policy, more_responsive, JumpScope,
    PriceResponsivenessPolicy, ScoringSpec, Tier, TierSpec,
};
pub use gametheory::{
    bayesian_equilibria, enumerate_pure_ne, BayesianGame, PlayerType, PureEquilibria, SingleBranchGame,
};
pub use harness::{generate_cohort, load_instance, save_instance, sweep_bradso, CohortSpec, PolicyPreset, Scenario};
pub use preference::{
    count_preferences, enumerate_preferences, PreferenceRelation, DEFAULT_ENUMERATION_GUARD,
};
pub use scalar::Scalar;

/// Instance with floating-point prices.
pub type Instance64 = Instance<f64>;
/// Instance with exact rational prices.
pub type ExactInstance = Instance<num_rational::Rational64>;
pub type PriceLadder64 = PriceLadder<f64>;
pub type ExactPriceLadder = PriceLadder<num_rational::Rational64>;
pub type ScoringSpec64 = ScoringSpec<f64>;
pub type ExactScoringSpec = ScoringSpec<num_rational::Rational64>;
