//! Equilibrium analysis of the single-branch USMA-2020 mechanism.
//!
//! With one branch a cadet's message reduces to a willingness flag: `b`
//! (willing to pay the increased price) or `∅`. Cadets who reject the
//! base-price position outright take no part and submit an empty ranking.

mod bayesian;
mod pure;

use std::fmt;

use crate::error::{Error, Result};
use crate::mechanisms::QuasiStrategy;
use crate::model::{BranchId, Instance};
use crate::scalar::Scalar;

pub use bayesian::{bayesian_equilibria, BayesianEquilibrium, BayesianGame, BayesianReport, PlayerType};
pub use pure::{enumerate_pure_ne, ne_outcome_equals_phi_mp, PureEquilibria, PureEquilibrium, SingleBranchGame};

/// Default cap on the number of action profiles enumerated.
pub const DEFAULT_GAME_GUARD: u128 = 1 << 16;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Action {
    Unwilling,
    Willing,
}

impl Action {
    pub fn strategy(self) -> QuasiStrategy {
        let b = BranchId(0);
        match self {
            Action::Willing => QuasiStrategy::new(vec![b], [b]),
            Action::Unwilling => QuasiStrategy::new(vec![b], []),
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "b" => Some(Action::Willing),
            "∅" | "0" | "none" => Some(Action::Unwilling),
            _ => None,
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Action::Willing => "b",
            Action::Unwilling => "∅",
        })
    }
}

fn check_single_branch<S: Scalar>(instance: &Instance<S>) -> Result<()> {
    if instance.n_branches() != 1 {
        return Err(Error::Unsupported {
            mechanism: "usma2020 game",
            reason: format!("needs exactly one branch, got {}", instance.n_branches()),
        });
    }
    if instance.n_prices() != 2 {
        return Err(Error::Unsupported {
            mechanism: "usma2020 game",
            reason: format!("needs exactly two prices, got {}", instance.n_prices()),
        });
    }
    Ok(())
}

fn check_guard(what: &str, count: u128, limit: u128) -> Result<()> {
    if count > limit {
        return Err(Error::GuardExceeded {
            what: what.into(),
            count,
            limit,
        });
    }
    Ok(())
}
