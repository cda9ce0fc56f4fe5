//! Allocation mechanisms.

mod counterexamples;
mod cumulative_offer;
mod da;
mod quasi;
mod single_branch;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::model::{Allocation, BranchId, Contract};

pub use counterexamples::{counterexample_mechanism, CounterexampleKind};
pub use cumulative_offer::{mpco, mpco_allocation, MpcoRunner};
pub use da::{da, da_blocking_pairs, da_instance, BranchMatching};
pub use quasi::{
    quasi_to_preference, truthful_quasi_strategy, usma2006, usma2006_simultaneous, usma2020,
};
pub use single_branch::phi_mp;

/// Message of a quasi-direct mechanism: a ranking of acceptable branches and
/// the set of branches at which the cadet is willing to pay the increased
/// price.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuasiStrategy {
    /// Acceptable branches, best first.
    pub ranking: Vec<BranchId>,
    pub willing: BTreeSet<BranchId>,
}

impl QuasiStrategy {
    pub fn new(ranking: Vec<BranchId>, willing: impl IntoIterator<Item = BranchId>) -> Self {
        Self {
            ranking,
            willing: willing.into_iter().collect(),
        }
    }

    pub fn is_willing(&self, b: BranchId) -> bool {
        self.willing.contains(&b)
    }

    /// Same message with `b` removed from the willingness set.
    pub fn without_willingness(&self, b: BranchId) -> Self {
        let mut next = self.clone();
        next.willing.remove(&b);
        next
    }

    pub fn validate(&self, n_branches: usize) -> Result<(), String> {
        for (k, b) in self.ranking.iter().enumerate() {
            if b.0 >= n_branches {
                return Err(format!("ranking entry {k} names unknown branch index {}", b.0));
            }
            if self.ranking[..k].contains(b) {
                return Err(format!("branch index {} ranked twice", b.0));
            }
        }
        if let Some(b) = self.willing.iter().find(|b| b.0 >= n_branches) {
            return Err(format!("willingness names unknown branch index {}", b.0));
        }
        Ok(())
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceAction {
    Proposed,
    Held,
    Rejected,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TraceEvent {
    pub step: usize,
    pub contract: Contract,
    pub action: TraceAction,
}

/// Ordered log of a cumulative offer run. Holds and rejections are logged
/// only when a contract's status changes.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MechanismTrace {
    pub events: Vec<TraceEvent>,
}

impl MechanismTrace {
    pub fn push(&mut self, step: usize, contract: Contract, action: TraceAction) {
        self.events.push(TraceEvent {
            step,
            contract,
            action,
        });
    }

    pub fn steps(&self) -> usize {
        self.events.last().map_or(0, |e| e.step)
    }

    /// Re-applies the holds and rejections to an empty allocation.
    pub fn replay(&self, n_cadets: usize) -> Allocation {
        let mut alloc = Allocation::empty(n_cadets);
        for e in &self.events {
            let c = e.contract;
            match e.action {
                TraceAction::Proposed => {}
                TraceAction::Held => alloc.set(c.cadet, Some(c.position())),
                TraceAction::Rejected => {
                    if alloc.get(c.cadet) == Some(c.position()) {
                        alloc.set(c.cadet, None);
                    }
                }
            }
        }
        alloc
    }
}
