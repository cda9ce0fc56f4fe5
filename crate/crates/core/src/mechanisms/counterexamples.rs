//! Mechanisms that each give up exactly one of the five axioms satisfied by
//! the cumulative offer mechanism.

use crate::error::{Error, Result};
use crate::mechanisms::mpco_allocation;
use crate::model::{Allocation, BranchId, CadetId, Instance, PolicySpec, PriceLevel, Position};
use crate::preference::PreferenceRelation;
use crate::scalar::Scalar;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum CounterexampleKind {
    /// Cumulative offer on preferences with `∅` moved last.
    DropIr,
    /// Always the empty allocation.
    Empty,
    /// Cumulative offer where price never overturns baseline priority.
    DaDirect,
    /// Ignores the lowest-priority cadet at `branch` when all flexible
    /// positions go at the increased price with or without them.
    Psi { branch: BranchId },
    /// Charges the lowest-priority cadet at `branch` the increased price when
    /// feasible and acceptable to them.
    PriceBump { branch: BranchId },
}

impl CounterexampleKind {
    pub fn name(&self) -> &'static str {
        match self {
            CounterexampleKind::DropIr => "drop-ir",
            CounterexampleKind::Empty => "empty",
            CounterexampleKind::DaDirect => "da-direct",
            CounterexampleKind::Psi { .. } => "psi",
            CounterexampleKind::PriceBump { .. } => "price-bump",
        }
    }
}

pub fn counterexample_mechanism<S: Scalar>(
    kind: CounterexampleKind,
    instance: &Instance<S>,
    prefs: &[PreferenceRelation],
) -> Result<Allocation> {
    instance.check_profile(prefs)?;
    let (nb, nt) = (instance.n_branches(), instance.n_prices());
    match kind {
        CounterexampleKind::DropIr => {
            let forced: Vec<PreferenceRelation> =
                prefs.iter().map(|p| p.with_unmatched_last(nb, nt)).collect();
            mpco_allocation(instance, &forced, None)
        }
        CounterexampleKind::Empty => Ok(Allocation::empty(instance.n_cadets())),
        CounterexampleKind::DaDirect => {
            let baseline = instance.with_policies(vec![PolicySpec::Baseline; nb])?;
            mpco_allocation(&baseline, prefs, None)
        }
        CounterexampleKind::Psi { branch } => {
            check_two_price_branch(kind.name(), instance, branch)?;
            psi(instance, prefs, branch)
        }
        CounterexampleKind::PriceBump { branch } => {
            check_two_price_branch(kind.name(), instance, branch)?;
            price_bump(instance, prefs, branch)
        }
    }
}

fn check_two_price_branch<S: Scalar>(
    mechanism: &'static str,
    instance: &Instance<S>,
    branch: BranchId,
) -> Result<()> {
    if instance.n_prices() != 2 {
        return Err(Error::Unsupported {
            mechanism,
            reason: format!("needs exactly two prices, got {}", instance.n_prices()),
        });
    }
    if branch.0 >= instance.n_branches() {
        return Err(Error::Unsupported {
            mechanism,
            reason: format!("unknown branch index {}", branch.0),
        });
    }
    Ok(())
}

fn lowest_assigned<S: Scalar>(instance: &Instance<S>, alloc: &Allocation, b: BranchId) -> Option<CadetId> {
    instance
        .priority(b)
        .ranking()
        .iter()
        .rev()
        .copied()
        .find(|&i| alloc.branch_of(i) == Some(b))
}

fn psi<S: Scalar>(instance: &Instance<S>, prefs: &[PreferenceRelation], b: BranchId) -> Result<Allocation> {
    let out = mpco_allocation(instance, prefs, None)?;
    let qf = instance.branch(b).q_flex;
    // with no flexible positions the "all filled at the increased price"
    // test is vacuous; leave the outcome alone
    if qf == 0 {
        return Ok(out);
    }
    let Some(i) = lowest_assigned(instance, &out, b) else {
        return Ok(out);
    };
    let mut reduced = prefs.to_vec();
    let keep = |v: &[Position]| v.iter().copied().filter(|p| p.branch != b).collect::<Vec<_>>();
    reduced[i.0] = PreferenceRelation::with_tail(keep(prefs[i.0].acceptable()), keep(prefs[i.0].tail()));
    let without = mpco_allocation(instance, &reduced, None)?;
    if out.charged_at(b) == qf && without.charged_at(b) == qf {
        Ok(without)
    } else {
        Ok(out)
    }
}

fn price_bump<S: Scalar>(instance: &Instance<S>, prefs: &[PreferenceRelation], b: BranchId) -> Result<Allocation> {
    let mut out = mpco_allocation(instance, prefs, None)?;
    let high = Position { branch: b, price: PriceLevel(1) };
    if let Some(i) = lowest_assigned(instance, &out, b) {
        let at_base = out.get(i) == Some(Position { branch: b, price: PriceLevel::BASE });
        if at_base && prefs[i.0].is_acceptable(high) && out.charged_at(b) < instance.branch(b).q_flex {
            out.set(i, Some(high));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{PriceLadder, PriorityOrder};

    fn single(n: usize, q: usize, f: usize) -> Instance<f64> {
        Instance::anonymous(
            n,
            &[(q, f)],
            PriceLadder::uniform(2).unwrap(),
            vec![PriorityOrder::identity(n)],
            vec![PolicySpec::Ultimate],
        )
        .unwrap()
    }

    #[test]
    fn drop_ir_matches_unwilling_cadet() {
        let inst = single(1, 1, 0);
        let a = counterexample_mechanism(CounterexampleKind::DropIr, &inst, &[PreferenceRelation::unmatched_only()]).unwrap();
        assert_eq!(a.get(CadetId(0)), Some(Position::new(0, 0)));
    }

    #[test]
    fn empty_is_empty() {
        let inst = single(2, 2, 1);
        let prefs = vec![PreferenceRelation::prefix(0, 2); 2];
        let a = counterexample_mechanism(CounterexampleKind::Empty, &inst, &prefs).unwrap();
        assert_eq!(a.matched(), 0);
    }

    #[test]
    fn da_direct_ignores_willingness() {
        // q0 = 0, qf = 1; the lower-priority cadet is willing to pay
        let inst = single(2, 1, 1);
        let prefs = vec![PreferenceRelation::prefix(0, 1), PreferenceRelation::prefix(0, 2)];
        let a = counterexample_mechanism(CounterexampleKind::DaDirect, &inst, &prefs).unwrap();
        assert_eq!(a.get(CadetId(0)), Some(Position::new(0, 0)));
        let m = mpco_allocation(&inst, &prefs, None).unwrap();
        assert_eq!(m.get(CadetId(1)), Some(Position::new(0, 1)));
    }

    #[test]
    fn psi_skips_lowest_awardee() {
        // q0 = 1, qf = 1: a > c > d > e; c, d and e willing
        let inst = single(4, 2, 1);
        let mut prefs = vec![PreferenceRelation::prefix(0, 2); 4];
        prefs[0] = PreferenceRelation::prefix(0, 1);
        let m = mpco_allocation(&inst, &prefs, None).unwrap();
        assert_eq!(m.get(CadetId(1)), Some(Position::new(0, 1)));
        let a = counterexample_mechanism(CounterexampleKind::Psi { branch: BranchId(0) }, &inst, &prefs).unwrap();
        assert_eq!(a.get(CadetId(0)), Some(Position::new(0, 0)));
        assert_eq!(a.get(CadetId(1)), None);
        assert_eq!(a.get(CadetId(2)), Some(Position::new(0, 1)));
        assert_eq!(a.get(CadetId(3)), None);
    }

    #[test]
    fn psi_keeps_outcome_when_removal_frees_base_price() {
        let inst = single(3, 2, 1);
        let mut prefs = vec![PreferenceRelation::prefix(0, 2); 3];
        prefs[0] = PreferenceRelation::prefix(0, 1);
        let a = counterexample_mechanism(CounterexampleKind::Psi { branch: BranchId(0) }, &inst, &prefs).unwrap();
        assert_eq!(a, mpco_allocation(&inst, &prefs, None).unwrap());
    }

    #[test]
    fn price_bump_and_its_profitable_deviation() {
        let inst = single(1, 2, 1);
        let kind = CounterexampleKind::PriceBump { branch: BranchId(0) };
        let a = counterexample_mechanism(kind, &inst, &[PreferenceRelation::prefix(0, 2)]).unwrap();
        assert_eq!(a.get(CadetId(0)), Some(Position::new(0, 1)));
        let d = counterexample_mechanism(kind, &inst, &[PreferenceRelation::prefix(0, 1)]).unwrap();
        assert_eq!(d.get(CadetId(0)), Some(Position::new(0, 0)));
    }

    #[test]
    fn two_price_variants_refuse_other_ladders() {
        let inst: Instance<f64> = Instance::anonymous(
            1,
            &[(1, 1)],
            PriceLadder::uniform(3).unwrap(),
            vec![PriorityOrder::identity(1)],
            vec![PolicySpec::Ultimate],
        )
        .unwrap();
        let prefs = [PreferenceRelation::unmatched_only()];
        assert!(counterexample_mechanism(CounterexampleKind::Psi { branch: BranchId(0) }, &inst, &prefs).is_err());
    }
}
