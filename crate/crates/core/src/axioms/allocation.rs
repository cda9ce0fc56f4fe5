use crate::axioms::{claim_holds, detectable_holds, Axiom, ClaimKind, Violation, Witness};
use crate::mechanisms::QuasiStrategy;
use crate::model::{Allocation, BranchId, CadetId, Instance, PriceLevel, Position, PriorityOrder};
use crate::preference::PreferenceRelation;
use crate::scalar::Scalar;

/// Cadets holding a position they rank below `∅`.
pub fn check_ir(alloc: &Allocation, prefs: &[PreferenceRelation]) -> Vec<Violation> {
    alloc
        .contracts()
        .filter(|c| prefs[c.cadet.0].prefers(None, Some(c.position())))
        .map(|c| {
            Violation::new(
                Axiom::IndividualRationality,
                Witness::Unacceptable {
                    cadet: c.cadet,
                    held: Some(c.position()),
                },
            )
        })
        .collect()
}

/// Unmatched cadets who accept a branch with a vacant position at its base
/// price.
pub fn check_nonwasteful<S: Scalar>(
    alloc: &Allocation,
    prefs: &[PreferenceRelation],
    instance: &Instance<S>,
) -> Vec<Violation> {
    let mut out = Vec::new();
    for b in instance.branch_ids() {
        if alloc.assigned_to(b) >= instance.branch(b).q_total {
            continue;
        }
        let base = Position { branch: b, price: PriceLevel::BASE };
        for i in instance.cadet_ids() {
            if alloc.get(i).is_none() && prefs[i.0].prefers(Some(base), None) {
                out.push(Violation::new(
                    Axiom::NonWastefulness,
                    Witness::Waste { cadet: i, branch: b },
                ));
            }
        }
    }
    out
}

/// Every `(i, j, b)` where `i` prefers `j`'s assignment at `b` to their own and
/// outranks `j` at `b`.
pub fn find_priority_reversals(
    alloc: &Allocation,
    prefs: &[PreferenceRelation],
    priorities: &[PriorityOrder],
) -> Vec<Violation> {
    let n = alloc.n_cadets();
    let mut out = Vec::new();
    for j in (0..n).map(CadetId) {
        let Some(xj) = alloc.get(j) else { continue };
        let pi = &priorities[xj.branch.0];
        for i in (0..n).map(CadetId) {
            if i != j && pi.outranks(i, j) && prefs[i.0].prefers(Some(xj), alloc.get(i)) {
                out.push(Violation::new(
                    Axiom::NoPriorityReversal,
                    Witness::Reversal {
                        envious: i,
                        holder: j,
                        branch: xj.branch,
                    },
                ));
            }
        }
    }
    out
}

/// Legitimate claims for price-reduced and price-elevated versions of other
/// cadets' assignments.
pub fn find_legitimate_claims<S: Scalar>(
    alloc: &Allocation,
    prefs: &[PreferenceRelation],
    instance: &Instance<S>,
) -> Vec<Violation> {
    let mut out = Vec::new();
    let h = instance.n_prices();
    for holder in instance.cadet_ids() {
        let Some(x) = alloc.get(holder) else { continue };
        let b = x.branch;
        let omega = instance.policy(b);
        let headroom = alloc.charged_at(b) < instance.branch(b).q_flex;
        for claimant in instance.cadet_ids() {
            if claimant == holder {
                continue;
            }
            let own = alloc.get(claimant);
            for t in 0..h {
                let claimed = PriceLevel(t);
                let kind = if claimed < x.price {
                    ClaimKind::Reduced
                } else if claimed > x.price && headroom {
                    ClaimKind::Elevated
                } else {
                    continue;
                };
                if prefs[claimant.0].prefers(Some(Position { branch: b, price: claimed }), own)
                    && omega.outranks((claimant, claimed), (holder, x.price))
                {
                    out.push(Violation::new(
                        Axiom::PolicyEnforcement,
                        Witness::Claim {
                            kind,
                            claimant,
                            holder,
                            branch: b,
                            held: x.price,
                            claimed,
                        },
                    ));
                }
            }
        }
    }
    debug_assert!(out.iter().all(|v| match v.witness {
        Witness::Claim { kind, claimant, holder, branch, held, claimed } =>
            claim_holds(instance, alloc, prefs, kind, claimant, holder, branch, held, claimed),
        _ => false,
    }));
    out
}

/// Reversals visible from quasi-direct messages: `j` holds `(b, t^0)` while
/// higher-priority `i` pays more at `b` or sits at a branch they ranked below
/// `b`.
pub fn find_detectable_priority_reversals(
    strategies: &[QuasiStrategy],
    alloc: &Allocation,
    priorities: &[PriorityOrder],
) -> Vec<Violation> {
    let n = alloc.n_cadets();
    let mut out = Vec::new();
    for j in (0..n).map(CadetId) {
        let Some(xj) = alloc.get(j) else { continue };
        if !xj.price.is_base() {
            continue;
        }
        let b: BranchId = xj.branch;
        for i in (0..n).map(CadetId) {
            if detectable_holds(strategies, alloc, &priorities[b.0], i, j, b) {
                out.push(Violation::new(
                    Axiom::NoDetectablePriorityReversal,
                    Witness::DetectableReversal {
                        disadvantaged: i,
                        holder: j,
                        branch: b,
                    },
                ));
            }
        }
    }
    out
}

/// All four allocation-level axioms.
pub fn audit_allocation<S: Scalar>(
    instance: &Instance<S>,
    alloc: &Allocation,
    prefs: &[PreferenceRelation],
) -> Vec<Violation> {
    let mut out = check_ir(alloc, prefs);
    out.extend(check_nonwasteful(alloc, prefs, instance));
    out.extend(find_priority_reversals(alloc, prefs, instance.priorities()));
    out.extend(find_legitimate_claims(alloc, prefs, instance));
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Contract, PolicySpec, PriceLadder};

    fn single(n: usize, q: usize, f: usize, h: usize) -> Instance<f64> {
        Instance::anonymous(
            n,
            &[(q, f)],
            PriceLadder::uniform(h).unwrap(),
            vec![PriorityOrder::identity(n)],
            vec![PolicySpec::Ultimate],
        )
        .unwrap()
    }

    #[test]
    fn empty_allocation_is_individually_rational() {
        let prefs = vec![PreferenceRelation::prefix(0, 2); 3];
        assert!(check_ir(&Allocation::empty(3), &prefs).is_empty());
    }

    #[test]
    fn vacant_seat_with_willing_cadet_is_waste() {
        let inst = single(1, 1, 0, 2);
        let prefs = vec![PreferenceRelation::prefix(0, 1)];
        let v = check_nonwasteful(&Allocation::empty(1), &prefs, &inst);
        assert_eq!(v.len(), 1);
        assert!(v[0].confirm(&inst, &Allocation::empty(1), &prefs, &[]));
        let full = Allocation::from_contracts(1, [Contract::new(0, 0, 0)]).unwrap();
        assert!(check_nonwasteful(&full, &prefs, &inst).is_empty());
    }

    #[test]
    fn swap_against_priority_is_one_reversal() {
        let inst = single(2, 1, 0, 1);
        let prefs = vec![PreferenceRelation::prefix(0, 1); 2];
        let alloc = Allocation::from_contracts(2, [Contract::new(1, 0, 0)]).unwrap();
        let v = find_priority_reversals(&alloc, &prefs, inst.priorities());
        assert_eq!(v.len(), 1);
        assert_eq!(
            v[0].witness,
            Witness::Reversal { envious: CadetId(0), holder: CadetId(1), branch: BranchId(0) }
        );
        assert!(v[0].confirm(&inst, &alloc, &prefs, &[]));
    }

    #[test]
    fn low_policy_cadet_charged_while_stronger_claimant_waits() {
        // q0 = 0, qf = 1, baseline policy; cadet 1 pays t1 while cadet 0,
        // ranked higher at t0, is unmatched
        let inst: Instance<f64> = Instance::anonymous(
            2,
            &[(1, 1)],
            PriceLadder::uniform(2).unwrap(),
            vec![PriorityOrder::identity(2)],
            vec![PolicySpec::Baseline],
        )
        .unwrap();
        let prefs = vec![PreferenceRelation::prefix(0, 1), PreferenceRelation::prefix(0, 2)];
        let alloc = Allocation::from_contracts(2, [Contract::new(1, 0, 1)]).unwrap();
        let v = find_legitimate_claims(&alloc, &prefs, &inst);
        assert_eq!(v.len(), 1);
        assert!(matches!(v[0].witness, Witness::Claim { kind: ClaimKind::Reduced, .. }));
        assert!(v[0].confirm(&inst, &alloc, &prefs, &[]));
    }

    #[test]
    fn single_price_never_has_claims() {
        let inst = single(3, 1, 1, 1);
        let prefs = vec![PreferenceRelation::prefix(0, 1); 3];
        let alloc = Allocation::from_contracts(3, [Contract::new(2, 0, 0)]).unwrap();
        assert!(find_legitimate_claims(&alloc, &prefs, &inst).is_empty());
    }
}
