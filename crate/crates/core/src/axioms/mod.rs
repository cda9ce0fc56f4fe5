//! Axiom checkers for allocations and mechanisms.
//!
//! Allocation-level checkers inspect one outcome. Mechanism-level checkers
//! run a mechanism over an explicitly enumerated finite domain and report
//! what they found on that domain only.

mod allocation;
mod incentives;
mod uniqueness;

use std::fmt;

use crate::mechanisms::QuasiStrategy;
use crate::model::{Assignment, BranchId, CadetId, Instance, PriceLevel, PriorityOrder};
use crate::preference::PreferenceRelation;
use crate::scalar::Scalar;

pub use allocation::{
    audit_allocation, check_ir, check_nonwasteful, find_detectable_priority_reversals,
    find_legitimate_claims, find_priority_reversals,
};
pub use incentives::{
    check_bradso_ic, check_strategic_bradso_immunity, check_strategy_proofness, quasi_domain,
    quasi_profiles, OutcomeTable,
};
pub use uniqueness::{verify_uniqueness, UniquenessReport, UniquenessStatus};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axiom {
    IndividualRationality,
    NonWastefulness,
    NoPriorityReversal,
    PolicyEnforcement,
    StrategyProofness,
    NoDetectablePriorityReversal,
    BradsoIc,
    StrategicBradsoImmunity,
}

impl Axiom {
    /// The five axioms that single out the cumulative offer mechanism.
    pub const DIRECT: [Axiom; 5] = [
        Axiom::IndividualRationality,
        Axiom::NonWastefulness,
        Axiom::NoPriorityReversal,
        Axiom::PolicyEnforcement,
        Axiom::StrategyProofness,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            Axiom::IndividualRationality => "individual-rationality",
            Axiom::NonWastefulness => "non-wastefulness",
            Axiom::NoPriorityReversal => "no-priority-reversal",
            Axiom::PolicyEnforcement => "policy-enforcement",
            Axiom::StrategyProofness => "strategy-proofness",
            Axiom::NoDetectablePriorityReversal => "no-detectable-priority-reversal",
            Axiom::BradsoIc => "bradso-ic",
            Axiom::StrategicBradsoImmunity => "strategic-bradso-immunity",
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClaimKind {
    Reduced,
    Elevated,
}

/// The bound objects that make an axiom fail.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Witness {
    /// `cadet` holds a position they rank below `∅`.
    Unacceptable { cadet: CadetId, held: Assignment },
    /// `branch` has a free seat and unmatched `cadet` accepts it at base price.
    Waste { cadet: CadetId, branch: BranchId },
    /// `envious` prefers `holder`'s assignment at `branch` and has higher
    /// priority there.
    Reversal {
        envious: CadetId,
        holder: CadetId,
        branch: BranchId,
    },
    /// `claimant` prefers `holder`'s position at `claimed` price and the
    /// policy ranks `(claimant, claimed)` above `(holder, held)`.
    Claim {
        kind: ClaimKind,
        claimant: CadetId,
        holder: CadetId,
        branch: BranchId,
        held: PriceLevel,
        claimed: PriceLevel,
    },
    /// Reporting `misreport` instead of `profile[cadet]` gets `cadet` an
    /// outcome they strictly prefer under `profile[cadet]`.
    Manipulation {
        cadet: CadetId,
        profile: Vec<PreferenceRelation>,
        misreport: PreferenceRelation,
        truthful: Assignment,
        deviated: Assignment,
    },
    /// `disadvantaged` is visibly worse off than base-price holder `holder`
    /// at `branch` while outranking them there.
    DetectableReversal {
        disadvantaged: CadetId,
        holder: CadetId,
        branch: BranchId,
    },
    /// `cadet` pays the increased price at `branch` under `profile` but gets
    /// the base price there after withdrawing willingness.
    BradsoIc {
        cadet: CadetId,
        branch: BranchId,
        profile: Vec<QuasiStrategy>,
        deviated: Assignment,
    },
    /// `cadet` holds a base-price position at `branch` only because they
    /// declared willingness there.
    StrategicBradso {
        cadet: CadetId,
        branch: BranchId,
        profile: Vec<QuasiStrategy>,
        deviated: Assignment,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Violation {
    pub axiom: Axiom,
    pub witness: Witness,
}

impl Violation {
    pub(crate) fn new(axiom: Axiom, witness: Witness) -> Self {
        Self { axiom, witness }
    }

    /// The violated condition with its witnesses bound, using index names.
    pub fn narrative(&self) -> String {
        self.render(&|c| c.to_string(), &|b| b.to_string())
    }

    /// As [`Violation::narrative`] with the instance's cadet and branch ids.
    pub fn narrative_with<S: Scalar>(&self, instance: &Instance<S>) -> String {
        self.render(
            &|c| instance.cadet_name(c).to_string(),
            &|b| instance.branch(b).name.clone(),
        )
    }

    fn render(&self, cn: &dyn Fn(CadetId) -> String, bn: &dyn Fn(BranchId) -> String) -> String {
        let show = |a: &Assignment| match a {
            None => "unmatched".to_string(),
            Some(p) => format!("({}, t{})", bn(p.branch), p.price.0),
        };
        match &self.witness {
            Witness::Unacceptable { cadet, held } => format!(
                "{} is assigned {} but ranks it below remaining unmatched",
                cn(*cadet),
                show(held)
            ),
            Witness::Waste { cadet, branch } => format!(
                "{} has a vacant position while {} is unmatched and prefers ({}, t0) to remaining unmatched",
                bn(*branch),
                cn(*cadet),
                bn(*branch)
            ),
            Witness::Reversal { envious, holder, branch } => format!(
                "{} prefers the assignment of {} at {} to their own, yet {} has higher baseline priority at {}",
                cn(*envious),
                cn(*holder),
                bn(*branch),
                cn(*envious),
                bn(*branch)
            ),
            Witness::Claim { kind, claimant, holder, branch, held, claimed } => format!(
                "{} has a legitimate claim for a price-{} version of ({}, t{}) held by {}: they prefer ({}, t{}) to their assignment and ({}, t{}) outranks ({}, t{}) under the policy{}",
                cn(*claimant),
                if *kind == ClaimKind::Reduced { "reduced" } else { "elevated" },
                bn(*branch),
                held.0,
                cn(*holder),
                bn(*branch),
                claimed.0,
                cn(*claimant),
                claimed.0,
                cn(*holder),
                held.0,
                if *kind == ClaimKind::Elevated { ", with flexible-price headroom" } else { "" }
            ),
            Witness::Manipulation { cadet, misreport, truthful, deviated, .. } => format!(
                "{} gains by misreporting {:?}: receives {} instead of {}",
                cn(*cadet),
                misreport.entries().iter().map(show).collect::<Vec<_>>(),
                show(deviated),
                show(truthful)
            ),
            Witness::DetectableReversal { disadvantaged, holder, branch } => format!(
                "{} holds ({}, t0) while {} is charged more there or placed at a branch they rank lower, although {} has higher baseline priority at {}",
                cn(*holder),
                bn(*branch),
                cn(*disadvantaged),
                cn(*disadvantaged),
                bn(*branch)
            ),
            Witness::BradsoIc { cadet, branch, deviated, .. } => format!(
                "{} is charged the increased price at {} but receives {} after withdrawing willingness there",
                cn(*cadet),
                bn(*branch),
                show(deviated)
            ),
            Witness::StrategicBradso { cadet, branch, deviated, .. } => format!(
                "{} holds ({}, t0) but receives {} after withdrawing willingness there",
                cn(*cadet),
                bn(*branch),
                show(deviated)
            ),
        }
    }

    /// Re-evaluates the defining condition on the stored witness.
    ///
    /// Allocation-level witnesses are checked against `alloc` and `prefs`;
    /// mechanism-level witnesses against their recorded outcomes.
    pub fn confirm<S: Scalar>(
        &self,
        instance: &Instance<S>,
        alloc: &crate::model::Allocation,
        prefs: &[PreferenceRelation],
        strategies: &[QuasiStrategy],
    ) -> bool {
        let pri = |b: BranchId| instance.priority(b);
        match &self.witness {
            Witness::Unacceptable { cadet, held } => {
                alloc.get(*cadet) == *held && prefs[cadet.0].prefers(None, *held)
            }
            Witness::Waste { cadet, branch } => {
                alloc.assigned_to(*branch) < instance.branch(*branch).q_total
                    && alloc.get(*cadet).is_none()
                    && prefs[cadet.0].prefers(
                        Some(crate::model::Position { branch: *branch, price: PriceLevel::BASE }),
                        None,
                    )
            }
            Witness::Reversal { envious, holder, branch } => {
                alloc.branch_of(*holder) == Some(*branch)
                    && prefs[envious.0].prefers(alloc.get(*holder), alloc.get(*envious))
                    && !pri(*branch).outranks(*holder, *envious)
            }
            Witness::Claim { kind, claimant, holder, branch, held, claimed } => {
                claim_holds(instance, alloc, prefs, *kind, *claimant, *holder, *branch, *held, *claimed)
            }
            Witness::Manipulation { cadet, profile, truthful, deviated, .. } => {
                profile[cadet.0].prefers(*deviated, *truthful)
            }
            Witness::DetectableReversal { disadvantaged, holder, branch } => {
                detectable_holds(strategies, alloc, pri(*branch), *disadvantaged, *holder, *branch)
            }
            Witness::BradsoIc { cadet, branch, profile, deviated } => {
                profile[cadet.0].is_willing(*branch)
                    && *deviated == Some(crate::model::Position { branch: *branch, price: PriceLevel::BASE })
            }
            Witness::StrategicBradso { cadet, branch, profile, deviated } => {
                profile[cadet.0].is_willing(*branch)
                    && *deviated != Some(crate::model::Position { branch: *branch, price: PriceLevel::BASE })
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn claim_holds<S: Scalar>(
    instance: &Instance<S>,
    alloc: &crate::model::Allocation,
    prefs: &[PreferenceRelation],
    kind: ClaimKind,
    claimant: CadetId,
    holder: CadetId,
    branch: BranchId,
    held: PriceLevel,
    claimed: PriceLevel,
) -> bool {
    let pos = crate::model::Position { branch, price: held };
    let want = crate::model::Position { branch, price: claimed };
    let price_ok = match kind {
        ClaimKind::Reduced => claimed < held,
        ClaimKind::Elevated => {
            claimed > held && alloc.charged_at(branch) < instance.branch(branch).q_flex
        }
    };
    claimant != holder
        && alloc.get(holder) == Some(pos)
        && price_ok
        && prefs[claimant.0].prefers(Some(want), alloc.get(claimant))
        && instance.policy(branch).outranks((claimant, claimed), (holder, held))
}

pub(crate) fn detectable_holds(
    strategies: &[QuasiStrategy],
    alloc: &crate::model::Allocation,
    pi: &PriorityOrder,
    i: CadetId,
    j: CadetId,
    b: BranchId,
) -> bool {
    let base = crate::model::Position { branch: b, price: PriceLevel::BASE };
    if i == j || alloc.get(j) != Some(base) {
        return false;
    }
    let charged_here = matches!(alloc.get(i), Some(p) if p.branch == b && p.price.is_increased());
    let rank_of = |x: Option<BranchId>| {
        let r = &strategies[i.0].ranking;
        x.and_then(|x| r.iter().position(|&y| y == x)).unwrap_or(r.len())
    };
    let prefers_b = strategies[i.0].ranking.contains(&b) && rank_of(Some(b)) < rank_of(alloc.branch_of(i));
    (charged_here || prefers_b) && pi.outranks(i, j)
}

/// Violations sorted and grouped by axiom.
pub fn count_by_axiom(violations: &[Violation]) -> Vec<(Axiom, usize)> {
    let mut out: Vec<(Axiom, usize)> = Vec::new();
    for v in violations {
        match out.iter_mut().find(|(a, _)| *a == v.axiom) {
            Some((_, n)) => *n += 1,
            None => out.push((v.axiom, 1)),
        }
    }
    out.sort();
    out
}
