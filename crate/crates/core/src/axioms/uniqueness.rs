//! Finite search showing that no mechanism other than cumulative offer
//! satisfies all five axioms on a family of small economies.
//!
//! Profiles are ordered by their total number of acceptable contracts. If an
//! axiom-abiding mechanism disagreed with cumulative offer somewhere, take a
//! smallest such profile; at every smaller profile the two coincide. Each
//! alternative allocation at a profile is therefore refuted by a cadet `i`
//! and a shorter report `r` such that either `i` gains by reporting `r`, or a
//! cadet whose true preference is `r` gains by reporting the original. The
//! search finds such a refutation for every alternative or lists the ones it
//! could not refute.

use crate::axioms::{audit_allocation, OutcomeTable, Violation};
use crate::error::Result;
use crate::mechanisms::MpcoRunner;
use crate::model::{Allocation, Assignment, CadetId, Instance};
use crate::preference::{enumerate_preferences, PreferenceRelation};
use crate::scalar::Scalar;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum UniquenessStatus {
    /// Cumulative offer passes every axiom and every alternative is refuted.
    Unique,
    /// Cumulative offer itself violates an axiom somewhere.
    MpcoFails,
    /// Some alternative allocation could not be refuted by the search.
    Inconclusive,
}

#[derive(Clone, Debug, Default)]
pub struct UniquenessReport {
    pub instances: usize,
    pub profiles: usize,
    /// Profiles where cumulative offer's outcome is the only allocation
    /// satisfying the four allocation-level axioms.
    pub single_candidate_profiles: usize,
    /// Profiles with several such allocations, where strategy-proofness has
    /// to discriminate.
    pub multiple_candidate_profiles: usize,
    /// Alternatives excluded by a strategy-proofness refutation.
    pub refuted_alternatives: usize,
    pub mpco_violations: Vec<Violation>,
    /// `(instance index, profile, alternative)` left unrefuted.
    pub unrefuted: Vec<(usize, Vec<PreferenceRelation>, Allocation)>,
}

impl UniquenessReport {
    pub fn status(&self) -> UniquenessStatus {
        if !self.mpco_violations.is_empty() {
            UniquenessStatus::MpcoFails
        } else if !self.unrefuted.is_empty() {
            UniquenessStatus::Inconclusive
        } else {
            UniquenessStatus::Unique
        }
    }
}

/// Runs the search on every instance of `family` over all truncated
/// preference profiles.
pub fn verify_uniqueness<S: Scalar>(family: &[Instance<S>], guard: u128) -> Result<UniquenessReport> {
    let mut report = UniquenessReport::default();
    for (k, instance) in family.iter().enumerate() {
        verify_one(k, instance, guard, &mut report)?;
    }
    Ok(report)
}

fn verify_one<S: Scalar>(
    index: usize,
    instance: &Instance<S>,
    guard: u128,
    report: &mut UniquenessReport,
) -> Result<()> {
    let n = instance.n_cadets();
    let domain = enumerate_preferences(instance.n_branches(), instance.n_prices(), guard)?;
    let order = instance.default_proposal_order();
    let mut runner = MpcoRunner::new(instance);
    let table = OutcomeTable::build(&domain, n, guard, |p| runner.run(instance, p, &order, None))?;
    report.instances += 1;
    report.mpco_violations.extend(table.strategy_proofness_violations());

    let d = domain.len();
    let mut stride = vec![1usize; n];
    for i in (0..n.saturating_sub(1)).rev() {
        stride[i] = stride[i + 1] * d;
    }
    for k in 0..table.len() {
        report.profiles += 1;
        let digits = table.digits(k);
        let profile = table.profile(k);
        let mpco_out = table.outcome(k);
        report.mpco_violations.extend(audit_allocation(instance, mpco_out, &profile));

        let candidates = axiomatic_allocations(instance, &profile);
        if candidates.len() <= 1 {
            report.single_candidate_profiles += 1;
        } else {
            report.multiple_candidate_profiles += 1;
        }
        for alt in candidates.iter().filter(|a| *a != mpco_out) {
            let refuted = (0..n).any(|i| {
                let truth = &profile[i];
                let base = k - digits[i] * stride[i];
                let yi = alt.get(CadetId(i));
                (0..d)
                    .filter(|&r| domain[r].acceptable().len() < truth.acceptable().len())
                    .any(|r| {
                        let zi = table.outcome(base + r * stride[i]).get(CadetId(i));
                        truth.prefers(zi, yi) || domain[r].prefers(yi, zi)
                    })
            });
            if refuted {
                report.refuted_alternatives += 1;
            } else {
                report.unrefuted.push((index, profile.clone(), alt.clone()));
            }
        }
    }
    Ok(())
}

/// Feasible, individually rational allocations passing all four
/// allocation-level axioms at `profile`.
pub(crate) fn axiomatic_allocations<S: Scalar>(
    instance: &Instance<S>,
    profile: &[PreferenceRelation],
) -> Vec<Allocation> {
    let options: Vec<Vec<Assignment>> = profile
        .iter()
        .map(|p| std::iter::once(None).chain(p.acceptable().iter().map(|&x| Some(x))).collect())
        .collect();
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(profile.len());
    walk(instance, profile, &options, &mut current, &mut out);
    out
}

fn walk<S: Scalar>(
    instance: &Instance<S>,
    profile: &[PreferenceRelation],
    options: &[Vec<Assignment>],
    current: &mut Vec<Assignment>,
    out: &mut Vec<Allocation>,
) {
    if current.len() == options.len() {
        let alloc = Allocation::from_assignments(current.clone());
        if alloc.check_feasible(instance).is_ok() && audit_allocation(instance, &alloc, profile).is_empty() {
            out.push(alloc);
        }
        return;
    }
    for &a in &options[current.len()] {
        current.push(a);
        walk(instance, profile, options, current, out);
        current.pop();
    }
}
