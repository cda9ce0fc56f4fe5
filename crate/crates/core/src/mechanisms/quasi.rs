//! Two-price quasi-direct mechanisms and the translation between quasi
//! strategies and preference relations.

use crate::error::{Error, Result};
use crate::mechanisms::{da, QuasiStrategy};
use crate::model::{Allocation, BranchId, CadetId, Instance, PriceLevel, Position, PriorityOrder};
use crate::preference::PreferenceRelation;
use crate::scalar::Scalar;

const HIGH: PriceLevel = PriceLevel(1);

fn check_quasi_input<S: Scalar>(
    mechanism: &'static str,
    instance: &Instance<S>,
    strategies: &[QuasiStrategy],
) -> Result<()> {
    if instance.n_prices() != 2 {
        return Err(Error::Unsupported {
            mechanism,
            reason: format!("needs exactly two prices, got {}", instance.n_prices()),
        });
    }
    if strategies.len() != instance.n_cadets() {
        return Err(Error::schema(
            "strategies",
            format!("{} strategies for {} cadets", strategies.len(), instance.n_cadets()),
        ));
    }
    for (i, s) in strategies.iter().enumerate() {
        s.validate(instance.n_branches())
            .map_err(|reason| Error::Preference { cadet: i, reason })?;
    }
    Ok(())
}

/// Willingness-first adjustment of each branch's priority: willing cadets
/// above unwilling ones, baseline priority within each group.
fn willingness_first<S: Scalar>(instance: &Instance<S>, strategies: &[QuasiStrategy]) -> Vec<PriorityOrder> {
    instance
        .branch_ids()
        .map(|b| {
            let pi = instance.priority(b);
            PriorityOrder::from_key(instance.n_cadets(), |i| (!strategies[i.0].is_willing(b), pi.rank(i)))
        })
        .collect()
}

/// Holds the best `q_base` of `pool` by `pi` and the best `q_flex` of the
/// rest by `plus`; returns `(base, flex)` and leaves the rejected in `pool`.
fn hold(
    pool: &mut Vec<CadetId>,
    q_base: usize,
    q_flex: usize,
    pi: &PriorityOrder,
    plus: &PriorityOrder,
) -> (Vec<CadetId>, Vec<CadetId>) {
    pool.sort_by_key(|&c| pi.rank(c));
    let base: Vec<CadetId> = pool.drain(..q_base.min(pool.len())).collect();
    pool.sort_by_key(|&c| plus.rank(c));
    let flex: Vec<CadetId> = pool.drain(..q_flex.min(pool.len())).collect();
    (base, flex)
}

fn price_2006(
    base: &[Vec<CadetId>],
    flex: &[Vec<CadetId>],
    strategies: &[QuasiStrategy],
) -> Allocation {
    let mut alloc = Allocation::empty(strategies.len());
    for (b, cadets) in base.iter().enumerate() {
        for &c in cadets {
            alloc.set(c, Some(Position::new(b, 0)));
        }
    }
    for (b, cadets) in flex.iter().enumerate() {
        for &c in cadets {
            let t = usize::from(strategies[c.0].is_willing(BranchId(b)));
            alloc.set(c, Some(Position::new(b, t)));
        }
    }
    alloc
}

/// USMA-2006: one cadet applies at a time in `proposal_order`; each branch
/// holds base positions by baseline priority and flexible positions by the
/// willingness-first priority. Flexible holders pay the increased price iff
/// they declared willingness at that branch.
///
/// The willingness-first priority is the one induced by the ultimate policy,
/// whatever policy the instance carries.
pub fn usma2006<S: Scalar>(
    instance: &Instance<S>,
    strategies: &[QuasiStrategy],
    proposal_order: Option<&PriorityOrder>,
) -> Result<Allocation> {
    check_quasi_input("usma2006", instance, strategies)?;
    let default;
    let order = match proposal_order {
        Some(o) => o,
        None => {
            default = instance.default_proposal_order();
            &default
        }
    };
    let plus = willingness_first(instance, strategies);
    let nb = instance.n_branches();
    let mut base = vec![Vec::new(); nb];
    let mut flex = vec![Vec::new(); nb];
    let mut next = vec![0usize; instance.n_cadets()];
    let mut held = vec![false; instance.n_cadets()];
    while let Some(i) = order
        .iter()
        .find(|&i| !held[i.0] && next[i.0] < strategies[i.0].ranking.len())
    {
        let b = strategies[i.0].ranking[next[i.0]];
        next[i.0] += 1;
        let mut pool: Vec<CadetId> = base[b.0].drain(..).chain(flex[b.0].drain(..)).collect();
        pool.push(i);
        let spec = instance.branch(b);
        let (kb, kf) = hold(&mut pool, spec.q_base(), spec.q_flex, instance.priority(b), &plus[b.0]);
        for &c in kb.iter().chain(&kf) {
            held[c.0] = true;
        }
        for &c in &pool {
            held[c.0] = false;
        }
        base[b.0] = kb;
        flex[b.0] = kf;
    }
    Ok(price_2006(&base, &flex, strategies))
}

/// USMA-2006 with every free cadet applying simultaneously in each round.
pub fn usma2006_simultaneous<S: Scalar>(
    instance: &Instance<S>,
    strategies: &[QuasiStrategy],
) -> Result<Allocation> {
    check_quasi_input("usma2006", instance, strategies)?;
    let plus = willingness_first(instance, strategies);
    let nb = instance.n_branches();
    let n = instance.n_cadets();
    let mut base = vec![Vec::new(); nb];
    let mut flex = vec![Vec::new(); nb];
    let mut next = vec![0usize; n];
    let mut held = vec![false; n];
    loop {
        let mut applicants: Vec<Vec<CadetId>> = vec![Vec::new(); nb];
        let mut any = false;
        for i in 0..n {
            if !held[i] && next[i] < strategies[i].ranking.len() {
                applicants[strategies[i].ranking[next[i]].0].push(CadetId(i));
                next[i] += 1;
                any = true;
            }
        }
        if !any {
            break;
        }
        for b in instance.branch_ids() {
            if applicants[b.0].is_empty() {
                continue;
            }
            let mut pool: Vec<CadetId> = base[b.0].drain(..).chain(flex[b.0].drain(..)).collect();
            pool.append(&mut applicants[b.0]);
            let spec = instance.branch(b);
            let (kb, kf) = hold(&mut pool, spec.q_base(), spec.q_flex, instance.priority(b), &plus[b.0]);
            for &c in kb.iter().chain(&kf) {
                held[c.0] = true;
            }
            for &c in &pool {
                held[c.0] = false;
            }
            base[b.0] = kb;
            flex[b.0] = kf;
        }
    }
    Ok(price_2006(&base, &flex, strategies))
}

/// USMA-2020: deferred acceptance on the submitted branch rankings with
/// each branch's priority adjusted by its policy, then a cadet matched to a
/// branch where they declared willingness pays the increased price iff fewer
/// than `q_flex` willing cadets matched there have lower baseline priority.
pub fn usma2020<S: Scalar>(instance: &Instance<S>, strategies: &[QuasiStrategy]) -> Result<Allocation> {
    check_quasi_input("usma2020", instance, strategies)?;
    let n = instance.n_cadets();
    let plus: Vec<PriorityOrder> = instance
        .branch_ids()
        .map(|b| {
            let omega = instance.policy(b);
            PriorityOrder::from_key(n, |i| {
                let t = if strategies[i.0].is_willing(b) { HIGH } else { PriceLevel::BASE };
                omega.rank(i, t)
            })
        })
        .collect();
    let caps: Vec<usize> = instance.branches().iter().map(|s| s.q_total).collect();
    let rankings: Vec<Vec<BranchId>> = strategies.iter().map(|s| s.ranking.clone()).collect();
    let matching = da(&caps, &rankings, &plus);

    let mut alloc = Allocation::empty(n);
    for (i, m) in matching.iter().enumerate() {
        let Some(b) = *m else { continue };
        let i = CadetId(i);
        let pi = instance.priority(b);
        let charged = strategies[i.0].is_willing(b) && {
            let below = (0..n)
                .map(CadetId)
                .filter(|&j| matching[j.0] == Some(b) && strategies[j.0].is_willing(b) && pi.outranks(i, j))
                .count();
            below < instance.branch(b).q_flex
        };
        alloc.set(i, Some(Position { branch: b, price: PriceLevel(usize::from(charged)) }));
    }
    Ok(alloc)
}

/// Quasi strategy read off a two-price preference: the branch order of the
/// acceptable base-price entries, and every branch whose increased-price
/// entry is acceptable anywhere in the list.
pub fn truthful_quasi_strategy(pref: &PreferenceRelation, n_prices: usize) -> Result<QuasiStrategy> {
    if n_prices != 2 {
        return Err(Error::Unsupported {
            mechanism: "truthful_quasi_strategy",
            reason: format!("needs exactly two prices, got {n_prices}"),
        });
    }
    let ranking = pref
        .acceptable()
        .iter()
        .filter(|p| p.price.is_base())
        .map(|p| p.branch)
        .collect();
    let willing = pref
        .acceptable()
        .iter()
        .filter(|p| p.price == HIGH)
        .map(|p| p.branch);
    Ok(QuasiStrategy::new(ranking, willing))
}

/// Preference in which each ranked branch's increased-price entry, when the
/// cadet is willing there, directly follows its base-price entry.
pub fn quasi_to_preference(s: &QuasiStrategy) -> PreferenceRelation {
    let mut acceptable = Vec::with_capacity(2 * s.ranking.len());
    for &b in &s.ranking {
        acceptable.push(Position { branch: b, price: PriceLevel::BASE });
        if s.is_willing(b) {
            acceptable.push(Position { branch: b, price: HIGH });
        }
    }
    PreferenceRelation::new(acceptable)
}
