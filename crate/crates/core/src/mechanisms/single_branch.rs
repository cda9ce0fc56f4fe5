use crate::error::{Error, Result};
use crate::model::{Allocation, BranchId, CadetId, Instance, PriceLevel, Position};
use crate::preference::PreferenceRelation;
use crate::scalar::Scalar;

const BASE: PriceLevel = PriceLevel::BASE;
const HIGH: PriceLevel = PriceLevel(1);

/// Single-branch, two-price mechanism that fixes base positions by priority
/// and then counts, one flexible position at a time, how many flexible
/// positions go at the increased price.
///
/// Cadets who find the base-price position unacceptable take no part: they
/// would never accept any position at the branch.
pub fn phi_mp<S: Scalar>(instance: &Instance<S>, prefs: &[PreferenceRelation]) -> Result<Allocation> {
    if instance.n_branches() != 1 {
        return Err(Error::Unsupported {
            mechanism: "phi-mp",
            reason: format!("needs exactly one branch, got {}", instance.n_branches()),
        });
    }
    if instance.n_prices() != 2 {
        return Err(Error::Unsupported {
            mechanism: "phi-mp",
            reason: format!("needs exactly two prices, got {}", instance.n_prices()),
        });
    }
    instance.check_profile(prefs)?;
    let b = BranchId(0);
    let spec = instance.branch(b);
    let omega = instance.policy(b);
    let (q0, qf) = (spec.q_base(), spec.q_flex);
    let base_pos = Position { branch: b, price: BASE };
    let high_pos = Position { branch: b, price: HIGH };
    let willing = |i: CadetId| prefs[i.0].is_acceptable(high_pos);

    let acceptors: Vec<CadetId> = instance
        .priority(b)
        .iter()
        .filter(|&i| prefs[i.0].is_acceptable(base_pos))
        .collect();
    let i0 = &acceptors[..q0.min(acceptors.len())];
    let i1 = &acceptors[i0.len()..(i0.len() + qf).min(acceptors.len())];
    let rest = &acceptors[i0.len() + i1.len()..];

    // label(l) is i^l: the l-th lowest priority cadet of I^1, then the
    // lowest priority cadet of I^0
    let label = |l: usize| -> Option<CadetId> {
        if l <= i1.len() {
            Some(i1[i1.len() - l])
        } else if l == i1.len() + 1 {
            i0.last().copied()
        } else {
            None
        }
    };
    let count_above = |j: &[CadetId], l: usize| -> usize {
        label(l).map_or(0, |x| {
            j.iter()
                .filter(|&&c| omega.outranks((c, HIGH), (x, BASE)))
                .count()
        })
    };

    let mut jset: Vec<CadetId> = rest.iter().copied().filter(|&c| willing(c)).collect();
    let mut n = 0;
    if qf > 0 && count_above(&jset, 1) >= 1 {
        let mut l = 1;
        loop {
            let il = label(l).expect("step reached only while I^1 has a cadet at this label");
            if willing(il) {
                jset.push(il);
            }
            // under non-ultimate policies the count can drop below l; only
            // a count of at least l + 1 moves on to the next flexible position
            if l == qf || count_above(&jset, l + 1) <= l {
                n = l;
                break;
            }
            l += 1;
        }
    }

    let mut alloc = Allocation::empty(instance.n_cadets());
    for &c in i0 {
        alloc.set(c, Some(base_pos));
    }
    for &c in &i1[..i1.len() - n] {
        alloc.set(c, Some(base_pos));
    }
    let pi = instance.priority(b);
    jset.sort_by_key(|&c| pi.rank(c));
    debug_assert!(jset.len() >= n);
    for &c in jset.iter().take(n) {
        alloc.set(c, Some(high_pos));
    }
    Ok(alloc)
}
