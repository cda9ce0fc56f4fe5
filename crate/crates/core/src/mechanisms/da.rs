use crate::model::{BranchId, CadetId, Instance, PriorityOrder};
use crate::scalar::Scalar;

/// Branch of every cadet, `None` when unmatched.
pub type BranchMatching = Vec<Option<BranchId>>;

/// Cadet-proposing deferred acceptance over branch rankings.
///
/// `branch_prefs[i]` lists cadet `i`'s acceptable branches, best first.
pub fn da(
    capacities: &[usize],
    branch_prefs: &[Vec<BranchId>],
    priorities: &[PriorityOrder],
) -> BranchMatching {
    let n = branch_prefs.len();
    let mut next = vec![0usize; n];
    let mut matched: BranchMatching = vec![None; n];
    let mut held: Vec<Vec<CadetId>> = vec![Vec::new(); capacities.len()];
    let mut free: Vec<CadetId> = (0..n).rev().map(CadetId).collect();
    while let Some(i) = free.pop() {
        let Some(&b) = branch_prefs[i.0].get(next[i.0]) else {
            continue;
        };
        next[i.0] += 1;
        let pool = &mut held[b.0];
        pool.push(i);
        if pool.len() <= capacities[b.0] {
            matched[i.0] = Some(b);
            continue;
        }
        let pi = &priorities[b.0];
        let (worst_pos, &worst) = pool
            .iter()
            .enumerate()
            .max_by_key(|(_, c)| pi.rank(**c))
            .expect("pool is non-empty");
        pool.swap_remove(worst_pos);
        matched[worst.0] = None;
        if worst != i {
            matched[i.0] = Some(b);
        }
        free.push(worst);
    }
    matched
}

/// [`da`] with the instance's total capacities and baseline priorities.
pub fn da_instance<S: Scalar>(instance: &Instance<S>, branch_prefs: &[Vec<BranchId>]) -> BranchMatching {
    let caps: Vec<usize> = instance.branches().iter().map(|b| b.q_total).collect();
    da(&caps, branch_prefs, instance.priorities())
}

/// Every `(cadet, branch)` pair where the cadet prefers the branch to their
/// match and the branch has a free seat or holds a lower-priority cadet.
pub fn da_blocking_pairs(
    capacities: &[usize],
    branch_prefs: &[Vec<BranchId>],
    priorities: &[PriorityOrder],
    matching: &[Option<BranchId>],
) -> Vec<(CadetId, BranchId)> {
    let mut out = Vec::new();
    for (i, prefs) in branch_prefs.iter().enumerate() {
        let current = matching[i].map_or(prefs.len(), |m| {
            prefs.iter().position(|&b| b == m).unwrap_or(prefs.len())
        });
        for &b in &prefs[..current] {
            let members: Vec<CadetId> = (0..matching.len())
                .filter(|&j| matching[j] == Some(b))
                .map(CadetId)
                .collect();
            let has_room = members.len() < capacities[b.0];
            if has_room || members.iter().any(|&j| priorities[b.0].outranks(CadetId(i), j)) {
                out.push((CadetId(i), b));
            }
        }
    }
    out
}
