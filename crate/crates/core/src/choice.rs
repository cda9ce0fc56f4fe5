//! The multi-price choice rule of a single branch.

use crate::error::{Error, Result};
use crate::model::{BranchId, BranchSpec, CadetId, Contract, PriceLevel, PriorityOrder};
use crate::policy::PriceResponsivenessPolicy;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ChoiceResult {
    /// Base-price contracts chosen for base positions by baseline priority.
    pub base_selected: Vec<Contract>,
    /// Contracts chosen for flexible positions by the policy order.
    pub flex_selected: Vec<Contract>,
    pub rejected: Vec<Contract>,
}

impl ChoiceResult {
    pub fn selected(&self) -> impl Iterator<Item = &Contract> {
        self.base_selected.iter().chain(&self.flex_selected)
    }

    /// Number of selected contracts at an increased price.
    pub fn charged(&self) -> usize {
        self.flex_selected
            .iter()
            .filter(|c| c.price.is_increased())
            .count()
    }
}

/// Applies the choice rule of `branch` to `offered`.
///
/// Base positions go to the highest-priority base-price contracts. Among the
/// remaining cadets each keeps only its best contract under `omega`, and the
/// flexible positions go to the best of those under `omega`.
pub fn cmp_choice(
    branch_id: BranchId,
    branch: &BranchSpec,
    pi: &PriorityOrder,
    omega: &PriceResponsivenessPolicy,
    offered: &[Contract],
) -> Result<ChoiceResult> {
    let n = pi.len();
    if omega.n_cadets() != n {
        return Err(Error::ChoiceInput(
            "policy and priority cover different cadet sets".into(),
        ));
    }
    let mut pairs: Vec<(CadetId, PriceLevel)> = Vec::with_capacity(offered.len());
    for c in offered {
        if c.branch != branch_id {
            return Err(Error::ChoiceInput(format!(
                "contract ({}, {}, {}) names another branch",
                c.cadet, c.branch, c.price
            )));
        }
        if c.cadet.0 >= n || c.price.0 >= omega.n_prices() {
            return Err(Error::ChoiceInput(format!(
                "contract ({}, {}, {}) is out of range",
                c.cadet, c.branch, c.price
            )));
        }
        if !pairs.contains(&(c.cadet, c.price)) {
            pairs.push((c.cadet, c.price));
        }
    }
    let mut scratch = ChoiceScratch::new(n);
    let mut base = Vec::new();
    let mut flex = Vec::new();
    choose(branch.q_base(), branch.q_flex, pi, omega, &pairs, &mut scratch, &mut base, &mut flex);

    let contract = |k: usize| Contract {
        cadet: pairs[k].0,
        branch: branch_id,
        price: pairs[k].1,
    };
    let mut chosen = vec![false; pairs.len()];
    for &k in base.iter().chain(&flex) {
        chosen[k] = true;
    }
    Ok(ChoiceResult {
        base_selected: base.iter().map(|&k| contract(k)).collect(),
        flex_selected: flex.iter().map(|&k| contract(k)).collect(),
        rejected: (0..pairs.len()).filter(|&k| !chosen[k]).map(contract).collect(),
    })
}

/// Reusable buffers for [`choose`], sized to the cadet count.
#[derive(Clone, Debug)]
pub(crate) struct ChoiceScratch {
    best: Vec<usize>,
    won: Vec<bool>,
    buf: Vec<usize>,
}

impl ChoiceScratch {
    pub(crate) fn new(n_cadets: usize) -> Self {
        Self {
            best: vec![usize::MAX; n_cadets],
            won: vec![false; n_cadets],
            buf: Vec::new(),
        }
    }
}

/// Index-based core of the choice rule. Writes the positions in `offered` of
/// the base and flexible selections, each in selection order.
#[allow(clippy::too_many_arguments)]
pub(crate) fn choose(
    q_base: usize,
    q_flex: usize,
    pi: &PriorityOrder,
    omega: &PriceResponsivenessPolicy,
    offered: &[(CadetId, PriceLevel)],
    scratch: &mut ChoiceScratch,
    base_out: &mut Vec<usize>,
    flex_out: &mut Vec<usize>,
) {
    base_out.clear();
    flex_out.clear();

    base_out.extend((0..offered.len()).filter(|&k| offered[k].1.is_base()));
    base_out.sort_unstable_by_key(|&k| pi.rank(offered[k].0));
    base_out.truncate(q_base);
    for &k in base_out.iter() {
        scratch.won[offered[k].0 .0] = true;
    }

    let buf = &mut scratch.buf;
    buf.clear();
    for (k, &(c, t)) in offered.iter().enumerate() {
        if scratch.won[c.0] {
            continue;
        }
        let slot = &mut scratch.best[c.0];
        if *slot == usize::MAX {
            *slot = k;
            buf.push(c.0);
        } else {
            let (_, bt) = offered[*slot];
            if omega.rank(c, t) < omega.rank(c, bt) {
                *slot = k;
            }
        }
    }
    flex_out.extend(buf.iter().map(|&c| scratch.best[c]));
    flex_out.sort_unstable_by_key(|&k| omega.rank(offered[k].0, offered[k].1));
    flex_out.truncate(q_flex);

    for &c in buf.iter() {
        scratch.best[c] = usize::MAX;
    }
    for &k in base_out.iter() {
        scratch.won[offered[k].0 .0] = false;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::PriceLadder;
    use crate::policy::{build_tiered_policy, build_ultimate_policy, TierSpec};
    use proptest::prelude::*;

    fn c(i: usize, t: usize) -> Contract {
        Contract::new(i, 0, t)
    }

    // Example B.1 cadets in priority order: i6 i5 i4 i3 i2 i1 j1 j2 = 0..8
    const I6: usize = 0;
    const I5: usize = 1;
    const I4: usize = 2;
    const I3: usize = 3;
    const I2: usize = 4;
    const I1: usize = 5;
    const J1: usize = 6;
    const J2: usize = 7;

    #[test]
    fn example_terminal_offer_set() {
        let pi = PriorityOrder::identity(8);
        let ladder = PriceLadder::<f64>::uniform(2).unwrap();
        let omega = build_ultimate_policy(&pi, &ladder);
        let spec = BranchSpec::new("b", 6, 3).unwrap();
        let offered = [
            c(I6, 0), c(I5, 0), c(I4, 0), c(I3, 0), c(I2, 0),
            c(I1, 0), c(I1, 1), c(J1, 0), c(J1, 1), c(J2, 0),
        ];
        let r = cmp_choice(BranchId(0), &spec, &pi, &omega, &offered).unwrap();
        assert_eq!(r.base_selected, vec![c(I6, 0), c(I5, 0), c(I4, 0)]);
        assert_eq!(r.flex_selected, vec![c(I1, 1), c(J1, 1), c(I3, 0)]);
        assert_eq!(r.rejected.len(), 4);
        assert_eq!(r.charged(), 2);
    }

    #[test]
    fn no_rationing_selects_everything_at_base() {
        let pi = PriorityOrder::identity(4);
        let omega = build_ultimate_policy(&pi, &PriceLadder::<f64>::uniform(2).unwrap());
        let spec = BranchSpec::new("b", 4, 1).unwrap();
        let offered = [c(0, 0), c(2, 0)];
        let r = cmp_choice(BranchId(0), &spec, &pi, &omega, &offered).unwrap();
        assert_eq!(r.base_selected.len(), 2);
        assert!(r.flex_selected.is_empty() && r.rejected.is_empty());
    }

    #[test]
    fn foreign_branch_is_rejected() {
        let pi = PriorityOrder::identity(1);
        let omega = build_ultimate_policy(&pi, &PriceLadder::<f64>::uniform(1).unwrap());
        let spec = BranchSpec::new("b", 1, 0).unwrap();
        let err = cmp_choice(BranchId(0), &spec, &pi, &omega, &[Contract::new(0, 1, 0)]);
        assert!(matches!(err, Err(Error::ChoiceInput(_))));
    }

    fn offer_set(n: usize, h: usize) -> impl Strategy<Value = Vec<Contract>> {
        proptest::collection::vec((0..n, 0..h), 0..(n * h + 1))
            .prop_map(|v| v.into_iter().map(|(i, t)| c(i, t)).collect())
    }

    fn serial_dictatorship(pi: &PriorityOrder, offered: &[Contract], q: usize) -> Vec<Contract> {
        let mut base: Vec<Contract> = offered.iter().copied().filter(|x| x.price.0 == 0).collect();
        base.sort_by_key(|x| pi.rank(x.cadet));
        base.dedup();
        base.truncate(q);
        base
    }

    proptest! {
        #![proptest_config(ProptestConfig { cases: 10_000, ..ProptestConfig::default() })]

        #[test]
        fn choice_respects_bounds_and_partitions_input(
            n in 1usize..7,
            h in 1usize..4,
            q in 0usize..5,
            f_raw in 0usize..5,
            seed in any::<u64>(),
            raw in proptest::collection::vec((0usize..7, 0usize..4), 0..20),
        ) {
            let f = f_raw.min(q);
            let offered: Vec<Contract> = raw.into_iter().map(|(i, t)| c(i % n, t % h)).collect();
            let pi = PriorityOrder::from_key(n, |x| (x.0 as u64).wrapping_mul(seed | 1) % 97);
            let ladder = PriceLadder::<f64>::uniform(h).unwrap();
            let omega = if seed % 2 == 0 {
                build_ultimate_policy(&pi, &ladder)
            } else {
                build_tiered_policy(&pi, &TierSpec::bradso_2020(&pi), &ladder).unwrap()
            };
            let spec = BranchSpec::new("b", q, f).unwrap();
            let r = cmp_choice(BranchId(0), &spec, &pi, &omega, &offered).unwrap();
            prop_assert!(r.base_selected.len() <= q - f);
            prop_assert!(r.flex_selected.len() <= f);
            let mut cadets: Vec<_> = r.selected().map(|x| x.cadet).collect();
            let len = cadets.len();
            cadets.sort();
            cadets.dedup();
            prop_assert_eq!(cadets.len(), len);
            let mut all: Vec<Contract> = r.selected().chain(&r.rejected).copied().collect();
            all.sort();
            let mut input = offered.clone();
            input.sort();
            input.dedup();
            prop_assert_eq!(all, input);
        }

        #[test]
        fn zero_flex_is_serial_dictatorship(offered in offer_set(5, 2), q in 0usize..6) {
            let pi = PriorityOrder::new(vec![CadetId(3), CadetId(1), CadetId(4), CadetId(0), CadetId(2)], 5).unwrap();
            let omega = build_ultimate_policy(&pi, &PriceLadder::<f64>::uniform(2).unwrap());
            let spec = BranchSpec::new("b", q, 0).unwrap();
            let r = cmp_choice(BranchId(0), &spec, &pi, &omega, &offered).unwrap();
            prop_assert!(r.flex_selected.is_empty());
            prop_assert_eq!(r.base_selected, serial_dictatorship(&pi, &offered, q));
        }
    }
}
