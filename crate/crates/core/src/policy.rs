//! Price responsiveness policies: strict orders on cadet-price pairs that say
//! when willingness to pay more overturns baseline priority.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::model::{CadetId, PriceLadder, PriceLevel, PriorityOrder};
use crate::scalar::Scalar;

/// Strict total order over all `(cadet, price level)` pairs of one branch,
/// best first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PriceResponsivenessPolicy {
    n_cadets: usize,
    n_prices: usize,
    order: Vec<(CadetId, PriceLevel)>,
    rank: Vec<usize>,
}

impl PriceResponsivenessPolicy {
    /// Wraps an explicit order. Only checks that `order` is a permutation of
    /// the pair universe; use [`is_valid_policy`] for the coherence properties.
    pub fn from_order(
        n_cadets: usize,
        n_prices: usize,
        order: Vec<(CadetId, PriceLevel)>,
    ) -> Result<Self> {
        if order.len() != n_cadets * n_prices {
            return Err(Error::Policy(format!(
                "order has {} pairs, expected {}",
                order.len(),
                n_cadets * n_prices
            )));
        }
        let mut rank = vec![usize::MAX; order.len()];
        for (pos, &(c, t)) in order.iter().enumerate() {
            if c.0 >= n_cadets || t.0 >= n_prices {
                return Err(Error::Policy(format!("pair ({}, {}) out of range", c.0, t.0)));
            }
            let slot = c.0 * n_prices + t.0;
            if rank[slot] != usize::MAX {
                return Err(Error::Policy(format!("pair ({}, {}) listed twice", c.0, t.0)));
            }
            rank[slot] = pos;
        }
        Ok(Self {
            n_cadets,
            n_prices,
            order,
            rank,
        })
    }

    fn from_sorted(n_cadets: usize, n_prices: usize, order: Vec<(CadetId, PriceLevel)>) -> Self {
        let mut rank = vec![0; order.len()];
        for (pos, &(c, t)) in order.iter().enumerate() {
            rank[c.0 * n_prices + t.0] = pos;
        }
        Self {
            n_cadets,
            n_prices,
            order,
            rank,
        }
    }

    fn all_pairs(n_cadets: usize, n_prices: usize) -> Vec<(CadetId, PriceLevel)> {
        (0..n_cadets)
            .flat_map(|c| (0..n_prices).map(move |t| (CadetId(c), PriceLevel(t))))
            .collect()
    }

    pub fn n_cadets(&self) -> usize {
        self.n_cadets
    }

    pub fn n_prices(&self) -> usize {
        self.n_prices
    }

    pub fn order(&self) -> &[(CadetId, PriceLevel)] {
        &self.order
    }

    /// Position of the pair, 0 being the strongest claim.
    #[inline]
    pub fn rank(&self, cadet: CadetId, price: PriceLevel) -> usize {
        self.rank[cadet.0 * self.n_prices + price.0]
    }

    /// `(a, ta)` has a strictly stronger claim than `(b, tb)`.
    #[inline]
    pub fn outranks(&self, a: (CadetId, PriceLevel), b: (CadetId, PriceLevel)) -> bool {
        self.rank(a.0, a.1) < self.rank(b.0, b.1)
    }
}

/// Willingness to pay any higher price overrides every baseline difference.
pub fn build_ultimate_policy<S: Scalar>(
    pi: &PriorityOrder,
    ladder: &PriceLadder<S>,
) -> PriceResponsivenessPolicy {
    let (n, h) = (pi.len(), ladder.len());
    let mut order = PriceResponsivenessPolicy::all_pairs(n, h);
    order.sort_by_key(|&(c, t)| (std::cmp::Reverse(t), pi.rank(c)));
    PriceResponsivenessPolicy::from_sorted(n, h, order)
}

/// Least responsive policy: baseline priority first, own price second.
pub fn build_baseline_policy<S: Scalar>(
    pi: &PriorityOrder,
    ladder: &PriceLadder<S>,
) -> PriceResponsivenessPolicy {
    let (n, h) = (pi.len(), ladder.len());
    let mut order = PriceResponsivenessPolicy::all_pairs(n, h);
    order.sort_by_key(|&(c, t)| (pi.rank(c), std::cmp::Reverse(t)));
    PriceResponsivenessPolicy::from_sorted(n, h, order)
}

/// Whom a tier's cadets can jump over by paying a higher price.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum JumpScope {
    WithinTier,
    OverAll,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tier {
    pub cadets: Vec<CadetId>,
    pub scope: JumpScope,
}

/// Ordered partition of cadets into tiers, highest tier first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TierSpec {
    pub tiers: Vec<Tier>,
}

impl TierSpec {
    /// Cuts `pi` into consecutive tiers of the given sizes.
    pub fn split(pi: &PriorityOrder, sizes: &[usize], scopes: &[JumpScope]) -> Result<Self> {
        if sizes.len() != scopes.len() {
            return Err(Error::Tiers("one scope per tier is required".into()));
        }
        if sizes.iter().sum::<usize>() != pi.len() {
            return Err(Error::Tiers(format!(
                "tier sizes sum to {}, expected {}",
                sizes.iter().sum::<usize>(),
                pi.len()
            )));
        }
        let mut at = 0;
        let tiers = sizes
            .iter()
            .zip(scopes)
            .map(|(&len, &scope)| {
                let cadets = pi.ranking()[at..at + len].to_vec();
                at += len;
                Tier { cadets, scope }
            })
            .collect();
        Ok(Self { tiers })
    }

    /// Sizes of a high/medium/low split by thirds of `n` (rounded down for the
    /// top two tiers).
    pub fn thirds(n: usize) -> [usize; 3] {
        let high = n / 3;
        let medium = n / 3;
        [high, medium, n - high - medium]
    }

    /// High, medium and low tiers where higher prices only help within a tier.
    pub fn bradso_2020(pi: &PriorityOrder) -> Self {
        Self::split(pi, &Self::thirds(pi.len()), &[JumpScope::WithinTier; 3])
            .expect("thirds partition the cadet set")
    }

    /// High and medium tiers jump over everyone; low tier only within itself.
    pub fn bradso_2021(pi: &PriorityOrder) -> Self {
        Self::split(
            pi,
            &Self::thirds(pi.len()),
            &[JumpScope::OverAll, JumpScope::OverAll, JumpScope::WithinTier],
        )
        .expect("thirds partition the cadet set")
    }

    /// Tier index of every cadet, after checking the partition against `pi`.
    fn tier_of(&self, pi: &PriorityOrder) -> Result<Vec<usize>> {
        let n = pi.len();
        let mut tier_of = vec![usize::MAX; n];
        for (l, tier) in self.tiers.iter().enumerate() {
            for &c in &tier.cadets {
                if c.0 >= n {
                    return Err(Error::Tiers(format!("unknown cadet index {}", c.0)));
                }
                if tier_of[c.0] != usize::MAX {
                    return Err(Error::Tiers(format!("cadet index {} in two tiers", c.0)));
                }
                tier_of[c.0] = l;
            }
        }
        if let Some(c) = tier_of.iter().position(|&l| l == usize::MAX) {
            return Err(Error::Tiers(format!("cadet index {c} is in no tier")));
        }
        let ranking = pi.ranking();
        if let Some(w) = ranking.windows(2).find(|w| tier_of[w[0].0] > tier_of[w[1].0]) {
            return Err(Error::Tiers(format!(
                "cadet index {} outranks cadet index {} but sits in a lower tier",
                w[0].0, w[1].0
            )));
        }
        Ok(tier_of)
    }
}

/// Tiered policy: a cadet paying more outranks a lower-paying cadet with
/// higher baseline priority only if its tier's jump scope covers that cadet.
///
/// Fails on partitions inconsistent with `pi`, or on scope combinations that
/// do not induce a transitive order.
pub fn build_tiered_policy<S: Scalar>(
    pi: &PriorityOrder,
    tiers: &TierSpec,
    ladder: &PriceLadder<S>,
) -> Result<PriceResponsivenessPolicy> {
    let tier_of = tiers.tier_of(pi)?;
    let scope: Vec<JumpScope> = tiers.tiers.iter().map(|t| t.scope).collect();
    let (n, h) = (pi.len(), ladder.len());

    let beats = |(i, ti): (CadetId, PriceLevel), (j, tj): (CadetId, PriceLevel)| -> bool {
        if i == j {
            return ti > tj;
        }
        if ti == tj {
            return pi.outranks(i, j);
        }
        if ti < tj {
            return !jumps(j, i, tier_of.as_slice(), &scope, pi);
        }
        jumps(i, j, tier_of.as_slice(), &scope, pi)
    };

    // Rank by number of pairs beaten: for a transitive relation this is the
    // order itself, and sorting by a count cannot trip over incoherent scopes.
    let pairs = PriceResponsivenessPolicy::all_pairs(n, h);
    let mut order: Vec<(usize, (CadetId, PriceLevel))> = pairs
        .iter()
        .map(|&a| (pairs.iter().filter(|&&b| a != b && beats(a, b)).count(), a))
        .collect();
    order.sort_by(|x, y| y.0.cmp(&x.0));
    let order: Vec<(CadetId, PriceLevel)> = order.into_iter().map(|(_, a)| a).collect();
    for (x, &a) in order.iter().enumerate() {
        for &b in &order[x + 1..] {
            if !beats(a, b) {
                return Err(Error::Tiers(
                    "jump scopes do not induce a transitive order".into(),
                ));
            }
        }
    }
    Ok(PriceResponsivenessPolicy::from_sorted(n, h, order))
}

/// Whether `i`, paying strictly more, takes precedence over `j`.
fn jumps(
    i: CadetId,
    j: CadetId,
    tier_of: &[usize],
    scope: &[JumpScope],
    pi: &PriorityOrder,
) -> bool {
    if pi.outranks(i, j) {
        return true;
    }
    match scope[tier_of[i.0]] {
        JumpScope::OverAll => true,
        JumpScope::WithinTier => tier_of[i.0] == tier_of[j.0],
    }
}

/// Merit scores plus a per-price boost.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoringSpec<S> {
    pub merit: Vec<S>,
    pub boost: Vec<S>,
    pub tiebreak: PriorityOrder,
}

impl<S: Scalar> ScoringSpec<S> {
    /// Boost growing linearly with the price: `rate * (t - t^0)`.
    pub fn linear_boost(
        merit: Vec<S>,
        ladder: &PriceLadder<S>,
        rate: S,
        tiebreak: PriorityOrder,
    ) -> Self {
        let base = ladder.values()[0].clone();
        let boost = ladder
            .values()
            .iter()
            .map(|t| rate.clone() * (t.clone() - base.clone()))
            .collect();
        Self {
            merit,
            boost,
            tiebreak,
        }
    }

    /// Baseline priority implied by merit, ties resolved by `tiebreak`.
    pub fn merit_order(&self) -> PriorityOrder {
        let n = self.merit.len();
        let mut ranking: Vec<CadetId> = (0..n).map(CadetId).collect();
        ranking.sort_by(|&a, &b| {
            self.merit[b.0]
                .partial_cmp(&self.merit[a.0])
                .unwrap_or(Ordering::Equal)
                .then_with(|| self.tiebreak.rank(a).cmp(&self.tiebreak.rank(b)))
        });
        PriorityOrder::new(ranking, n).expect("permutation of cadets")
    }

    fn validate(&self, ladder_len: usize) -> Result<()> {
        if self.boost.len() != ladder_len {
            return Err(Error::Scoring(format!(
                "{} boosts for {} prices",
                self.boost.len(),
                ladder_len
            )));
        }
        if self.boost[0] != S::zero() {
            return Err(Error::Scoring("boost at the base price must be 0".into()));
        }
        if self.boost.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Scoring("boost must be strictly increasing".into()));
        }
        if self.tiebreak.len() != self.merit.len() {
            return Err(Error::Scoring("tiebreak must rank every cadet".into()));
        }
        if let Some(i) = self.merit.iter().position(|m| !m.is_non_negative()) {
            return Err(Error::Scoring(format!("merit of cadet index {i} is negative")));
        }
        Ok(())
    }
}

/// `(i, t)` beats `(j, t')` iff `m_i + S(t) > m_j + S(t')`; equal totals go to
/// the tiebreak order, and a cadet's own pairs by price.
pub fn build_scoring_policy<S: Scalar>(
    spec: &ScoringSpec<S>,
    ladder: &PriceLadder<S>,
) -> Result<PriceResponsivenessPolicy> {
    spec.validate(ladder.len())?;
    let (n, h) = (spec.merit.len(), ladder.len());
    let total =
        |(c, t): (CadetId, PriceLevel)| spec.merit[c.0].clone() + spec.boost[t.0].clone();
    let mut order = PriceResponsivenessPolicy::all_pairs(n, h);
    order.sort_by(|&a, &b| {
        total(b)
            .partial_cmp(&total(a))
            .unwrap_or(Ordering::Equal)
            .then_with(|| spec.tiebreak.rank(a.0).cmp(&spec.tiebreak.rank(b.0)))
            .then_with(|| b.1.cmp(&a.1))
    });
    Ok(PriceResponsivenessPolicy::from_sorted(n, h, order))
}

/// Checks the two coherence properties: same-price pairs follow `pi`, and
/// each cadet's higher price outranks their lower price.
pub fn is_valid_policy(omega: &PriceResponsivenessPolicy, pi: &PriorityOrder) -> bool {
    if omega.n_cadets != pi.len() {
        return false;
    }
    let h = omega.n_prices;
    let ranking = pi.ranking();
    for t in 0..h {
        let t = PriceLevel(t);
        if ranking
            .windows(2)
            .any(|w| !omega.outranks((w[0], t), (w[1], t)))
        {
            return false;
        }
    }
    (0..omega.n_cadets).all(|c| {
        (1..h).all(|t| omega.outranks((CadetId(c), PriceLevel(t)), (CadetId(c), PriceLevel(t - 1))))
    })
}

/// `nu` is more responsive to a price increase than `omega`: every
/// higher-price win under `omega` is also a win under `nu`.
pub fn more_responsive(nu: &PriceResponsivenessPolicy, omega: &PriceResponsivenessPolicy) -> bool {
    if nu.n_cadets != omega.n_cadets || nu.n_prices != omega.n_prices {
        return false;
    }
    let (n, h) = (omega.n_cadets, omega.n_prices);
    for i in (0..n).map(CadetId) {
        for j in (0..n).map(CadetId) {
            for hi in 1..h {
                for lo in 0..hi {
                    let a = (i, PriceLevel(hi));
                    let b = (j, PriceLevel(lo));
                    if omega.outranks(a, b) && !nu.outranks(a, b) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Every valid policy for `pi` over `n_prices` levels. Refuses when the
/// count exceeds `limit`.
pub fn enumerate_policies(
    pi: &PriorityOrder,
    n_prices: usize,
    limit: u128,
) -> Result<Vec<PriceResponsivenessPolicy>> {
    let n = pi.len();
    let count = count_policies(n, n_prices);
    if count > limit {
        return Err(Error::GuardExceeded {
            what: "price responsiveness policies".into(),
            count,
            limit,
        });
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut emitted = vec![0usize; n_prices];
    let mut order = Vec::with_capacity(n * n_prices);
    policy_dfs(pi, n_prices, &mut emitted, &mut order, &mut out);
    Ok(out)
}

fn policy_dfs(
    pi: &PriorityOrder,
    h: usize,
    emitted: &mut [usize],
    order: &mut Vec<(CadetId, PriceLevel)>,
    out: &mut Vec<PriceResponsivenessPolicy>,
) {
    let n = pi.len();
    if order.len() == n * h {
        out.push(PriceResponsivenessPolicy::from_sorted(n, h, order.clone()));
        return;
    }
    for t in 0..h {
        let k = emitted[t];
        // next cadet at level t must already have all higher levels placed
        if k < n && (t + 1..h).all(|u| emitted[u] > k) {
            order.push((pi.ranking()[k], PriceLevel(t)));
            emitted[t] += 1;
            policy_dfs(pi, h, emitted, order, out);
            emitted[t] -= 1;
            order.pop();
        }
    }
}

/// Number of valid policies for `n` cadets and `h` price levels.
pub fn count_policies(n: usize, h: usize) -> u128 {
    fn go(emitted: &mut [usize], n: usize, memo: &mut std::collections::HashMap<Vec<usize>, u128>) -> u128 {
        if emitted.iter().all(|&e| e == n) {
            return 1;
        }
        if let Some(&v) = memo.get(emitted) {
            return v;
        }
        let h = emitted.len();
        let mut total: u128 = 0;
        for t in 0..h {
            let k = emitted[t];
            if k < n && (t + 1..h).all(|u| emitted[u] > k) {
                emitted[t] += 1;
                total = total.saturating_add(go(emitted, n, memo));
                emitted[t] -= 1;
            }
        }
        memo.insert(emitted.to_vec(), total);
        total
    }
    if h == 0 {
        return u128::from(n == 0);
    }
    go(&mut vec![0; h], n, &mut Default::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;

    fn pair(c: usize, t: usize) -> (CadetId, PriceLevel) {
        (CadetId(c), PriceLevel(t))
    }

    fn ladder(h: usize) -> PriceLadder<f64> {
        PriceLadder::uniform(h).unwrap()
    }

    #[test]
    fn ultimate_lets_lowest_priority_jump_highest() {
        // i6 > i5 > ... > i1 > j1 > j2 encoded as 0..8
        let pi = PriorityOrder::identity(8);
        let omega = build_ultimate_policy(&pi, &ladder(2));
        assert!(omega.outranks(pair(7, 1), pair(0, 0)));
        assert!(is_valid_policy(&omega, &pi));
    }

    #[test]
    fn ultimate_single_cadet_is_price_descending() {
        let omega = build_ultimate_policy(&PriorityOrder::identity(1), &ladder(4));
        let prices: Vec<usize> = omega.order().iter().map(|p| p.1 .0).collect();
        assert_eq!(prices, vec![3, 2, 1, 0]);
    }

    #[test]
    fn ultimate_matches_clause_sort_for_three_cadets() {
        let pi = PriorityOrder::new(vec![CadetId(2), CadetId(0), CadetId(1)], 3).unwrap();
        let omega = build_ultimate_policy(&pi, &ladder(2));
        // price descending, then baseline priority
        let expected = vec![pair(2, 1), pair(0, 1), pair(1, 1), pair(2, 0), pair(0, 0), pair(1, 0)];
        assert_eq!(omega.order(), expected.as_slice());
    }

    #[test]
    fn swapped_same_price_pairs_are_invalid() {
        let pi = PriorityOrder::identity(2);
        let omega = build_ultimate_policy(&pi, &ladder(2));
        let mut order = omega.order().to_vec();
        order.swap(0, 1);
        let bad = PriceResponsivenessPolicy::from_order(2, 2, order).unwrap();
        assert!(!is_valid_policy(&bad, &pi));
    }

    #[test]
    fn own_lower_price_above_higher_is_invalid() {
        let bad = PriceResponsivenessPolicy::from_order(1, 2, vec![pair(0, 0), pair(0, 1)]).unwrap();
        assert!(!is_valid_policy(&bad, &PriorityOrder::identity(1)));
    }

    #[test]
    fn tiered_2020_keeps_high_tier_above_paying_medium() {
        let pi = PriorityOrder::identity(6);
        let omega = build_tiered_policy(&pi, &TierSpec::bradso_2020(&pi), &ladder(2)).unwrap();
        // cadet 2 is medium tier, cadet 0 high tier
        assert!(omega.outranks(pair(0, 0), pair(2, 1)));
        assert!(omega.outranks(pair(3, 1), pair(2, 0)));
    }

    #[test]
    fn tiered_2021_lets_paying_medium_jump_high() {
        let pi = PriorityOrder::identity(6);
        let omega = build_tiered_policy(&pi, &TierSpec::bradso_2021(&pi), &ladder(2)).unwrap();
        assert!(omega.outranks(pair(2, 1), pair(0, 0)));
        // low tier only within itself
        assert!(omega.outranks(pair(3, 0), pair(4, 1)));
        assert!(omega.outranks(pair(5, 1), pair(4, 0)));
    }

    #[test]
    fn tiered_single_overall_tier_is_ultimate() {
        let pi = PriorityOrder::new((0..5).rev().map(CadetId).collect(), 5).unwrap();
        let tiers = TierSpec::split(&pi, &[5], &[JumpScope::OverAll]).unwrap();
        let l = ladder(3);
        assert_eq!(
            build_tiered_policy(&pi, &tiers, &l).unwrap(),
            build_ultimate_policy(&pi, &l)
        );
    }

    #[test]
    fn tiered_rejects_partition_out_of_priority_order() {
        let pi = PriorityOrder::identity(3);
        let tiers = TierSpec {
            tiers: vec![
                Tier { cadets: vec![CadetId(1)], scope: JumpScope::WithinTier },
                Tier { cadets: vec![CadetId(0), CadetId(2)], scope: JumpScope::WithinTier },
            ],
        };
        assert!(matches!(
            build_tiered_policy(&pi, &tiers, &ladder(2)),
            Err(Error::Tiers(_))
        ));
        let missing = TierSpec {
            tiers: vec![Tier { cadets: vec![CadetId(0)], scope: JumpScope::OverAll }],
        };
        assert!(build_tiered_policy(&pi, &missing, &ladder(2)).is_err());
    }

    #[test]
    fn tiered_same_tier_cadets_are_jumped_together() {
        let pi = PriorityOrder::identity(7);
        let tiers = TierSpec::split(
            &pi,
            &[2, 3, 2],
            &[JumpScope::WithinTier, JumpScope::OverAll, JumpScope::WithinTier],
        )
        .unwrap();
        let omega = build_tiered_policy(&pi, &tiers, &ladder(3)).unwrap();
        for (l, tier) in tiers.tiers.iter().enumerate() {
            let _ = l;
            for &i in &tier.cadets {
                for &j in &tier.cadets {
                    for k in (0..7).map(CadetId) {
                        if !(pi.outranks(i, k) && pi.outranks(j, k)) {
                            continue;
                        }
                        for hi in 1..3 {
                            for lo in 0..hi {
                                let kt = (k, PriceLevel(hi));
                                assert_eq!(
                                    omega.outranks(kt, (i, PriceLevel(lo))),
                                    omega.outranks(kt, (j, PriceLevel(lo)))
                                );
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn scoring_boost_of_ten_per_step() {
        let l = PriceLadder::new(vec![Rational64::from(5), Rational64::from(6)]).unwrap();
        let merit = vec![Rational64::from(95), Rational64::from(88)];
        let spec = ScoringSpec::linear_boost(merit, &l, Rational64::from(10), PriorityOrder::identity(2));
        let omega = build_scoring_policy(&spec, &l).unwrap();
        assert!(omega.outranks(pair(1, 1), pair(0, 0)));
        assert!(is_valid_policy(&omega, &spec.merit_order()));
    }

    #[test]
    fn scoring_matches_independent_sort() {
        // merits chosen so that some totals tie
        let merit = vec![3.0, 7.0, 5.0];
        let boost = vec![0.0, 2.0, 4.0, 6.0];
        let tiebreak = PriorityOrder::new(vec![CadetId(1), CadetId(2), CadetId(0)], 3).unwrap();
        let spec = ScoringSpec { merit: merit.clone(), boost: boost.clone(), tiebreak: tiebreak.clone() };
        let omega = build_scoring_policy(&spec, &ladder(4)).unwrap();
        let mut expected: Vec<(CadetId, PriceLevel)> =
            (0..3).flat_map(|c| (0..4).map(move |t| pair(c, t))).collect();
        // score descending, then tiebreak rank, then price descending
        expected.sort_by(|a, b| {
            let sa = merit[a.0 .0] + boost[a.1 .0];
            let sb = merit[b.0 .0] + boost[b.1 .0];
            sb.partial_cmp(&sa)
                .unwrap()
                .then(tiebreak.rank(a.0).cmp(&tiebreak.rank(b.0)))
                .then(b.1.cmp(&a.1))
        });
        assert_eq!(omega.order(), expected.as_slice());
        assert!(is_valid_policy(&omega, &spec.merit_order()));
    }

    #[test]
    fn scoring_equal_boosts_reduce_to_priority_per_level() {
        let spec = ScoringSpec {
            merit: vec![1.0, 9.0, 4.0],
            boost: vec![0.0, 100.0],
            tiebreak: PriorityOrder::identity(3),
        };
        let omega = build_scoring_policy(&spec, &ladder(2)).unwrap();
        let firsts: Vec<usize> = omega.order()[..3].iter().map(|p| p.0 .0).collect();
        assert_eq!(firsts, vec![1, 2, 0]);
    }

    #[test]
    fn scoring_rejects_bad_boost() {
        let spec = ScoringSpec {
            merit: vec![1.0],
            boost: vec![1.0, 2.0],
            tiebreak: PriorityOrder::identity(1),
        };
        assert!(build_scoring_policy(&spec, &ladder(2)).is_err());
        let flat = ScoringSpec { boost: vec![0.0, 0.0], ..spec };
        assert!(build_scoring_policy(&flat, &ladder(2)).is_err());
    }

    #[test]
    fn responsiveness_chain_ultimate_2021_2020() {
        let pi = PriorityOrder::identity(9);
        let l = ladder(2);
        let ult = build_ultimate_policy(&pi, &l);
        let y21 = build_tiered_policy(&pi, &TierSpec::bradso_2021(&pi), &l).unwrap();
        let y20 = build_tiered_policy(&pi, &TierSpec::bradso_2020(&pi), &l).unwrap();
        assert!(more_responsive(&ult, &y21));
        assert!(more_responsive(&y21, &y20));
        assert!(more_responsive(&y20, &y20));
        assert!(!more_responsive(&y20, &ult));
    }

    #[test]
    fn policy_counts_follow_catalan_for_two_prices() {
        for (n, c) in [(0, 1), (1, 1), (2, 2), (3, 5), (4, 14), (5, 42)] {
            assert_eq!(count_policies(n, 2), c);
            let all = enumerate_policies(&PriorityOrder::identity(n), 2, 1000).unwrap();
            assert_eq!(all.len() as u128, c);
        }
    }

    #[test]
    fn enumerated_policies_are_exactly_the_valid_orders() {
        // brute force over all permutations of the 6 pairs of 3 cadets x 2 prices
        let pi = PriorityOrder::new(vec![CadetId(1), CadetId(2), CadetId(0)], 3).unwrap();
        let pairs: Vec<_> = (0..3).flat_map(|c| (0..2).map(move |t| pair(c, t))).collect();
        let mut valid = Vec::new();
        permute(&mut pairs.clone(), 0, &mut |perm| {
            let p = PriceResponsivenessPolicy::from_order(3, 2, perm.to_vec()).unwrap();
            if is_valid_policy(&p, &pi) {
                valid.push(p);
            }
        });
        let mut got = enumerate_policies(&pi, 2, 100).unwrap();
        let key = |p: &PriceResponsivenessPolicy| p.order().to_vec();
        valid.sort_by_key(key);
        got.sort_by_key(key);
        assert_eq!(valid, got);
    }

    fn permute<T: Clone>(v: &mut Vec<T>, k: usize, f: &mut impl FnMut(&[T])) {
        if k == v.len() {
            f(v);
            return;
        }
        for i in k..v.len() {
            v.swap(k, i);
            permute(v, k + 1, f);
            v.swap(k, i);
        }
    }

    #[test]
    fn enumeration_guard_refuses() {
        assert!(matches!(
            enumerate_policies(&PriorityOrder::identity(10), 3, 10),
            Err(Error::GuardExceeded { .. })
        ));
    }
}
