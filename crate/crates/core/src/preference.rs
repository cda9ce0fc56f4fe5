//! Cadet preferences over branch-price pairs and the unmatched option.

use crate::error::{Error, Result};
use crate::model::{Assignment, BranchId, PriceLevel, Position};

/// Default limit on exhaustive enumerations.
pub const DEFAULT_ENUMERATION_GUARD: u128 = 10_000_000;

/// Strict ranking over `(branch, price)` pairs and `∅`.
///
/// `acceptable` lists the pairs ranked above `∅`, best first. `tail` lists
/// pairs explicitly ranked below `∅`. Any pair in neither list ranks below the
/// tail, ordered by price level and then branch index, which keeps the full
/// ranking price-monotone.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PreferenceRelation {
    acceptable: Vec<Position>,
    tail: Vec<Position>,
}

impl PreferenceRelation {
    /// Truncated relation: `acceptable` above `∅`, everything else below.
    pub fn new(acceptable: Vec<Position>) -> Self {
        Self {
            acceptable,
            tail: Vec::new(),
        }
    }

    pub fn with_tail(acceptable: Vec<Position>, tail: Vec<Position>) -> Self {
        Self { acceptable, tail }
    }

    /// Relation ranking `∅` first.
    pub fn unmatched_only() -> Self {
        Self::default()
    }

    /// Builds a relation from a ranked list where `None` marks `∅`. Without an
    /// explicit marker every listed pair is acceptable.
    pub fn from_entries(entries: &[Assignment]) -> Result<Self, String> {
        let mut acceptable = Vec::new();
        let mut tail = Vec::new();
        let mut seen_unmatched = false;
        for e in entries {
            match (e, seen_unmatched) {
                (None, true) => return Err("unmatched marker listed twice".into()),
                (None, false) => seen_unmatched = true,
                (Some(p), false) => acceptable.push(*p),
                (Some(p), true) => tail.push(*p),
            }
        }
        Ok(Self { acceptable, tail })
    }

    /// Single-branch, consecutive-price relation listing levels `0..k`.
    pub fn prefix(branch: usize, k: usize) -> Self {
        Self::new((0..k).map(|t| Position::new(branch, t)).collect())
    }

    pub fn acceptable(&self) -> &[Position] {
        &self.acceptable
    }

    pub fn tail(&self) -> &[Position] {
        &self.tail
    }

    /// Entries as written, `None` marking `∅` (omitted when the tail is empty
    /// is not allowed; the marker is always emitted).
    pub fn entries(&self) -> Vec<Assignment> {
        self.acceptable
            .iter()
            .map(|&p| Some(p))
            .chain(std::iter::once(None))
            .chain(self.tail.iter().map(|&p| Some(p)))
            .collect()
    }

    pub fn is_acceptable(&self, pos: Position) -> bool {
        self.acceptable.contains(&pos)
    }

    /// Total-order key; smaller is better.
    pub fn key(&self, a: Assignment) -> (u8, usize, usize) {
        match a {
            None => (1, 0, 0),
            Some(p) => {
                if let Some(k) = self.acceptable.iter().position(|&q| q == p) {
                    (0, k, 0)
                } else if let Some(k) = self.tail.iter().position(|&q| q == p) {
                    (2, k, 0)
                } else {
                    (3, p.price.0, p.branch.0)
                }
            }
        }
    }

    /// `a` is strictly preferred to `b`.
    pub fn prefers(&self, a: Assignment, b: Assignment) -> bool {
        self.key(a) < self.key(b)
    }

    /// `a` is weakly preferred to `b`.
    pub fn weakly_prefers(&self, a: Assignment, b: Assignment) -> bool {
        self.key(a) <= self.key(b)
    }

    /// The most preferred acceptable price level at `branch`, if any.
    pub fn cheapest_acceptable(&self, branch: BranchId) -> Option<PriceLevel> {
        self.acceptable
            .iter()
            .filter(|p| p.branch == branch)
            .map(|p| p.price)
            .min()
    }

    /// The complete ranking over all pairs with `∅` moved to the bottom.
    pub fn with_unmatched_last(&self, n_branches: usize, n_prices: usize) -> Self {
        let mut acceptable = self.acceptable.clone();
        acceptable.extend_from_slice(&self.tail);
        let mut rest: Vec<Position> = (0..n_prices)
            .flat_map(|t| (0..n_branches).map(move |b| Position::new(b, t)))
            .filter(|p| !acceptable.contains(p))
            .collect();
        rest.sort_by_key(|p| (p.price, p.branch));
        acceptable.extend(rest);
        Self::new(acceptable)
    }

    /// Checks ids, duplicates and price monotonicity within each branch.
    pub fn validate(&self, n_branches: usize, n_prices: usize) -> Result<(), String> {
        let mut next_price = vec![0usize; n_branches];
        for (k, p) in self.acceptable.iter().chain(&self.tail).enumerate() {
            if p.branch.0 >= n_branches {
                return Err(format!("entry {k} names unknown branch index {}", p.branch.0));
            }
            if p.price.0 >= n_prices {
                return Err(format!("entry {k} names unknown price index {}", p.price.0));
            }
            let expected = next_price[p.branch.0];
            if p.price.0 < expected {
                return Err(format!("entry {k} repeats {p}"));
            }
            if p.price.0 > expected {
                return Err(format!(
                    "entry {k} ranks {p} above the cheaper price {} at the same branch",
                    PriceLevel(expected)
                ));
            }
            next_price[p.branch.0] += 1;
        }
        Ok(())
    }
}

/// Number of truncated price-monotone relations over `n_branches` branches
/// and `n_prices` levels: every interleaving of per-branch price prefixes.
pub fn count_preferences(n_branches: usize, n_prices: usize) -> u128 {
    // dp[k] = number of sequences of length k over the branches seen so far
    let mut dp: Vec<u128> = vec![1];
    for _ in 0..n_branches {
        let mut next = vec![0u128; dp.len() + n_prices];
        for (len, &ways) in dp.iter().enumerate() {
            for add in 0..=n_prices {
                let interleavings = binomial(len + add, add);
                next[len + add] = next[len + add].saturating_add(ways.saturating_mul(interleavings));
            }
        }
        dp = next;
    }
    dp.iter().fold(0u128, |acc, &x| acc.saturating_add(x))
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    r
}

/// Every truncated price-monotone relation, in depth-first order starting
/// with `∅` alone. Relations that also rank pairs below `∅` are behaviorally
/// equivalent to their truncation for every mechanism here, so they are not
/// generated.
pub fn enumerate_preferences(
    n_branches: usize,
    n_prices: usize,
    guard: u128,
) -> Result<Vec<PreferenceRelation>> {
    let count = count_preferences(n_branches, n_prices);
    if count > guard {
        return Err(Error::GuardExceeded {
            what: "preference relations".into(),
            count,
            limit: guard,
        });
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut next_price = vec![0usize; n_branches];
    let mut current = Vec::new();
    pref_dfs(n_prices, &mut next_price, &mut current, &mut out);
    Ok(out)
}

fn pref_dfs(
    n_prices: usize,
    next_price: &mut [usize],
    current: &mut Vec<Position>,
    out: &mut Vec<PreferenceRelation>,
) {
    out.push(PreferenceRelation::new(current.clone()));
    for b in 0..next_price.len() {
        let t = next_price[b];
        if t < n_prices {
            current.push(Position::new(b, t));
            next_price[b] += 1;
            pref_dfs(n_prices, next_price, current, out);
            next_price[b] -= 1;
            current.pop();
        }
    }
}

/// Number of profiles for `n_cadets` drawn from `domain_size` relations each.
pub fn count_profiles(domain_size: usize, n_cadets: usize) -> u128 {
    (0..n_cadets).fold(1u128, |acc, _| acc.saturating_mul(domain_size as u128))
}

/// Calls `f` on every profile in the product domain, in mixed-radix order
/// with cadet 0 varying slowest.
pub fn for_each_profile(
    domain: &[PreferenceRelation],
    n_cadets: usize,
    guard: u128,
    mut f: impl FnMut(&[usize], &[PreferenceRelation]),
) -> Result<()> {
    let count = count_profiles(domain.len(), n_cadets);
    if count > guard {
        return Err(Error::GuardExceeded {
            what: "preference profiles".into(),
            count,
            limit: guard,
        });
    }
    if domain.is_empty() && n_cadets > 0 {
        return Ok(());
    }
    let mut idx = vec![0usize; n_cadets];
    let mut profile: Vec<PreferenceRelation> = vec![domain.first().cloned().unwrap_or_default(); n_cadets];
    loop {
        f(&idx, &profile);
        let mut k = n_cadets;
        loop {
            if k == 0 {
                return Ok(());
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < domain.len() {
                profile[k] = domain[idx[k]].clone();
                break;
            }
            idx[k] = 0;
            profile[k] = domain[0].clone();
        }
    }
}
