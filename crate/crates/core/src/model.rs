//! Economy primitives: cadets, branches, the price ladder, baseline priorities,
//! contracts and allocations.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::policy::{
    build_baseline_policy, build_scoring_policy, build_tiered_policy, build_ultimate_policy,
    is_valid_policy, PriceResponsivenessPolicy, ScoringSpec, TierSpec,
};
use crate::preference::PreferenceRelation;
use crate::scalar::Scalar;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CadetId(pub usize);

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BranchId(pub usize);

/// Index into a [`PriceLadder`]; level 0 is the base price.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PriceLevel(pub usize);

impl PriceLevel {
    pub const BASE: PriceLevel = PriceLevel(0);

    pub fn is_base(self) -> bool {
        self.0 == 0
    }

    pub fn is_increased(self) -> bool {
        self.0 > 0
    }
}

impl fmt::Display for CadetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cadet#{}", self.0)
    }
}

impl fmt::Display for BranchId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "branch#{}", self.0)
    }
}

impl fmt::Display for PriceLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t{}", self.0)
    }
}

/// Strictly increasing, non-negative contractual terms `t^0 < t^1 < ... < t^h`.
#[derive(Clone, Debug, PartialEq)]
pub struct PriceLadder<S> {
    values: Vec<S>,
}

impl<S: Scalar> PriceLadder<S> {
    pub fn new(values: Vec<S>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::PriceLadder("at least one price is required".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_non_negative()) {
            return Err(Error::PriceLadder(format!("price {i} is negative")));
        }
        if let Some(i) = values.windows(2).position(|w| !(w[0] < w[1])) {
            return Err(Error::PriceLadder(format!(
                "prices must be strictly increasing (index {} is not below index {})",
                i,
                i + 1
            )));
        }
        Ok(Self { values })
    }

    /// Ladder `0, 1, ..., levels - 1`.
    pub fn uniform(levels: usize) -> Result<Self> {
        let values = (0..levels)
            .map(|k| S::from_usize(k).ok_or_else(|| Error::PriceLadder("overflow".into())))
            .collect::<Result<Vec<_>>>()?;
        Self::new(values)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, level: PriceLevel) -> &S {
        &self.values[level.0]
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn top(&self) -> PriceLevel {
        PriceLevel(self.values.len() - 1)
    }

    pub fn levels(&self) -> impl Iterator<Item = PriceLevel> {
        (0..self.values.len()).map(PriceLevel)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchSpec {
    pub name: String,
    pub q_total: usize,
    pub q_flex: usize,
}

impl BranchSpec {
    pub fn new(name: impl Into<String>, q_total: usize, q_flex: usize) -> Result<Self> {
        let spec = Self {
            name: name.into(),
            q_total,
            q_flex,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.q_flex > self.q_total {
            return Err(Error::Branch {
                branch: self.name.clone(),
                reason: format!(
                    "q_flex = {} exceeds q_total = {}",
                    self.q_flex, self.q_total
                ),
            });
        }
        Ok(())
    }

    /// Number of base-price positions, `q_total - q_flex`.
    pub fn q_base(&self) -> usize {
        self.q_total - self.q_flex
    }
}

/// Strict ranking of all cadets, highest priority first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PriorityOrder {
    ranking: Vec<CadetId>,
    rank: Vec<usize>,
}

impl PriorityOrder {
    pub fn new(ranking: Vec<CadetId>, n_cadets: usize) -> Result<Self> {
        if ranking.len() != n_cadets {
            return Err(Error::Priority(format!(
                "ranks {} cadets, expected {}",
                ranking.len(),
                n_cadets
            )));
        }
        let mut rank = vec![usize::MAX; n_cadets];
        for (pos, &c) in ranking.iter().enumerate() {
            if c.0 >= n_cadets {
                return Err(Error::Priority(format!("unknown cadet index {}", c.0)));
            }
            if rank[c.0] != usize::MAX {
                return Err(Error::Priority(format!("cadet index {} listed twice", c.0)));
            }
            rank[c.0] = pos;
        }
        Ok(Self { ranking, rank })
    }

    pub fn identity(n_cadets: usize) -> Self {
        Self {
            ranking: (0..n_cadets).map(CadetId).collect(),
            rank: (0..n_cadets).collect(),
        }
    }

    /// Builds an order from a sort key; smaller keys rank higher.
    pub fn from_key<K: Ord>(n_cadets: usize, mut key: impl FnMut(CadetId) -> K) -> Self {
        let mut ranking: Vec<CadetId> = (0..n_cadets).map(CadetId).collect();
        ranking.sort_by_cached_key(|&c| key(c));
        let mut rank = vec![0; n_cadets];
        for (pos, c) in ranking.iter().enumerate() {
            rank[c.0] = pos;
        }
        Self { ranking, rank }
    }

    pub fn len(&self) -> usize {
        self.ranking.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranking.is_empty()
    }

    /// Position of `cadet`, 0 being the highest priority.
    pub fn rank(&self, cadet: CadetId) -> usize {
        self.rank[cadet.0]
    }

    /// `a` has strictly higher priority than `b`.
    pub fn outranks(&self, a: CadetId, b: CadetId) -> bool {
        self.rank[a.0] < self.rank[b.0]
    }

    pub fn ranking(&self) -> &[CadetId] {
        &self.ranking
    }

    pub fn iter(&self) -> impl Iterator<Item = CadetId> + '_ {
        self.ranking.iter().copied()
    }
}

/// A branch-price pair `(b, t)`, i.e. a cadet's assignment when matched.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Position {
    pub branch: BranchId,
    pub price: PriceLevel,
}

impl Position {
    pub fn new(branch: usize, price: usize) -> Self {
        Self {
            branch: BranchId(branch),
            price: PriceLevel(price),
        }
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.branch, self.price)
    }
}

/// Assignment of a single cadet; `None` is the unmatched option.
pub type Assignment = Option<Position>;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Contract {
    pub cadet: CadetId,
    pub branch: BranchId,
    pub price: PriceLevel,
}

impl Contract {
    pub fn new(cadet: usize, branch: usize, price: usize) -> Self {
        Self {
            cadet: CadetId(cadet),
            branch: BranchId(branch),
            price: PriceLevel(price),
        }
    }

    pub fn position(&self) -> Position {
        Position {
            branch: self.branch,
            price: self.price,
        }
    }
}

/// At most one contract per cadet, stored as the cadet's assignment.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Allocation {
    assignments: Vec<Assignment>,
}

impl Allocation {
    pub fn empty(n_cadets: usize) -> Self {
        Self {
            assignments: vec![None; n_cadets],
        }
    }

    pub fn from_assignments(assignments: Vec<Assignment>) -> Self {
        Self { assignments }
    }

    /// Fails if a cadet appears in more than one contract.
    pub fn from_contracts(
        n_cadets: usize,
        contracts: impl IntoIterator<Item = Contract>,
    ) -> Result<Self> {
        let mut alloc = Self::empty(n_cadets);
        for c in contracts {
            if c.cadet.0 >= n_cadets {
                return Err(Error::Allocation(format!("unknown cadet index {}", c.cadet.0)));
            }
            if alloc.assignments[c.cadet.0].is_some() {
                return Err(Error::Allocation(format!(
                    "cadet index {} appears in two contracts",
                    c.cadet.0
                )));
            }
            alloc.assignments[c.cadet.0] = Some(c.position());
        }
        Ok(alloc)
    }

    pub fn n_cadets(&self) -> usize {
        self.assignments.len()
    }

    pub fn get(&self, cadet: CadetId) -> Assignment {
        self.assignments[cadet.0]
    }

    pub fn set(&mut self, cadet: CadetId, assignment: Assignment) {
        self.assignments[cadet.0] = assignment;
    }

    pub fn assignments(&self) -> &[Assignment] {
        &self.assignments
    }

    pub fn contracts(&self) -> impl Iterator<Item = Contract> + '_ {
        self.assignments.iter().enumerate().filter_map(|(i, a)| {
            a.map(|p| Contract {
                cadet: CadetId(i),
                branch: p.branch,
                price: p.price,
            })
        })
    }

    pub fn branch_of(&self, cadet: CadetId) -> Option<BranchId> {
        self.assignments[cadet.0].map(|p| p.branch)
    }

    /// Number of cadets assigned to `branch` at any price.
    pub fn assigned_to(&self, branch: BranchId) -> usize {
        self.assignments
            .iter()
            .filter(|a| matches!(a, Some(p) if p.branch == branch))
            .count()
    }

    /// Number of cadets assigned to `branch` at an increased price.
    pub fn charged_at(&self, branch: BranchId) -> usize {
        self.assignments
            .iter()
            .filter(|a| matches!(a, Some(p) if p.branch == branch && p.price.is_increased()))
            .count()
    }

    pub fn matched(&self) -> usize {
        self.assignments.iter().filter(|a| a.is_some()).count()
    }

    /// Checks capacity and flexible-cap feasibility against `instance`.
    pub fn check_feasible<S: Scalar>(&self, instance: &Instance<S>) -> Result<()> {
        if self.assignments.len() != instance.n_cadets() {
            return Err(Error::Allocation(format!(
                "covers {} cadets, instance has {}",
                self.assignments.len(),
                instance.n_cadets()
            )));
        }
        for a in self.assignments.iter().flatten() {
            if a.branch.0 >= instance.n_branches() || a.price.0 >= instance.n_prices() {
                return Err(Error::Allocation(format!("contract {a} is out of range")));
            }
        }
        for (b, spec) in instance.branches().iter().enumerate() {
            let total = self.assigned_to(BranchId(b));
            if total > spec.q_total {
                return Err(Error::Allocation(format!(
                    "branch `{}` holds {} contracts, capacity {}",
                    spec.name, total, spec.q_total
                )));
            }
            let flex = self.charged_at(BranchId(b));
            if flex > spec.q_flex {
                return Err(Error::Allocation(format!(
                    "branch `{}` holds {} increased-price contracts, cap {}",
                    spec.name, flex, spec.q_flex
                )));
            }
        }
        Ok(())
    }
}

/// How a branch's price responsiveness policy is specified.
#[derive(Clone, Debug, PartialEq)]
pub enum PolicySpec<S> {
    Ultimate,
    /// Price never overturns baseline priority between distinct cadets.
    Baseline,
    Tiered(TierSpec),
    Scoring(ScoringSpec<S>),
    Explicit(PriceResponsivenessPolicy),
}

impl<S: Scalar> PolicySpec<S> {
    pub fn build(
        &self,
        pi: &PriorityOrder,
        ladder: &PriceLadder<S>,
    ) -> Result<PriceResponsivenessPolicy> {
        match self {
            PolicySpec::Ultimate => Ok(build_ultimate_policy(pi, ladder)),
            PolicySpec::Baseline => Ok(build_baseline_policy(pi, ladder)),
            PolicySpec::Tiered(tiers) => build_tiered_policy(pi, tiers, ladder),
            PolicySpec::Scoring(spec) => build_scoring_policy(spec, ladder),
            PolicySpec::Explicit(policy) => Ok(policy.clone()),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            PolicySpec::Ultimate => "ultimate",
            PolicySpec::Baseline => "baseline",
            PolicySpec::Tiered(_) => "tiered",
            PolicySpec::Scoring(_) => "scoring",
            PolicySpec::Explicit(_) => "explicit",
        }
    }
}

/// The economy: cadets, branches, prices, baseline priorities and policies.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance<S> {
    cadet_names: Vec<String>,
    branches: Vec<BranchSpec>,
    ladder: PriceLadder<S>,
    priorities: Vec<PriorityOrder>,
    policy_specs: Vec<PolicySpec<S>>,
    policies: Vec<PriceResponsivenessPolicy>,
}

impl<S: Scalar> Instance<S> {
    pub fn new(
        cadet_names: Vec<String>,
        branches: Vec<BranchSpec>,
        ladder: PriceLadder<S>,
        priorities: Vec<PriorityOrder>,
        policy_specs: Vec<PolicySpec<S>>,
    ) -> Result<Self> {
        let n = cadet_names.len();
        for (i, name) in cadet_names.iter().enumerate() {
            if cadet_names[..i].contains(name) {
                return Err(Error::schema("cadets", format!("duplicate cadet id `{name}`")));
            }
        }
        for (b, spec) in branches.iter().enumerate() {
            spec.validate()?;
            if branches[..b].iter().any(|o| o.name == spec.name) {
                return Err(Error::schema(
                    "branches",
                    format!("duplicate branch id `{}`", spec.name),
                ));
            }
        }
        if priorities.len() != branches.len() || policy_specs.len() != branches.len() {
            return Err(Error::schema(
                "branches",
                "every branch needs one priority order and one policy",
            ));
        }
        let mut policies = Vec::with_capacity(branches.len());
        for (b, (pi, spec)) in priorities.iter().zip(&policy_specs).enumerate() {
            if pi.len() != n {
                return Err(Error::Branch {
                    branch: branches[b].name.clone(),
                    reason: format!("priority ranks {} cadets, expected {n}", pi.len()),
                });
            }
            let policy = spec.build(pi, &ladder).map_err(|e| Error::Branch {
                branch: branches[b].name.clone(),
                reason: e.to_string(),
            })?;
            if policy.n_cadets() != n || policy.n_prices() != ladder.len() {
                return Err(Error::Branch {
                    branch: branches[b].name.clone(),
                    reason: "policy ranges over a different cadet/price universe".into(),
                });
            }
            if !is_valid_policy(&policy, pi) {
                return Err(Error::Branch {
                    branch: branches[b].name.clone(),
                    reason: "policy is not consistent with the baseline priority".into(),
                });
            }
            policies.push(policy);
        }
        Ok(Self {
            cadet_names,
            branches,
            ladder,
            priorities,
            policy_specs,
            policies,
        })
    }

    /// Instance with generated names (`c0`, `c1`, ... and `b0`, `b1`, ...).
    pub fn anonymous(
        n_cadets: usize,
        capacities: &[(usize, usize)],
        ladder: PriceLadder<S>,
        priorities: Vec<PriorityOrder>,
        policy_specs: Vec<PolicySpec<S>>,
    ) -> Result<Self> {
        let branches = capacities
            .iter()
            .enumerate()
            .map(|(b, &(q, f))| BranchSpec::new(format!("b{b}"), q, f))
            .collect::<Result<Vec<_>>>()?;
        Self::new(
            (0..n_cadets).map(|i| format!("c{i}")).collect(),
            branches,
            ladder,
            priorities,
            policy_specs,
        )
    }

    pub fn n_cadets(&self) -> usize {
        self.cadet_names.len()
    }

    pub fn n_branches(&self) -> usize {
        self.branches.len()
    }

    pub fn n_prices(&self) -> usize {
        self.ladder.len()
    }

    pub fn cadet_names(&self) -> &[String] {
        &self.cadet_names
    }

    pub fn cadet_name(&self, c: CadetId) -> &str {
        &self.cadet_names[c.0]
    }

    pub fn cadet_by_name(&self, name: &str) -> Option<CadetId> {
        self.cadet_names.iter().position(|n| n == name).map(CadetId)
    }

    pub fn branches(&self) -> &[BranchSpec] {
        &self.branches
    }

    pub fn branch(&self, b: BranchId) -> &BranchSpec {
        &self.branches[b.0]
    }

    pub fn branch_by_name(&self, name: &str) -> Option<BranchId> {
        self.branches.iter().position(|s| s.name == name).map(BranchId)
    }

    pub fn ladder(&self) -> &PriceLadder<S> {
        &self.ladder
    }

    pub fn priority(&self, b: BranchId) -> &PriorityOrder {
        &self.priorities[b.0]
    }

    pub fn priorities(&self) -> &[PriorityOrder] {
        &self.priorities
    }

    pub fn policy(&self, b: BranchId) -> &PriceResponsivenessPolicy {
        &self.policies[b.0]
    }

    pub fn policies(&self) -> &[PriceResponsivenessPolicy] {
        &self.policies
    }

    pub fn policy_spec(&self, b: BranchId) -> &PolicySpec<S> {
        &self.policy_specs[b.0]
    }

    pub fn policy_specs(&self) -> &[PolicySpec<S>] {
        &self.policy_specs
    }

    pub fn branch_ids(&self) -> impl Iterator<Item = BranchId> {
        (0..self.branches.len()).map(BranchId)
    }

    pub fn cadet_ids(&self) -> impl Iterator<Item = CadetId> {
        (0..self.cadet_names.len()).map(CadetId)
    }

    /// Same economy with different flexible caps per branch.
    pub fn with_flex_caps(&self, q_flex: &[usize]) -> Result<Self> {
        let mut next = self.clone();
        for (spec, &f) in next.branches.iter_mut().zip(q_flex) {
            spec.q_flex = f;
            spec.validate()?;
        }
        Ok(next)
    }

    /// Same economy with every branch's policy rebuilt from `specs`.
    pub fn with_policies(&self, specs: Vec<PolicySpec<S>>) -> Result<Self> {
        Self::new(
            self.cadet_names.clone(),
            self.branches.clone(),
            self.ladder.clone(),
            self.priorities.clone(),
            specs,
        )
    }

    /// Validates a preference profile against this economy.
    pub fn check_profile(&self, profile: &[PreferenceRelation]) -> Result<()> {
        if profile.len() != self.n_cadets() {
            return Err(Error::schema(
                "preferences",
                format!(
                    "profile has {} relations for {} cadets",
                    profile.len(),
                    self.n_cadets()
                ),
            ));
        }
        for (i, p) in profile.iter().enumerate() {
            p.validate(self.n_branches(), self.n_prices())
                .map_err(|reason| Error::Preference { cadet: i, reason })?;
        }
        Ok(())
    }

    /// Default proposal order: priority of the branch whose name sorts first.
    pub fn default_proposal_order(&self) -> PriorityOrder {
        self.branches
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.name.cmp(&b.1.name))
            .map(|(b, _)| self.priorities[b].clone())
            .unwrap_or_else(|| PriorityOrder::identity(self.n_cadets()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladder_rejects_non_increasing_and_negative() {
        assert!(PriceLadder::new(vec![0.0, 0.0]).is_err());
        assert!(PriceLadder::new(vec![-1.0, 2.0]).is_err());
        assert!(PriceLadder::<f64>::new(vec![]).is_err());
        let ladder = PriceLadder::new(vec![5.0, 8.0]).unwrap();
        assert_eq!(ladder.top(), PriceLevel(1));
    }

    #[test]
    fn branch_flex_cap_bounded_by_total() {
        let err = BranchSpec::new("AV", 2, 3).unwrap_err();
        assert!(err.to_string().contains("q_flex = 3 exceeds q_total = 2"));
        assert_eq!(BranchSpec::new("AV", 4, 1).unwrap().q_base(), 3);
    }

    #[test]
    fn priority_rejects_duplicates() {
        assert!(PriorityOrder::new(vec![CadetId(0), CadetId(0)], 2).is_err());
        let pi = PriorityOrder::new(vec![CadetId(1), CadetId(0)], 2).unwrap();
        assert!(pi.outranks(CadetId(1), CadetId(0)));
        assert_eq!(pi.rank(CadetId(0)), 1);
    }

    #[test]
    fn allocation_rejects_two_contracts_for_one_cadet() {
        let err = Allocation::from_contracts(2, [Contract::new(0, 0, 0), Contract::new(0, 1, 0)]);
        assert!(err.is_err());
    }

    #[test]
    fn feasibility_counts_flexible_cap() {
        let ladder = PriceLadder::uniform(2).unwrap();
        let inst: Instance<f64> = Instance::anonymous(
            2,
            &[(2, 1)],
            ladder,
            vec![PriorityOrder::identity(2)],
            vec![PolicySpec::Ultimate],
        )
        .unwrap();
        let over = Allocation::from_contracts(2, [Contract::new(0, 0, 1), Contract::new(1, 0, 1)])
            .unwrap();
        assert!(over.check_feasible(&inst).is_err());
        let ok = Allocation::from_contracts(2, [Contract::new(0, 0, 0), Contract::new(1, 0, 1)])
            .unwrap();
        ok.check_feasible(&inst).unwrap();
    }
}
