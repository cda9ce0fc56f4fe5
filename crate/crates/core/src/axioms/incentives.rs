use crate::axioms::{Axiom, Violation, Witness};
use crate::error::{Error, Result};
use crate::mechanisms::QuasiStrategy;
use crate::model::{Allocation, BranchId, CadetId, PriceLevel, Position};
use crate::preference::{count_profiles, PreferenceRelation};

/// A direct mechanism's outcome at every profile of a product domain.
///
/// Profiles are indexed in mixed radix with cadet 0 as the most significant
/// digit.
#[derive(Clone, Debug)]
pub struct OutcomeTable {
    domain: Vec<PreferenceRelation>,
    n_cadets: usize,
    outcomes: Vec<Allocation>,
}

impl OutcomeTable {
    pub fn build(
        domain: &[PreferenceRelation],
        n_cadets: usize,
        guard: u128,
        mut mechanism: impl FnMut(&[PreferenceRelation]) -> Allocation,
    ) -> Result<Self> {
        let count = count_profiles(domain.len(), n_cadets);
        if count > guard {
            return Err(Error::GuardExceeded {
                what: "preference profiles".into(),
                count,
                limit: guard,
            });
        }
        let mut outcomes = Vec::with_capacity(count as usize);
        crate::preference::for_each_profile(domain, n_cadets, guard, |_, profile| {
            outcomes.push(mechanism(profile));
        })?;
        Ok(Self {
            domain: domain.to_vec(),
            n_cadets,
            outcomes,
        })
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn domain(&self) -> &[PreferenceRelation] {
        &self.domain
    }

    /// Domain indices of the profile at position `k`.
    pub fn digits(&self, mut k: usize) -> Vec<usize> {
        let d = self.domain.len();
        let mut idx = vec![0; self.n_cadets];
        for slot in idx.iter_mut().rev() {
            *slot = k % d;
            k /= d;
        }
        idx
    }

    pub fn profile(&self, k: usize) -> Vec<PreferenceRelation> {
        self.digits(k).into_iter().map(|x| self.domain[x].clone()).collect()
    }

    pub fn outcome(&self, k: usize) -> &Allocation {
        &self.outcomes[k]
    }

    pub fn outcomes(&self) -> &[Allocation] {
        &self.outcomes
    }

    /// Every profitable unilateral misreport within the domain.
    pub fn strategy_proofness_violations(&self) -> Vec<Violation> {
        let d = self.domain.len();
        let n = self.n_cadets;
        let mut out = Vec::new();
        let mut stride = vec![1usize; n];
        for i in (0..n.saturating_sub(1)).rev() {
            stride[i] = stride[i + 1] * d;
        }
        for k in 0..self.outcomes.len() {
            let digits = self.digits(k);
            for i in 0..n {
                let truth = &self.domain[digits[i]];
                let got = self.outcomes[k].get(CadetId(i));
                let base = k - digits[i] * stride[i];
                for r in 0..d {
                    if r == digits[i] {
                        continue;
                    }
                    let dev = self.outcomes[base + r * stride[i]].get(CadetId(i));
                    if truth.prefers(dev, got) {
                        out.push(Violation::new(
                            Axiom::StrategyProofness,
                            Witness::Manipulation {
                                cadet: CadetId(i),
                                profile: self.profile(k),
                                misreport: self.domain[r].clone(),
                                truthful: got,
                                deviated: dev,
                            },
                        ));
                    }
                }
            }
        }
        out
    }
}

/// Searches every profile of `domain^n_cadets` and every unilateral
/// misreport within `domain` for a strict gain.
pub fn check_strategy_proofness(
    mechanism: impl FnMut(&[PreferenceRelation]) -> Allocation,
    n_cadets: usize,
    domain: &[PreferenceRelation],
    guard: u128,
) -> Result<Vec<Violation>> {
    Ok(OutcomeTable::build(domain, n_cadets, guard, mechanism)?.strategy_proofness_violations())
}

/// Every quasi strategy over `n_branches` branches: each ordered selection
/// of acceptable branches paired with each willingness set.
pub fn quasi_domain(n_branches: usize) -> Vec<QuasiStrategy> {
    let mut rankings = vec![Vec::new()];
    let mut frontier = vec![Vec::<BranchId>::new()];
    while let Some(r) = frontier.pop() {
        for b in (0..n_branches).map(BranchId) {
            if !r.contains(&b) {
                let mut next = r.clone();
                next.push(b);
                rankings.push(next.clone());
                frontier.push(next);
            }
        }
    }
    rankings.sort();
    let mut out = Vec::new();
    for r in rankings {
        for mask in 0..(1usize << n_branches) {
            let willing = (0..n_branches).filter(|b| mask >> b & 1 == 1).map(BranchId);
            out.push(QuasiStrategy::new(r.clone(), willing));
        }
    }
    out
}

/// For each profile and each cadet charged the increased price at `b`:
/// flags the case where withdrawing willingness at `b` yields `(b, t^0)`.
pub fn check_bradso_ic(
    mut quasi: impl FnMut(&[QuasiStrategy]) -> Allocation,
    profiles: impl IntoIterator<Item = Vec<QuasiStrategy>>,
) -> Vec<Violation> {
    let mut out = Vec::new();
    for profile in profiles {
        let alloc = quasi(&profile);
        for (i, a) in alloc.assignments().iter().enumerate() {
            let Some(p) = *a else { continue };
            if !p.price.is_increased() {
                continue;
            }
            let mut dev = profile.clone();
            dev[i] = dev[i].without_willingness(p.branch);
            let got = quasi(&dev).get(CadetId(i));
            if got == Some(Position { branch: p.branch, price: PriceLevel::BASE }) {
                out.push(Violation::new(
                    Axiom::BradsoIc,
                    Witness::BradsoIc {
                        cadet: CadetId(i),
                        branch: p.branch,
                        profile: profile.clone(),
                        deviated: got,
                    },
                ));
            }
        }
    }
    out
}

/// For each profile and each cadet holding `(b, t^0)` with willingness at
/// `b`: flags the case where withdrawing willingness loses `(b, t^0)`.
pub fn check_strategic_bradso_immunity(
    mut quasi: impl FnMut(&[QuasiStrategy]) -> Allocation,
    profiles: impl IntoIterator<Item = Vec<QuasiStrategy>>,
) -> Vec<Violation> {
    let mut out = Vec::new();
    for profile in profiles {
        let alloc = quasi(&profile);
        for (i, a) in alloc.assignments().iter().enumerate() {
            let Some(p) = *a else { continue };
            if !p.price.is_base() || !profile[i].is_willing(p.branch) {
                continue;
            }
            let mut dev = profile.clone();
            dev[i] = dev[i].without_willingness(p.branch);
            let got = quasi(&dev).get(CadetId(i));
            if got != Some(p) {
                out.push(Violation::new(
                    Axiom::StrategicBradsoImmunity,
                    Witness::StrategicBradso {
                        cadet: CadetId(i),
                        branch: p.branch,
                        profile: profile.clone(),
                        deviated: got,
                    },
                ));
            }
        }
    }
    out
}

/// Every profile over `domain^n_cadets`, guarded.
pub fn quasi_profiles(
    domain: &[QuasiStrategy],
    n_cadets: usize,
    guard: u128,
) -> Result<Vec<Vec<QuasiStrategy>>> {
    let count = count_profiles(domain.len(), n_cadets);
    if count > guard {
        return Err(Error::GuardExceeded {
            what: "quasi strategy profiles".into(),
            count,
            limit: guard,
        });
    }
    let mut out: Vec<Vec<QuasiStrategy>> = vec![Vec::new()];
    for _ in 0..n_cadets {
        out = out
            .into_iter()
            .flat_map(|p| {
                domain.iter().map(move |s| {
                    let mut q = p.clone();
                    q.push(s.clone());
                    q
                })
            })
            .collect();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mechanisms::{mpco_allocation, quasi_to_preference, usma2006, usma2020};
    use crate::model::{Instance, PolicySpec, PriceLadder, PriorityOrder};
    use crate::preference::enumerate_preferences;

    fn single(n: usize, q: usize, f: usize) -> Instance<f64> {
        Instance::anonymous(
            n,
            &[(q, f)],
            PriceLadder::uniform(2).unwrap(),
            vec![PriorityOrder::identity(n)],
            vec![PolicySpec::Ultimate],
        )
        .unwrap()
    }

    #[test]
    fn mpco_is_strategy_proof_on_small_single_branch() {
        let domain = enumerate_preferences(1, 2, 100).unwrap();
        for (q, f) in [(1, 1), (2, 1), (2, 2), (1, 0)] {
            let inst = single(4, q, f);
            let v = check_strategy_proofness(|p| mpco_allocation(&inst, p, None).unwrap(), 4, &domain, 1 << 20).unwrap();
            assert!(v.is_empty(), "{q} {f}: {:?}", v.first());
        }
    }

    #[test]
    fn constant_mechanism_is_strategy_proof() {
        let domain = enumerate_preferences(2, 2, 100).unwrap();
        let v = check_strategy_proofness(|_| Allocation::empty(2), 2, &domain, 1 << 20).unwrap();
        assert!(v.is_empty());
    }

    #[test]
    fn quasi_domain_sizes() {
        assert_eq!(quasi_domain(1).len(), 4);
        // rankings of two branches: [], [0], [1], [0,1], [1,0] times 4 willingness sets
        assert_eq!(quasi_domain(2).len(), 20);
    }

    #[test]
    fn usma2006_is_immune_to_strategic_bradso() {
        let inst: Instance<f64> = Instance::anonymous(
            3,
            &[(1, 1), (2, 1)],
            PriceLadder::uniform(2).unwrap(),
            vec![PriorityOrder::identity(3), PriorityOrder::new(vec![CadetId(2), CadetId(0), CadetId(1)], 3).unwrap()],
            vec![PolicySpec::Ultimate; 2],
        )
        .unwrap();
        let profiles = quasi_profiles(&quasi_domain(2), 3, 1 << 20).unwrap();
        let v = check_strategic_bradso_immunity(|s| usma2006(&inst, s, None).unwrap(), profiles);
        assert!(v.is_empty());
    }

    #[test]
    fn mpco_through_consecutive_rankings_is_bradso_ic_single_branch() {
        let inst = single(4, 2, 1);
        let profiles = quasi_profiles(&quasi_domain(1), 4, 1 << 20).unwrap();
        let phi = |s: &[QuasiStrategy]| {
            let prefs: Vec<_> = s.iter().map(quasi_to_preference).collect();
            mpco_allocation(&inst, &prefs, None).unwrap()
        };
        assert!(check_bradso_ic(phi, profiles.clone()).is_empty());
        assert!(check_strategic_bradso_immunity(phi, profiles.clone()).is_empty());
        // usma2020 charges without need somewhere on this domain
        assert!(!check_bradso_ic(|s| usma2020(&inst, s).unwrap(), profiles).is_empty());
    }
}
