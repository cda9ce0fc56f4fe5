use crate::error::Result;
use crate::gametheory::{check_guard, check_single_branch, Action};
use crate::mechanisms::{phi_mp, usma2020, QuasiStrategy};
use crate::model::{Allocation, BranchId, CadetId, Instance, Position};
use crate::preference::PreferenceRelation;
use crate::scalar::Scalar;

/// Complete-information game induced by USMA-2020 on a single branch.
///
/// Players are the cadets who accept the base-price position. Payoffs are the
/// players' own preference relations over their usma2020 assignments.
#[derive(Clone, Debug)]
pub struct SingleBranchGame<'a, S> {
    instance: &'a Instance<S>,
    prefs: Vec<PreferenceRelation>,
    players: Vec<CadetId>,
}

impl<'a, S: Scalar> SingleBranchGame<'a, S> {
    pub fn new(instance: &'a Instance<S>, prefs: &[PreferenceRelation]) -> Result<Self> {
        check_single_branch(instance)?;
        instance.check_profile(prefs)?;
        let base = Position::new(0, 0);
        let players = instance.cadet_ids().filter(|i| prefs[i.0].is_acceptable(base)).collect();
        Ok(Self {
            instance,
            prefs: prefs.to_vec(),
            players,
        })
    }

    pub fn players(&self) -> &[CadetId] {
        &self.players
    }

    pub fn n_profiles(&self) -> u128 {
        1u128 << self.players.len().min(127)
    }

    /// Messages of every cadet when the players choose `actions`.
    pub fn strategies(&self, actions: &[Action]) -> Vec<QuasiStrategy> {
        let mut out = vec![QuasiStrategy::new(Vec::<BranchId>::new(), []); self.instance.n_cadets()];
        for (p, &i) in self.players.iter().enumerate() {
            out[i.0] = actions[p].strategy();
        }
        out
    }

    pub fn outcome(&self, actions: &[Action]) -> Allocation {
        usma2020(self.instance, &self.strategies(actions)).expect("game inputs validated on construction")
    }

    /// Action profile encoded by the bits of `k`, first player most
    /// significant.
    fn actions_of(&self, k: usize) -> Vec<Action> {
        let m = self.players.len();
        (0..m)
            .map(|p| if k >> (m - 1 - p) & 1 == 1 { Action::Willing } else { Action::Unwilling })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PureEquilibrium {
    /// One action per player, in player order.
    pub actions: Vec<Action>,
    pub outcome: Allocation,
    /// Some player uses an action weakly dominated by the other one.
    pub weakly_dominated: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PureEquilibria {
    pub players: Vec<CadetId>,
    pub profiles_checked: usize,
    pub equilibria: Vec<PureEquilibrium>,
    /// Distinct equilibrium outcomes in order of first appearance.
    pub outcomes: Vec<Allocation>,
    /// Distinct outcomes of equilibria in weakly undominated actions.
    pub undominated_outcomes: Vec<Allocation>,
}

/// Every pure Nash equilibrium of the single-branch USMA-2020 game, found by
/// checking all unilateral deviations at every action profile.
pub fn enumerate_pure_ne<S: Scalar>(
    instance: &Instance<S>,
    prefs: &[PreferenceRelation],
    guard: u128,
) -> Result<PureEquilibria> {
    let game = SingleBranchGame::new(instance, prefs)?;
    let m = game.players.len();
    check_guard("action profiles", if m >= 127 { u128::MAX } else { game.n_profiles() }, guard)?;
    let total = 1usize << m;
    let outcomes: Vec<Allocation> = (0..total).map(|k| game.outcome(&game.actions_of(k))).collect();

    let mut result = PureEquilibria {
        players: game.players.clone(),
        profiles_checked: total,
        ..Default::default()
    };
    // dominated[p][a]: action `a` of player `p` is weakly dominated
    let dominated: Vec<[bool; 2]> = game
        .players
        .iter()
        .enumerate()
        .map(|(p, &i)| {
            let bit = 1usize << (m - 1 - p);
            // better[a]: action `a` is strictly better against some profile
            let mut better = [false, false];
            for k in (0..total).filter(|k| k & bit == 0) {
                let (u, w) = (outcomes[k].get(i), outcomes[k | bit].get(i));
                better[0] |= game.prefs[i.0].prefers(u, w);
                better[1] |= game.prefs[i.0].prefers(w, u);
            }
            [better[1] && !better[0], better[0] && !better[1]]
        })
        .collect();

    for k in 0..total {
        let stable = game.players.iter().enumerate().all(|(p, &i)| {
            let dev = k ^ (1 << (m - 1 - p));
            !game.prefs[i.0].prefers(outcomes[dev].get(i), outcomes[k].get(i))
        });
        if stable {
            if !result.outcomes.contains(&outcomes[k]) {
                result.outcomes.push(outcomes[k].clone());
            }
            let weakly_dominated = (0..m).any(|p| dominated[p][k >> (m - 1 - p) & 1]);
            if !weakly_dominated && !result.undominated_outcomes.contains(&outcomes[k]) {
                result.undominated_outcomes.push(outcomes[k].clone());
            }
            result.equilibria.push(PureEquilibrium {
                actions: game.actions_of(k),
                outcome: outcomes[k].clone(),
                weakly_dominated,
            });
        }
    }
    Ok(result)
}

/// True iff the game has exactly one equilibrium outcome and it equals the
/// direct single-branch mechanism's truthful outcome.
pub fn ne_outcome_equals_phi_mp<S: Scalar>(
    instance: &Instance<S>,
    prefs: &[PreferenceRelation],
    guard: u128,
) -> Result<bool> {
    let ne = enumerate_pure_ne(instance, prefs, guard)?;
    let direct = phi_mp(instance, prefs)?;
    Ok(ne.outcomes == [direct])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gametheory::DEFAULT_GAME_GUARD;
    use crate::model::{PolicySpec, PriceLadder, PriorityOrder};

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
    fn lone_cadet_proposes_and_pays_base() {
        let inst = single(1, 1, 0);
        let ne = enumerate_pure_ne(&inst, &[PreferenceRelation::prefix(0, 1)], DEFAULT_GAME_GUARD).unwrap();
        assert_eq!(ne.profiles_checked, 2);
        assert_eq!(ne.outcomes, vec![Allocation::from_assignments(vec![Some(Position::new(0, 0))])]);
    }

    #[test]
    fn no_cadets_is_vacuous() {
        let inst = single(0, 1, 1);
        assert!(ne_outcome_equals_phi_mp(&inst, &[], DEFAULT_GAME_GUARD).unwrap());
    }

    #[test]
    fn non_acceptors_sit_out() {
        let inst = single(2, 1, 1);
        let prefs = vec![PreferenceRelation::unmatched_only(), PreferenceRelation::prefix(0, 2)];
        let ne = enumerate_pure_ne(&inst, &prefs, DEFAULT_GAME_GUARD).unwrap();
        assert_eq!(ne.players, vec![CadetId(1)]);
        assert!(ne_outcome_equals_phi_mp(&inst, &prefs, DEFAULT_GAME_GUARD).unwrap());
    }

    #[test]
    fn guard_and_branch_count_enforced() {
        let inst = single(3, 1, 1);
        let prefs = vec![PreferenceRelation::prefix(0, 1); 3];
        assert!(enumerate_pure_ne(&inst, &prefs, 4).is_err());
        let two: Instance<f64> = Instance::anonymous(
            1,
            &[(1, 0), (1, 0)],
            PriceLadder::uniform(2).unwrap(),
            vec![PriorityOrder::identity(1); 2],
            vec![PolicySpec::Ultimate; 2],
        )
        .unwrap();
        assert!(enumerate_pure_ne(&two, &[PreferenceRelation::unmatched_only()], 16).is_err());
    }

    #[test]
    fn direct_outcome_is_always_an_equilibrium_outcome() {
        let domain = crate::preference::enumerate_preferences(1, 2, 10).unwrap();
        for (q, f) in [(1, 1), (2, 1), (3, 2)] {
            let inst = single(3, q, f);
            crate::preference::for_each_profile(&domain, 3, 1000, |_, p| {
                let ne = enumerate_pure_ne(&inst, p, DEFAULT_GAME_GUARD).unwrap();
                assert!(ne.outcomes.contains(&phi_mp(&inst, p).unwrap()), "{q} {f} {p:?}");
            })
            .unwrap();
        }
    }

    #[test]
    fn willing_bystander_sustains_a_second_outcome() {
        // one flexible seat, no base seats; the low-priority cadet refuses
        // the increased price but still declares willingness, which forces
        // the high-priority cadet to do the same and pay
        let inst = single(2, 1, 1);
        let prefs = vec![PreferenceRelation::prefix(0, 2), PreferenceRelation::prefix(0, 1)];
        let ne = enumerate_pure_ne(&inst, &prefs, DEFAULT_GAME_GUARD).unwrap();
        assert_eq!(ne.outcomes.len(), 2);
        let charged = ne.equilibria.iter().find(|e| e.outcome.get(CadetId(0)) == Some(Position::new(0, 1))).unwrap();
        assert_eq!(charged.actions, vec![Action::Willing, Action::Willing]);
        assert!(charged.weakly_dominated);
        assert_eq!(ne.undominated_outcomes, vec![phi_mp(&inst, &prefs).unwrap()]);
        assert!(!ne_outcome_equals_phi_mp(&inst, &prefs, DEFAULT_GAME_GUARD).unwrap());
    }
}
