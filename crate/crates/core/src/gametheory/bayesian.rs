use crate::axioms::find_detectable_priority_reversals;
use crate::error::{Error, Result};
use crate::gametheory::{check_guard, check_single_branch, Action};
use crate::mechanisms::{usma2020, QuasiStrategy};
use crate::model::{Allocation, Assignment, CadetId, Instance};
use crate::scalar::Scalar;

/// A cadet type: a cardinal utility over the three single-branch outcomes.
#[derive(Clone, Debug, PartialEq)]
pub struct PlayerType<S> {
    pub name: String,
    pub base: S,
    pub increased: S,
    pub unmatched: S,
}

impl<S: Scalar> PlayerType<S> {
    pub fn new(name: impl Into<String>, base: S, increased: S, unmatched: S) -> Self {
        Self {
            name: name.into(),
            base,
            increased,
            unmatched,
        }
    }

    pub fn utility(&self, a: Assignment) -> S {
        match a {
            None => self.unmatched.clone(),
            Some(p) if p.price.is_base() => self.base.clone(),
            Some(_) => self.increased.clone(),
        }
    }

    /// The action a cadet of this type takes when reporting honestly.
    pub fn truthful_action(&self) -> Action {
        if self.increased > self.unmatched {
            Action::Willing
        } else {
            Action::Unwilling
        }
    }
}

/// Incomplete-information game: every cadet draws a type independently from
/// the same prior.
#[derive(Clone, Debug, PartialEq)]
pub struct BayesianGame<S> {
    types: Vec<PlayerType<S>>,
    prior: Vec<S>,
}

impl<S: Scalar> BayesianGame<S> {
    pub fn new(types: Vec<PlayerType<S>>, prior: Vec<S>) -> Result<Self> {
        if types.is_empty() || types.len() != prior.len() {
            return Err(Error::schema(
                "prior",
                format!("{} probabilities for {} types", prior.len(), types.len()),
            ));
        }
        if prior.iter().any(|p| !p.is_non_negative()) {
            return Err(Error::schema("prior", "negative probability"));
        }
        let total = prior.iter().cloned().fold(S::zero(), |a, b| a + b);
        if total != S::one() {
            return Err(Error::schema("prior", format!("probabilities sum to {total:?}")));
        }
        Ok(Self { types, prior })
    }

    /// Two types that agree on the base-price position (10) and split on
    /// whether the increased price beats going unmatched (8 and 0 swapped).
    /// `p_unwilling` is the probability of the type that prefers `∅`.
    pub fn willingness_split(p_unwilling: S) -> Result<Self> {
        let n = |x: i32| S::from_i32(x).expect("small integer");
        let q = S::one() - p_unwilling.clone();
        Self::new(
            vec![
                PlayerType::new("type-1", n(10), n(0), n(8)),
                PlayerType::new("type-2", n(10), n(8), n(0)),
            ],
            vec![p_unwilling, q],
        )
    }

    pub fn types(&self) -> &[PlayerType<S>] {
        &self.types
    }

    pub fn prior(&self) -> &[S] {
        &self.prior
    }

    /// The strategy mapping each type to its truthful action.
    pub fn truthful_strategy(&self) -> Vec<Action> {
        self.types.iter().map(PlayerType::truthful_action).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BayesianEquilibrium<S> {
    /// `strategies[i][θ]`: the action of cadet `i` when of type `θ`.
    pub strategies: Vec<Vec<Action>>,
    /// Interim expected utility of each cadet at each type.
    pub expected_utility: Vec<Vec<S>>,
    pub truthful: bool,
    /// Probability that the realized messages and outcome contain a
    /// detectable priority reversal.
    pub reversal_probability: S,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BayesianReport<S> {
    pub profiles_checked: usize,
    pub equilibria: Vec<BayesianEquilibrium<S>>,
}

/// Enumerates every type-contingent pure strategy profile of the
/// single-branch USMA-2020 game and keeps the Bayesian Nash equilibria.
///
/// Every cadet is a player. Best responses are required only at types with
/// positive prior probability.
pub fn bayesian_equilibria<S: Scalar>(
    game: &BayesianGame<S>,
    instance: &Instance<S>,
    guard: u128,
) -> Result<BayesianReport<S>> {
    check_single_branch(instance)?;
    let n = instance.n_cadets();
    let k = game.types.len();
    let per_cadet = 1u128.checked_shl(k as u32).filter(|_| k < 64).unwrap_or(u128::MAX);
    let count = (0..n).try_fold(1u128, |acc, _| acc.checked_mul(per_cadet)).unwrap_or(u128::MAX);
    check_guard("type-contingent strategy profiles", count, guard)?;
    let realizations = (0..n).try_fold(1u128, |acc, _| acc.checked_mul(k as u128)).unwrap_or(u128::MAX);
    check_guard("type realizations", realizations, guard)?;
    check_guard("action profiles", 1u128 << n.min(127), guard)?;

    // outcome of every action profile; bit i set means cadet i is willing
    let outcomes: Vec<Allocation> = (0..1usize << n)
        .map(|mask| usma2020(instance, &mask_strategies(mask, n)))
        .collect::<Result<_>>()?;
    let reversal: Vec<bool> = outcomes
        .iter()
        .enumerate()
        .map(|(mask, a)| !find_detectable_priority_reversals(&mask_strategies(mask, n), a, instance.priorities()).is_empty())
        .collect();

    let realizations = type_realizations(n, k);
    let prob = |theta: &[usize]| theta.iter().fold(S::one(), |acc, &t| acc * game.prior[t].clone());

    let mut report = BayesianReport {
        profiles_checked: count as usize,
        equilibria: Vec::new(),
    };
    let strategies_per_cadet = 1usize << k;
    for code in 0..count as usize {
        // strategy of cadet i: bit θ of its digit says whether type θ is willing
        let digits: Vec<usize> = (0..n)
            .map(|i| code / strategies_per_cadet.pow((n - 1 - i) as u32) % strategies_per_cadet)
            .collect();
        let willing = |i: usize, t: usize| digits[i] >> t & 1 == 1;

        let mut expected = vec![vec![S::zero(); k]; n];
        let mut stable = true;
        'cadets: for i in 0..n {
            for t in 0..k {
                // expected utility of each own action given others' strategies
                let mut value = [S::zero(), S::zero()];
                for theta in realizations.iter().filter(|th| th[i] == t) {
                    let others: S = theta
                        .iter()
                        .enumerate()
                        .filter(|&(j, _)| j != i)
                        .fold(S::one(), |acc, (_, &tj)| acc * game.prior[tj].clone());
                    let mut mask = 0usize;
                    for (j, &tj) in theta.iter().enumerate() {
                        if j != i && willing(j, tj) {
                            mask |= 1 << j;
                        }
                    }
                    for (a, v) in value.iter_mut().enumerate() {
                        let m = if a == 1 { mask | 1 << i } else { mask };
                        let u = game.types[t].utility(outcomes[m].get(CadetId(i)));
                        *v = v.clone() + others.clone() * u;
                    }
                }
                let own = usize::from(willing(i, t));
                if game.prior[t] > S::zero() && value[1 - own] > value[own] {
                    stable = false;
                    break 'cadets;
                }
                expected[i][t] = value[own].clone();
            }
        }
        if !stable {
            continue;
        }

        let mut reversal_probability = S::zero();
        for theta in &realizations {
            let mask = theta
                .iter()
                .enumerate()
                .filter(|&(j, &tj)| willing(j, tj))
                .fold(0usize, |m, (j, _)| m | 1 << j);
            if reversal[mask] {
                reversal_probability = reversal_probability + prob(theta);
            }
        }
        let strategies: Vec<Vec<Action>> = (0..n)
            .map(|i| (0..k).map(|t| if willing(i, t) { Action::Willing } else { Action::Unwilling }).collect())
            .collect();
        let truthful = strategies.iter().all(|s| *s == game.truthful_strategy());
        report.equilibria.push(BayesianEquilibrium {
            strategies,
            expected_utility: expected,
            truthful,
            reversal_probability,
        });
    }
    Ok(report)
}

fn mask_strategies(mask: usize, n: usize) -> Vec<QuasiStrategy> {
    (0..n)
        .map(|i| if mask >> i & 1 == 1 { Action::Willing } else { Action::Unwilling }.strategy())
        .collect()
}

fn type_realizations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|t: Vec<usize>| {
                (0..k).map(move |x| {
                    let mut t = t.clone();
                    t.push(x);
                    t
                })
            })
            .collect();
    }
    out
}
