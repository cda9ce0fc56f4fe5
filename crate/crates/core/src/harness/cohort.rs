use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::harness::{PolicyPreset, Scenario};
use crate::model::{BranchId, BranchSpec, CadetId, Instance, Position, PriceLadder, PriceLevel, PriorityOrder};
use crate::preference::PreferenceRelation;

/// Parameters of a synthetic cohort.
///
/// Each cadet draws a common merit score; a branch ranks cadets by merit
/// plus `priority_noise` times an independent uniform draw per branch, so
/// zero noise gives every branch the same baseline priority.
/// Each cadet ranks between `min_list` and `max_list` branches drawn without
/// replacement with probability proportional to `popularity`. At each ranked
/// branch the cadet is willing to pay the next price level with probability
/// `willingness`, checked level by level; willing entries directly follow
/// the base-price entry.
#[derive(Clone, Debug, PartialEq)]
pub struct CohortSpec {
    pub seed: u64,
    pub n_cadets: usize,
    pub branches: Vec<BranchSpec>,
    pub popularity: Vec<f64>,
    pub willingness: f64,
    pub min_list: usize,
    pub max_list: usize,
    pub n_prices: usize,
    pub priority_noise: f64,
    pub policy: PolicyPreset,
}

impl CohortSpec {
    /// Eight branches with capacities summing to the cohort size, a
    /// popularity gradient, lists of 3 to 8 branches and a 30% willingness
    /// rate. Every branch starts with no flexible positions.
    pub fn standard(seed: u64, n_cadets: usize) -> Self {
        let shares = [0.20, 0.16, 0.14, 0.12, 0.11, 0.10, 0.09, 0.08];
        let mut caps: Vec<usize> = shares.iter().map(|s| (s * n_cadets as f64).floor() as usize).collect();
        let short = n_cadets - caps.iter().sum::<usize>();
        for c in caps.iter_mut().take(short) {
            *c += 1;
        }
        let names = ["AD", "AR", "AV", "CM", "EN", "FA", "IN", "MI"];
        Self {
            seed,
            n_cadets,
            branches: names
                .iter()
                .zip(caps)
                .map(|(n, q)| BranchSpec { name: (*n).into(), q_total: q, q_flex: 0 })
                .collect(),
            popularity: vec![3.0, 2.6, 2.2, 1.9, 1.6, 1.3, 1.1, 1.0],
            willingness: 0.3,
            min_list: 3,
            max_list: 8,
            n_prices: 2,
            priority_noise: 0.0,
            policy: PolicyPreset::Ultimate,
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |field: &str, reason: String| Err(Error::schema(format!("cohort.{field}"), reason));
        if self.branches.is_empty() {
            return bad("branches", "at least one branch is required".into());
        }
        for b in &self.branches {
            b.validate()?;
        }
        if self.popularity.len() != self.branches.len() {
            return bad(
                "popularity",
                format!("{} weights for {} branches", self.popularity.len(), self.branches.len()),
            );
        }
        if self.popularity.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return bad("popularity", "weights must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.willingness) {
            return bad("willingness", format!("{} is not a probability", self.willingness));
        }
        if self.min_list > self.max_list || self.min_list > self.branches.len() {
            return bad(
                "min_list",
                format!(
                    "list length range {}..={} is infeasible with {} branches",
                    self.min_list,
                    self.max_list,
                    self.branches.len()
                ),
            );
        }
        if !(self.priority_noise.is_finite() && self.priority_noise >= 0.0) {
            return bad("priority_noise", format!("{} must be a non-negative number", self.priority_noise));
        }
        if self.n_prices == 0 {
            return bad("n_prices", "the ladder needs at least one price".into());
        }
        Ok(())
    }
}

/// Draws an instance and a truthful preference profile from `spec`.
/// Identical specs give identical output.
pub fn generate_cohort(spec: &CohortSpec) -> Result<Scenario<f64>> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.n_cadets;
    let nb = spec.branches.len();

    let merit: Vec<f64> = (0..n).map(|_| rng.gen()).collect();
    let pis: Vec<PriorityOrder> = (0..nb)
        .map(|_| {
            let score: Vec<f64> = merit.iter().map(|m| m + spec.priority_noise * rng.gen::<f64>()).collect();
            let mut order: Vec<CadetId> = (0..n).map(CadetId).collect();
            order.sort_by(|a, b| score[b.0].total_cmp(&score[a.0]));
            PriorityOrder::new(order, n)
        })
        .collect::<Result<_>>()?;

    let max_len = spec.max_list.min(nb);
    let mut prefs = Vec::with_capacity(n);
    for _ in 0..n {
        let len = rng.gen_range(spec.min_list..=max_len);
        let mut weights = spec.popularity.clone();
        let mut acceptable = Vec::new();
        for _ in 0..len {
            let b = WeightedIndex::new(&weights).expect("positive weights remain").sample(&mut rng);
            weights[b] = 0.0;
            acceptable.push(Position { branch: BranchId(b), price: PriceLevel::BASE });
            for t in 1..spec.n_prices {
                if !rng.gen_bool(spec.willingness) {
                    break;
                }
                acceptable.push(Position { branch: BranchId(b), price: PriceLevel(t) });
            }
            if weights.iter().all(|&w| w == 0.0) {
                break;
            }
        }
        prefs.push(PreferenceRelation::new(acceptable));
    }

    let template = Instance::new(
        (0..n).map(|i| format!("c{i:03}")).collect(),
        spec.branches.clone(),
        PriceLadder::uniform(spec.n_prices)?,
        pis,
        vec![crate::model::PolicySpec::Ultimate; nb],
    )?;
    let instance = spec.policy.apply(&template)?;
    instance.check_profile(&prefs)?;
    Ok(Scenario::new(instance).with_preferences(prefs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_cohort() {
        let a = generate_cohort(&CohortSpec::standard(42, 20)).unwrap();
        let b = generate_cohort(&CohortSpec::standard(42, 20)).unwrap();
        assert_eq!(a, b);
        let c = generate_cohort(&CohortSpec::standard(43, 20)).unwrap();
        assert_ne!(a.preferences, c.preferences);
    }

    #[test]
    fn zero_willingness_ranks_no_increased_price() {
        let mut spec = CohortSpec::standard(7, 50);
        spec.willingness = 0.0;
        let s = generate_cohort(&spec).unwrap();
        for p in s.preferences.unwrap() {
            assert!(p.acceptable().iter().all(|x| x.price.is_base()));
        }
    }

    #[test]
    fn infeasible_specs_rejected() {
        let mut spec = CohortSpec::standard(1, 10);
        spec.min_list = 9;
        assert!(generate_cohort(&spec).is_err());
        let mut spec = CohortSpec::standard(1, 10);
        spec.willingness = 1.5;
        assert!(generate_cohort(&spec).is_err());
    }
}
