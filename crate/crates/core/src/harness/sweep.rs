use crate::error::{Error, Result};
use crate::harness::PolicyPreset;
use crate::mechanisms::mpco_allocation;
use crate::model::{Allocation, Instance};
use crate::preference::PreferenceRelation;
use crate::scalar::Scalar;

/// Outcome of cumulative offer under one policy and one flexible-cap share.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub policy: String,
    pub cap_fraction: f64,
    pub q_flex: Vec<usize>,
    /// Increased-price contracts per branch.
    pub charged: Vec<usize>,
    /// Matched cadets per branch.
    pub assigned: Vec<usize>,
    pub charged_total: usize,
    pub assigned_total: usize,
    pub unmatched: usize,
    pub allocation: Allocation,
}

impl SweepRow {
    /// CSV records `policy,cap_fraction,branch,charged,assigned,unmatched`:
    /// one aggregate record with branch `all`, then one per branch if asked.
    /// Per-branch records leave `unmatched` empty.
    pub fn csv_records(&self, branch_names: &[String], per_branch: bool) -> Vec<[String; 6]> {
        let frac = format!("{:.2}", self.cap_fraction);
        let mut out = vec![[
            self.policy.clone(),
            frac.clone(),
            "all".into(),
            self.charged_total.to_string(),
            self.assigned_total.to_string(),
            self.unmatched.to_string(),
        ]];
        if per_branch {
            for (b, name) in branch_names.iter().enumerate() {
                out.push([
                    self.policy.clone(),
                    frac.clone(),
                    name.clone(),
                    self.charged[b].to_string(),
                    self.assigned[b].to_string(),
                    String::new(),
                ]);
            }
        }
        out
    }
}

/// Flexible positions for a cap share of `q_total`: nearest integer with
/// halves rounded up, clamped to `[0, q_total]`.
pub fn cap_fraction_to_flex(fraction: f64, q_total: usize) -> usize {
    ((fraction * q_total as f64 + 0.5).floor().max(0.0) as usize).min(q_total)
}

/// Parses `start:stop:step` (inclusive) or a comma-separated list.
pub fn parse_cap_range(text: &str) -> Result<Vec<f64>> {
    let bad = |r: String| Error::schema("caps", r);
    let values = if let [a, b, s] = text.split(':').collect::<Vec<_>>()[..] {
        let p = |x: &str| x.trim().parse::<f64>().map_err(|_| bad(format!("`{x}` is not a number")));
        let (start, stop, step) = (p(a)?, p(b)?, p(s)?);
        if !(step > 0.0) || stop < start {
            return Err(bad(format!("empty or unbounded range `{text}`")));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        (0..count).map(|k| start + k as f64 * step).collect()
    } else {
        text.split(',')
            .map(|x| x.trim().parse::<f64>().map_err(|_| bad(format!("`{x}` is not a number"))))
            .collect::<Result<Vec<_>>>()?
    };
    if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(bad(format!("cap fraction {v} outside [0, 1]")));
    }
    Ok(values)
}

/// Runs cumulative offer on `template` for every `(policy, cap fraction)`
/// pair, policies in the outer loop.
pub fn sweep_bradso<S: Scalar>(
    template: &Instance<S>,
    prefs: &[PreferenceRelation],
    policies: &[PolicyPreset],
    cap_fractions: &[f64],
) -> Result<Vec<SweepRow>> {
    template.check_profile(prefs)?;
    if let Some(v) = cap_fractions.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(Error::schema("caps", format!("cap fraction {v} outside [0, 1]")));
    }
    let mut rows = Vec::with_capacity(policies.len() * cap_fractions.len());
    for &policy in policies {
        let with_policy = policy.apply(template)?;
        for &f in cap_fractions {
            let q_flex: Vec<usize> = template.branches().iter().map(|b| cap_fraction_to_flex(f, b.q_total)).collect();
            let instance = with_policy.with_flex_caps(&q_flex)?;
            let alloc = mpco_allocation(&instance, prefs, None)?;
            let charged: Vec<usize> = instance.branch_ids().map(|b| alloc.charged_at(b)).collect();
            let assigned: Vec<usize> = instance.branch_ids().map(|b| alloc.assigned_to(b)).collect();
            rows.push(SweepRow {
                policy: policy.name().into(),
                cap_fraction: f,
                q_flex,
                charged_total: charged.iter().sum(),
                assigned_total: assigned.iter().sum(),
                unmatched: instance.n_cadets() - alloc.matched(),
                charged,
                assigned,
                allocation: alloc,
            });
        }
    }
    Ok(rows)
}

/// Cap fractions at which aggregate charged counts break the expected
/// order `order[0] ≥ order[1] ≥ …`, one message per broken pair.
pub fn policy_ordering_violations(rows: &[SweepRow], order: &[PolicyPreset]) -> Vec<String> {
    let mut out = Vec::new();
    let mut fractions: Vec<f64> = rows.iter().map(|r| r.cap_fraction).collect();
    fractions.dedup();
    fractions.sort_by(|a, b| a.total_cmp(b));
    fractions.dedup();
    for f in fractions {
        let count = |p: PolicyPreset| {
            rows.iter()
                .find(|r| r.cap_fraction == f && r.policy == p.name())
                .map(|r| r.charged_total)
        };
        for w in order.windows(2) {
            if let (Some(hi), Some(lo)) = (count(w[0]), count(w[1])) {
                if hi < lo {
                    out.push(format!("cap {f:.2}: {} charged {hi} < {} charged {lo}", w[0], w[1]));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{PolicySpec, PriceLadder, PriorityOrder};

    #[test]
    fn rounding_is_nearest_with_halves_up() {
        assert_eq!(cap_fraction_to_flex(0.05, 10), 1);
        assert_eq!(cap_fraction_to_flex(0.04, 10), 0);
        assert_eq!(cap_fraction_to_flex(0.25, 2), 1);
        assert_eq!(cap_fraction_to_flex(1.0, 7), 7);
    }

    #[test]
    fn cap_range_has_eight_points() {
        let v = parse_cap_range("0.05:0.75:0.10").unwrap();
        assert_eq!(v.len(), 8);
        assert!((v[7] - 0.75).abs() < 1e-9);
        assert!(parse_cap_range("0.5:0.1:0.1").is_err());
        assert!(parse_cap_range("0.2,1.5").is_err());
    }

    #[test]
    fn single_price_never_charges() {
        let inst: Instance<f64> = Instance::anonymous(
            3,
            &[(2, 0)],
            PriceLadder::uniform(1).unwrap(),
            vec![PriorityOrder::identity(3)],
            vec![PolicySpec::Ultimate],
        )
        .unwrap();
        let prefs = vec![PreferenceRelation::prefix(0, 1); 3];
        let rows = sweep_bradso(&inst, &prefs, &PolicyPreset::ALL, &[0.0, 0.5, 1.0]).unwrap();
        assert_eq!(rows.len(), 12);
        assert!(rows.iter().all(|r| r.charged_total == 0));
    }
}
