//! Instance files, synthetic cohorts, the flexible-cap sweep and the
//! exhaustive verification suites used by the command-line tool.

mod cohort;
mod io;
mod sweep;
pub mod verify;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{Instance, PolicySpec};
use crate::policy::TierSpec;
use crate::scalar::Scalar;

pub use crate::mechanisms::truthful_quasi_strategy;
pub use cohort::{generate_cohort, CohortSpec};
pub use io::{
    allocation_to_json, load_allocation, load_instance, parse_allocation, parse_scenario, save_allocation,
    save_instance, scenario_to_json, Scenario, SCHEMA_VERSION,
};
pub use sweep::{cap_fraction_to_flex, parse_cap_range, policy_ordering_violations, sweep_bradso, SweepRow};

/// Named policy families applied uniformly across branches.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum PolicyPreset {
    Ultimate,
    Baseline,
    /// Tiers by thirds of baseline priority; price helps only within a tier.
    Tiered2020,
    /// Tiers by thirds; the top two tiers jump over everyone.
    Tiered2021,
}

impl PolicyPreset {
    pub const ALL: [PolicyPreset; 4] =
        [PolicyPreset::Ultimate, PolicyPreset::Baseline, PolicyPreset::Tiered2020, PolicyPreset::Tiered2021];

    pub fn name(self) -> &'static str {
        match self {
            PolicyPreset::Ultimate => "ultimate",
            PolicyPreset::Baseline => "baseline",
            PolicyPreset::Tiered2020 => "tiered2020",
            PolicyPreset::Tiered2021 => "tiered2021",
        }
    }

    /// Policy spec of every branch of `instance` under this preset.
    pub fn specs<S: Scalar>(self, instance: &Instance<S>) -> Vec<PolicySpec<S>> {
        instance
            .priorities()
            .iter()
            .map(|pi| match self {
                PolicyPreset::Ultimate => PolicySpec::Ultimate,
                PolicyPreset::Baseline => PolicySpec::Baseline,
                PolicyPreset::Tiered2020 => PolicySpec::Tiered(TierSpec::bradso_2020(pi)),
                PolicyPreset::Tiered2021 => PolicySpec::Tiered(TierSpec::bradso_2021(pi)),
            })
            .collect()
    }

    pub fn apply<S: Scalar>(self, instance: &Instance<S>) -> Result<Instance<S>> {
        instance.with_policies(self.specs(instance))
    }
}

impl fmt::Display for PolicyPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PolicyPreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "ultimate" => Ok(PolicyPreset::Ultimate),
            "baseline" => Ok(PolicyPreset::Baseline),
            "tiered2020" | "2020" => Ok(PolicyPreset::Tiered2020),
            "tiered2021" | "2021" => Ok(PolicyPreset::Tiered2021),
            other => Err(Error::schema(
                "policies",
                format!("unknown policy `{other}`; expected ultimate, baseline, tiered2020 or tiered2021"),
            )),
        }
    }
}
