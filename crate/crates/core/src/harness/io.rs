//! Versioned JSON files for instances, preference profiles, quasi strategies
//! and allocations.
//!
//! Cadets and branches are referenced by name. Prices in preference entries
//! are ladder levels (`0` is the base price). Numbers that feed the scalar
//! type (price values, merits, boosts) may be JSON numbers or strings such
//! as `"3/2"`.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mechanisms::QuasiStrategy;
use crate::model::{
    Allocation, Assignment, BranchId, BranchSpec, CadetId, Instance, PolicySpec, Position, PriceLadder,
    PriceLevel, PriorityOrder,
};
use crate::policy::{JumpScope, PriceResponsivenessPolicy, ScoringSpec, Tier, TierSpec};
use crate::preference::PreferenceRelation;
use crate::scalar::{from_f64, Scalar};

pub const SCHEMA_VERSION: u32 = 1;

/// An instance together with optional reports.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario<S> {
    pub instance: Instance<S>,
    pub preferences: Option<Vec<PreferenceRelation>>,
    pub strategies: Option<Vec<QuasiStrategy>>,
}

impl<S: Scalar> Scenario<S> {
    pub fn new(instance: Instance<S>) -> Self {
        Self {
            instance,
            preferences: None,
            strategies: None,
        }
    }

    pub fn with_preferences(mut self, prefs: Vec<PreferenceRelation>) -> Self {
        self.preferences = Some(prefs);
        self
    }

    pub fn with_strategies(mut self, strategies: Vec<QuasiStrategy>) -> Self {
        self.strategies = Some(strategies);
        self
    }

    pub fn require_preferences(&self) -> Result<&[PreferenceRelation]> {
        self.preferences
            .as_deref()
            .ok_or_else(|| Error::schema("preferences", "missing; this command needs a preference profile"))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum Number {
    Float(f64),
    Text(String),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    schema_version: u32,
    cadets: Vec<String>,
    prices: Vec<Number>,
    branches: Vec<BranchFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    preferences: Option<BTreeMap<String, Vec<EntryFile>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    strategies: Option<BTreeMap<String, StrategyFile>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BranchFile {
    id: String,
    q_total: usize,
    q_flex: usize,
    priority: Vec<String>,
    policy: PolicyFile,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum PolicyFile {
    Ultimate,
    Baseline,
    Tiered {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        variant: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tiers: Option<Vec<TierFile>>,
    },
    Scoring {
        merit: BTreeMap<String, Number>,
        boost: Vec<Number>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tiebreak: Option<Vec<String>>,
    },
    Explicit {
        order: Vec<(String, usize)>,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TierFile {
    cadets: Vec<String>,
    scope: ScopeFile,
}

#[derive(Copy, Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum ScopeFile {
    WithinTier,
    OverAll,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum EntryFile {
    Unmatched(String),
    Position { branch: String, price: usize },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StrategyFile {
    ranking: Vec<String>,
    #[serde(default)]
    willing: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AllocationFile {
    schema_version: u32,
    assignments: Vec<AssignmentFile>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AssignmentFile {
    cadet: String,
    branch: Option<String>,
    price: Option<usize>,
}

fn parse_number<S: Scalar>(field: &str, n: &Number) -> Result<S> {
    match n {
        Number::Float(x) => from_f64(*x).ok_or_else(|| Error::schema(field, format!("{x} is not representable"))),
        Number::Text(t) => {
            let bad = || Error::schema(field, format!("`{t}` is not a number or fraction"));
            let (num, den) = match t.split_once('/') {
                Some((a, b)) => (a.trim(), b.trim()),
                None => (t.trim(), "1"),
            };
            if let (Ok(a), Ok(b)) = (num.parse::<i64>(), den.parse::<i64>()) {
                if b == 0 {
                    return Err(bad());
                }
                let a = S::from_i64(a).ok_or_else(bad)?;
                let b = S::from_i64(b).ok_or_else(bad)?;
                return Ok(a / b);
            }
            let x: f64 = t.trim().parse().map_err(|_| bad())?;
            from_f64(x).ok_or_else(bad)
        }
    }
}

fn number_of<S: Scalar>(x: &S) -> Number {
    Number::Float(x.to_f64().unwrap_or(f64::NAN))
}

struct Names<'a> {
    cadets: &'a [String],
    branches: Vec<&'a str>,
}

impl Names<'_> {
    fn cadet(&self, field: &str, name: &str) -> Result<CadetId> {
        self.cadets
            .iter()
            .position(|c| c == name)
            .map(CadetId)
            .ok_or_else(|| Error::schema(field, format!("unknown cadet `{name}`")))
    }

    fn branch(&self, field: &str, name: &str) -> Result<BranchId> {
        self.branches
            .iter()
            .position(|&b| b == name)
            .map(BranchId)
            .ok_or_else(|| Error::schema(field, format!("unknown branch `{name}`")))
    }

    fn cadet_list(&self, field: &str, names: &[String]) -> Result<Vec<CadetId>> {
        names
            .iter()
            .enumerate()
            .map(|(k, c)| self.cadet(&format!("{field}[{k}]"), c))
            .collect()
    }
}

/// Parses and validates a scenario document.
pub fn parse_scenario<S: Scalar>(text: &str) -> Result<Scenario<S>> {
    let file: ScenarioFile =
        serde_json::from_str(text).map_err(|e| Error::schema("document", e.to_string()))?;
    if file.schema_version != SCHEMA_VERSION {
        return Err(Error::schema(
            "schema_version",
            format!("unsupported version {}, expected {SCHEMA_VERSION}", file.schema_version),
        ));
    }
    let n = file.cadets.len();
    for (k, c) in file.cadets.iter().enumerate() {
        if file.cadets[..k].contains(c) {
            return Err(Error::schema(format!("cadets[{k}]"), format!("duplicate cadet `{c}`")));
        }
    }
    let prices = file
        .prices
        .iter()
        .enumerate()
        .map(|(k, p)| parse_number::<S>(&format!("prices[{k}]"), p))
        .collect::<Result<Vec<_>>>()?;
    let ladder = PriceLadder::new(prices).map_err(|e| Error::schema("prices", e.to_string()))?;
    let names = Names {
        cadets: &file.cadets,
        branches: file.branches.iter().map(|b| b.id.as_str()).collect(),
    };

    let mut specs = Vec::new();
    let mut priorities = Vec::new();
    let mut policies = Vec::new();
    for (b, br) in file.branches.iter().enumerate() {
        let at = |f: &str| format!("branches[{b}].{f}");
        if file.branches[..b].iter().any(|o| o.id == br.id) {
            return Err(Error::schema(at("id"), format!("duplicate branch `{}`", br.id)));
        }
        if br.q_flex > br.q_total {
            return Err(Error::schema(
                at("q_flex"),
                format!("q_flex = {} exceeds q_total = {}", br.q_flex, br.q_total),
            ));
        }
        specs.push(BranchSpec::new(br.id.clone(), br.q_total, br.q_flex)?);
        let ranking = names.cadet_list(&at("priority"), &br.priority)?;
        let pi = PriorityOrder::new(ranking, n).map_err(|e| Error::schema(at("priority"), e.to_string()))?;
        let policy = policy_from_file(&br.policy, &pi, &names, &at("policy"), ladder.len())?;
        priorities.push(pi);
        policies.push(policy);
    }
    let instance = Instance::new(file.cadets.clone(), specs, ladder, priorities, policies).map_err(|e| match e {
        Error::Branch { branch, reason } => {
            let b = names.branches.iter().position(|&x| x == branch).unwrap_or(0);
            Error::schema(format!("branches[{b}].policy"), reason)
        }
        other => other,
    })?;

    let preferences = match &file.preferences {
        None => None,
        Some(map) => {
            for name in map.keys() {
                names.cadet(&format!("preferences.{name}"), name)?;
            }
            let mut out = Vec::with_capacity(n);
            for c in &file.cadets {
                let field = format!("preferences.{c}");
                let entries = map
                    .get(c)
                    .ok_or_else(|| Error::schema(&field, "missing preference list"))?;
                let mut parsed: Vec<Assignment> = Vec::with_capacity(entries.len());
                for (k, e) in entries.iter().enumerate() {
                    let f = format!("{field}[{k}]");
                    parsed.push(match e {
                        EntryFile::Unmatched(s) if s == "unmatched" || s == "∅" => None,
                        EntryFile::Unmatched(s) => {
                            return Err(Error::schema(f, format!("`{s}` is not `unmatched` or a position")))
                        }
                        EntryFile::Position { branch, price } => {
                            let b = names.branch(&format!("{f}.branch"), branch)?;
                            if *price >= instance.n_prices() {
                                return Err(Error::schema(
                                    format!("{f}.price"),
                                    format!("level {price} outside a ladder of {} prices", instance.n_prices()),
                                ));
                            }
                            Some(Position { branch: b, price: PriceLevel(*price) })
                        }
                    });
                }
                let rel = PreferenceRelation::from_entries(&parsed).map_err(|r| Error::schema(&field, r))?;
                rel.validate(instance.n_branches(), instance.n_prices())
                    .map_err(|r| Error::schema(&field, r))?;
                out.push(rel);
            }
            Some(out)
        }
    };

    let strategies = match &file.strategies {
        None => None,
        Some(map) => {
            for name in map.keys() {
                names.cadet(&format!("strategies.{name}"), name)?;
            }
            let mut out = Vec::with_capacity(n);
            for c in &file.cadets {
                let field = format!("strategies.{c}");
                let s = map.get(c).ok_or_else(|| Error::schema(&field, "missing strategy"))?;
                let ranking = s
                    .ranking
                    .iter()
                    .enumerate()
                    .map(|(k, b)| names.branch(&format!("{field}.ranking[{k}]"), b))
                    .collect::<Result<Vec<_>>>()?;
                let willing = s
                    .willing
                    .iter()
                    .enumerate()
                    .map(|(k, b)| names.branch(&format!("{field}.willing[{k}]"), b))
                    .collect::<Result<Vec<_>>>()?;
                let q = QuasiStrategy::new(ranking, willing);
                q.validate(instance.n_branches()).map_err(|r| Error::schema(&field, r))?;
                out.push(q);
            }
            Some(out)
        }
    };

    Ok(Scenario {
        instance,
        preferences,
        strategies,
    })
}

fn policy_from_file<S: Scalar>(
    p: &PolicyFile,
    pi: &PriorityOrder,
    names: &Names<'_>,
    field: &str,
    n_prices: usize,
) -> Result<PolicySpec<S>> {
    Ok(match p {
        PolicyFile::Ultimate => PolicySpec::Ultimate,
        PolicyFile::Baseline => PolicySpec::Baseline,
        PolicyFile::Tiered { variant, tiers } => match (variant.as_deref(), tiers) {
            (Some("2020"), None) => PolicySpec::Tiered(TierSpec::bradso_2020(pi)),
            (Some("2021"), None) => PolicySpec::Tiered(TierSpec::bradso_2021(pi)),
            (None, Some(tiers)) => {
                let tiers = tiers
                    .iter()
                    .enumerate()
                    .map(|(k, t)| {
                        Ok(Tier {
                            cadets: names.cadet_list(&format!("{field}.tiers[{k}].cadets"), &t.cadets)?,
                            scope: match t.scope {
                                ScopeFile::WithinTier => JumpScope::WithinTier,
                                ScopeFile::OverAll => JumpScope::OverAll,
                            },
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                PolicySpec::Tiered(TierSpec { tiers })
            }
            (Some(v), None) => {
                return Err(Error::schema(format!("{field}.variant"), format!("unknown variant `{v}`, expected 2020 or 2021")))
            }
            _ => return Err(Error::schema(field, "tiered policy needs exactly one of `variant` or `tiers`")),
        },
        PolicyFile::Scoring { merit, boost, tiebreak } => {
            let mut m = vec![None; names.cadets.len()];
            for (c, v) in merit {
                let f = format!("{field}.merit.{c}");
                let i = names.cadet(&f, c)?;
                m[i.0] = Some(parse_number::<S>(&f, v)?);
            }
            let merit = m
                .into_iter()
                .enumerate()
                .map(|(i, v)| v.ok_or_else(|| Error::schema(format!("{field}.merit.{}", names.cadets[i]), "missing merit")))
                .collect::<Result<Vec<_>>>()?;
            let boost = boost
                .iter()
                .enumerate()
                .map(|(k, v)| parse_number::<S>(&format!("{field}.boost[{k}]"), v))
                .collect::<Result<Vec<_>>>()?;
            if boost.len() != n_prices {
                return Err(Error::schema(
                    format!("{field}.boost"),
                    format!("{} boosts for {n_prices} prices", boost.len()),
                ));
            }
            let tiebreak = match tiebreak {
                None => pi.clone(),
                Some(list) => {
                    let ranking = names.cadet_list(&format!("{field}.tiebreak"), list)?;
                    PriorityOrder::new(ranking, names.cadets.len())
                        .map_err(|e| Error::schema(format!("{field}.tiebreak"), e.to_string()))?
                }
            };
            PolicySpec::Scoring(ScoringSpec { merit, boost, tiebreak })
        }
        PolicyFile::Explicit { order } => {
            let pairs = order
                .iter()
                .enumerate()
                .map(|(k, (c, t))| Ok((names.cadet(&format!("{field}.order[{k}]"), c)?, PriceLevel(*t))))
                .collect::<Result<Vec<_>>>()?;
            let policy = PriceResponsivenessPolicy::from_order(names.cadets.len(), n_prices, pairs)
                .map_err(|e| Error::schema(format!("{field}.order"), e.to_string()))?;
            PolicySpec::Explicit(policy)
        }
    })
}

fn policy_to_file<S: Scalar>(spec: &PolicySpec<S>, cadets: &[String]) -> PolicyFile {
    let name = |c: CadetId| cadets[c.0].clone();
    match spec {
        PolicySpec::Ultimate => PolicyFile::Ultimate,
        PolicySpec::Baseline => PolicyFile::Baseline,
        PolicySpec::Tiered(t) => PolicyFile::Tiered {
            variant: None,
            tiers: Some(
                t.tiers
                    .iter()
                    .map(|tier| TierFile {
                        cadets: tier.cadets.iter().map(|&c| name(c)).collect(),
                        scope: match tier.scope {
                            JumpScope::WithinTier => ScopeFile::WithinTier,
                            JumpScope::OverAll => ScopeFile::OverAll,
                        },
                    })
                    .collect(),
            ),
        },
        PolicySpec::Scoring(s) => PolicyFile::Scoring {
            merit: s.merit.iter().enumerate().map(|(i, v)| (cadets[i].clone(), number_of(v))).collect(),
            boost: s.boost.iter().map(number_of).collect(),
            tiebreak: Some(s.tiebreak.iter().map(name).collect()),
        },
        PolicySpec::Explicit(p) => PolicyFile::Explicit {
            order: p.order().iter().map(|&(c, t)| (name(c), t.0)).collect(),
        },
    }
}

/// Serializes a scenario to pretty-printed JSON.
pub fn scenario_to_json<S: Scalar>(scenario: &Scenario<S>) -> Result<String> {
    let inst = &scenario.instance;
    let cadets = inst.cadet_names().to_vec();
    let bname = |b: BranchId| inst.branch(b).name.clone();
    let file = ScenarioFile {
        schema_version: SCHEMA_VERSION,
        cadets: cadets.clone(),
        prices: inst.ladder().values().iter().map(number_of).collect(),
        branches: inst
            .branch_ids()
            .map(|b| BranchFile {
                id: bname(b),
                q_total: inst.branch(b).q_total,
                q_flex: inst.branch(b).q_flex,
                priority: inst.priority(b).iter().map(|c| cadets[c.0].clone()).collect(),
                policy: policy_to_file(inst.policy_spec(b), &cadets),
            })
            .collect(),
        preferences: scenario.preferences.as_ref().map(|prefs| {
            prefs
                .iter()
                .enumerate()
                .map(|(i, p)| {
                    let entries = p
                        .entries()
                        .into_iter()
                        .map(|e| match e {
                            None => EntryFile::Unmatched("unmatched".into()),
                            Some(pos) => EntryFile::Position { branch: bname(pos.branch), price: pos.price.0 },
                        })
                        .collect();
                    (cadets[i].clone(), entries)
                })
                .collect()
        }),
        strategies: scenario.strategies.as_ref().map(|ss| {
            ss.iter()
                .enumerate()
                .map(|(i, s)| {
                    (
                        cadets[i].clone(),
                        StrategyFile {
                            ranking: s.ranking.iter().map(|&b| bname(b)).collect(),
                            willing: s.willing.iter().map(|&b| bname(b)).collect(),
                        },
                    )
                })
                .collect()
        }),
    };
    serde_json::to_string_pretty(&file).map_err(|e| Error::Io(e.to_string()))
}

pub fn load_instance<S: Scalar>(path: impl AsRef<Path>) -> Result<Scenario<S>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_scenario(&text)
}

pub fn save_instance<S: Scalar>(scenario: &Scenario<S>, path: impl AsRef<Path>) -> Result<()> {
    write(path.as_ref(), &scenario_to_json(scenario)?)
}

pub fn allocation_to_json<S: Scalar>(instance: &Instance<S>, alloc: &Allocation) -> Result<String> {
    let file = AllocationFile {
        schema_version: SCHEMA_VERSION,
        assignments: instance
            .cadet_ids()
            .map(|i| {
                let a = alloc.get(i);
                AssignmentFile {
                    cadet: instance.cadet_name(i).to_string(),
                    branch: a.map(|p| instance.branch(p.branch).name.clone()),
                    price: a.map(|p| p.price.0),
                }
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).map_err(|e| Error::Io(e.to_string()))
}

pub fn parse_allocation<S: Scalar>(instance: &Instance<S>, text: &str) -> Result<Allocation> {
    let file: AllocationFile =
        serde_json::from_str(text).map_err(|e| Error::schema("document", e.to_string()))?;
    if file.schema_version != SCHEMA_VERSION {
        return Err(Error::schema(
            "schema_version",
            format!("unsupported version {}, expected {SCHEMA_VERSION}", file.schema_version),
        ));
    }
    let mut alloc = Allocation::empty(instance.n_cadets());
    let mut seen = vec![false; instance.n_cadets()];
    for (k, a) in file.assignments.iter().enumerate() {
        let f = format!("assignments[{k}]");
        let i = instance
            .cadet_by_name(&a.cadet)
            .ok_or_else(|| Error::schema(format!("{f}.cadet"), format!("unknown cadet `{}`", a.cadet)))?;
        if std::mem::replace(&mut seen[i.0], true) {
            return Err(Error::schema(format!("{f}.cadet"), format!("cadet `{}` listed twice", a.cadet)));
        }
        let pos = match (&a.branch, a.price) {
            (None, None) => None,
            (Some(b), Some(t)) => {
                let b = instance
                    .branch_by_name(b)
                    .ok_or_else(|| Error::schema(format!("{f}.branch"), format!("unknown branch `{b}`")))?;
                if t >= instance.n_prices() {
                    return Err(Error::schema(format!("{f}.price"), format!("level {t} outside the ladder")));
                }
                Some(Position { branch: b, price: PriceLevel(t) })
            }
            _ => return Err(Error::schema(&f, "branch and price must both be set or both be null")),
        };
        alloc.set(i, pos);
    }
    alloc
        .check_feasible(instance)
        .map_err(|e| Error::schema("assignments", e.to_string()))?;
    Ok(alloc)
}

pub fn save_allocation<S: Scalar>(instance: &Instance<S>, alloc: &Allocation, path: impl AsRef<Path>) -> Result<()> {
    write(path.as_ref(), &allocation_to_json(instance, alloc)?)
}

pub fn load_allocation<S: Scalar>(instance: &Instance<S>, path: impl AsRef<Path>) -> Result<Allocation> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_allocation(instance, &text)
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, format!("{text}\n")).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    const TINY: &str = r#"{
        "schema_version": 1,
        "cadets": ["a", "b"],
        "prices": [0, 1],
        "branches": [
            {"id": "AR", "q_total": 1, "q_flex": 1, "priority": ["a", "b"], "policy": {"kind": "ultimate"}}
        ],
        "preferences": {
            "a": [{"branch": "AR", "price": 0}],
            "b": [{"branch": "AR", "price": 0}, {"branch": "AR", "price": 1}]
        }
    }"#;

    #[test]
    fn parses_tiny_scenario() {
        let s: Scenario<f64> = parse_scenario(TINY).unwrap();
        assert_eq!(s.instance.n_cadets(), 2);
        let prefs = s.preferences.unwrap();
        assert_eq!(prefs[1].acceptable().len(), 2);
    }

    #[test]
    fn flex_above_total_names_the_field() {
        let bad = TINY.replace("\"q_flex\": 1", "\"q_flex\": 2");
        let err = parse_scenario::<f64>(&bad).unwrap_err().to_string();
        assert!(err.starts_with("branches[0].q_flex"), "{err}");
        assert!(err.contains("exceeds q_total"));
    }

    #[test]
    fn unknown_cadet_in_priority_names_the_index() {
        let bad = TINY.replace("[\"a\", \"b\"], \"policy\"", "[\"a\", \"z\"], \"policy\"");
        let err = parse_scenario::<f64>(&bad).unwrap_err().to_string();
        assert!(err.starts_with("branches[0].priority[1]"), "{err}");
    }

    #[test]
    fn wrong_version_rejected() {
        let bad = TINY.replace("\"schema_version\": 1", "\"schema_version\": 7");
        assert!(parse_scenario::<f64>(&bad).unwrap_err().to_string().contains("schema_version"));
    }

    #[test]
    fn rational_prices_parse_exactly() {
        let text = TINY.replace("[0, 1]", "[\"0\", \"3/2\"]");
        let s: Scenario<num_rational::Rational64> = parse_scenario(&text).unwrap();
        assert_eq!(s.instance.ladder().values()[1], num_rational::Rational64::new(3, 2));
    }

    #[test]
    fn allocation_round_trip_and_feasibility() {
        let s: Scenario<f64> = parse_scenario(TINY).unwrap();
        let alloc = Allocation::from_assignments(vec![None, Some(Position::new(0, 1))]);
        let text = allocation_to_json(&s.instance, &alloc).unwrap();
        assert_eq!(parse_allocation(&s.instance, &text).unwrap(), alloc);
        let both = text.replace("\"branch\": null", "\"branch\": \"AR\"").replace("\"price\": null", "\"price\": 0");
        assert!(parse_allocation(&s.instance, &both).is_err());
    }
}
