//! Exhaustive and seeded verification suites over small economies.
//!
//! Each suite returns a [`SuiteReport`] listing the cases it checked and
//! every failure it found. Instances are processed in parallel and results
//! are merged in grid order, so reports are deterministic.

use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::axioms::{audit_allocation, verify_uniqueness, Axiom, OutcomeTable, UniquenessStatus};
use crate::choice::cmp_choice;
use crate::error::{Error, Result};
use crate::gametheory::enumerate_pure_ne;
use crate::harness::PolicyPreset;
use crate::mechanisms::{
    counterexample_mechanism, da_blocking_pairs, da_instance, mpco_allocation, phi_mp, CounterexampleKind, MpcoRunner,
};
use crate::model::{BranchId, BranchSpec, CadetId, Contract, Instance, PolicySpec, PriceLadder, PriceLevel, PriorityOrder};
use crate::policy::{more_responsive, JumpScope, TierSpec};
use crate::preference::{enumerate_preferences, for_each_profile, PreferenceRelation, DEFAULT_ENUMERATION_GUARD};

/// Failures kept verbatim in a report; the rest are only counted.
const KEPT_FAILURES: usize = 25;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SuiteReport {
    pub suite: String,
    pub instances: usize,
    pub cases: usize,
    pub failure_count: usize,
    pub failures: Vec<String>,
    /// Extra counts and remarks that do not decide pass or fail.
    pub notes: Vec<String>,
}

impl SuiteReport {
    fn new(suite: &str) -> Self {
        Self {
            suite: suite.into(),
            ..Default::default()
        }
    }

    pub fn passed(&self) -> bool {
        self.failure_count == 0
    }

    fn fail(&mut self, msg: String) {
        self.failure_count += 1;
        if self.failures.len() < KEPT_FAILURES {
            self.failures.push(msg);
        }
    }

    fn absorb(&mut self, other: SuiteReport) {
        self.instances += other.instances;
        self.cases += other.cases;
        self.failure_count += other.failure_count;
        for f in other.failures {
            if self.failures.len() < KEPT_FAILURES {
                self.failures.push(f);
            }
        }
        self.notes.extend(other.notes);
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{}: {} ({} instances, {} cases, {} failures)",
            self.suite,
            if self.passed() { "pass" } else { "FAIL" },
            self.instances,
            self.cases,
            self.failure_count
        )?;
        for n in &self.notes {
            writeln!(f, "  note: {n}")?;
        }
        for x in &self.failures {
            writeln!(f, "  failure: {x}")?;
        }
        Ok(())
    }
}

pub const SUITES: [&str; 8] = [
    "phi-mp-equivalence",
    "mpco-axioms",
    "equilibrium-equivalence",
    "independence",
    "uniqueness",
    "da-reduction",
    "choice-monotonicity",
    "order-independence",
];

/// Options shared by the suites; each suite reads the fields it needs.
#[derive(Clone, Debug)]
pub struct SuiteOptions {
    pub max_cadets: usize,
    pub seed: u64,
    pub count: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            max_cadets: 5,
            seed: 42,
            count: 1000,
        }
    }
}

pub fn run_suite(name: &str, opts: &SuiteOptions) -> Result<SuiteReport> {
    match name {
        // `corollary-b2` is the name the command-line interface documents
        "phi-mp-equivalence" | "corollary-b2" => single_branch_equivalence(opts.max_cadets),
        "mpco-axioms" => cumulative_offer_axioms(opts.max_cadets.min(3), 2, 2, 2),
        "equilibrium-equivalence" => equilibrium_equivalence(opts.max_cadets),
        "independence" => independence(),
        "uniqueness" => uniqueness(opts.max_cadets.min(3)),
        "da-reduction" => da_reduction(opts.seed, opts.count),
        "choice-monotonicity" => choice_monotonicity(opts.seed, opts.count),
        "order-independence" => order_independence(opts.seed, opts.count.min(100), 20),
        other => Err(Error::schema(
            "suite",
            format!("unknown suite `{other}`; expected one of {}", SUITES.join(", ")),
        )),
    }
}

fn ladder(levels: usize) -> PriceLadder<f64> {
    PriceLadder::uniform(levels).expect("positive ladder length")
}

fn compositions(n: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if n == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 1..=n {
        for mut rest in compositions(n - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Ultimate policy plus every tiered policy over consecutive tiers of
/// `identity(n)` (one to three tiers, every scope assignment that yields a
/// valid order).
pub fn single_branch_policy_grid(n: usize) -> Vec<(String, PolicySpec<f64>)> {
    let pi = PriorityOrder::identity(n);
    let mut out = vec![("ultimate".to_string(), PolicySpec::Ultimate)];
    for parts in 1..=3.min(n) {
        for sizes in compositions(n, parts) {
            for mask in 0..1usize << parts {
                let scopes: Vec<JumpScope> = (0..parts)
                    .map(|k| if mask >> k & 1 == 1 { JumpScope::OverAll } else { JumpScope::WithinTier })
                    .collect();
                let tiers = TierSpec::split(&pi, &sizes, &scopes).expect("composition sums to n");
                let spec = PolicySpec::Tiered(tiers);
                if spec.build(&pi, &ladder(2)).is_ok() {
                    let label: Vec<String> = sizes
                        .iter()
                        .zip(&scopes)
                        .map(|(s, sc)| format!("{s}{}", if *sc == JumpScope::OverAll { "o" } else { "w" }))
                        .collect();
                    out.push((format!("tiered[{}]", label.join(",")), spec));
                }
            }
        }
    }
    out
}

/// Single-branch, two-price instances with up to `max_cadets` cadets,
/// `q^0, q^f ≤ 2` and every policy of [`single_branch_policy_grid`].
pub fn single_branch_grid(max_cadets: usize) -> Vec<(String, Instance<f64>)> {
    let mut out = Vec::new();
    for n in 0..=max_cadets {
        for q0 in 0..=2 {
            for qf in 0..=2 {
                for (label, spec) in single_branch_policy_grid(n) {
                    let inst = Instance::anonymous(n, &[(q0 + qf, qf)], ladder(2), vec![PriorityOrder::identity(n)], vec![spec])
                        .expect("grid instances are valid");
                    out.push((format!("n={n} q0={q0} qf={qf} {label}"), inst));
                }
            }
        }
    }
    out
}

fn describe(profile: &[PreferenceRelation]) -> String {
    let parts: Vec<String> = profile
        .iter()
        .map(|p| {
            let e: Vec<String> = p.acceptable().iter().map(|x| format!("{}{}", x.branch, x.price)).collect();
            format!("[{}]", e.join(" "))
        })
        .collect();
    parts.join(" ")
}

/// The direct single-branch mechanism and cumulative offer agree everywhere
/// on the single-branch grid.
pub fn single_branch_equivalence(max_cadets: usize) -> Result<SuiteReport> {
    let domain = enumerate_preferences(1, 2, DEFAULT_ENUMERATION_GUARD)?;
    let grid = single_branch_grid(max_cadets);
    let parts: Vec<Result<SuiteReport>> = grid
        .par_iter()
        .map(|(label, inst)| {
            let mut r = SuiteReport::new("phi-mp-equivalence");
            r.instances = 1;
            let mut runner = MpcoRunner::new(inst);
            let order = inst.default_proposal_order();
            let mut err = None;
            for_each_profile(&domain, inst.n_cadets(), DEFAULT_ENUMERATION_GUARD, |_, p| {
                r.cases += 1;
                let m = runner.run(inst, p, &order, None);
                match phi_mp(inst, p) {
                    Ok(d) if d == m => {}
                    Ok(_) => r.fail(format!("{label} {}", describe(p))),
                    Err(e) => err = Some(e),
                }
            })?;
            err.map_or(Ok(r), Err)
        })
        .collect();
    merge("phi-mp-equivalence", parts)
}

fn merge(name: &str, parts: Vec<Result<SuiteReport>>) -> Result<SuiteReport> {
    let mut total = SuiteReport::new(name);
    for p in parts {
        total.absorb(p?);
    }
    Ok(total)
}

/// Every permutation of `0..n`.
fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for k in 0..=p.len() {
            let mut q = p.clone();
            q.insert(k, n - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

/// Grid of economies: up to `max_cadets` cadets, `max_branches` branches,
/// `max_prices` prices, every `(q, q^f)` with `q ≤ max_q`, every priority of
/// the non-first branches, and every policy preset applied uniformly.
pub fn small_economy_grid(max_cadets: usize, max_branches: usize, max_prices: usize, max_q: usize) -> Vec<(String, Instance<f64>)> {
    let mut out = Vec::new();
    for n in 1..=max_cadets {
        for nb in 1..=max_branches {
            for nt in 1..=max_prices {
                let caps: Vec<(usize, usize)> = (0..=max_q)
                    .flat_map(|q| (0..=if nt == 1 { 0 } else { q }).map(move |f| (q, f)))
                    .collect();
                let mut cap_grid: Vec<Vec<(usize, usize)>> = vec![vec![]];
                for _ in 0..nb {
                    cap_grid = cap_grid
                        .into_iter()
                        .flat_map(|c| caps.iter().map(move |&x| [c.clone(), vec![x]].concat()))
                        .collect();
                }
                let perms = permutations(n);
                let mut prio_grid: Vec<Vec<PriorityOrder>> = vec![vec![PriorityOrder::identity(n)]];
                for _ in 1..nb {
                    prio_grid = prio_grid
                        .into_iter()
                        .flat_map(|ps| {
                            perms.iter().map(move |perm| {
                                let pi = PriorityOrder::new(perm.iter().map(|&x| CadetId(x)).collect(), n)
                                    .expect("permutation");
                                [ps.clone(), vec![pi]].concat()
                            })
                        })
                        .collect();
                }
                let presets: &[PolicyPreset] = if nt == 1 { &[PolicyPreset::Ultimate] } else { &PolicyPreset::ALL };
                for caps in &cap_grid {
                    for (k, pis) in prio_grid.iter().enumerate() {
                        let base = Instance::anonymous(n, caps, ladder(nt), pis.clone(), vec![PolicySpec::Ultimate; nb])
                            .expect("grid instances are valid");
                        for &preset in presets {
                            let inst = preset.apply(&base).expect("presets are valid");
                            out.push((format!("n={n} B={nb} T={nt} caps={caps:?} prio#{k} {preset}"), inst));
                        }
                    }
                }
            }
        }
    }
    out
}

/// Cumulative offer satisfies the five axioms on every profile of the
/// small-economy grid.
pub fn cumulative_offer_axioms(max_cadets: usize, max_branches: usize, max_prices: usize, max_q: usize) -> Result<SuiteReport> {
    let grid = small_economy_grid(max_cadets, max_branches, max_prices, max_q);
    let parts: Vec<Result<SuiteReport>> = grid
        .par_iter()
        .map(|(label, inst)| {
            let mut r = SuiteReport::new("mpco-axioms");
            r.instances = 1;
            let domain = enumerate_preferences(inst.n_branches(), inst.n_prices(), DEFAULT_ENUMERATION_GUARD)?;
            let mut runner = MpcoRunner::new(inst);
            let order = inst.default_proposal_order();
            let table = OutcomeTable::build(&domain, inst.n_cadets(), DEFAULT_ENUMERATION_GUARD, |p| {
                runner.run(inst, p, &order, None)
            })?;
            for k in 0..table.len() {
                r.cases += 1;
                let profile = table.profile(k);
                for v in audit_allocation(inst, table.outcome(k), &profile) {
                    r.fail(format!("{label} {}: {}", describe(&profile), v.narrative_with(inst)));
                }
            }
            for v in table.strategy_proofness_violations() {
                r.fail(format!("{label}: {}", v.narrative_with(inst)));
            }
            Ok(r)
        })
        .collect();
    merge("mpco-axioms", parts)
}

/// The single-branch USMA-2020 game has the direct mechanism's outcome as
/// its unique pure equilibrium outcome on every profile of the grid.
///
/// Notes record how often the direct outcome is at least one equilibrium
/// outcome and how the picture changes when equilibria in weakly dominated
/// actions are discarded.
pub fn equilibrium_equivalence(max_cadets: usize) -> Result<SuiteReport> {
    let domain = enumerate_preferences(1, 2, DEFAULT_ENUMERATION_GUARD)?;
    let grid = single_branch_grid(max_cadets);
    // (report, direct outcome missing, undominated mismatch)
    let parts: Vec<Result<(SuiteReport, usize, usize)>> = grid
        .par_iter()
        .map(|(label, inst)| {
            let mut r = SuiteReport::new("equilibrium-equivalence");
            r.instances = 1;
            let (mut missing, mut undominated) = (0, 0);
            let mut err = None;
            for_each_profile(&domain, inst.n_cadets(), DEFAULT_ENUMERATION_GUARD, |_, p| {
                r.cases += 1;
                let mut run = || -> Result<()> {
                    let ne = enumerate_pure_ne(inst, p, 1 << 16)?;
                    let direct = phi_mp(inst, p)?;
                    if ne.outcomes != [direct.clone()] {
                        r.fail(format!("{label} {}: {} equilibrium outcomes", describe(p), ne.outcomes.len()));
                    }
                    if !ne.outcomes.contains(&direct) {
                        missing += 1;
                    }
                    if ne.undominated_outcomes != [direct] {
                        undominated += 1;
                    }
                    Ok(())
                };
                if let Err(e) = run() {
                    err = Some(e);
                }
            })?;
            err.map_or(Ok((r, missing, undominated)), Err)
        })
        .collect();
    let mut total = SuiteReport::new("equilibrium-equivalence");
    let (mut missing, mut undominated) = (0, 0);
    for p in parts {
        let (r, m, u) = p?;
        total.absorb(r);
        missing += m;
        undominated += u;
    }
    total
        .notes
        .push(format!("profiles where the direct outcome is not an equilibrium outcome: {missing}"));
    total.notes.push(format!(
        "profiles where equilibria in weakly undominated actions do not single out the direct outcome: {undominated}"
    ));
    Ok(total)
}

/// Economies on which each counterexample mechanism is checked.
pub fn trigger_instances(kind: CounterexampleKind) -> Vec<Instance<f64>> {
    let single = |n: usize, q: usize, f: usize, t: usize| {
        Instance::anonymous(n, &[(q, f)], ladder(t), vec![PriorityOrder::identity(n)], vec![PolicySpec::Ultimate])
            .expect("trigger instances are valid")
    };
    match kind {
        CounterexampleKind::DropIr => vec![single(1, 1, 0, 1), single(2, 1, 0, 1), single(2, 2, 0, 1)],
        CounterexampleKind::Empty => vec![single(1, 1, 0, 1), single(2, 1, 1, 2)],
        CounterexampleKind::DaDirect => vec![single(2, 1, 1, 2), single(3, 2, 1, 2)],
        CounterexampleKind::Psi { .. } => vec![single(4, 2, 1, 2)],
        CounterexampleKind::PriceBump { .. } => vec![single(1, 2, 1, 2), single(2, 3, 1, 2)],
    }
}

/// The axiom each counterexample mechanism gives up.
pub fn target_axiom(kind: CounterexampleKind) -> Axiom {
    match kind {
        CounterexampleKind::DropIr => Axiom::IndividualRationality,
        CounterexampleKind::Empty => Axiom::NonWastefulness,
        CounterexampleKind::DaDirect => Axiom::PolicyEnforcement,
        CounterexampleKind::Psi { .. } => Axiom::NoPriorityReversal,
        CounterexampleKind::PriceBump { .. } => Axiom::StrategyProofness,
    }
}

pub const COUNTEREXAMPLES: [CounterexampleKind; 5] = [
    CounterexampleKind::DropIr,
    CounterexampleKind::Empty,
    CounterexampleKind::DaDirect,
    CounterexampleKind::Psi { branch: BranchId(0) },
    CounterexampleKind::PriceBump { branch: BranchId(0) },
];

/// Violation counts of each of the five axioms for `kind` over every
/// profile of every trigger instance.
pub fn counterexample_violations(kind: CounterexampleKind) -> Result<Vec<(Axiom, usize)>> {
    let mut counts: Vec<(Axiom, usize)> = Axiom::DIRECT.iter().map(|&a| (a, 0)).collect();
    for inst in trigger_instances(kind) {
        let domain = enumerate_preferences(inst.n_branches(), inst.n_prices(), DEFAULT_ENUMERATION_GUARD)?;
        let mut err = None;
        let table = OutcomeTable::build(&domain, inst.n_cadets(), DEFAULT_ENUMERATION_GUARD, |p| {
            counterexample_mechanism(kind, &inst, p).unwrap_or_else(|e| {
                err = Some(e);
                crate::model::Allocation::empty(p.len())
            })
        })?;
        if let Some(e) = err {
            return Err(e);
        }
        for k in 0..table.len() {
            for v in audit_allocation(&inst, table.outcome(k), &table.profile(k)) {
                counts.iter_mut().find(|(a, _)| *a == v.axiom).expect("direct axiom").1 += 1;
            }
        }
        counts.iter_mut().find(|(a, _)| *a == Axiom::StrategyProofness).expect("listed").1 +=
            table.strategy_proofness_violations().len();
    }
    Ok(counts)
}

/// Each counterexample mechanism violates its target axiom and no other.
pub fn independence() -> Result<SuiteReport> {
    let mut r = SuiteReport::new("independence");
    for kind in COUNTEREXAMPLES {
        r.instances += trigger_instances(kind).len();
        r.cases += 1;
        let counts = counterexample_violations(kind)?;
        let target = target_axiom(kind);
        let summary: Vec<String> = counts.iter().map(|(a, c)| format!("{a}={c}")).collect();
        r.notes.push(format!("{}: {}", kind.name(), summary.join(" ")));
        for (a, c) in counts {
            if a == target && c == 0 {
                r.fail(format!("{} never violates {a}", kind.name()));
            }
            if a != target && c > 0 {
                r.fail(format!("{} also violates {a} ({c} times)", kind.name()));
            }
        }
    }
    Ok(r)
}

/// Finite uniqueness search on single-branch economies with up to
/// `max_cadets` cadets and on two-branch economies with two cadets.
pub fn uniqueness(max_cadets: usize) -> Result<SuiteReport> {
    let mut family = Vec::new();
    for n in 1..=max_cadets {
        for q in 1..=2 {
            for f in 0..=q {
                family.push(
                    Instance::anonymous(n, &[(q, f)], ladder(2), vec![PriorityOrder::identity(n)], vec![PolicySpec::Ultimate])
                        .expect("valid"),
                );
            }
        }
    }
    let swap = PriorityOrder::new(vec![CadetId(1), CadetId(0)], 2).expect("permutation");
    for caps in [[(1, 0), (1, 1)], [(1, 1), (1, 1)], [(1, 1), (2, 1)]] {
        for second in [PriorityOrder::identity(2), swap.clone()] {
            family.push(
                Instance::anonymous(2, &caps, ladder(2), vec![PriorityOrder::identity(2), second], vec![PolicySpec::Ultimate; 2])
                    .expect("valid"),
            );
        }
    }
    let report = verify_uniqueness(&family, DEFAULT_ENUMERATION_GUARD)?;
    let mut r = SuiteReport::new("uniqueness");
    r.instances = report.instances;
    r.cases = report.profiles;
    r.notes.push(format!(
        "status {:?}; {} profiles with a single axiomatic allocation, {} with several; {} alternatives refuted",
        report.status(),
        report.single_candidate_profiles,
        report.multiple_candidate_profiles,
        report.refuted_alternatives
    ));
    if report.status() != UniquenessStatus::Unique {
        for v in &report.mpco_violations {
            r.fail(format!("cumulative offer: {}", v.narrative()));
        }
        for (k, p, a) in &report.unrefuted {
            r.fail(format!("instance {k} {}: unrefuted alternative {:?}", describe(p), a.assignments()));
        }
    }
    Ok(r)
}

fn random_priority(rng: &mut ChaCha8Rng, n: usize) -> PriorityOrder {
    let mut ranking: Vec<CadetId> = (0..n).map(CadetId).collect();
    ranking.shuffle(rng);
    PriorityOrder::new(ranking, n).expect("permutation")
}

fn random_branch_lists(rng: &mut ChaCha8Rng, n: usize, nb: usize) -> Vec<Vec<BranchId>> {
    (0..n)
        .map(|_| {
            let mut bs: Vec<BranchId> = (0..nb).map(BranchId).collect();
            bs.shuffle(rng);
            bs.truncate(rng.gen_range(0..=nb));
            bs
        })
        .collect()
}

/// Random multi-branch economy with up to `max_n` cadets and `max_b`
/// branches and a truthful-looking random profile over `n_prices` prices.
pub fn random_economy(rng: &mut ChaCha8Rng, max_n: usize, max_b: usize, n_prices: usize) -> (Instance<f64>, Vec<PreferenceRelation>) {
    let n = rng.gen_range(1..=max_n);
    let nb = rng.gen_range(1..=max_b);
    let caps: Vec<(usize, usize)> = (0..nb)
        .map(|_| {
            let q = rng.gen_range(0..=3);
            (q, if n_prices > 1 { rng.gen_range(0..=q) } else { 0 })
        })
        .collect();
    let pis: Vec<PriorityOrder> = (0..nb).map(|_| random_priority(rng, n)).collect();
    let inst = Instance::anonymous(n, &caps, ladder(n_prices), pis, vec![PolicySpec::Ultimate; nb]).expect("valid");
    let inst = PolicyPreset::ALL[rng.gen_range(0..4)].apply(&inst).expect("valid preset");
    let prefs = random_branch_lists(rng, n, nb)
        .into_iter()
        .map(|bs| {
            let mut acc = Vec::new();
            for b in bs {
                let top = rng.gen_range(1..=n_prices);
                acc.extend((0..top).map(|t| crate::model::Position { branch: b, price: PriceLevel(t) }));
            }
            PreferenceRelation::new(acc)
        })
        .collect();
    (inst, prefs)
}

/// With a single price, cumulative offer is deferred acceptance and the
/// result has no blocking pair.
pub fn da_reduction(seed: u64, count: usize) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("da-reduction");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..count {
        let n = rng.gen_range(1..=10);
        let nb = rng.gen_range(1..=4);
        let caps: Vec<(usize, usize)> = (0..nb).map(|_| (rng.gen_range(0..=4), 0)).collect();
        let pis: Vec<PriorityOrder> = (0..nb).map(|_| random_priority(&mut rng, n)).collect();
        let inst = Instance::anonymous(n, &caps, ladder(1), pis, vec![PolicySpec::Ultimate; nb])?;
        let lists = random_branch_lists(&mut rng, n, nb);
        let prefs: Vec<PreferenceRelation> = lists
            .iter()
            .map(|bs| PreferenceRelation::new(bs.iter().map(|b| crate::model::Position { branch: *b, price: PriceLevel::BASE }).collect()))
            .collect();
        r.instances += 1;
        r.cases += 1;
        let m = mpco_allocation(&inst, &prefs, None)?;
        let d = da_instance(&inst, &lists);
        let m_branches: Vec<Option<BranchId>> = inst.cadet_ids().map(|i| m.branch_of(i)).collect();
        if m_branches != d {
            r.fail(format!("instance {k}: cumulative offer {m_branches:?} vs deferred acceptance {d:?}"));
        }
        let caps: Vec<usize> = inst.branches().iter().map(|b| b.q_total).collect();
        let blocking = da_blocking_pairs(&caps, &lists, inst.priorities(), &d);
        if !blocking.is_empty() {
            r.fail(format!("instance {k}: blocking pairs {blocking:?}"));
        }
    }
    Ok(r)
}

/// At the choice-rule level, the number of increased-price contracts chosen
/// never falls when flexible positions are added or when the policy becomes
/// more responsive.
pub fn choice_monotonicity(seed: u64, count: usize) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("choice-monotonicity");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b = BranchId(0);
    let mut comparable_pairs = 0usize;
    for k in 0..count {
        let n = rng.gen_range(1..=8);
        let h = rng.gen_range(2..=3);
        let q = rng.gen_range(0..=n);
        let pi = random_priority(&mut rng, n);
        let mut offers = Vec::new();
        for i in 0..n {
            for t in 0..h {
                if rng.gen_bool(0.5) {
                    offers.push(Contract::new(i, 0, t));
                }
            }
        }
        let mut sizes = [0usize; 3];
        for _ in 0..n {
            sizes[rng.gen_range(0..3)] += 1;
        }
        let ld = ladder(h);
        let tiers = |scopes: [JumpScope; 3]| PolicySpec::Tiered(TierSpec::split(&pi, &sizes, &scopes).expect("sizes sum to n"));
        let specs = [
            PolicySpec::Baseline,
            tiers([JumpScope::WithinTier; 3]),
            tiers([JumpScope::OverAll, JumpScope::OverAll, JumpScope::WithinTier]),
            PolicySpec::Ultimate,
        ];
        let policies = specs.iter().map(|s| s.build(&pi, &ld)).collect::<Result<Vec<_>>>()?;
        r.instances += 1;

        for (p, omega) in policies.iter().enumerate() {
            let mut last = 0;
            for f in 0..=q {
                let spec = BranchSpec { name: "b".into(), q_total: q, q_flex: f };
                let c = cmp_choice(b, &spec, &pi, omega, &offers)?.charged();
                r.cases += 1;
                if c < last {
                    r.fail(format!("offer set {k}, policy {p}: charged falls from {last} to {c} at q_flex = {f}"));
                }
                last = c;
            }
        }
        for f in 0..=q {
            let spec = BranchSpec { name: "b".into(), q_total: q, q_flex: f };
            let charged = policies
                .iter()
                .map(|w| cmp_choice(b, &spec, &pi, w, &offers).map(|x| x.charged()))
                .collect::<Result<Vec<_>>>()?;
            for (x, nu) in policies.iter().enumerate() {
                for (y, omega) in policies.iter().enumerate() {
                    if x != y && more_responsive(nu, omega) {
                        comparable_pairs += 1;
                        r.cases += 1;
                        if charged[x] < charged[y] {
                            r.fail(format!(
                                "offer set {k}, q_flex {f}: policy {x} is more responsive than {y} but charges {} < {}",
                                charged[x], charged[y]
                            ));
                        }
                    }
                }
            }
        }
    }
    r.notes.push(format!("{comparable_pairs} comparable policy pairs checked"));
    Ok(r)
}

/// Cumulative offer's outcome does not depend on the order in which cadets
/// propose.
pub fn order_independence(seed: u64, count: usize, orders: usize) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("order-independence");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..count {
        let n_prices = rng.gen_range(1..=3);
        let (inst, prefs) = random_economy(&mut rng, 8, 4, n_prices);
        let reference = mpco_allocation(&inst, &prefs, None)?;
        r.instances += 1;
        for _ in 0..orders {
            let order = random_priority(&mut rng, inst.n_cadets());
            r.cases += 1;
            let alt = mpco_allocation(&inst, &prefs, Some(&order))?;
            if alt != reference {
                r.fail(format!("instance {k}: order {:?} gives {:?} instead of {:?}", order.ranking(), alt.assignments(), reference.assignments()));
            }
        }
    }
    Ok(r)
}
