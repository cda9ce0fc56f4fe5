use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use branchmatch::axioms::{audit_allocation, find_detectable_priority_reversals};
use branchmatch::gametheory::{bayesian_equilibria, enumerate_pure_ne, BayesianGame, DEFAULT_GAME_GUARD};
use branchmatch::harness::verify::{run_suite, SuiteOptions, SUITES};
use branchmatch::harness::{
    allocation_to_json, generate_cohort, load_allocation, load_instance, parse_cap_range, policy_ordering_violations,
    save_instance, sweep_bradso, truthful_quasi_strategy, CohortSpec, PolicyPreset, Scenario,
};
use branchmatch::mechanisms::{da_instance, usma2006, usma2020, QuasiStrategy};
use branchmatch::{
    counterexample_mechanism, mpco, phi_mp, Allocation, BranchId, CounterexampleKind, Instance, Position, PriceLevel,
};
use clap::{Parser, Subcommand, ValueEnum};
use num_rational::Rational64;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "branchmatch", version, about = "Cadet-branch matching with price-responsive priorities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a mechanism on an instance file and print the allocation.
    Run {
        #[arg(long, value_enum)]
        mechanism: Mechanism,
        #[arg(long)]
        instance: PathBuf,
        /// Write the allocation here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Write the cumulative offer trace as JSON (mpco only).
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Check an allocation against the instance's preferences.
    Audit {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        allocation: PathBuf,
    },
    /// Equilibria of the single-branch USMA-2020 game.
    Equilibrium {
        #[arg(long)]
        instance: PathBuf,
        /// Incomplete-information game over two willingness types instead
        /// of the complete-information game on the file's preferences.
        #[arg(long)]
        bayesian: bool,
        /// Prior probability of the type that prefers staying unmatched to
        /// paying the increased price, e.g. `1/2`.
        #[arg(long, default_value = "1/2")]
        p_unwilling: String,
        #[arg(long, default_value_t = DEFAULT_GAME_GUARD)]
        guard: u128,
    },
    /// Charged counts across policies and flexible-cap shares, as CSV.
    Sweep {
        #[arg(long, default_value = "0.05:0.75:0.10")]
        caps: String,
        #[arg(long, value_delimiter = ',', default_value = "ultimate,tiered2020,tiered2021")]
        policies: Vec<PolicyPreset>,
        /// Cohort seed; ignored with --instance.
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        cadets: usize,
        /// Sweep this scenario instead of a generated cohort.
        #[arg(long)]
        instance: Option<PathBuf>,
        #[arg(long)]
        per_branch: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Exhaustive and seeded verification suites.
    Verify {
        /// Suite name or `all`.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 5)]
        max_cadets: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        count: usize,
    },
    /// Generate a synthetic cohort scenario.
    Gen {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        cadets: usize,
        #[arg(long, default_value_t = 0.3)]
        willingness: f64,
        #[arg(long, default_value = "ultimate")]
        policy: PolicyPreset,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Mechanism {
    Mpco,
    PhiMp,
    Usma2006,
    Usma2020,
    Da,
    DropIr,
    Empty,
    DaDirect,
    Psi,
    PriceBump,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// `Ok(false)` means the command ran but found violations or failures.
fn dispatch(command: Command) -> Result<bool> {
    match command {
        Command::Run { mechanism, instance, output, trace } => run(mechanism, &instance, output.as_deref(), trace.as_deref()),
        Command::Audit { instance, allocation } => audit(&instance, &allocation),
        Command::Equilibrium { instance, bayesian, p_unwilling, guard } => {
            if bayesian {
                bayesian_command(&instance, &p_unwilling, guard)
            } else {
                pure_command(&instance, guard)
            }
        }
        Command::Sweep { caps, policies, seed, cadets, instance, per_branch, output } => {
            sweep(&caps, &policies, seed, cadets, instance.as_deref(), per_branch, output.as_deref())
        }
        Command::Verify { suite, max_cadets, seed, count } => verify(&suite, SuiteOptions { max_cadets, seed, count }),
        Command::Gen { seed, cadets, willingness, policy, output } => {
            let mut spec = CohortSpec::standard(seed, cadets);
            spec.willingness = willingness;
            spec.policy = policy;
            let scenario = generate_cohort(&spec)?;
            match output {
                Some(path) => save_instance(&scenario, &path)?,
                None => emit(&branchmatch::harness::scenario_to_json(&scenario)?, None)?,
            }
            Ok(true)
        }
    }
}

fn emit(text: &str, output: Option<&Path>) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut out = std::io::stdout().lock();
            match writeln!(out, "{text}") {
                // the reader went away, e.g. piped into `head`
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                r => Ok(r?),
            }
        }
    }
}

fn strategies_of(scenario: &Scenario<f64>) -> Result<Vec<QuasiStrategy>> {
    if let Some(s) = &scenario.strategies {
        return Ok(s.clone());
    }
    let n_prices = scenario.instance.n_prices();
    Ok(scenario
        .require_preferences()?
        .iter()
        .map(|p| truthful_quasi_strategy(p, n_prices))
        .collect::<branchmatch::Result<Vec<_>>>()?)
}

fn run(mechanism: Mechanism, path: &Path, output: Option<&Path>, trace_path: Option<&Path>) -> Result<bool> {
    let scenario: Scenario<f64> = load_instance(path)?;
    let inst = &scenario.instance;
    if trace_path.is_some() && !matches!(mechanism, Mechanism::Mpco) {
        bail!("--trace is only available for --mechanism mpco");
    }
    let counterexample = |kind| -> Result<Allocation> {
        Ok(counterexample_mechanism(kind, inst, scenario.require_preferences()?)?)
    };
    let alloc = match mechanism {
        Mechanism::Mpco => {
            let (alloc, trace) = mpco(inst, scenario.require_preferences()?, None)?;
            if let Some(p) = trace_path {
                fs::write(p, serde_json::to_string_pretty(&trace)?).with_context(|| format!("writing {}", p.display()))?;
            }
            alloc
        }
        Mechanism::PhiMp => phi_mp(inst, scenario.require_preferences()?)?,
        Mechanism::Usma2006 => usma2006(inst, &strategies_of(&scenario)?, None)?,
        Mechanism::Usma2020 => usma2020(inst, &strategies_of(&scenario)?)?,
        Mechanism::Da => {
            if inst.n_prices() != 1 {
                bail!("deferred acceptance needs a single price, the instance has {}", inst.n_prices());
            }
            let lists: Vec<Vec<BranchId>> = scenario
                .require_preferences()?
                .iter()
                .map(|p| p.acceptable().iter().map(|x| x.branch).collect())
                .collect();
            let matched = da_instance(inst, &lists);
            Allocation::from_assignments(
                matched
                    .iter()
                    .map(|b| b.map(|branch| Position { branch, price: PriceLevel::BASE }))
                    .collect(),
            )
        }
        Mechanism::DropIr => counterexample(CounterexampleKind::DropIr)?,
        Mechanism::Empty => counterexample(CounterexampleKind::Empty)?,
        Mechanism::DaDirect => counterexample(CounterexampleKind::DaDirect)?,
        Mechanism::Psi => counterexample(CounterexampleKind::Psi { branch: BranchId(0) })?,
        Mechanism::PriceBump => counterexample(CounterexampleKind::PriceBump { branch: BranchId(0) })?,
    };
    emit(&allocation_to_json(inst, &alloc)?, output)?;
    Ok(true)
}

fn audit(instance: &Path, allocation: &Path) -> Result<bool> {
    let scenario: Scenario<f64> = load_instance(instance)?;
    let inst = &scenario.instance;
    let alloc = load_allocation(inst, allocation)?;
    let mut violations = Vec::new();
    if let Some(prefs) = &scenario.preferences {
        violations.extend(audit_allocation(inst, &alloc, prefs));
    }
    if let Some(strategies) = &scenario.strategies {
        violations.extend(find_detectable_priority_reversals(strategies, &alloc, inst.priorities()));
    }
    if scenario.preferences.is_none() && scenario.strategies.is_none() {
        bail!("the instance has neither preferences nor strategies to audit against");
    }
    let mut text: String = violations.iter().map(|v| format!("{}: {}\n", v.axiom, v.narrative_with(inst))).collect();
    text.push_str(&format!("{} violation(s)", violations.len()));
    emit(&text, None)?;
    Ok(violations.is_empty())
}

fn outcome_json<S: branchmatch::Scalar>(inst: &Instance<S>, alloc: &Allocation) -> Result<Value> {
    Ok(serde_json::from_str::<Value>(&allocation_to_json(inst, alloc)?)?["assignments"].clone())
}

fn pure_command(path: &Path, guard: u128) -> Result<bool> {
    let scenario: Scenario<f64> = load_instance(path)?;
    let inst = &scenario.instance;
    let prefs = scenario.require_preferences()?;
    let ne = enumerate_pure_ne(inst, prefs, guard)?;
    let names: Vec<&str> = ne.players.iter().map(|&c| inst.cadet_name(c)).collect();
    let equilibria = ne
        .equilibria
        .iter()
        .map(|e| {
            let actions: serde_json::Map<String, Value> =
                names.iter().zip(&e.actions).map(|(n, a)| (n.to_string(), json!(a.to_string()))).collect();
            Ok(json!({
                "actions": actions,
                "outcome": outcome_json(inst, &e.outcome)?,
                "weakly_dominated": e.weakly_dominated,
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    let outcomes = ne.outcomes.iter().map(|o| outcome_json(inst, o)).collect::<Result<Vec<_>>>()?;
    let direct = phi_mp(inst, prefs)?;
    let doc = json!({
        "players": names,
        "profiles_checked": ne.profiles_checked,
        "equilibria": equilibria,
        "outcomes": outcomes,
        "undominated_outcome_count": ne.undominated_outcomes.len(),
        "direct_outcome": outcome_json(inst, &direct)?,
        "unique_outcome_equals_direct": ne.outcomes == [direct],
    });
    emit(&serde_json::to_string_pretty(&doc)?, None)?;
    Ok(true)
}

fn bayesian_command(path: &Path, p_unwilling: &str, guard: u128) -> Result<bool> {
    let scenario: Scenario<Rational64> = load_instance(path)?;
    let inst = &scenario.instance;
    let p: Rational64 = p_unwilling
        .parse()
        .map_err(|_| anyhow::anyhow!("--p-unwilling: `{p_unwilling}` is not a fraction"))?;
    let game = BayesianGame::willingness_split(p)?;
    let report = bayesian_equilibria(&game, inst, guard)?;
    let types: Vec<Value> = game
        .types()
        .iter()
        .zip(game.prior())
        .map(|(t, pr)| {
            json!({
                "name": t.name,
                "prior": pr.to_string(),
                "base": t.base.to_string(),
                "increased": t.increased.to_string(),
                "unmatched": t.unmatched.to_string(),
            })
        })
        .collect();
    let equilibria: Vec<Value> = report
        .equilibria
        .iter()
        .map(|eq| {
            let per_cadet: serde_json::Map<String, Value> = inst
                .cadet_ids()
                .map(|c| {
                    let row: serde_json::Map<String, Value> = game
                        .types()
                        .iter()
                        .enumerate()
                        .map(|(k, t)| {
                            (
                                t.name.clone(),
                                json!({
                                    "action": eq.strategies[c.0][k].to_string(),
                                    "expected_utility": eq.expected_utility[c.0][k].to_string(),
                                }),
                            )
                        })
                        .collect();
                    (inst.cadet_name(c).to_string(), Value::Object(row))
                })
                .collect();
            json!({
                "strategies": per_cadet,
                "truthful": eq.truthful,
                "reversal_probability": eq.reversal_probability.to_string(),
            })
        })
        .collect();
    let doc = json!({
        "types": types,
        "profiles_checked": report.profiles_checked,
        "equilibria": equilibria,
    });
    emit(&serde_json::to_string_pretty(&doc)?, None)?;
    Ok(true)
}

fn sweep(
    caps: &str,
    policies: &[PolicyPreset],
    seed: u64,
    cadets: usize,
    instance: Option<&Path>,
    per_branch: bool,
    output: Option<&Path>,
) -> Result<bool> {
    let fractions = parse_cap_range(caps)?;
    let scenario = match instance {
        Some(p) => load_instance::<f64>(p)?,
        None => generate_cohort(&CohortSpec::standard(seed, cadets))?,
    };
    let prefs = scenario.require_preferences()?;
    let rows = sweep_bradso(&scenario.instance, prefs, policies, &fractions)?;
    let names: Vec<String> = scenario.instance.branches().iter().map(|b| b.name.clone()).collect();

    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(["policy", "cap_fraction", "branch", "charged", "assigned", "unmatched"])?;
    for row in &rows {
        for rec in row.csv_records(&names, per_branch) {
            writer.write_record(&rec)?;
        }
    }
    let text = String::from_utf8(writer.into_inner()?)?;
    emit(text.trim_end(), output)?;

    let expected = [PolicyPreset::Ultimate, PolicyPreset::Tiered2021, PolicyPreset::Tiered2020];
    for v in policy_ordering_violations(&rows, &expected) {
        eprintln!("ordering violation: {v}");
    }
    Ok(true)
}

fn verify(suite: &str, opts: SuiteOptions) -> Result<bool> {
    let names: Vec<&str> = if suite == "all" { SUITES.to_vec() } else { vec![suite] };
    let mut ok = true;
    for name in names {
        let report = run_suite(name, &opts)?;
        emit(report.to_string().trim_end(), None)?;
        ok &= report.passed();
    }
    Ok(ok)
}
