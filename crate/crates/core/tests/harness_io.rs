use branchmatch::harness::verify::random_economy;
use branchmatch::harness::{
    generate_cohort, load_allocation, load_instance, parse_scenario, save_allocation, save_instance, scenario_to_json,
    sweep_bradso, truthful_quasi_strategy, CohortSpec, PolicyPreset, Scenario,
};
use branchmatch::{mpco_allocation, BranchId, Error, Instance, PolicySpec, PreferenceRelation, PriceLadder, PriorityOrder};
use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn scratch(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("branchmatch-tests-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn save_then_load_is_identity_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for k in 0..100 {
        let n_prices = rng.gen_range(1..=3);
        let (inst, prefs) = random_economy(&mut rng, 8, 4, n_prices);
        let mut scenario = Scenario::new(inst).with_preferences(prefs.clone());
        // quasi-direct strategies are defined for two-price ladders only
        if n_prices == 2 {
            let strategies = prefs.iter().map(|p| truthful_quasi_strategy(p, n_prices)).collect::<Result<Vec<_>, _>>();
            scenario = scenario.with_strategies(strategies.unwrap());
        }
        let path = scratch(&format!("instance-{k}.json"));
        save_instance(&scenario, &path).unwrap();
        let back: Scenario<f64> = load_instance(&path).unwrap();
        assert_eq!(back, scenario, "instance {k}");

        let alloc = mpco_allocation(&scenario.instance, scenario.preferences.as_ref().unwrap(), None).unwrap();
        let apath = scratch(&format!("allocation-{k}.json"));
        save_allocation(&scenario.instance, &alloc, &apath).unwrap();
        assert_eq!(load_allocation(&scenario.instance, &apath).unwrap(), alloc);
    }
}

#[test]
fn exact_prices_survive_a_round_trip() {
    let text = r#"{
        "schema_version": 1,
        "cadets": ["a", "b"],
        "prices": ["0", "1/3", "2/3"],
        "branches": [{"id": "x", "q_total": 1, "q_flex": 1, "priority": ["b", "a"],
                      "policy": {"kind": "tiered", "variant": "2021"}}]
    }"#;
    let s: Scenario<Rational64> = parse_scenario(text).unwrap();
    assert_eq!(s.instance.ladder().values()[1], Rational64::new(1, 3));
    let again: Scenario<f64> = parse_scenario(&scenario_to_json(&s).unwrap()).unwrap();
    assert!((again.instance.ladder().values()[2] - 2.0 / 3.0).abs() < 1e-12);
}

#[test]
fn schema_errors_name_the_offending_field() {
    let text = r#"{
        "schema_version": 1,
        "cadets": ["a"],
        "prices": [0, 1],
        "branches": [{"id": "x", "q_total": 1, "q_flex": 0, "priority": ["a"], "policy": {"kind": "ultimate"}}],
        "preferences": {"a": [{"branch": "x", "price": 1}, "unmatched"]}
    }"#;
    match parse_scenario::<f64>(text) {
        Err(Error::Schema { field, .. }) => assert!(field.starts_with("preferences.a"), "{field}"),
        other => panic!("expected a schema error, got {other:?}"),
    }
}

#[test]
fn generated_cohorts_are_valid_profiles() {
    for seed in 0..20 {
        let mut spec = CohortSpec::standard(seed, 30 + seed as usize);
        spec.n_prices = 1 + (seed as usize % 3);
        spec.priority_noise = 0.5 * (seed % 2) as f64;
        spec.policy = PolicyPreset::ALL[seed as usize % 4];
        let s = generate_cohort(&spec).unwrap();
        let (nb, nt) = (s.instance.n_branches(), s.instance.n_prices());
        assert_eq!(s.instance.branches().iter().map(|b| b.q_total).sum::<usize>(), spec.n_cadets);
        for p in s.preferences.as_ref().unwrap() {
            p.validate(nb, nt).unwrap();
            let branches: Vec<BranchId> = p.acceptable().iter().map(|x| x.branch).collect();
            let mut distinct = branches.clone();
            distinct.dedup();
            assert!(distinct.len() >= spec.min_list && distinct.len() <= spec.max_list);
        }
        s.instance.check_profile(s.preferences.as_ref().unwrap()).unwrap();
    }
}

#[test]
fn sweep_totals_match_reaudited_allocations() {
    let s = generate_cohort(&CohortSpec::standard(42, 120)).unwrap();
    let fractions = [0.0, 0.1, 0.25, 0.5, 0.75, 1.0];
    let rows = sweep_bradso(&s.instance, s.preferences.as_ref().unwrap(), &PolicyPreset::ALL, &fractions).unwrap();
    assert_eq!(rows.len(), 24);
    let names: Vec<String> = s.instance.branches().iter().map(|b| b.name.clone()).collect();
    for row in &rows {
        let a = &row.allocation;
        let charged: usize = s.instance.branch_ids().map(|b| a.charged_at(b)).sum();
        assert_eq!(row.charged_total, charged);
        assert_eq!(row.assigned_total, a.matched());
        assert_eq!(row.unmatched, s.instance.n_cadets() - a.matched());
        for (b, &q) in row.q_flex.iter().enumerate() {
            assert!(a.charged_at(BranchId(b)) <= q);
        }
        let recs = row.csv_records(&names, true);
        let per_branch: usize = recs[1..].iter().map(|r| r[3].parse::<usize>().unwrap()).sum();
        assert_eq!(per_branch.to_string(), recs[0][3]);
        if row.policy == "baseline" {
            assert_eq!(row.charged_total, 0);
        }
    }
}

#[test]
fn single_branch_charged_count_grows_with_the_flexible_cap() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let n = rng.gen_range(1..=9);
        let q = rng.gen_range(1..=n);
        let mut ranking: Vec<_> = (0..n).map(branchmatch::CadetId).collect();
        rand::seq::SliceRandom::shuffle(&mut ranking[..], &mut rng);
        let inst = Instance::anonymous(
            n,
            &[(q, 0)],
            PriceLadder::<f64>::uniform(2).unwrap(),
            vec![PriorityOrder::new(ranking, n).unwrap()],
            vec![PolicySpec::Ultimate],
        )
        .unwrap();
        let prefs: Vec<PreferenceRelation> =
            (0..n).map(|_| PreferenceRelation::prefix(0, rng.gen_range(0..=2))).collect();
        let fractions: Vec<f64> = (0..=10).map(|k| k as f64 / 10.0).collect();
        for preset in PolicyPreset::ALL {
            let rows = sweep_bradso(&inst, &prefs, &[preset], &fractions).unwrap();
            for w in rows.windows(2) {
                assert!(w[0].charged[0] <= w[1].charged[0], "{preset}: {:?} then {:?}", w[0].charged, w[1].charged);
            }
        }
    }
}
