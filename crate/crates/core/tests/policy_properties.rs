use branchmatch::harness::verify::random_economy;
use branchmatch::{
    build_baseline_policy, build_scoring_policy, build_tiered_policy, build_ultimate_policy, is_valid_policy,
    mpco_allocation, more_responsive, CadetId, JumpScope, PriceLadder, PriceResponsivenessPolicy, PriorityOrder,
    ScoringSpec, TierSpec,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn permutation(n: usize) -> impl Strategy<Value = PriorityOrder> {
    Just((0..n).map(CadetId).collect::<Vec<_>>())
        .prop_shuffle()
        .prop_map(move |r| PriorityOrder::new(r, n).unwrap())
}

/// Random tier sizes summing to `n` with a scope per tier.
fn tiers(n: usize) -> impl Strategy<Value = (Vec<usize>, Vec<JumpScope>)> {
    prop::collection::vec(any::<bool>(), n.saturating_sub(1)).prop_flat_map(move |cuts| {
        let mut sizes = vec![1usize];
        for c in cuts {
            if c {
                sizes.push(1);
            } else {
                *sizes.last_mut().unwrap() += 1;
            }
        }
        let k = sizes.len();
        prop::collection::vec(prop::bool::ANY.prop_map(|o| if o { JumpScope::OverAll } else { JumpScope::WithinTier }), k)
            .prop_map(move |scopes| (sizes.clone(), scopes))
    })
}

fn economy() -> impl Strategy<Value = (PriorityOrder, usize, (Vec<usize>, Vec<JumpScope>))> {
    (1usize..=7, 2usize..=3).prop_flat_map(|(n, h)| (permutation(n), Just(h), tiers(n)))
}

fn ladder(h: usize) -> PriceLadder<f64> {
    PriceLadder::uniform(h).unwrap()
}

/// Every policy the builders can produce for this economy.
fn family(pi: &PriorityOrder, h: usize, sizes: &[usize], scopes: &[JumpScope], merit: &[f64]) -> Vec<PriceResponsivenessPolicy> {
    let l = ladder(h);
    let mut out = vec![build_ultimate_policy(pi, &l), build_baseline_policy(pi, &l)];
    if let Ok(t) = TierSpec::split(pi, sizes, scopes) {
        if let Ok(p) = build_tiered_policy(pi, &t, &l) {
            out.push(p);
        }
    }
    let spec = ScoringSpec::linear_boost(merit.to_vec(), &l, 1.5, pi.clone());
    let p = build_scoring_policy(&spec, &l).unwrap();
    if spec.merit_order() == *pi {
        out.push(p);
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn built_policies_are_valid((pi, h, (sizes, scopes)) in economy()) {
        let n = pi.len();
        let l = ladder(h);
        prop_assert!(is_valid_policy(&build_ultimate_policy(&pi, &l), &pi));
        prop_assert!(is_valid_policy(&build_baseline_policy(&pi, &l), &pi));
        let t = TierSpec::split(&pi, &sizes, &scopes).unwrap();
        match build_tiered_policy(&pi, &t, &l) {
            Ok(p) => prop_assert!(is_valid_policy(&p, &pi)),
            // an over-all tier below a within-tier tier cannot be ordered
            Err(_) => prop_assert!(scopes.windows(2).any(|w| w[0] == JumpScope::WithinTier && w[1] == JumpScope::OverAll)),
        }
        let merit: Vec<f64> = (0..n).map(|i| (n - pi.rank(CadetId(i))) as f64).collect();
        let spec = ScoringSpec::linear_boost(merit, &l, 1.5, pi.clone());
        prop_assert_eq!(spec.merit_order(), pi.clone());
        prop_assert!(is_valid_policy(&build_scoring_policy(&spec, &l).unwrap(), &pi));
    }

    #[test]
    fn responsiveness_is_a_partial_order(
        (pi, h, (sizes, scopes)) in economy(),
        noise in prop::collection::vec(0.0f64..0.9, 7),
    ) {
        let n = pi.len();
        let merit: Vec<f64> = (0..n).map(|i| (n - pi.rank(CadetId(i))) as f64 + noise[i]).collect();
        let fam = family(&pi, h, &sizes, &scopes, &merit);
        let l = ladder(h);
        let (ult, base) = (build_ultimate_policy(&pi, &l), build_baseline_policy(&pi, &l));
        for a in &fam {
            prop_assert!(more_responsive(a, a));
            prop_assert!(more_responsive(&ult, a));
            prop_assert!(more_responsive(a, &base));
            for b in &fam {
                if more_responsive(a, b) && more_responsive(b, a) {
                    prop_assert_eq!(a.order(), b.order());
                }
                for c in &fam {
                    if more_responsive(a, b) && more_responsive(b, c) {
                        prop_assert!(more_responsive(a, c));
                    }
                }
            }
        }
    }

    #[test]
    fn proposal_order_does_not_matter(seed in any::<u64>(), n_prices in 1usize..=3, order_seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (inst, prefs) = random_economy(&mut rng, 7, 3, n_prices);
        let mut orng = ChaCha8Rng::seed_from_u64(order_seed);
        let mut ranking: Vec<CadetId> = inst.cadet_ids().collect();
        rand::seq::SliceRandom::shuffle(&mut ranking[..], &mut orng);
        let order = PriorityOrder::new(ranking, inst.n_cadets()).unwrap();
        prop_assert_eq!(
            mpco_allocation(&inst, &prefs, None).unwrap(),
            mpco_allocation(&inst, &prefs, Some(&order)).unwrap()
        );
    }
}
