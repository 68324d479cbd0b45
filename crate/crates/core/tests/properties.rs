mod common;

use num_rational::Ratio;
use ontominer_core::kb::{check_dl_safety, make_dl_safe, DlRule};
use ontominer_core::miner::{format_ratio, parse_ratio, Evaluator};
use ontominer_core::{chase, clausify, mine, parse_kb, Atom, ChaseConfig, Error, MiningConfig, Mode, Predicate, Term};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{random_disjunctive_kb, random_kb, Shape, BANK};

fn kb_source(seed: u64) -> String {
    random_kb(&mut ChaCha8Rng::seed_from_u64(seed), Shape::default())
}

fn atom() -> impl Strategy<Value = Atom> {
    let var = prop::sample::select(vec!["x", "y", "z", "w"]);
    prop_oneof![
        var.clone().prop_map(|v| Atom::new(Predicate::concept("A"), vec![Term::var(v)])),
        (var.clone(), var.clone()).prop_map(|(a, b)| Atom::new(Predicate::role("r"), vec![Term::var(a), Term::var(b)])),
        (var.clone(), var).prop_map(|(a, b)| Atom::new(Predicate::non_dl("p", 2), vec![Term::var(a), Term::var(b)])),
    ]
}

fn mined(seed: u64, mode: Mode, minsup: usize) -> Option<ontominer_core::MiningResult> {
    let kb = parse_kb(&kb_source(seed)).unwrap();
    match mine(&kb, &MiningConfig::new("C0", Ratio::new(1, minsup), 3, mode)) {
        Ok(r) => Some(r),
        Err(Error::InconsistentKb | Error::EmptyReferenceConcept(_)) => None,
        Err(e) => panic!("{e}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn printed_kb_parses_back(seed in any::<u64>()) {
        let kb = parse_kb(&kb_source(seed)).unwrap();
        let again = parse_kb(&kb.to_string()).unwrap();
        prop_assert_eq!(kb, again);
    }

    #[test]
    fn dl_safe_rules(head in prop::collection::vec(atom(), 1..3), body in prop::collection::vec(atom(), 0..4)) {
        let rule = DlRule { head, body };
        let safe = make_dl_safe(&rule);
        prop_assert!(check_dl_safety(&safe));
        prop_assert_eq!(&safe.head, &rule.head);
        prop_assert_eq!(&safe.body[..rule.body.len()], &rule.body[..]);
        prop_assert_eq!(make_dl_safe(&safe), safe.clone());
        if check_dl_safety(&rule) {
            prop_assert_eq!(safe, rule);
        }
    }

    #[test]
    fn minimal_models_are_incomparable(seed in any::<u64>(), disjunctive in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let src = if disjunctive { random_disjunctive_kb(&mut rng, 5) } else { random_kb(&mut rng, Shape::default()) };
        let kb = parse_kb(&src).unwrap();
        let ms = chase(&clausify(&kb).unwrap(), &kb.abox, &ChaseConfig::default()).unwrap();
        prop_assert_eq!(ms.inconsistent, ms.models.is_empty());
        for (i, a) in ms.models.iter().enumerate() {
            for fact in &kb.abox {
                prop_assert!(a.contains(fact), "model misses asserted {}", fact);
            }
            for b in &ms.models[i + 1..] {
                prop_assert!(!a.is_subset(b) && !b.is_subset(a));
            }
        }
    }

    #[test]
    fn counters_narrow_along_the_pipeline(seed in any::<u64>(), mode in prop::sample::select(vec![Mode::Sem, Mode::NoSem, Mode::SemTax])) {
        if let Some(r) = mined(seed, mode, 3) {
            for d in &r.stats.per_depth {
                prop_assert!(d.gen >= d.sat && d.sat >= d.sfree && d.sfree >= d.cand && d.cand >= d.freq, "{:?}", d);
            }
            prop_assert_eq!(r.stats.per_depth.iter().map(|d| d.freq).sum::<usize>(), r.trie.len());
        }
    }

    #[test]
    fn supports_are_anti_monotone_and_exact(seed in any::<u64>(), minsup in 2usize..5) {
        let Some(r) = mined(seed, Mode::Sem, minsup) else { return Ok(()) };
        for (p, c) in r.trie.edges() {
            prop_assert!(r.trie.node(c).support <= r.trie.node(p).support);
        }
        let kb = parse_kb(&kb_source(seed)).unwrap();
        let ms = chase(&clausify(&kb).unwrap(), &kb.abox, &ChaseConfig::default()).unwrap();
        let eval = Evaluator::new(&ms, "C0").unwrap();
        for n in r.trie.preorder() {
            let s = eval.support(&r.trie.pattern(n).query()).unwrap();
            prop_assert_eq!(s, r.trie.node(n).support);
            prop_assert!(s >= Ratio::new(1, minsup));
        }
    }

    #[test]
    fn semantic_mode_never_keeps_more(seed in any::<u64>()) {
        if let (Some(sem), Some(nosem)) = (mined(seed, Mode::Sem, 3), mined(seed, Mode::NoSem, 3)) {
            for (a, b) in sem.stats.per_depth.iter().zip(&nosem.stats.per_depth) {
                prop_assert!(a.cand <= b.cand && a.freq <= b.freq);
            }
        }
    }

    #[test]
    fn canonical_form_is_idempotent(seed in any::<u64>()) {
        if let Some(r) = mined(seed, Mode::NoSem, 2) {
            for n in r.trie.preorder() {
                let c = r.trie.pattern(n).canonical();
                prop_assert_eq!(c.canonical(), c);
            }
        }
    }

    #[test]
    fn ratios_print_and_parse(n in 0usize..1000, d in 1usize..1000) {
        let r = Ratio::new(n, d);
        let printed = format_ratio(&r);
        prop_assert_eq!(printed.split('.').nth(1).map(str::len), Some(6));
        prop_assert_eq!(parse_ratio(&format!("{n}/{d}")).unwrap(), r);
        let back = parse_ratio(&printed).unwrap();
        let diff = if back > r { back - r } else { r - back };
        prop_assert!(diff <= Ratio::new(1, 1_000_000));
    }
}

#[test]
fn bank_fixture_round_trips() {
    let kb = parse_kb(BANK).unwrap();
    assert_eq!(parse_kb(&kb.to_string()).unwrap(), kb);
}
