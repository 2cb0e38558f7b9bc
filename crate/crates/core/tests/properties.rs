//! Randomized checks of the structural invariants across modules.

mod common;

use std::collections::BTreeSet;

use common::*;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use repgen_core::adversaries::gc_witness_adversary;
use repgen_core::dimension::{
    check_witness, group_closure_dimension, Condition, GcSearch, GcStatus,
};
use repgen_core::generators::{
    uniform_emit, Empirical, Generator, GeneratorKind, History, NonUniform,
};
use repgen_core::groups::{BlockPartition, BlockSizes, GroupCollection};
use repgen_core::harness::ClassSpec;
use repgen_core::hypothesis::{closure, consistent_set, Closure, Hypothesis, HypothesisClass};
use repgen_core::PeriodicSet;

const SUPPORTS: &[&str] = &[
    "all",
    "evens",
    "odds",
    "ap:0,4,{0},{}",
    "ap:0,3,{0,1},{}",
    "ap:3,1,{0},{}",
    "ap:2,2,{1},{0}",
    "ap:5,4,{1,3},{0,2}",
];

const GROUPS: &[&str] = &[
    "evens",
    "odds",
    "finite:{0,1,2}",
    "ap:3,1,{0},{}",
    "ap:0,3,{0},{}",
    "finite:{5}",
    "ap:0,4,{1,2},{}",
];

fn set(text: &str) -> PeriodicSet {
    text.parse().unwrap()
}

fn arb_class() -> impl Strategy<Value = Vec<Hypothesis>> {
    proptest::sample::subsequence((0..SUPPORTS.len()).collect::<Vec<_>>(), 1..=4).prop_map(|ix| {
        ix.into_iter()
            .map(|i| Hypothesis::new(format!("h{i}"), set(SUPPORTS[i])).unwrap())
            .collect()
    })
}

/// A collection that covers the naturals: random sets plus `all` when needed.
fn arb_groups() -> impl Strategy<Value = Vec<PeriodicSet>> {
    proptest::sample::subsequence((0..GROUPS.len()).collect::<Vec<_>>(), 1..=4).prop_map(|ix| {
        let mut sets: Vec<PeriodicSet> = ix.into_iter().map(|i| set(GROUPS[i])).collect();
        let union = sets.iter().fold(PeriodicSet::empty(), |a, s| a.union(s));
        if union != PeriodicSet::all() {
            sets.push(union.complement());
        }
        sets
    })
}

fn closure_set(c: &Closure) -> Option<&PeriodicSet> {
    c.as_set()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn closure_lies_inside_consistent_supports(h in arb_class(), prefix in proptest::collection::vec(0u64..24, 0..6)) {
        let c = closure(&h, &prefix);
        let ids = consistent_set(&h, &prefix);
        prop_assert_eq!(c.is_bot(), ids.is_empty());
        if let Some(c) = closure_set(&c) {
            for &i in &ids {
                prop_assert!(c.is_subset(h[i].support()));
            }
            for &x in &prefix {
                prop_assert!(c.contains(x));
            }
        }
    }

    #[test]
    fn closure_grows_with_the_prefix(h in arb_class(), prefix in proptest::collection::vec(0u64..24, 1..7)) {
        for n in 1..prefix.len() {
            let (short, long) = (closure(&h, &prefix[..n]), closure(&h, &prefix[..=n]));
            let before: BTreeSet<usize> = consistent_set(&h, &prefix[..n]).into_iter().collect();
            let after: BTreeSet<usize> = consistent_set(&h, &prefix[..=n]).into_iter().collect();
            prop_assert!(after.is_subset(&before));
            if let (Some(a), Some(b)) = (closure_set(&short), closure_set(&long)) {
                // fewer consistent hypotheses, so a larger intersection
                prop_assert!(a.is_subset(b));
            }
        }
    }

    #[test]
    fn cells_partition_the_naturals(groups in arb_groups()) {
        let c = GroupCollection::finite(groups).unwrap();
        let cells = c.as_finite().unwrap().cells();
        let mut union = PeriodicSet::empty();
        for (i, (_, a)) in cells.iter().enumerate() {
            prop_assert!(!a.is_empty());
            for (_, b) in &cells[i + 1..] {
                prop_assert!(a.is_disjoint(b));
            }
            union = union.union(a);
        }
        prop_assert_eq!(union, PeriodicSet::all());
    }

    #[test]
    fn finite_support_size_matches_subset_oracle(groups in arb_groups(), h in 0..SUPPORTS.len()) {
        let hyp = Hypothesis::new("h", set(SUPPORTS[h])).unwrap();
        let c = GroupCollection::finite(groups.clone()).unwrap();
        prop_assert_eq!(
            c.as_finite().unwrap().finite_support_size(&hyp),
            oracle_finite_support_size(hyp.support(), &groups)
        );
    }

    #[test]
    fn block_index_is_monotone(head in proptest::collection::vec(1u64..5, 0..3), base in 2u64..4, e in 0u32..2) {
        let blocks = BlockPartition::new(BlockSizes { head, base, first_exponent: e }).unwrap();
        let mut start = 0;
        for i in 0..6 {
            prop_assert_eq!(blocks.block_start(i), start);
            start += blocks.block_size(i);
        }
        let mut last = 0;
        for x in 0..start {
            let g = blocks.group_index(x);
            prop_assert!(g >= last);
            prop_assert!(blocks.block(g).contains(x));
            last = g;
        }
    }
}

/// Finite classes and partitions drawn from the bundled uniform scenarios.
fn bundled_instances() -> Vec<(
    String,
    Vec<Hypothesis>,
    GroupCollection,
    repgen_core::Rational,
)> {
    bundled_of(GeneratorKind::Uniform)
        .into_iter()
        .filter_map(|(name, s)| match &s.class {
            ClassSpec::Listed(h) => {
                Some((name, h.clone(), s.groups.clone(), s.generator.alpha.clone()))
            }
            _ => None,
        })
        .collect()
}

#[test]
fn returned_witnesses_recheck() {
    for (name, h, g, alpha) in bundled_instances() {
        let gc = group_closure_dimension(&h, &g, &alpha, &GcSearch::default()).unwrap();
        if let Some(w) = &gc.witness {
            assert_eq!(w.tuple.len(), gc.value(), "{name}");
            let again = check_witness(&h, &g, &alpha, &w.tuple).unwrap();
            assert_eq!(again.as_ref(), Some(&w.condition), "{name}");
        }
    }
}

#[test]
fn exhausted_group_witnesses_transfer_to_smaller_alpha() {
    let alphas = [q(2, 3), q(1, 2), q(1, 4), q(1, 6)];
    for (name, h, g, _) in bundled_instances() {
        for (i, hi) in alphas.iter().enumerate() {
            let gc = group_closure_dimension(&h, &g, hi, &GcSearch::default()).unwrap();
            let Some(w) = gc.witness else { continue };
            if !matches!(w.condition, Condition::ExhaustedGroup { .. }) {
                continue;
            }
            for lo in &alphas[i + 1..] {
                let c = check_witness(&h, &g, lo, &w.tuple).unwrap();
                assert!(
                    c.is_some(),
                    "{name}: {:?} stops witnessing at a smaller α",
                    w.tuple
                );
            }
        }
    }
}

#[test]
fn exact_dimension_has_no_larger_witness() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let pool: Vec<u64> = (0..48).collect();
    for (name, h, g, alpha) in bundled_instances() {
        let gc = group_closure_dimension(&h, &g, &alpha, &GcSearch::default()).unwrap();
        let GcStatus::Exact(d) = gc.status else {
            panic!("{name}: not exact");
        };
        for _ in 0..1000 {
            let tuple: Vec<u64> = pool.choose_multiple(&mut rng, d + 1).copied().collect();
            assert!(
                check_witness(&h, &g, &alpha, &tuple).unwrap().is_none(),
                "{name}: {tuple:?} witnesses beyond GC = {d}"
            );
        }
    }
}

#[test]
fn nonuniform_delegates_to_the_selected_prefix() {
    for (_, s) in bundled_of(GeneratorKind::Nonuniform) {
        let class: HypothesisClass = s.class.class();
        let alpha = s.generator.alpha.clone();
        let mut g = NonUniform::new(
            class.clone(),
            s.groups.clone(),
            alpha.clone(),
            s.generator.gc_search,
        )
        .unwrap();
        let (xs, _) = repgen_core::harness::materialize_stream(&s).unwrap();
        let mut history = History::new();
        for &x in &xs {
            history.push(x);
            let out = g.emit(&history).unwrap();
            let i = g.last_selected().unwrap();
            let n = g.thresholds().get(i).unwrap().unwrap();
            let direct =
                uniform_emit(&class.prefix(i + 1), &s.groups, &alpha, n, &history).unwrap();
            assert_eq!(out.dist, direct, "step {}", history.len());
        }
    }
}

#[test]
fn generators_are_deterministic() {
    for (name, s) in bundled() {
        let (xs, _) = repgen_core::harness::materialize_stream(&s).unwrap();
        let run = || {
            let mut config = s.generator.clone();
            if config.kind == GeneratorKind::Uniform {
                config.d_star = Some(
                    repgen_core::generators::resolve_d_star(&config, &s.class.class(), &s.groups)
                        .unwrap(),
                );
            }
            let mut g =
                repgen_core::generators::build_generator(&config, &s.class.class(), &s.groups)
                    .unwrap();
            let mut h = History::new();
            xs.iter()
                .map(|&x| {
                    h.push(x);
                    format!("{:?}", g.emit(&h).unwrap())
                })
                .collect::<Vec<_>>()
        };
        assert_eq!(run(), run(), "{name}");
    }
}

#[test]
fn witness_continuation_stays_in_the_chosen_support() {
    for (name, h, g, alpha) in bundled_instances() {
        let gc = group_closure_dimension(&h, &g, &alpha, &GcSearch::default()).unwrap();
        let Some(w) = gc.witness else { continue };
        let out = gc_witness_adversary(&mut Empirical, &h, &g, &alpha, &w.tuple).unwrap();
        let support = h[out.target].support();
        assert!(w.tuple.iter().all(|&x| support.contains(x)), "{name}");
        assert!(!out.continuation.is_empty(), "{name}");
        assert!(
            out.continuation.iter().all(|&x| support.contains(x)),
            "{name}"
        );
    }
}
