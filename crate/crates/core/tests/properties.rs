use proptest::prelude::*;

use menger_core::generators::{self, RandomSpec};
use menger_core::menger::{menger_paths, menger_paths_with, min_cut, EdgeOrder};
use menger_core::merging::{count_mergings, pairwise_merge_count};
use menger_core::oracle::{brute_force_min, OracleConfig};
use menger_core::rerouting::{minimize_pair, minimize_systems};
use menger_core::{Error, Network};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn text_format_round_trips(seed in 0u64..10_000) {
        let inst = generators::random_instance(&RandomSpec::two_pair(30), seed).unwrap();
        let back = Network::parse(&inst.network.to_text()).unwrap();
        prop_assert_eq!(&back, &inst.network);
        prop_assert_eq!(back.to_text(), inst.network.to_text());
    }

    #[test]
    fn any_edge_order_gives_a_maximum_system(seed in 0u64..10_000, order in 0u64..1000) {
        let inst = generators::random_instance(&RandomSpec::single_source(3, 30), seed).unwrap();
        let g = inst.dag();
        for &p in &inst.network.pairs {
            let s = menger_paths_with(g, p, &EdgeOrder::shuffled(g, order)).unwrap();
            prop_assert_eq!(s.len(), min_cut(g, p.source, p.sink).unwrap());
            s.validate_maximum(g).unwrap();
        }
    }

    #[test]
    fn minimizer_never_beats_the_oracle(c1 in 1usize..=3, c2 in 1usize..=3, k in 0usize..7, seed in 0u64..10_000) {
        let inst = generators::random_merge_pattern(c1, c2, k, seed).unwrap();
        let g = inst.dag();
        let (out, trace) = minimize_systems(g, &inst.planted).unwrap();
        let found = count_mergings(&out);
        prop_assert!(found <= count_mergings(&inst.planted));
        prop_assert!(found <= c1 * c2 * (c1 + c2) / 2);
        for s in &out {
            s.validate_maximum(g).unwrap();
        }
        for step in &trace.steps {
            prop_assert!(step.pairwise_after < step.pairwise_before);
            prop_assert!(step.global_after <= step.global_before);
        }
        match brute_force_min(g, &inst.network.pairs, &OracleConfig { budget: 200_000, jobs: 1 }) {
            Ok(r) => prop_assert!(found >= r.value),
            Err(Error::BudgetExceeded(_)) => {}
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
    }

    #[test]
    fn pair_minimizer_terminates_within_the_initial_count(c1 in 1usize..=3, c2 in 1usize..=3, k in 0usize..9, seed in 0u64..10_000) {
        let inst = generators::random_merge_pattern(c1, c2, k, seed).unwrap();
        let (a, b) = (&inst.planted[0], &inst.planted[1]);
        let start = pairwise_merge_count(a, b);
        let (x, y, trace) = minimize_pair(inst.dag(), a, b).unwrap();
        prop_assert!(trace.steps.len() <= start);
        prop_assert_eq!(trace.steps.last().map_or(start, |s| s.pairwise_after), pairwise_merge_count(&x, &y));
        if c1.min(c2) == 1 {
            prop_assert!(pairwise_merge_count(&x, &y) <= c1.max(c2));
        }
    }

    #[test]
    fn extension_never_lowers_counts(seed in 0u64..10_000) {
        let inst = generators::random_instance(&RandomSpec::single_source(2, 24), seed).unwrap();
        let sys: Vec<_> = inst.network.pairs.iter().map(|&p| menger_paths(inst.dag(), p).unwrap()).collect();
        let ext = generators::extend_imaginary(inst.dag(), &sys).unwrap();
        prop_assert!(count_mergings(&sys) <= count_mergings(&ext.planted));
        prop_assert_eq!(ext.cuts().unwrap(), sys.iter().map(|s| s.len()).collect::<Vec<_>>());
    }
}
