use std::collections::BTreeSet;

use incstable::oracle::{enumerate_stable_matchings, OracleConfig};
use incstable::random::{random_profile, rng, RandomConfig};
use incstable::sr::{self, SrError};

#[test]
fn poset_counts_match_enumeration() {
    let mut r = rng(11);
    let mut with_duals = 0;
    for i in 0..400 {
        let n = 4 + i % 7;
        let p = random_profile(&mut r, &RandomConfig::roommates(n));
        let stable = enumerate_stable_matchings(&p, OracleConfig::default()).unwrap();
        match sr::build_rotation_poset(&p) {
            Err(SrError::NoStableMatching) => {
                assert!(stable.is_empty(), "poset says none, oracle found {}", stable.len());
                assert!(sr::build_dual_poset(&p).is_err());
                continue;
            }
            Err(e) => panic!("{e}"),
            Ok(poset) => {
                let subsets = poset.complete_closed_subsets();
                assert_eq!(subsets.len(), stable.len());
                let built: BTreeSet<_> =
                    subsets.iter().map(|c| poset.matching_from_closed_subset(c).unwrap()).collect();
                assert_eq!(built, stable.iter().cloned().collect());
                // every stable pair survives Phase 1
                for m in &stable {
                    for (a, b) in m.pairs() {
                        assert!(poset.base_table.contains(a, b));
                    }
                    assert_eq!(m.matched_agents(), poset.base_table.nonempty_agents());
                }
                assert!(poset.dual_pairs().len() * 2 <= n * (n - 1) / 2);
                let fast = sr::build_dual_poset(&p).unwrap();
                let full_duals: BTreeSet<_> = (0..poset.len())
                    .filter(|&i| !poset.is_singleton(i))
                    .map(|i| poset.rotations()[i].clone())
                    .collect();
                let fast_duals: BTreeSet<_> = fast.rotations().iter().cloned().collect();
                assert_eq!(full_duals, fast_duals);
                for (a, ra) in fast.rotations().iter().enumerate() {
                    for (b, rb) in fast.rotations().iter().enumerate() {
                        let (fa, fb) = (poset.index_of(ra).unwrap(), poset.index_of(rb).unwrap());
                        assert_eq!(fast.precedes(a, b), poset.precedes(fa, fb));
                    }
                }
                if !fast.is_empty() {
                    with_duals += 1;
                }
            }
        }
    }
    assert!(with_duals > 10, "too few instances with dual rotations: {with_duals}");
}

#[test]
fn phase1_is_independent_of_processing_order() {
    let mut r = rng(5);
    for _ in 0..200 {
        let p = random_profile(&mut r, &RandomConfig::roommates(9));
        let lists = sr::strict_lists(&p).unwrap();
        let forward = sr::phase1_lists(lists.clone());
        // relabel agents in reverse so the queue runs backwards
        let n = lists.len();
        let rev: Vec<Vec<usize>> = (0..n).rev().map(|a| lists[a].iter().map(|&b| n - 1 - b).collect()).collect();
        let backward = sr::phase1_lists(rev);
        for a in 0..n {
            let back: Vec<usize> = backward.list(n - 1 - a).iter().map(|&b| n - 1 - b).collect();
            assert_eq!(forward.list(a), back.as_slice());
        }
    }
}
