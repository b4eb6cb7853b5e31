mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rumor_source::identify::{
    enumerate_candidates, identify, jordan_center, msi, pmsi, rumor_center_bfs, rumor_centrality_count,
};
use rumor_source::netgen::generate_small_world;
use rumor_source::{EdgeIndex, Graph, Method, PowerConfig};

use common::*;

#[test]
fn bowtie_hub_is_found_by_both_spectral_methods() {
    let g = bowtie();
    let index = EdgeIndex::new(&g);
    let dense: Vec<f64> = (0..5).map(|v| spectral_radius(&dense_r(&index, &[v]))).collect();
    assert_eq!(dense[2], 0.0);
    assert!(dense.iter().enumerate().all(|(v, &l)| v == 2 || (l - 1.0).abs() < 1e-9));
    let exact = msi(&g, 1, PowerConfig::converge()).unwrap();
    for c in &exact.ranked {
        assert!((c.score - dense[c.nodes[0]]).abs() < 1e-9);
    }
    for cfg in [PowerConfig::default(), PowerConfig::converge()] {
        assert_eq!(msi(&g, 1, cfg).unwrap().chosen, vec![2]);
        assert_eq!(pmsi(&g, 1, cfg).unwrap().chosen, vec![2]);
    }
}

#[test]
fn symmetric_cycle_ties_break_to_the_first_node() {
    let g = cycle(6);
    let index = EdgeIndex::new(&g);
    let dense: Vec<f64> = (0..6).map(|v| spectral_radius(&dense_r(&index, &[v]))).collect();
    assert!(dense.iter().all(|&l| l == dense[0]));
    for method in Method::ALL {
        assert_eq!(identify(&g, method, 1, PowerConfig::default()).unwrap().chosen, vec![0], "{method}");
    }
}

#[test]
fn candidate_enumeration_is_lexicographic() {
    let c: Vec<_> = enumerate_candidates(4, 2).unwrap().collect();
    assert_eq!(c.len(), 6);
    assert_eq!((c[0].clone(), c[5].clone()), (vec![0, 1], vec![2, 3]));
    assert_eq!(enumerate_candidates(10, 3).unwrap().count(), 120);
    assert!(enumerate_candidates(3, 4).is_err());
}

#[test]
fn baselines_on_small_trees() {
    let p5 = Graph::from_edge_list((0..4).map(|i| (i, i + 1)));
    let jc = jordan_center(&p5).unwrap();
    assert_eq!((jc.chosen.clone(), jc.ranked[0].score), (vec![2], 2.0));
    let star = Graph::from_edge_list((1..=3).map(|l| (0, l)));
    assert_eq!(jordan_center(&star).unwrap().chosen, vec![0]);
    assert_eq!(rumor_center_bfs(&star).unwrap().chosen, vec![0]);
    assert_eq!(rumor_centrality_count(&star, 0).unwrap(), Some(6));
    assert_eq!(rumor_centrality_count(&star, 1).unwrap(), Some(2));
    assert_eq!(count_orderings(&star, 0), 6);
    let p3 = Graph::from_edge_list([(0, 1), (1, 2)]);
    assert_eq!(rumor_centrality_count(&p3, 1).unwrap(), Some(2));
    assert_eq!(rumor_centrality_count(&p3, 0).unwrap(), Some(1));
    assert_eq!(rumor_center_bfs(&p3).unwrap().chosen, vec![1]);
}

#[test]
fn baselines_refuse_multiple_sources() {
    assert!(identify(&cycle(5), Method::Jc, 2, PowerConfig::default()).is_err());
    assert!(identify(&cycle(5), Method::RcBfs, 2, PowerConfig::default()).is_err());
}

#[test]
fn pmsi_mostly_agrees_with_msi() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let agree = (0..100)
        .filter(|_| {
            let g = generate_small_world(20, 4, 0.3, &mut rng).unwrap();
            msi(&g, 1, PowerConfig::default()).unwrap().chosen == pmsi(&g, 1, PowerConfig::default()).unwrap().chosen
        })
        .count();
    assert!(agree >= 60, "agreement {agree}/100");
}

#[test]
fn trees_fall_back_to_a_central_node() {
    // Every candidate collapses on a tree; the chosen node is still central.
    let p7 = Graph::from_edge_list((0..6).map(|i| (i, i + 1)));
    assert_eq!(msi(&p7, 1, PowerConfig::default()).unwrap().chosen, vec![3]);
    assert_eq!(pmsi(&p7, 1, PowerConfig::default()).unwrap().chosen, vec![3]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn results_are_ranked_and_reproducible(seed in any::<u64>(), s in 1usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_connected(9, 4, &mut rng);
        for method in [Method::Msi, Method::Pmsi] {
            let a = identify(&g, method, s, PowerConfig::default()).unwrap();
            prop_assert_eq!(&a, &identify(&g, method, s, PowerConfig::default()).unwrap());
            prop_assert_eq!(&a.chosen, &a.ranked[0].nodes);
            let mut sets: Vec<_> = a.ranked.iter().map(|c| c.nodes.clone()).collect();
            prop_assert!(sets.iter().all(|c| c.len() == s && c.windows(2).all(|w| w[0] < w[1])));
            sets.sort();
            sets.dedup();
            prop_assert_eq!(sets.len(), a.ranked.len());
        }
        let msi_result = identify(&g, Method::Msi, s, PowerConfig::default()).unwrap();
        prop_assert!(msi_result.ranked.windows(2).all(|w| w[0].score <= w[1].score + 1e-9));
    }
}
