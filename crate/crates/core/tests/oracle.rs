mod common;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use treeverse::graph::generate_legacy;
use treeverse::ks::{build_tk, prefix_universal_graph};
use treeverse::oracle::*;
use treeverse::{generate, Forest, Graph};

use common::{random_tree, SHAPES};

#[test]
fn three_generators_and_the_counting_formula_agree() {
    // OEIS A000055
    let known = [1u64, 1, 1, 1, 2, 3, 6, 11, 23, 47, 106, 235, 551];
    for n in 1..=12 {
        let a = enumerate_trees(n).unwrap();
        let b = enumerate_trees_by_levels(n).unwrap();
        assert_eq!(a.codes, b.codes, "n={n}");
        assert_eq!(a.len() as u64, known[n]);
        assert_eq!(count_free_trees(n), known[n]);
        if n <= 9 {
            assert_eq!(enumerate_trees_by_pruefer(n).unwrap().codes, a.codes);
        }
    }
    assert_eq!(count_free_trees(20), 823_065);
}

#[test]
fn canonical_code_ignores_labels() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for it in 0..200 {
        let n = rng.gen_range(1..30);
        let t = random_tree(n, it % SHAPES, &mut rng);
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        let e: Vec<_> = t.edges().iter().map(|&(a, b)| (perm[a], perm[b])).collect();
        let u = Forest::from_edges(n, &e).unwrap();
        assert_eq!(canonical_code(&t), canonical_code(&u));
        let c = centroids(&t);
        assert!(c.len() == 1 || (c.len() == 2 && t.has_edge(c[0], c[1])));
    }
}

#[test]
fn backtracking_finds_exactly_what_exists() {
    let path =
        |n: usize| Forest::from_edges(n, &(1..n).map(|i| (i - 1, i)).collect::<Vec<_>>()).unwrap();
    let star =
        |n: usize| Forest::from_edges(n, &(1..n).map(|i| (0, i)).collect::<Vec<_>>()).unwrap();
    let cycle = Graph::from_edges(8, (0..8).map(|i| (i, (i + 1) % 8)));
    assert!(contains_tree_bruteforce(&cycle, &path(8))
        .unwrap()
        .is_some());
    assert!(contains_tree_bruteforce(&cycle, &star(4))
        .unwrap()
        .is_none());
    let k5 = Graph::from_edges(5, (0..5).flat_map(|a| (a + 1..5).map(move |b| (a, b))));
    for t in enumerate_trees(5).unwrap().forests() {
        let phi = contains_tree_bruteforce(&k5, &t).unwrap().unwrap();
        assert!(t.edges().iter().all(|&(a, b)| k5.has_edge(phi[a], phi[b])));
    }
    assert!(contains_tree_bruteforce(&k5, &path(6)).unwrap().is_none());
}

#[test]
fn prefix_graphs_are_universal_up_to_10() {
    for n in 1..=10 {
        let host = prefix_universal_graph(n).unwrap();
        let rep = verify_universal(&host.graph, n, 8).unwrap();
        assert!(rep.ok(), "{rep:?}");
        assert_eq!(rep.classes as u64, count_free_trees(n));
    }
}

#[test]
fn windows_of_t3_hold_every_small_tree() {
    let g = generate(&build_tk(3).unwrap().tree, 2);
    let rep = verify_interval_universal(&g, 6, 6).unwrap();
    assert!(rep.ok(), "{:?}", rep.failures.first());
    assert_eq!(rep.windows, (1..=6).map(|m| 34 - m + 1).sum::<usize>());
}

#[test]
fn legacy_windows_of_six_still_hold_every_tree() {
    // x6..x11 (ids 5..10) is not complete, yet holds every 6-vertex tree
    let g = generate_legacy(3);
    let w: Vec<usize> = (5..11).collect();
    let local = g.graph.induced(&w);
    assert_eq!(local.edge_count(), 12);
    assert!(verify_universal_bruteforce(&local, 6).unwrap().ok());
    assert!(verify_interval_universal(&g, 6, 0).unwrap().ok());
}

#[test]
fn exact_minimum_chain() {
    let expected = [0, 0, 1, 2, 4, 6];
    for n in 1..=5usize {
        let s = exact_min_universal_edges(n, false).unwrap();
        let si = exact_min_universal_edges(n, true).unwrap();
        let e = prefix_universal_graph(n).unwrap().graph.edge_count();
        assert_eq!(s, expected[n]);
        assert!(s <= si && si <= e);
        assert!(s + 1 >= n);
        assert!(psi_lower_bound(n as u64).at_most(s as i64));
    }
    assert!(exact_min_universal_edges(EXACT_CAP + 1, false).is_err());
}

#[test]
fn psi_agrees_with_floating_point() {
    for n in [1u64, 2, 3, 7, 16, 100, 1000, 65_536, 1_000_000] {
        let l = (n as f64).log2();
        let want = n as f64 * l - 4.0 * n as f64 * l.sqrt();
        let got = psi_lower_bound(n).to_f64();
        assert!(
            (got - want).abs() <= 1e-6 * want.abs().max(1.0),
            "n={n} {got} vs {want}"
        );
    }
}
