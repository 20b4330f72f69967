mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use treeverse::embed::{embed, embed_traced, embed_with_trace, validate_embedding, Step};
use treeverse::error::Error;
use treeverse::ks::{build_tk, is_ks_tree, prefix_universal_graph};
use treeverse::oracle::enumerate_trees;
use treeverse::taux::check_taux;
use treeverse::{generate, Forest, OrderedTree};

use common::{random_forest, random_tree, SHAPES};

/// Minimum guest level over the image equals the level of `x1`.
fn x1_is_highest(t: &OrderedTree, map: &[usize], x1: usize) -> bool {
    map.iter().map(|&h| t.level(h)).min() == Some(t.level(map[x1]))
}

#[test]
fn every_small_tree_every_role_pair() {
    (1..=10usize).into_par_iter().for_each(|n| {
        let host = prefix_universal_graph(n).unwrap();
        let t = &host.graph.tree;
        for f in enumerate_trees(n).unwrap().forests() {
            for x1 in 0..n {
                for x2 in 0..n {
                    let e = embed(t, &f, x1, x2).unwrap();
                    let rep = validate_embedding(&host.graph, &f, &e.map);
                    assert!(
                        rep.ok() && rep.admissible_complement,
                        "n={n} x1={x1} x2={x2} {rep:?}"
                    );
                    assert!(x1_is_highest(t, &e.map, x1));
                }
            }
        }
    });
}

#[test]
fn random_trees_up_to_200() {
    let sizes: Vec<usize> = (11..=200).step_by(3).collect();
    sizes.into_par_iter().for_each(|n| {
        let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
        let host = prefix_universal_graph(n).unwrap();
        for it in 0..12 {
            let f = random_tree(n, it % SHAPES, &mut rng);
            let (x1, x2) = (rng.gen_range(0..n), rng.gen_range(0..n));
            let (e, trace) = embed_traced(&host.graph.tree, &f, x1, x2)
                .unwrap_or_else(|err| panic!("n={n} shape={} x1={x1}: {err}", it % SHAPES));
            assert!(validate_embedding(&host.graph, &f, &e.map).ok());
            assert!(e.admissible_complement);
            assert!(
                !trace
                    .records
                    .iter()
                    .any(|r| r.step == Step::CriticalFallback),
                "fallback construction reached"
            );
        }
    });
}

#[test]
fn forests_and_partial_guests() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..300 {
        let n = rng.gen_range(2..=140);
        let m = rng.gen_range(1..=n);
        let host = prefix_universal_graph(n).unwrap();
        let f = random_forest(m, 0.2, &mut rng);
        let e = embed(
            &host.graph.tree,
            &f,
            rng.gen_range(0..m),
            rng.gen_range(0..m),
        )
        .unwrap();
        let rep = validate_embedding(&host.graph, &f, &e.map);
        assert!(rep.ok() && rep.admissible_complement, "n={n} m={m}");
    }
}

/// Prefixes of merged `T_k` subtrees are (4,1)-trees with shapes the plain
/// prefixes never produce.
fn merged_hosts() -> Vec<OrderedTree> {
    let mut hosts = Vec::new();
    for k in 3..=4 {
        let t = build_tk(k).unwrap().tree;
        for d in 1..=t.height() {
            let lv = t.level_vertices(d).to_vec();
            for len in 3..=4 {
                for us in lv.windows(len) {
                    let Ok(m) = t.merge_subtrees(us) else {
                        continue;
                    };
                    let n = m.tree.len();
                    for p in (6..=n).step_by(1 + n / 40) {
                        let h = m.tree.prefix(p).unwrap();
                        if is_ks_tree(&h, 4, 1).is_ok() && h.children(0).len() >= 3 {
                            hosts.push(h);
                        }
                    }
                }
            }
        }
    }
    hosts.sort_by_key(|h| h.len());
    hosts.dedup();
    hosts
}

#[test]
fn merged_hosts_take_random_guests() {
    let hosts = merged_hosts();
    assert!(hosts.len() > 300, "{} merged hosts", hosts.len());
    hosts.par_iter().enumerate().for_each(|(i, t)| {
        let mut rng = ChaCha8Rng::seed_from_u64(i as u64);
        let g = generate(t, 2);
        let n = t.len();
        for it in 0..6 {
            let m = if it % 2 == 0 { n } else { rng.gen_range(1..=n) };
            let f = random_tree(m, it % SHAPES, &mut rng);
            let x1 = rng.gen_range(0..m);
            let e = embed(t, &f, x1, rng.gen_range(0..m))
                .unwrap_or_else(|err| panic!("host {n} guest {m} x1={x1}: {err}"));
            assert!(validate_embedding(&g, &f, &e.map).ok());
        }
    });
}

#[test]
fn recursion_trees_satisfy_their_invariants() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in (2..=120).step_by(2) {
        let host = prefix_universal_graph(n).unwrap();
        let t = &host.graph.tree;
        for s in 0..4 {
            let f = random_tree(n, s, &mut rng);
            let x1 = rng.gen_range(0..n);
            let (e, _, taux) = embed_with_trace(t, &f, x1, x1).unwrap();
            assert!(check_taux(t, &f, &e.map, &taux).ok());
            assert_eq!(taux.len(), n);
            assert!(taux.depths().iter().all(|&d| d < n));
        }
    }
}

#[test]
fn precondition_errors() {
    let t = build_tk(2).unwrap().tree;
    let star = Forest::from_edges(12, &(1..12).map(|i| (0, i)).collect::<Vec<_>>()).unwrap();
    assert!(matches!(
        embed(&t, &star, 0, 0),
        Err(Error::Precondition(_))
    ));
    let p = Forest::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
    assert!(matches!(embed(&t, &p, 3, 0), Err(Error::Precondition(_))));
    // a leaf before a long path breaks the left/right balance
    let bad =
        OrderedTree::from_parents(&[None, Some(0), Some(0), Some(2), Some(3), Some(4), Some(5)])
            .unwrap()
            .0;
    assert!(matches!(embed(&bad, &p, 0, 0), Err(Error::Precondition(_))));
    let two = Forest::edgeless(2);
    assert!(matches!(
        embed_with_trace(&t, &two, 0, 0),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn star_fills_t2() {
    let t = build_tk(2).unwrap().tree;
    let g = generate(&t, 2);
    let star = Forest::from_edges(9, &(1..9).map(|i| (0, i)).collect::<Vec<_>>()).unwrap();
    let e = embed(&t, &star, 0, 0).unwrap();
    // G^2 of a height-2 host is complete, so any bijection works
    assert_eq!(g.edge_count(), 36);
    assert_eq!(e.map[0], 0);
    assert!(validate_embedding(&g, &star, &e.map).ok());
}
