//! Property tests for the structural invariants of every module.

mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use treeverse::embed::{embed, embed_with_trace};
use treeverse::graph::{adjacent, generate_prefix, has_arc, ArcRule};
use treeverse::ks::{build_tk, is_ks_tree, prefix_universal_graph};
use treeverse::splitter::{
    components_are_valid, find_components_window, find_feasible_or_critical, refine_critical, Kind,
};
use treeverse::taux::check_taux;
use treeverse::treewidth::{gen_partial_ktree, normalize_decomposition, validate_decomposition};
use treeverse::{generate, Forest, OrderedTree};

use common::{parents, random_forest, random_tree, tree_from_parents, SHAPES};

fn ordered(p: &[usize]) -> OrderedTree {
    let mut ps = vec![None];
    ps.extend(p.iter().map(|&q| Some(q)));
    OrderedTree::from_parents(&ps).unwrap().0
}

/// Descendants of `u` by walking up from every vertex.
fn descendants(t: &OrderedTree, u: usize) -> Vec<usize> {
    (0..t.len())
        .filter(|&v| {
            let mut x = v;
            loop {
                if x == u {
                    return true;
                }
                match t.parent(x) {
                    Some(p) => x = p,
                    None => return false,
                }
            }
        })
        .collect()
}

/// Sizes of the components of `f - w` by a separate flood fill.
fn component_sizes_without(f: &Forest, w: usize) -> Vec<usize> {
    let mut seen = vec![false; f.len()];
    seen[w] = true;
    let mut out = Vec::new();
    for s in 0..f.len() {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut stack = vec![s];
        let mut size = 0;
        while let Some(v) = stack.pop() {
            size += 1;
            for &x in f.neighbors(v) {
                if !seen[x] {
                    seen[x] = true;
                    stack.push(x);
                }
            }
        }
        out.push(size);
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn subtrees_are_dfs_intervals(p in parents(60)) {
        let t = ordered(&p);
        for u in 0..t.len() {
            let d = descendants(&t, u);
            prop_assert_eq!(d, t.subtree_range(u).collect::<Vec<_>>());
            prop_assert_eq!(t.nu(u), t.subtree_range(u).len());
        }
    }

    #[test]
    fn left_and_right_cousins_are_inverse(p in parents(60)) {
        let t = ordered(&p);
        for u in 0..t.len() {
            if let Some(l) = t.left_cousin(u) {
                prop_assert!(l < u);
                prop_assert_eq!(t.level(l), t.level(u));
                prop_assert_eq!(t.right_cousin(l), Some(u));
                prop_assert!((l + 1..u).all(|v| t.level(v) != t.level(u)));
            }
            if let Some(r) = t.right_cousin(u) {
                prop_assert_eq!(t.left_cousin(r), Some(u));
            }
        }
    }

    #[test]
    fn prefixes_keep_parents(p in parents(60), cut in any::<prop::sample::Index>()) {
        let t = ordered(&p);
        let k = 1 + cut.index(t.len());
        let q = t.prefix(k).unwrap();
        prop_assert_eq!(q.len(), k);
        for u in 0..k {
            prop_assert_eq!(q.parent(u), t.parent(u));
        }
    }

    #[test]
    fn merges_keep_subtrees(k in 2usize..=5, pick in any::<prop::sample::Index>(), len in 1usize..5) {
        let t = build_tk(k).unwrap().tree;
        let d = 1 + pick.index(t.height());
        let lv = t.level_vertices(d);
        let start = pick.index(lv.len());
        let us = &lv[start..(start + len).min(lv.len())];
        let m = t.merge_subtrees(us).unwrap();
        prop_assert_eq!(m.tree.len(), 1 + us.iter().map(|&u| t.nu(u)).sum::<usize>());
        prop_assert_eq!(m.tree.children(0).len(), us.len());
        for x in 1..m.tree.len() {
            let src = m.origin[x].unwrap();
            match m.tree.parent(x).and_then(|p| m.origin[p]) {
                Some(sp) => prop_assert_eq!(t.parent(src), Some(sp)),
                None => prop_assert!(us.contains(&src)),
            }
        }
    }

    #[test]
    fn generated_graphs_match_the_closed_form(p in parents(40), h in 0usize..4) {
        let t = ordered(&p);
        let g = generate(&t, h);
        let n = t.len();
        let mut edges = 0;
        for a in 0..n {
            for b in 0..n {
                let e = a != b && (has_arc(&t, h, a, b) || has_arc(&t, h, b, a));
                prop_assert_eq!(g.has_edge(a, b), e);
                prop_assert_eq!(g.has_edge(a, b), g.has_edge(b, a));
                prop_assert_eq!(adjacent(&t, h, a, b), e);
                if a < b && e {
                    edges += 1;
                }
                if a != b && t.is_ancestor_or_self(a, b) {
                    prop_assert!(g.provenance(a, b).unwrap().forward().contains(&ArcRule::G1));
                }
            }
        }
        prop_assert_eq!(edges, g.edge_count());
        let g1 = (0..n).map(|u| t.nu(u) - 1).sum::<usize>();
        let counted = g.graph.edges().iter().filter(|&&(a, b)| t.is_ancestor_or_self(a, b)).count();
        prop_assert_eq!(counted, g1);
    }

    #[test]
    fn prefix_graphs_are_induced(k in 2usize..=4, cut in any::<prop::sample::Index>(), h in 0usize..3) {
        let t = build_tk(k).unwrap().tree;
        let c = 1 + cut.index(t.len());
        let g = generate(&t, h);
        let keep: Vec<usize> = (0..c).collect();
        prop_assert_eq!(generate_prefix(&t, h, c).unwrap().graph, g.graph.induced(&keep));
    }

    #[test]
    fn windows_have_the_promised_size(seed in any::<u64>(), n in 2usize..=60) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_forest(n, 0.15, &mut rng);
        let x = rng.gen_range(1..n);
        let u = rng.gen_range(0..n);
        let c = find_components_window(&f, u, x).unwrap();
        prop_assert!(components_are_valid(&f, &c, u));
        prop_assert!(x <= c.total() && c.total() < 2 * x);
        let sizes = component_sizes_without(&f, c.w);
        prop_assert!(c.components.iter().all(|comp| sizes.contains(&comp.len())));
        prop_assert!(find_components_window(&f, u, n).is_err());
    }

    #[test]
    fn feasible_or_critical_outputs_meet_their_definitions(seed in any::<u64>(), n in 5usize..=60) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_tree(n, rng.gen_range(0..SHAPES), &mut rng);
        let y = rng.gen_range(2..n / 2 + 2).min(n - 1);
        // (4,1)-trees keep x <= 4y; mostly stay there
        let hi = if rng.gen_bool(0.8) { n.min(4 * y).max(y + 1) } else { n };
        let x = rng.gen_range(y + 1..=hi);
        let u = rng.gen_range(0..n);
        let c = find_feasible_or_critical(&f, u, x, y).unwrap();
        prop_assert!(components_are_valid(&f, &c, u));
        let total = c.total();
        match c.kind {
            Kind::Feasible => prop_assert!(x <= total + 1 && total + 1 <= x + y - 2),
            Kind::Critical => {
                let min = c.components.iter().map(Vec::len).min().unwrap();
                prop_assert!(c.components.len() >= 2);
                prop_assert!(x + y - 2 <= total && total + 3 <= 2 * x);
                // every proper subfamily sums to at most x - 2
                prop_assert!(total - min + 2 <= x);
                prop_assert!(min >= y);
                if x <= 4 * y {
                    check_refinement(&f, c.w, &c.components, x, y)?;
                } else {
                    prop_assert!(refine_critical(&f, c.w, &c.components, x, y).is_err());
                }
            }
            Kind::Plain => prop_assert!(false, "plain output"),
        }
    }

    #[test]
    fn embeddings_keep_their_promises(seed in any::<u64>(), n in 1usize..=150) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let host = prefix_universal_graph(n).unwrap();
        let t = &host.graph.tree;
        let m = if rng.gen_bool(0.5) { n } else { rng.gen_range(1..=n) };
        let f = random_tree(m, rng.gen_range(0..SHAPES), &mut rng);
        let (x1, x2) = (rng.gen_range(0..m), rng.gen_range(0..m));
        let e = embed(t, &f, x1, x2).unwrap();
        check_promises(t, &f, &e.map, x1, x2)?;
    }

    #[test]
    fn recursion_trees_dominate_and_separate(seed in any::<u64>(), n in 1usize..=80) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let host = prefix_universal_graph(n).unwrap();
        let f = random_tree(n, rng.gen_range(0..SHAPES), &mut rng);
        let x1 = rng.gen_range(0..n);
        let (e, _, a) = embed_with_trace(&host.graph.tree, &f, x1, x1).unwrap();
        prop_assert!(check_taux(&host.graph.tree, &f, &e.map, &a).ok());
        let kids = a.children();
        prop_assert_eq!(kids.iter().map(Vec::len).sum::<usize>() + 1, n);
    }

    #[test]
    fn normalized_decompositions_are_small(seed in any::<u64>(), k in 1usize..=4, extra in 0usize..44) {
        let n = k + 1 + extra;
        let (h, w) = gen_partial_ktree(n, k, seed).unwrap();
        let d = normalize_decomposition(&h, &w, k).unwrap();
        prop_assert!(validate_decomposition(&h, &d).ok());
        prop_assert!(d.len() <= (n / k).max(1));
        prop_assert!(d.bags.iter().all(|b| b.len() <= 3 * k));
    }

    #[test]
    fn tree_shaped_guests_from_parent_lists(p in parents(40)) {
        let f = tree_from_parents(&p);
        let n = f.len();
        let host = prefix_universal_graph(n).unwrap();
        let e = embed(&host.graph.tree, &f, n - 1, 0).unwrap();
        check_promises(&host.graph.tree, &f, &e.map, n - 1, 0)?;
    }
}

/// Image in the final DFS segment, `x1` on the highest level used, `x2` on
/// level at most 2 when the host has two root children and the guest fits
/// between `nu(v_2)` and `n - 2`, and every edge on a host edge.
fn check_promises(
    t: &OrderedTree,
    f: &Forest,
    map: &[usize],
    x1: usize,
    x2: usize,
) -> Result<(), TestCaseError> {
    let (n, m) = (t.len(), f.len());
    let mut seen = vec![false; n];
    for &h in map {
        prop_assert!(h >= n - m && h < n && !seen[h]);
        seen[h] = true;
    }
    let top = map.iter().map(|&h| t.level(h)).min().unwrap();
    prop_assert_eq!(t.level(map[x1]), top);
    let kids = t.children(0);
    if kids.len() == 2 {
        let nu = t.nu(kids[1]);
        if nu >= 2 && m >= nu && m + 2 <= n {
            prop_assert!(t.level(map[x2]) <= 2);
        }
    }
    for (a, b) in f.edges() {
        prop_assert!(adjacent(t, 2, map[a], map[b]));
    }
    Ok(())
}

/// Splits the smallest component of a critical collection and checks the
/// returned branch's size window.
fn check_refinement(
    f: &Forest,
    w: usize,
    comps: &[Vec<usize>],
    x: usize,
    y: usize,
) -> Result<(), TestCaseError> {
    let mut sorted = comps.to_vec();
    sorted.sort_by_key(|c| (c.len(), c[0]));
    let mut nodes = sorted.concat();
    nodes.push(w);
    nodes.sort_unstable();
    let sub = f.induced(&nodes);
    let local = |v: usize| nodes.binary_search(&v).unwrap();
    let lc: Vec<Vec<usize>> = sorted
        .iter()
        .map(|c| c.iter().map(|&v| local(v)).collect())
        .collect();
    let r = refine_critical(&sub, local(w), &lc, x, y).unwrap();
    let c1 = &lc[0];
    prop_assert!(c1.contains(&r.w_prime));
    let w1 = c1
        .iter()
        .copied()
        .find(|&v| sub.has_edge(v, local(w)))
        .unwrap();
    let cut: usize = r.components.iter().map(Vec::len).sum();
    prop_assert!(r
        .components
        .iter()
        .all(|c| !c.contains(&w1) && c.iter().all(|v| c1.contains(v))));
    let t0: usize = lc.iter().map(Vec::len).sum::<usize>() + 1;
    if r.branch_a {
        let left = t0 - cut - 1;
        prop_assert!(
            x <= left && left <= x + y - 2,
            "branch a: {left} not in [{x}, {}]",
            x + y - 2
        );
    } else {
        let rest: usize = lc[1..].iter().map(Vec::len).sum();
        let size = rest + 2 + cut;
        prop_assert!(
            x <= size && size <= x + y - 2,
            "branch b: {size} not in [{x}, {}]",
            x + y - 2
        );
    }
    Ok(())
}

#[test]
fn tk_is_a_41_tree() {
    for k in 1..=6 {
        assert!(is_ks_tree(&build_tk(k).unwrap().tree, 4, 1).is_ok());
    }
}
