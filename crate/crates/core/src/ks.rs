//! Trees with bounded subtree imbalance, the two-type family `T_k`, and the
//! universal graphs built on their prefixes.

use crate::bounds;
use crate::error::{Error, Result};
use crate::graph::{generate, generate_prefix, GeneratedGraph};
use crate::tree::OrderedTree;
use serde::Serialize;

/// Largest `k` accepted by [`build_tk`]; `TREEVERSE_MAX_K` overrides.
pub const DEFAULT_MAX_K: usize = 10;

pub fn max_k() -> usize {
    std::env::var("TREEVERSE_MAX_K")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_MAX_K)
}

/// Subtree sizes of `T_k`: `a[l][p-1]` is the size below a type-`p` vertex
/// on level `l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ATable {
    pub k: usize,
    a: Vec<[u64; 2]>,
}

impl ATable {
    pub fn new(k: usize) -> Self {
        let mut a = vec![[1u64, 1u64]; k + 1];
        for l in (0..k).rev() {
            let (t1, t2) = (a[l + 1][0], a[l + 1][1]);
            a[l] = [t2 + 1, 4 * t1 + 3 * t2 + 1];
        }
        ATable { k, a }
    }

    pub fn get(&self, level: usize, vtype: u8) -> u64 {
        self.a[level][vtype as usize - 1]
    }

    /// `|T_k|`.
    pub fn total(&self) -> u64 {
        self.a[0][0]
    }
}

/// `|T_k|` without building the tree.
pub fn tk_size(k: usize) -> u64 {
    ATable::new(k).total()
}

/// A tree whose vertices carry type 1 or 2.
#[derive(Clone, Debug)]
pub struct TypedTree {
    pub tree: OrderedTree,
    pub vtype: Vec<u8>,
    pub k: usize,
}

/// Root of type 1; a type-1 vertex gets one type-2 child, a type-2 vertex
/// gets seven children typed 1,2,1,2,1,2,1; stop at level `k`.
pub fn build_tk(k: usize) -> Result<TypedTree> {
    if k > max_k() {
        return Err(Error::Budget(format!(
            "k = {k} exceeds the cap {} (set TREEVERSE_MAX_K to raise it)",
            max_k()
        )));
    }
    let n = tk_size(k) as usize;
    let mut children: Vec<Vec<usize>> = Vec::with_capacity(n);
    let mut vtype = Vec::with_capacity(n);
    // explicit preorder: (type, level)
    let mut stack = vec![(1u8, 0usize, usize::MAX)];
    while let Some((ty, lvl, parent)) = stack.pop() {
        let id = children.len();
        children.push(Vec::new());
        vtype.push(ty);
        if parent != usize::MAX {
            children[parent].push(id);
        }
        if lvl < k {
            let kids: &[u8] = if ty == 1 {
                &[2]
            } else {
                &[1, 2, 1, 2, 1, 2, 1]
            };
            for &c in kids.iter().rev() {
                stack.push((c, lvl + 1, id));
            }
        }
    }
    let (tree, relabel) = OrderedTree::from_children(0, &children)?;
    debug_assert!(relabel.iter().enumerate().all(|(i, &j)| i == j));
    let table = ATable::new(k);
    for u in 0..tree.len() {
        let want = table.get(tree.level(u), vtype[u]);
        if tree.nu(u) as u64 != want {
            return Err(Error::Invariant(format!(
                "nu({u}) = {} but table says {want}",
                tree.nu(u)
            )));
        }
    }
    Ok(TypedTree { tree, vtype, k })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KsViolation {
    /// 1 to 4.
    pub rule: u8,
    pub vertex: usize,
}

/// Checks the four imbalance conditions for every vertex and returns the
/// first failure in DFS order.
pub fn is_ks_tree(t: &OrderedTree, big_k: usize, s: usize) -> std::result::Result<(), KsViolation> {
    let h = t.height();
    // suffix maximum of nu over levels >= d
    let mut deep_max = vec![0usize; h + 2];
    for d in (0..=h).rev() {
        let m = t
            .level_vertices(d)
            .iter()
            .map(|&u| t.nu(u))
            .max()
            .unwrap_or(0);
        deep_max[d] = m.max(deep_max[d + 1]);
    }
    for u in 0..t.len() {
        let l = t.left_cousin(u);
        if let Some(l) = l {
            if let Some(ll) = t.left_cousin(l) {
                if t.nu(ll) + t.nu(l) < t.nu(u) {
                    return Err(KsViolation { rule: 1, vertex: u });
                }
            }
            if big_k * t.nu(l) < t.nu(u) {
                return Err(KsViolation { rule: 2, vertex: u });
            }
        }
        if t.right_cousin(u).is_some() {
            let d = t.level(u) + s;
            if d <= h && t.nu(u) < deep_max[d] {
                return Err(KsViolation { rule: 3, vertex: u });
            }
        }
        if !t.children(u).is_empty() {
            if let Some(l) = l {
                if t.children(l).is_empty() {
                    return Err(KsViolation { rule: 4, vertex: u });
                }
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RReport {
    pub k: usize,
    pub r1: bool,
    pub r2: bool,
    pub r3: bool,
    pub r4: bool,
    pub size_window: bool,
    pub level_bound: bool,
}

impl RReport {
    pub fn all(&self) -> bool {
        self.r1 && self.r2 && self.r3 && self.r4 && self.size_window && self.level_bound
    }
}

/// Per-level type words of `T_k`, generated from the child rules alone.
fn level_patterns(k: usize) -> Vec<Vec<u8>> {
    let mut out = vec![vec![1u8]];
    for _ in 0..k {
        let prev = out.last().unwrap();
        let mut next = Vec::new();
        for &ty in prev {
            if ty == 1 {
                next.push(2);
            } else {
                next.extend_from_slice(&[1, 2, 1, 2, 1, 2, 1]);
            }
        }
        out.push(next);
    }
    out
}

/// Checks the table identities and the level type patterns of `T_k`.
pub fn check_r_properties(k: usize) -> RReport {
    let a = ATable::new(k);
    let r1 = (0..=k).all(|l| {
        let (t1, t2) = (a.get(l, 1), a.get(l, 2));
        if (k - l) % 2 == 0 {
            t2 - 1 == 4 * (t1 - 1)
        } else {
            t2 == 4 * t1
        }
    });
    let r2 = level_patterns(k).iter().enumerate().all(|(l, p)| {
        let (edge, inner) = if l % 2 == 0 { (1, 2) } else { (2, 1) };
        p.len() % 2 == 1
            && p.iter()
                .enumerate()
                .all(|(i, &ty)| ty == if i % 2 == 0 { edge } else { inner })
    });
    let size = |j: usize| tk_size(j) as i128;
    let r3 = k < 2 || size(k) == 4 * size(k - 2) + 3 * size(k - 1) - 1;
    let r4 = (1..=k).all(|l| (l..=k).map(|j| a.get(j, 1)).sum::<u64>() <= 2 * a.get(l, 1));
    let n = a.total() as u128;
    // 1/2 + 2^(2k-1) <= n  <=>  1 + 2^(2k) <= 2n
    let size_window = k < 2 || (1 + (1u128 << (2 * k)) <= 2 * n && n < (1u128 << (2 * k + 1)));
    // k <= 1/2 + 1/2 log2 n  <=>  2^(2k-1) <= n
    let level_bound = k == 0 || (1u128 << (2 * k - 1)) <= n;
    RReport {
        k,
        r1,
        r2,
        r3,
        r4,
        size_window,
        level_bound,
    }
}

/// The universal graph on `n` vertices: the first `n` vertices of `T_k`
/// with `k` minimal such that `n <= |T_k|`, generated with offset 2.
#[derive(Clone, Debug)]
pub struct PrefixUniversal {
    pub n: usize,
    pub k: usize,
    pub graph: GeneratedGraph,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Stats {
    pub n: usize,
    pub k: usize,
    pub vertices: usize,
    pub edges: usize,
    pub arcs: usize,
    pub edge_bound: f64,
    pub bound_holds: bool,
}

/// Smallest `k` with `n <= |T_k|`.
pub fn level_for(n: usize) -> usize {
    (0..).find(|&k| tk_size(k) >= n as u64).unwrap()
}

pub fn prefix_universal_graph(n: usize) -> Result<PrefixUniversal> {
    if n == 0 {
        return Err(Error::Precondition("n must be at least 1".into()));
    }
    let k = level_for(n);
    let tk = build_tk(k)?;
    let graph = generate_prefix(&tk.tree, 2, n)?;
    Ok(PrefixUniversal { n, k, graph })
}

impl PrefixUniversal {
    pub fn stats(&self) -> Stats {
        let e = self.graph.edge_count();
        Stats {
            n: self.n,
            k: self.k,
            vertices: self.graph.len(),
            edges: e,
            arcs: self.graph.arc_count(),
            edge_bound: bounds::bound_value(self.n as u64, 600),
            bound_holds: bounds::edge_bound_holds(e as u64, self.n as u64),
        }
    }
}

/// Arc count of the offset-0 graph of the full `T_k` and whether it meets
/// `14/5 |T_k| log2 |T_k| + 18 |T_k|`.
pub fn tk_arc_bound(k: usize) -> Result<(usize, usize, bool)> {
    let t = build_tk(k)?;
    let g = generate(&t.tree, 0);
    let n = t.tree.len();
    Ok((
        n,
        g.arc_count(),
        bounds::arc_bound_holds(g.arc_count() as u64, n as u64),
    ))
}

/// Vertices of the prefix `[0, t)` not covered by a fully contained
/// subtree whose parent subtree is not contained.
pub fn uncovered_prefix_vertices(tree: &OrderedTree, t: usize) -> Vec<usize> {
    let mut covered = vec![false; t];
    for x in 0..t {
        let inside = x + tree.nu(x) <= t;
        let parent_inside = tree.parent(x).is_some_and(|p| p + tree.nu(p) <= t);
        if inside && !parent_inside {
            for c in covered.iter_mut().take(x + tree.nu(x)).skip(x) {
                *c = true;
            }
        }
    }
    (0..t).filter(|&u| !covered[u]).collect()
}

/// True when every level has at most one uncovered prefix vertex.
pub fn one_per_level(tree: &OrderedTree, t: usize) -> bool {
    let mut seen = vec![false; tree.height() + 1];
    for u in uncovered_prefix_vertices(tree, t) {
        if std::mem::replace(&mut seen[tree.level(u)], true) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_k3() {
        let a = ATable::new(3);
        assert_eq!((a.get(3, 1), a.get(3, 2)), (1, 1));
        assert_eq!((a.get(2, 1), a.get(2, 2)), (2, 8));
        assert_eq!((a.get(1, 1), a.get(1, 2)), (9, 33));
        assert_eq!(a.total(), 34);
        assert_eq!(tk_size(1), 2);
        assert_eq!(tk_size(2), 9);
        assert_eq!(tk_size(0), 1);
    }

    #[test]
    fn built_tree_matches_table() {
        for k in 0..=5 {
            let t = build_tk(k).unwrap();
            assert_eq!(t.tree.len() as u64, tk_size(k));
            assert_eq!(t.tree.height(), k);
        }
        let t3 = build_tk(3).unwrap();
        let lvl2: Vec<u8> = t3
            .tree
            .level_vertices(2)
            .iter()
            .map(|&u| t3.vtype[u])
            .collect();
        assert_eq!(lvl2, vec![1, 2, 1, 2, 1, 2, 1]);
    }

    #[test]
    fn imbalance_checks() {
        for k in 0..=6 {
            assert_eq!(is_ks_tree(&build_tk(k).unwrap().tree, 4, 1), Ok(()));
            assert_eq!(is_ks_tree(&OrderedTree::perfect_binary(k), 4, 1), Ok(()));
        }
        // root with children a, b: a has one child, b has nine leaves
        let mut parents = vec![None, Some(0), Some(1), Some(0)];
        parents.extend(std::iter::repeat_n(Some(3), 9));
        let (cat, _) = OrderedTree::from_parents(&parents).unwrap();
        let v = is_ks_tree(&cat, 4, 1).unwrap_err();
        assert_eq!(v, KsViolation { rule: 2, vertex: 3 });
    }

    #[test]
    fn r_properties_hold() {
        for k in 0..=12 {
            let r = check_r_properties(k);
            assert!(r.all(), "{r:?}");
        }
    }

    #[test]
    fn prefix_graph_selection() {
        let g = prefix_universal_graph(10).unwrap();
        assert_eq!(g.k, 3);
        let g = prefix_universal_graph(34).unwrap();
        assert_eq!(g.graph.len(), 34);
        assert!(g.stats().bound_holds);
        assert_eq!(prefix_universal_graph(1).unwrap().graph.edge_count(), 0);
    }

    #[test]
    fn uncovered_vertices_lie_on_one_path() {
        let t = build_tk(3).unwrap().tree;
        for p in 1..=t.len() {
            let u = uncovered_prefix_vertices(&t, p);
            for w in u.windows(2) {
                assert!(t.is_ancestor_or_self(w[0], w[1]));
            }
            assert!(one_per_level(&t, p));
        }
    }
}
