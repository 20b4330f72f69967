//! Universal graphs for bounded treewidth: blow each vertex of a tree
//! universal graph up into a `3k`-clique, then route a graph through a
//! decomposition whose index tree embeds into the base.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::embed::embed_with_trace;
use crate::error::{Error, Result};
use crate::forest::Forest;
use crate::graph::{generate, GeneratedGraph, Graph};
use crate::ks::prefix_universal_graph;
use crate::taux::Taux;
use crate::tree::OrderedTree;

/// Bags indexed by the nodes of a tree given by parent pointers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeDecomposition {
    pub bags: Vec<Vec<usize>>,
    pub tree_parents: Vec<Option<usize>>,
}

impl TreeDecomposition {
    pub fn len(&self) -> usize {
        self.bags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bags.is_empty()
    }

    pub fn width(&self) -> usize {
        self.bags
            .iter()
            .map(Vec::len)
            .max()
            .unwrap_or(1)
            .saturating_sub(1)
    }

    /// The index tree as an undirected forest.
    pub fn index_forest(&self) -> Result<Forest> {
        let edges: Vec<(usize, usize)> = self
            .tree_parents
            .iter()
            .enumerate()
            .filter_map(|(x, p)| p.map(|p| (p, x)))
            .collect();
        Forest::from_edges(self.len(), &edges)
    }

    pub fn index_tree(&self) -> Result<(OrderedTree, Vec<usize>)> {
        OrderedTree::from_parents(&self.tree_parents)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DecompositionReport {
    pub width: usize,
    /// Index structure is not a single tree.
    pub not_a_tree: bool,
    pub out_of_range: Vec<usize>,
    /// Vertices whose bags are missing or disconnected.
    pub d1: Vec<usize>,
    /// Edges in no bag.
    pub d2: Vec<(usize, usize)>,
}

impl DecompositionReport {
    pub fn ok(&self) -> bool {
        !self.not_a_tree && self.out_of_range.is_empty() && self.d1.is_empty() && self.d2.is_empty()
    }
}

pub fn validate_decomposition(h: &Graph, d: &TreeDecomposition) -> DecompositionReport {
    let n = h.vertex_count();
    let mut rep = DecompositionReport {
        width: d.width(),
        ..Default::default()
    };
    let nodes = d.len();
    let forest = match d.index_forest() {
        Ok(f) if d.tree_parents.len() == nodes && (nodes == 0 || f.is_tree()) => f,
        _ => {
            rep.not_a_tree = true;
            return rep;
        }
    };
    let mut holders: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (x, bag) in d.bags.iter().enumerate() {
        for &v in bag {
            if v >= n {
                rep.out_of_range.push(v);
            } else {
                holders[v].push(x);
            }
        }
    }
    let mut mark = vec![false; nodes];
    for (v, hs) in holders.iter().enumerate() {
        if hs.is_empty() {
            rep.d1.push(v);
            continue;
        }
        for &x in hs {
            mark[x] = true;
        }
        let mut stack = vec![hs[0]];
        let mut seen = 1;
        mark[hs[0]] = false;
        while let Some(x) = stack.pop() {
            for &y in forest.neighbors(x) {
                if mark[y] {
                    mark[y] = false;
                    seen += 1;
                    stack.push(y);
                }
            }
        }
        if seen != hs.len() {
            rep.d1.push(v);
            for &x in hs {
                mark[x] = false;
            }
        }
    }
    let sets: Vec<BTreeSet<usize>> = d.bags.iter().map(|b| b.iter().copied().collect()).collect();
    for &(a, b) in h.edges() {
        if a < n && b < n && !holders[a].iter().any(|&x| sets[x].contains(&b)) {
            rep.d2.push((a, b));
        }
    }
    rep
}

/// A random partial `k`-tree on `n` vertices and the decomposition of the
/// `k`-tree it came from. Each edge survives with probability 3/4 and labels
/// are shuffled.
pub fn gen_partial_ktree(n: usize, k: usize, seed: u64) -> Result<(Graph, TreeDecomposition)> {
    if k == 0 || n < k + 1 {
        return Err(Error::Precondition(format!(
            "need k >= 1 and n >= k + 1 (n={n}, k={k})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut label: Vec<usize> = (0..n).collect();
    label.shuffle(&mut rng);
    let mut edges = Vec::new();
    for a in 0..=k {
        for b in a + 1..=k {
            edges.push((a, b));
        }
    }
    let mut bags = vec![(0..=k).collect::<Vec<_>>()];
    let mut parents = vec![None];
    // k-cliques with a bag that holds them
    let mut cliques: Vec<(Vec<usize>, usize)> = (0..=k)
        .map(|skip| ((0..=k).filter(|&v| v != skip).collect(), 0))
        .collect();
    for v in k + 1..n {
        let (q, at) = cliques[rng.gen_range(0..cliques.len())].clone();
        let id = bags.len();
        for &u in &q {
            edges.push((u, v));
        }
        for skip in 0..k {
            let mut c: Vec<usize> = q
                .iter()
                .copied()
                .enumerate()
                .filter(|&(i, _)| i != skip)
                .map(|(_, u)| u)
                .collect();
            c.push(v);
            cliques.push((c, id));
        }
        let mut bag = q;
        bag.push(v);
        bags.push(bag);
        parents.push(Some(at));
    }
    let kept = edges
        .into_iter()
        .filter(|_| rng.gen_bool(0.75))
        .map(|(a, b)| (label[a], label[b]));
    let h = Graph::from_edges(n, kept);
    let bags = bags
        .into_iter()
        .map(|b| {
            let mut b: Vec<usize> = b.into_iter().map(|v| label[v]).collect();
            b.sort_unstable();
            b
        })
        .collect();
    Ok((
        h,
        TreeDecomposition {
            bags,
            tree_parents: parents,
        },
    ))
}

/// Decomposition from eliminating vertices in `order`: vertex `v` gets the
/// bag of `v` and its neighbors still present (with fill edges), hung off the
/// bag of the first of those neighbors to go. Components are chained.
pub fn elimination_decomposition(h: &Graph, order: &[usize]) -> Result<TreeDecomposition> {
    let n = h.vertex_count();
    let mut pos = vec![usize::MAX; n];
    for (i, &v) in order.iter().enumerate() {
        if v >= n || pos[v] != usize::MAX {
            return Err(Error::Input(
                "elimination order is not a permutation".into(),
            ));
        }
        pos[v] = i;
    }
    if order.len() != n {
        return Err(Error::Input(
            "elimination order is not a permutation".into(),
        ));
    }
    let mut adj: Vec<BTreeSet<usize>> = (0..n)
        .map(|v| h.neighbors(v).iter().copied().collect())
        .collect();
    let mut bags = Vec::with_capacity(n);
    let mut parents = vec![None; n];
    for (i, &v) in order.iter().enumerate() {
        let nb: Vec<usize> = adj[v].iter().copied().collect();
        for &a in &nb {
            adj[a].remove(&v);
            for &b in &nb {
                if a != b {
                    adj[a].insert(b);
                }
            }
        }
        parents[i] = nb.iter().map(|&u| pos[u]).min();
        let mut bag = nb;
        bag.push(v);
        bag.sort_unstable();
        bags.push(bag);
    }
    let roots: Vec<usize> = (0..n).filter(|&i| parents[i].is_none()).collect();
    for w in roots.windows(2) {
        parents[w[0]] = Some(w[1]);
    }
    Ok(TreeDecomposition {
        bags,
        tree_parents: parents,
    })
}

/// [`elimination_decomposition`] along the greedy minimum-degree order.
pub fn min_degree_decomposition(h: &Graph) -> TreeDecomposition {
    let n = h.vertex_count();
    let mut adj: Vec<BTreeSet<usize>> = (0..n)
        .map(|v| h.neighbors(v).iter().copied().collect())
        .collect();
    let mut alive = vec![true; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| alive[v])
            .min_by_key(|&v| (adj[v].len(), v))
            .unwrap();
        let nb: Vec<usize> = adj[v].iter().copied().collect();
        for &a in &nb {
            adj[a].remove(&v);
            for &b in &nb {
                if a != b {
                    adj[a].insert(b);
                }
            }
        }
        alive[v] = false;
        order.push(v);
    }
    elimination_decomposition(h, &order).expect("order is a permutation")
}

/// Mutable decomposition with undirected index edges, for rewriting.
struct Work {
    bags: Vec<Option<BTreeSet<usize>>>,
    adj: Vec<BTreeSet<usize>>,
}

impl Work {
    fn from(d: &TreeDecomposition) -> Self {
        let mut adj = vec![BTreeSet::new(); d.len()];
        for (x, p) in d.tree_parents.iter().enumerate() {
            if let Some(p) = *p {
                adj[x].insert(p);
                adj[p].insert(x);
            }
        }
        Work {
            bags: d
                .bags
                .iter()
                .map(|b| Some(b.iter().copied().collect()))
                .collect(),
            adj,
        }
    }

    fn bag(&self, x: usize) -> &BTreeSet<usize> {
        self.bags[x].as_ref().unwrap()
    }

    fn live_edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for x in 0..self.bags.len() {
            if self.bags[x].is_some() {
                out.extend(self.adj[x].iter().filter(|&&y| y > x).map(|&y| (x, y)));
            }
        }
        out
    }

    /// Folds `x` into its neighbor `y`.
    fn contract(&mut self, x: usize, y: usize) {
        let nbrs: Vec<usize> = self.adj[x].iter().copied().collect();
        for z in nbrs {
            self.adj[z].remove(&x);
            if z != y {
                self.adj[z].insert(y);
                self.adj[y].insert(z);
            }
        }
        self.adj[x].clear();
        self.bags[x] = None;
    }

    fn remove_nested(&mut self) -> bool {
        let mut changed = false;
        loop {
            let hit = self.live_edges().into_iter().find_map(|(x, y)| {
                if self.bag(x).is_subset(self.bag(y)) {
                    Some((x, y))
                } else if self.bag(y).is_subset(self.bag(x)) {
                    Some((y, x))
                } else {
                    None
                }
            });
            match hit {
                Some((x, y)) => {
                    self.contract(x, y);
                    changed = true;
                }
                None => return changed,
            }
        }
    }

    /// Adds one vertex to some bag smaller than `size` from a neighbor.
    fn pad_one(&mut self, size: usize) -> bool {
        for (x, y) in self.live_edges() {
            for (a, b) in [(x, y), (y, x)] {
                if self.bag(a).len() < size {
                    let v = *self.bag(b).difference(self.bag(a)).next().unwrap();
                    self.bags[a].as_mut().unwrap().insert(v);
                    return true;
                }
            }
        }
        false
    }

    /// Rooted at the first live node; each non-root node exchanges exactly
    /// one vertex with its parent.
    fn smooth(mut self) -> (Vec<BTreeSet<usize>>, Vec<Option<usize>>) {
        let live: Vec<usize> = (0..self.bags.len())
            .filter(|&x| self.bags[x].is_some())
            .collect();
        let mut bags = Vec::new();
        let mut parents = Vec::new();
        let mut id = vec![usize::MAX; self.bags.len()];
        let root = live[0];
        id[root] = 0;
        bags.push(self.bags[root].take().unwrap());
        parents.push(None);
        let mut stack = vec![root];
        while let Some(x) = stack.pop() {
            let here = id[x];
            for y in std::mem::take(&mut self.adj[x]) {
                if id[y] != usize::MAX {
                    continue;
                }
                let target = self.bags[y].take().unwrap();
                let mut cur = bags[here].clone();
                let mut up = here;
                let gone: Vec<usize> = cur.difference(&target).copied().collect();
                let new: Vec<usize> = target.difference(&cur).copied().collect();
                debug_assert!(!new.is_empty() && new.len() == gone.len());
                for (i, (&a, &b)) in gone.iter().zip(&new).enumerate() {
                    cur.remove(&a);
                    cur.insert(b);
                    bags.push(cur.clone());
                    parents.push(Some(up));
                    up = bags.len() - 1;
                    if i + 1 == new.len() {
                        id[y] = up;
                    }
                }
                stack.push(y);
            }
        }
        (bags, parents)
    }
}

/// Rewrites a width-`<= k` decomposition of `h` into one with bags of at most
/// `3k` vertices and at most `floor(n/k) + 1` nodes. The result is validated
/// before it is returned.
///
/// The witness is first made smooth (all bags of size `k + 1`, each child
/// bag swaps one vertex of its parent), which leaves `n - k` nodes. Nodes are
/// then grouped bottom-up: each node keeps an open group of fewer than `k`
/// nodes below it; children's open groups are packed at their parent into
/// closed groups of `k..=2k-2` nodes, and an open group reaching `k` nodes
/// closes on its own. A closed group hangs off the group of the node it was
/// packed at, and its bag is that node's bag plus one vertex per member.
pub fn normalize_decomposition(
    h: &Graph,
    d: &TreeDecomposition,
    k: usize,
) -> Result<TreeDecomposition> {
    let n = h.vertex_count();
    if k == 0 {
        return Err(Error::Precondition("k must be at least 1".into()));
    }
    let rep = validate_decomposition(h, d);
    if !rep.ok() {
        return Err(Error::Precondition(format!(
            "witness is not a tree decomposition: {rep:?}"
        )));
    }
    if rep.width > k {
        return Err(Error::Precondition(format!(
            "witness has width {} > {k}",
            rep.width
        )));
    }
    let out = if n <= k + 1 || d.len() <= 1 {
        TreeDecomposition {
            bags: vec![(0..n).collect()],
            tree_parents: vec![None],
        }
    } else {
        let mut w = Work::from(d);
        loop {
            w.remove_nested();
            if !w.pad_one(k + 1) {
                break;
            }
        }
        let (bags, parents) = w.smooth();
        if bags.len() != n - k {
            return Err(Error::Invariant(format!(
                "smooth decomposition has {} nodes, expected {}",
                bags.len(),
                n - k
            )));
        }
        group(&bags, &parents, k)
    };
    let rep = validate_decomposition(h, &out);
    let cap = n / k + 1;
    if !rep.ok() || out.bags.iter().any(|b| b.len() > 3 * k) || out.len() > cap {
        return Err(Error::Invariant(format!(
            "normalization missed its target: {} nodes (cap {cap}), width {}, report {rep:?}",
            out.len(),
            rep.width
        )));
    }
    Ok(out)
}

fn group(bags: &[BTreeSet<usize>], parents: &[Option<usize>], k: usize) -> TreeDecomposition {
    let nodes = bags.len();
    let mut kids = vec![Vec::new(); nodes];
    for (x, p) in parents.iter().enumerate() {
        if let Some(p) = p {
            kids[*p].push(x);
        }
    }
    let mut order = vec![0];
    let mut i = 0;
    while i < order.len() {
        order.extend(kids[order[i]].iter().copied());
        i += 1;
    }
    let mut open: Vec<Vec<usize>> = vec![Vec::new(); nodes];
    // closed groups: (members, node it hangs from)
    let mut closed: Vec<(Vec<usize>, Option<usize>)> = Vec::new();
    for &x in order.iter().rev() {
        let mut bin: Vec<usize> = Vec::new();
        for &c in &kids[x] {
            bin.append(&mut open[c]);
            if bin.len() >= k {
                closed.push((std::mem::take(&mut bin), Some(x)));
            }
        }
        bin.push(x);
        if bin.len() >= k && parents[x].is_some() {
            closed.push((bin, parents[x]));
        } else {
            open[x] = bin;
        }
    }
    closed.push((std::mem::take(&mut open[0]), None));
    let mut owner = vec![usize::MAX; nodes];
    for (g, (members, _)) in closed.iter().enumerate() {
        for &x in members {
            owner[x] = g;
        }
    }
    // root group first
    let count = closed.len();
    let relabel = |g: usize| if g == count - 1 { 0 } else { g + 1 };
    let mut out_bags = vec![Vec::new(); count];
    let mut out_parents = vec![None; count];
    for (g, (members, at)) in closed.iter().enumerate() {
        let mut bag: BTreeSet<usize> = BTreeSet::new();
        for &x in members {
            bag.extend(bags[x].iter().copied());
        }
        out_bags[relabel(g)] = bag.into_iter().collect();
        out_parents[relabel(g)] = at.map(|p| relabel(owner[p]));
    }
    TreeDecomposition {
        bags: out_bags,
        tree_parents: out_parents,
    }
}

/// `G'`: every base vertex `x` becomes the clique `{x·3k, …, x·3k + 3k - 1}`
/// and every base edge a complete bipartite graph between cliques.
#[derive(Clone, Debug)]
pub struct BlowupGraph {
    pub n: usize,
    pub k: usize,
    pub base: GeneratedGraph,
}

#[derive(Clone, Debug, Serialize)]
pub struct BlowupStats {
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub vertices: usize,
    pub edges: usize,
    pub base_edges: usize,
    /// `edges / (k n log2 n)`.
    pub ratio_to_kn_log_n: f64,
}

/// Base is the `m`-vertex prefix graph, `m = floor(n/k) + 1`.
pub fn build_universal_tw(n: usize, k: usize) -> Result<BlowupGraph> {
    if k == 0 || n < k {
        return Err(Error::Precondition(format!(
            "need n >= k >= 1 (n={n}, k={k})"
        )));
    }
    let base = prefix_universal_graph(n / k + 1)?.graph;
    Ok(BlowupGraph { n, k, base })
}

impl BlowupGraph {
    pub fn m(&self) -> usize {
        self.base.len()
    }

    pub fn clique_size(&self) -> usize {
        3 * self.k
    }

    pub fn vertex_count(&self) -> usize {
        self.clique_size() * self.m()
    }

    pub fn vertex(&self, x: usize, slot: usize) -> usize {
        x * self.clique_size() + slot
    }

    pub fn split(&self, v: usize) -> (usize, usize) {
        (v / self.clique_size(), v % self.clique_size())
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        if a == b || a >= self.vertex_count() || b >= self.vertex_count() {
            return false;
        }
        let (x, _) = self.split(a);
        let (y, _) = self.split(b);
        x == y || self.base.has_edge(x, y)
    }

    /// Closed form `9k^2 e(base) + C(3k, 2) m`.
    pub fn edge_count(&self) -> usize {
        let c = self.clique_size();
        c * c * self.base.edge_count() + c * (c - 1) / 2 * self.m()
    }

    /// Every edge, built from the cliques and base edges.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let c = self.clique_size();
        let mut out = Vec::with_capacity(self.edge_count());
        for x in 0..self.m() {
            for i in 0..c {
                for j in i + 1..c {
                    out.push((self.vertex(x, i), self.vertex(x, j)));
                }
            }
        }
        for &(x, y) in self.base.graph.edges() {
            for i in 0..c {
                for j in 0..c {
                    out.push((self.vertex(x, i), self.vertex(y, j)));
                }
            }
        }
        out
    }

    pub fn stats(&self) -> BlowupStats {
        let nf = self.n as f64;
        let denom = self.k as f64 * nf * nf.log2().max(1.0);
        BlowupStats {
            n: self.n,
            k: self.k,
            m: self.m(),
            vertices: self.vertex_count(),
            edges: self.edge_count(),
            base_edges: self.base.edge_count(),
            ratio_to_kn_log_n: self.edge_count() as f64 / denom,
        }
    }
}

/// The map of a treewidth-`k` graph into a blow-up, with its ingredients.
#[derive(Clone, Debug, Serialize)]
pub struct TwEmbedding {
    /// Vertex of `H` to vertex of `G'`.
    pub pi: Vec<usize>,
    /// Decomposition node to base vertex.
    pub lambda: Vec<usize>,
    /// Vertex of `H` to the decomposition node of least recursion depth
    /// among those whose bag holds it.
    pub home: Vec<usize>,
    pub taux: Taux,
}

/// Embeds `h` into `g` through the normalized decomposition `d`.
pub fn embed_tw(h: &Graph, d: &TreeDecomposition, g: &BlowupGraph) -> Result<TwEmbedding> {
    let n = h.vertex_count();
    if d.len() > g.m() {
        return Err(Error::Precondition(format!(
            "{} bags but only {} base vertices",
            d.len(),
            g.m()
        )));
    }
    if n > g.n {
        return Err(Error::Precondition(format!(
            "graph has {n} vertices, universal graph is for {}",
            g.n
        )));
    }
    let index = d.index_forest()?;
    if !index.is_tree() {
        return Err(Error::Precondition(
            "decomposition index is not a tree".into(),
        ));
    }
    let (e, _, taux) = embed_with_trace(&g.base.tree, &index, 0, 0)?;
    let depth = taux.depths();
    let mut home = vec![usize::MAX; n];
    for (x, bag) in d.bags.iter().enumerate() {
        for &v in bag {
            if home[v] == usize::MAX || depth[x] < depth[home[v]] {
                home[v] = x;
            }
        }
    }
    for (x, bag) in d.bags.iter().enumerate() {
        for &v in bag {
            if x != home[v] && depth[x] == depth[home[v]] {
                return Err(Error::Invariant(format!(
                    "vertex {v} has two shallowest bags {x} and {}",
                    home[v]
                )));
            }
        }
    }
    if let Some(v) = home.iter().position(|&x| x == usize::MAX) {
        return Err(Error::Precondition(format!("vertex {v} is in no bag")));
    }
    let mut used = vec![0usize; d.len()];
    let mut pi = vec![0; n];
    for v in 0..n {
        let x = home[v];
        if used[x] == g.clique_size() {
            return Err(Error::Invariant(format!("clique of node {x} is full")));
        }
        pi[v] = g.vertex(e.map[x], used[x]);
        used[x] += 1;
    }
    Ok(TwEmbedding {
        pi,
        lambda: e.map,
        home,
        taux,
    })
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TwReport {
    pub collisions: Vec<usize>,
    pub missing_edges: Vec<(usize, usize)>,
}

impl TwReport {
    pub fn ok(&self) -> bool {
        self.collisions.is_empty() && self.missing_edges.is_empty()
    }
}

pub fn validate_tw_embedding(h: &Graph, g: &BlowupGraph, pi: &[usize]) -> TwReport {
    let mut rep = TwReport::default();
    let mut seen = BTreeSet::new();
    for (v, &p) in pi.iter().enumerate() {
        if p >= g.vertex_count() || !seen.insert(p) {
            rep.collisions.push(v);
        }
    }
    for &(a, b) in h.edges() {
        if !g.has_edge(pi[a], pi[b]) {
            rep.missing_edges.push((a, b));
        }
    }
    rep
}

/// Path decomposition of `G_{B(l)}`: bag `i` is the `i`-th leaf in DFS order
/// with its neighborhood.
pub fn path_decomposition_gb(l: usize) -> Result<(GeneratedGraph, TreeDecomposition)> {
    if l == 0 {
        return Err(Error::Precondition("need l >= 1".into()));
    }
    let g = generate(&OrderedTree::perfect_binary(l), 0);
    let leaves = g.tree.leaves();
    let bags: Vec<Vec<usize>> = leaves
        .iter()
        .map(|&x| {
            let mut b = g.graph.neighbors(x).to_vec();
            b.push(x);
            b.sort_unstable();
            b
        })
        .collect();
    let tree_parents = (0..bags.len()).map(|i| i.checked_sub(1)).collect();
    Ok((g, TreeDecomposition { bags, tree_parents }))
}

/// Largest number of vertices of one level in one bag, per level.
pub fn level_occupancy(tree: &OrderedTree, d: &TreeDecomposition) -> Vec<usize> {
    let mut most = vec![0; tree.height() + 1];
    for bag in &d.bags {
        let mut count = vec![0; most.len()];
        for &v in bag {
            count[tree.level(v)] += 1;
        }
        for (m, c) in most.iter_mut().zip(count) {
            *m = (*m).max(c);
        }
    }
    most
}
