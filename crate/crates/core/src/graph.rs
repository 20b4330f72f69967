//! Simple undirected graphs, and the graphs generated from ordered trees.

use crate::error::{Error, Result};
use crate::tree::OrderedTree;
use rayon::prelude::*;
use std::fmt::Write as _;

/// Compressed adjacency of a simple undirected graph. Neighbor lists are
/// sorted; `eid` gives the id of the edge behind each adjacency slot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    eid: Vec<usize>,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Loops and duplicates are dropped.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut list: Vec<(usize, usize)> = edges
            .into_iter()
            .filter(|&(a, b)| a != b)
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        list.sort_unstable();
        list.dedup();
        Self::from_sorted_edges(n, list)
    }

    fn from_sorted_edges(n: usize, edges: Vec<(usize, usize)>) -> Self {
        let mut deg = vec![0usize; n + 1];
        for &(a, b) in &edges {
            assert!(b < n, "edge ({a},{b}) out of range for {n} vertices");
            deg[a] += 1;
            deg[b] += 1;
        }
        let mut offsets = vec![0; n + 1];
        for u in 0..n {
            offsets[u + 1] = offsets[u] + deg[u];
        }
        let mut fill = offsets.clone();
        let mut targets = vec![0; 2 * edges.len()];
        let mut eid = vec![0; 2 * edges.len()];
        for (i, &(a, b)) in edges.iter().enumerate() {
            targets[fill[a]] = b;
            eid[fill[a]] = i;
            fill[a] += 1;
            targets[fill[b]] = a;
            eid[fill[b]] = i;
            fill[b] += 1;
        }
        for u in 0..n {
            let (s, e) = (offsets[u], offsets[u + 1]);
            let mut pairs: Vec<(usize, usize)> = targets[s..e]
                .iter()
                .copied()
                .zip(eid[s..e].iter().copied())
                .collect();
            pairs.sort_unstable();
            for (j, (t, i)) in pairs.into_iter().enumerate() {
                targets[s + j] = t;
                eid[s + j] = i;
            }
        }
        Graph {
            offsets,
            targets,
            eid,
            edges,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.targets[self.offsets[u]..self.offsets[u + 1]]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.offsets[u + 1] - self.offsets[u]
    }

    pub fn edge_id(&self, a: usize, b: usize) -> Option<usize> {
        let s = self.offsets[a];
        self.neighbors(a)
            .binary_search(&b)
            .ok()
            .map(|j| self.eid[s + j])
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a < self.vertex_count() && b < self.vertex_count() && self.edge_id(a, b).is_some()
    }

    /// Edges `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Subgraph induced on `keep`; vertex `i` of the result is `keep[i]`.
    pub fn induced(&self, keep: &[usize]) -> Graph {
        let mut idx = vec![usize::MAX; self.vertex_count()];
        for (i, &u) in keep.iter().enumerate() {
            idx[u] = i;
        }
        let mut out = Vec::new();
        for (i, &u) in keep.iter().enumerate() {
            for &w in self.neighbors(u) {
                if idx[w] != usize::MAX && idx[w] > i {
                    out.push((i, idx[w]));
                }
            }
        }
        Graph::from_edges(keep.len(), out)
    }

    /// One `"u w"` line per edge, `u < w`, lexicographic order.
    pub fn to_edge_list(&self) -> String {
        let mut s = String::new();
        for &(a, b) in &self.edges {
            writeln!(s, "{a} {b}").unwrap();
        }
        s
    }
}

/// Arc rules: four for the generated graph, three for the legacy one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ArcRule {
    G1,
    G2,
    G3,
    G4,
    L1,
    L2,
    L3,
}

impl ArcRule {
    pub const ALL: [ArcRule; 7] = [
        ArcRule::G1,
        ArcRule::G2,
        ArcRule::G3,
        ArcRule::G4,
        ArcRule::L1,
        ArcRule::L2,
        ArcRule::L3,
    ];

    fn bit(self) -> u16 {
        1 << (self as u16)
    }

    pub fn name(self) -> &'static str {
        match self {
            ArcRule::G1 => "G1",
            ArcRule::G2 => "G2",
            ArcRule::G3 => "G3",
            ArcRule::G4 => "G4",
            ArcRule::L1 => "L1",
            ArcRule::L2 => "L2",
            ArcRule::L3 => "L3",
        }
    }
}

/// Rules that produced an edge, split by arc direction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Provenance(u16);

impl Provenance {
    /// Rules whose arc runs from the smaller endpoint to the larger.
    pub fn forward(self) -> Vec<ArcRule> {
        ArcRule::ALL
            .iter()
            .copied()
            .filter(|r| self.0 & r.bit() != 0)
            .collect()
    }

    /// Rules whose arc runs from the larger endpoint to the smaller.
    pub fn backward(self) -> Vec<ArcRule> {
        ArcRule::ALL
            .iter()
            .copied()
            .filter(|r| (self.0 >> 7) & r.bit() != 0)
            .collect()
    }

    pub fn has(self, r: ArcRule) -> bool {
        (self.0 | (self.0 >> 7)) & r.bit() != 0
    }
}

/// A graph generated from an ordered tree, with per-edge rule provenance.
#[derive(Clone, Debug)]
pub struct GeneratedGraph {
    pub tree: OrderedTree,
    /// `None` for the legacy construction.
    pub h: Option<usize>,
    pub graph: Graph,
    provenance: Vec<Provenance>,
    arcs: usize,
}

type Arc = (usize, usize, ArcRule);

/// Arcs leaving `u` in the generated digraph, self-loops removed.
fn arcs_from(t: &OrderedTree, h: usize, u: usize, out: &mut Vec<Arc>) {
    let push_range = |out: &mut Vec<Arc>, r: std::ops::Range<usize>, rule| {
        out.extend(r.filter(|&w| w != u).map(|w| (u, w, rule)));
    };
    push_range(out, u + 1..u + t.nu(u), ArcRule::G1);
    if let Some(p) = t.parent(u) {
        let first = t.children(p)[0];
        push_range(out, first..u, ArcRule::G2);
        if let Some(lp) = t.left_cousin(p) {
            push_range(out, t.subtree_range(lp), ArcRule::G3);
        }
    }
    if h == 0 {
        return;
    }
    let apex = t.ancestor(u, h);
    let (l, r) = (t.left_cousin(apex), t.right_cousin(apex));
    for w in [Some(apex), l, r].into_iter().flatten() {
        if w != u {
            out.push((u, w, ArcRule::G4));
        }
    }
    let lo = l.unwrap_or(apex);
    let hi = r.map(|r| r + t.nu(r)).unwrap_or(apex + t.nu(apex));
    for d in t.level(apex) + 1..=t.level(u) {
        out.extend(
            t.level_slice(d, lo, hi)
                .iter()
                .filter(|&&w| w != u)
                .map(|&w| (u, w, ArcRule::G4)),
        );
    }
}

/// Whether `u -> w` is an arc of the `h`-generated digraph, without
/// materializing it.
pub fn has_arc(t: &OrderedTree, h: usize, u: usize, w: usize) -> bool {
    if u == w {
        return false;
    }
    if t.subtree_range(u).contains(&w) {
        return true;
    }
    if let Some(p) = t.parent(u) {
        if (t.children(p)[0]..u).contains(&w) {
            return true;
        }
        if t.left_cousin(p)
            .is_some_and(|lp| t.subtree_range(lp).contains(&w))
        {
            return true;
        }
    }
    if h == 0 {
        return false;
    }
    let apex = t.ancestor(u, h);
    let (l, r) = (t.left_cousin(apex), t.right_cousin(apex));
    if w == apex || l == Some(w) || r == Some(w) {
        return true;
    }
    let lo = l.unwrap_or(apex);
    let hi = r.map(|r| r + t.nu(r)).unwrap_or(apex + t.nu(apex));
    (lo..hi).contains(&w) && t.level(w) > t.level(apex) && t.level(w) <= t.level(u)
}

/// Whether `a` and `b` are adjacent in `G^h_T`.
pub fn adjacent(t: &OrderedTree, h: usize, a: usize, b: usize) -> bool {
    has_arc(t, h, a, b) || has_arc(t, h, b, a)
}

fn legacy_arcs_from(t: &OrderedTree, u: usize, out: &mut Vec<Arc>) {
    out.extend((u + 1..u + t.nu(u)).map(|w| (u, w, ArcRule::L1)));
    if let Some(p) = t.parent(u) {
        let first = t.children(p)[0];
        out.extend((first..u).map(|w| (u, w, ArcRule::L2)));
        if let Some(gp) = t.parent(p) {
            let sibs = t.children(gp);
            let i = sibs.iter().position(|&s| s == p).unwrap();
            if i > 0 {
                out.extend(t.subtree_range(sibs[i - 1]).map(|w| (u, w, ArcRule::L3)));
            }
        }
    }
}

impl GeneratedGraph {
    fn from_arcs(tree: OrderedTree, h: Option<usize>, per_vertex: Vec<Vec<Arc>>) -> Self {
        let n = tree.len();
        let arcs = per_vertex.iter().map(Vec::len).sum();
        let mut tagged: Vec<(usize, usize, u16)> = per_vertex
            .into_iter()
            .flatten()
            .map(|(a, b, r)| {
                if a < b {
                    (a, b, r.bit())
                } else {
                    (b, a, r.bit() << 7)
                }
            })
            .collect();
        tagged.par_sort_unstable();
        let mut edges = Vec::new();
        let mut provenance = Vec::new();
        for (a, b, m) in tagged {
            if edges.last() == Some(&(a, b)) {
                let p: &mut Provenance = provenance.last_mut().unwrap();
                p.0 |= m;
            } else {
                edges.push((a, b));
                provenance.push(Provenance(m));
            }
        }
        let graph = Graph::from_sorted_edges(n, edges);
        GeneratedGraph {
            tree,
            h,
            graph,
            provenance,
            arcs,
        }
    }

    pub fn len(&self) -> usize {
        self.tree.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tree.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    /// Arcs as emitted, one per (source, rule, target); an edge produced by
    /// several rules or in both directions counts each time.
    pub fn arc_count(&self) -> usize {
        self.arcs
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.graph.has_edge(a, b)
    }

    pub fn provenance(&self, a: usize, b: usize) -> Option<Provenance> {
        self.graph.edge_id(a, b).map(|i| self.provenance[i])
    }

    /// DOT text with rule tags on each edge.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph G {\n");
        for (i, &(a, b)) in self.graph.edges().iter().enumerate() {
            let p = self.provenance[i];
            let tag = |v: Vec<ArcRule>| v.iter().map(|r| r.name()).collect::<Vec<_>>().join(",");
            writeln!(
                s,
                "  {a} -- {b} [fwd=\"{}\", bwd=\"{}\"];",
                tag(p.forward()),
                tag(p.backward())
            )
            .unwrap();
        }
        s.push_str("}\n");
        s
    }
}

/// The graph generated by `t` with ancestor offset `h`.
pub fn generate(t: &OrderedTree, h: usize) -> GeneratedGraph {
    let per_vertex: Vec<Vec<Arc>> = (0..t.len())
        .into_par_iter()
        .map(|u| {
            let mut v = Vec::new();
            arcs_from(t, h, u, &mut v);
            v
        })
        .collect();
    GeneratedGraph::from_arcs(t.clone(), Some(h), per_vertex)
}

/// The legacy construction on the perfect binary tree with `k` levels.
pub fn generate_legacy(k: usize) -> GeneratedGraph {
    let t = OrderedTree::perfect_binary(k);
    let per_vertex: Vec<Vec<Arc>> = (0..t.len())
        .map(|u| {
            let mut v = Vec::new();
            legacy_arcs_from(&t, u, &mut v);
            v
        })
        .collect();
    GeneratedGraph::from_arcs(t, None, per_vertex)
}

/// The generated graph of the first `t` vertices. Equal to the induced
/// subgraph on that prefix (tested).
pub fn generate_prefix(tree: &OrderedTree, h: usize, t: usize) -> Result<GeneratedGraph> {
    Ok(generate(&tree.prefix(t)?, h))
}

/// Induced subgraph on a vertex set together with its shape.
#[derive(Clone, Debug)]
pub struct InducedView {
    pub vertices: Vec<usize>,
    pub graph: Graph,
    pub is_prefix: bool,
    pub is_interval: bool,
}

pub fn induced_subgraph(g: &GeneratedGraph, set: &[usize]) -> Result<InducedView> {
    let mut vs = set.to_vec();
    vs.sort_unstable();
    vs.dedup();
    if let Some(&m) = vs.last() {
        if m >= g.len() {
            return Err(Error::Precondition(format!("vertex {m} outside the graph")));
        }
    }
    let is_interval = vs.windows(2).all(|w| w[1] == w[0] + 1);
    let is_prefix = vs.first().is_none_or(|&f| f == 0) && is_interval;
    Ok(InducedView {
        graph: g.graph.induced(&vs),
        vertices: vs,
        is_prefix,
        is_interval,
    })
}

/// Outcome of checking that the merged tree's graph maps into the source.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MergeReport {
    pub merged_vertices: usize,
    pub checked_edges: usize,
    pub violations: Vec<(usize, usize)>,
}

/// Builds the merged tree over `us`, generates both graphs, and checks that
/// the identity plus new-root-to-last-top-vertex map preserves every edge.
pub fn verify_merge_embedding(t: &OrderedTree, us: &[usize], h: usize) -> Result<MergeReport> {
    let m = t.merge_subtrees(us)?;
    let first = t.parent(us[0]);
    let last = t.parent(*us.last().unwrap());
    let ok = match (first, last) {
        (Some(a), Some(b)) => a == b || t.left_cousin(b) == Some(a),
        _ => false,
    };
    if !ok {
        return Err(Error::Precondition(
            "parents of the end vertices are neither equal nor nearest cousins".into(),
        ));
    }
    let top = last.unwrap();
    let image = |x: usize| m.origin[x].unwrap_or(top);
    let gm = generate(&m.tree, h);
    let g = generate(t, h);
    let violations: Vec<(usize, usize)> = gm
        .graph
        .edges()
        .iter()
        .copied()
        .filter(|&(a, b)| !g.has_edge(image(a), image(b)))
        .collect();
    Ok(MergeReport {
        merged_vertices: m.tree.len(),
        checked_edges: gm.edge_count(),
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Direct transcription of the four rules with explicit set scans.
    fn naive(t: &OrderedTree, h: usize) -> Vec<(usize, usize)> {
        let n = t.len();
        let desc = |a: usize, b: usize| a != b && t.is_ancestor_or_self(a, b);
        let mut e = Vec::new();
        for u in 0..n {
            let mut tgt = Vec::new();
            for w in 0..n {
                if desc(u, w) {
                    tgt.push(w);
                }
                if let Some(p) = t.parent(u) {
                    for &s in t.children(p) {
                        if s < u && (s == w || desc(s, w)) {
                            tgt.push(w);
                        }
                    }
                    if let Some(lp) = t.left_cousin(p) {
                        if lp == w || desc(lp, w) {
                            tgt.push(w);
                        }
                    }
                }
                if h == 0 {
                    continue;
                }
                let a = t.ancestor(u, h);
                let trio: Vec<usize> = [t.left_cousin(a), Some(a), t.right_cousin(a)]
                    .into_iter()
                    .flatten()
                    .collect();
                if trio.contains(&w) {
                    tgt.push(w);
                }
                if trio.iter().any(|&x| desc(x, w)) && t.level(w) <= t.level(u) {
                    tgt.push(w);
                }
            }
            e.extend(tgt.into_iter().filter(|&w| w != u).map(|w| (u, w)));
        }
        let g = Graph::from_edges(n, e);
        g.edges().to_vec()
    }

    #[test]
    fn b2_is_complete() {
        let g = generate(&OrderedTree::perfect_binary(2), 0);
        assert_eq!(g.edge_count(), 21);
    }

    #[test]
    fn single_vertex() {
        let g = generate(&OrderedTree::single(), 3);
        assert_eq!(g.edge_count(), 0);
        assert_eq!(g.arc_count(), 0);
    }

    #[test]
    fn matches_naive_rules() {
        for k in 0..5 {
            let t = OrderedTree::perfect_binary(k);
            for h in 0..4 {
                assert_eq!(
                    generate(&t, h).graph.edges(),
                    naive(&t, h).as_slice(),
                    "k={k} h={h}"
                );
            }
        }
    }

    #[test]
    fn adjacency_predicate_matches_generated() {
        let mut trees = vec![OrderedTree::perfect_binary(4)];
        trees.push(crate::ks::build_tk(3).unwrap().tree);
        for t in &trees {
            for h in 0..4 {
                let g = generate(t, h);
                for a in 0..t.len() {
                    for b in 0..t.len() {
                        assert_eq!(adjacent(t, h, a, b), g.has_edge(a, b), "h={h} {a} {b}");
                    }
                }
            }
        }
    }

    #[test]
    fn prefix_generation_equals_induced() {
        let t = OrderedTree::perfect_binary(4);
        let g = generate(&t, 2);
        for p in 1..=t.len() {
            let direct = generate_prefix(&t, 2, p).unwrap();
            let keep: Vec<usize> = (0..p).collect();
            assert_eq!(direct.graph, g.graph.induced(&keep), "prefix {p}");
        }
    }

    #[test]
    fn legacy_counterexample() {
        let g = generate_legacy(3);
        // x1..x11 are ids 0..10; the window x6..x11 is ids 5..10
        let window: Vec<usize> = (5..11).collect();
        let sub = g.graph.induced(&window);
        assert_eq!(sub.edge_count(), 12);
        let missing: Vec<(usize, usize)> = (0..6)
            .flat_map(|a| (a + 1..6).map(move |b| (a, b)))
            .filter(|&(a, b)| !sub.has_edge(a, b))
            .collect();
        // x6x11, x7x11, x8x11
        assert_eq!(missing, vec![(0, 5), (1, 5), (2, 5)]);
        let fixed = generate(&OrderedTree::perfect_binary(3), 0);
        for (a, b) in [(5, 10), (6, 10), (7, 10)] {
            assert!(fixed.provenance(a, b).unwrap().has(ArcRule::G3));
        }
        for l in 2..=4 {
            let g = generate_legacy(l);
            assert_eq!(g.graph.induced(&[0, 1, 2, 3, 4, 5]).edge_count(), 15);
        }
        assert_eq!(generate_legacy(0).edge_count(), 0);
    }

    #[test]
    fn provenance_directions() {
        let t = OrderedTree::perfect_binary(2);
        let g = generate(&t, 0);
        let p = g.provenance(0, 2).unwrap();
        assert_eq!(p.forward(), vec![ArcRule::G1]);
        // c=2 and d=3 are siblings: only G2, from d
        let p = g.provenance(2, 3).unwrap();
        assert_eq!(p.backward(), vec![ArcRule::G2]);
        assert!(p.forward().is_empty());
        let p = generate(&t, 1).provenance(2, 3).unwrap();
        assert!(p.forward().contains(&ArcRule::G4));
    }

    #[test]
    fn edge_list_sorted() {
        let g = generate(&OrderedTree::perfect_binary(1), 0);
        assert_eq!(g.graph.to_edge_list(), "0 1\n0 2\n1 2\n");
    }

    #[test]
    fn merge_checks() {
        let b3 = OrderedTree::perfect_binary(3);
        let r = verify_merge_embedding(&b3, &[2, 5], 0).unwrap();
        assert!(r.violations.is_empty());
        // parents 5 and 9 are nearest cousins
        let r = verify_merge_embedding(&b3, &[6, 7, 10], 0).unwrap();
        assert!(r.violations.is_empty());
        // parents 2 and 9 are not
        assert!(verify_merge_embedding(&b3, &[3, 4, 6, 7, 10, 11], 0).is_err());
    }
}
