//! Recursion trees over a guest tree: every node's image dominates the images
//! of its descendants, and different child subtrees sit in different
//! components of the guest minus the node.
//!
//! Such a tree turns a tree embedding into an embedding of anything that
//! decomposes along the guest (see [`crate::treewidth`]).

use std::collections::HashSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::forest::Forest;
use crate::graph::adjacent;
use crate::tree::OrderedTree;

/// A rooted tree on the guest's own vertex ids.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Taux {
    pub root: usize,
    pub parents: Vec<Option<usize>>,
}

impl Taux {
    pub fn len(&self) -> usize {
        self.parents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parents.is_empty()
    }

    pub fn children(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.len()];
        for (v, p) in self.parents.iter().enumerate() {
            if let Some(p) = p {
                out[*p].push(v);
            }
        }
        out
    }

    pub fn depths(&self) -> Vec<usize> {
        let mut d = vec![usize::MAX; self.len()];
        for v in 0..self.len() {
            let mut path = vec![v];
            let mut u = v;
            while d[u] == usize::MAX {
                match self.parents[u] {
                    Some(p) => {
                        u = p;
                        path.push(u);
                    }
                    None => {
                        d[u] = 0;
                        break;
                    }
                }
            }
            let base = d[u];
            for (i, &x) in path.iter().rev().enumerate() {
                if d[x] == usize::MAX {
                    d[x] = base + i;
                }
            }
        }
        d
    }

    pub fn is_ancestor_or_self(&self, a: usize, mut b: usize) -> bool {
        loop {
            if a == b {
                return true;
            }
            match self.parents[b] {
                Some(p) => b = p,
                None => return false,
            }
        }
    }

    /// As an [`OrderedTree`] (renumbered to preorder) with the map from
    /// guest id to tree vertex.
    pub fn to_tree(&self) -> Result<(OrderedTree, Vec<usize>)> {
        OrderedTree::from_parents(&self.parents)
    }
}

/// Violations found by [`check_taux`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TauxReport {
    /// `(w, d)`: `d` below `w` but `map[w]`, `map[d]` not adjacent.
    pub domination: Vec<(usize, usize)>,
    /// `(y, a, b)`: `a`, `b` under different children of `y` but joined in
    /// the guest minus `y`.
    pub separation: Vec<(usize, usize, usize)>,
    /// Guest edges whose ends are not in ancestor relation.
    pub uncovered_edges: Vec<(usize, usize)>,
}

impl TauxReport {
    pub fn ok(&self) -> bool {
        self.domination.is_empty() && self.separation.is_empty() && self.uncovered_edges.is_empty()
    }
}

/// Checks the three invariants against `G^2_host`.
pub fn check_taux(host: &OrderedTree, guest: &Forest, map: &[usize], taux: &Taux) -> TauxReport {
    let mut rep = TauxReport::default();
    let n = guest.len();
    for d in 0..n {
        let mut w = d;
        while let Some(p) = taux.parents[w] {
            if !adjacent(host, 2, map[p], map[d]) {
                rep.domination.push((p, d));
            }
            w = p;
        }
    }
    let kids = taux.children();
    for y in 0..n {
        if kids[y].len() < 2 {
            continue;
        }
        let (comp, _) = guest.components_without(y);
        let mut owner: Vec<Option<(usize, usize)>> = vec![None; n];
        for &c in &kids[y] {
            let mut stack = vec![c];
            while let Some(v) = stack.pop() {
                let k = comp[v];
                match owner[k] {
                    Some((other, a)) if other != c => rep.separation.push((y, a, v)),
                    None => owner[k] = Some((c, v)),
                    _ => {}
                }
                stack.extend(kids[v].iter().copied());
            }
        }
    }
    for (a, b) in guest.edges() {
        if !taux.is_ancestor_or_self(a, b) && !taux.is_ancestor_or_self(b, a) {
            rep.uncovered_edges.push((a, b));
        }
    }
    rep
}

struct Search<'a> {
    host: &'a OrderedTree,
    guest: &'a Forest,
    map: &'a [usize],
    parents: Vec<Option<usize>>,
    dead: HashSet<Vec<usize>>,
    budget: usize,
}

impl Search<'_> {
    /// Components of `set - y` in the guest, each sorted.
    fn split(&self, set: &[usize], y: usize) -> Vec<Vec<usize>> {
        let inside: HashSet<usize> = set.iter().copied().collect();
        let mut seen = HashSet::from([y]);
        let mut out = Vec::new();
        for &s in set {
            if seen.contains(&s) {
                continue;
            }
            seen.insert(s);
            let mut comp = vec![s];
            let mut i = 0;
            while i < comp.len() {
                for &x in self.guest.neighbors(comp[i]) {
                    if inside.contains(&x) && seen.insert(x) {
                        comp.push(x);
                    }
                }
                i += 1;
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Root of a valid tree on the connected `set`, or `None`.
    fn solve(&mut self, set: &[usize]) -> Result<Option<usize>> {
        if set.len() == 1 {
            return Ok(Some(set[0]));
        }
        if self.dead.contains(set) {
            return Ok(None);
        }
        let mut cands: Vec<usize> = set
            .iter()
            .copied()
            .filter(|&y| {
                set.iter()
                    .all(|&s| s == y || adjacent(self.host, 2, self.map[y], self.map[s]))
            })
            .collect();
        cands.sort_by_key(|&y| (self.host.level(self.map[y]), self.map[y]));
        'cand: for y in cands {
            if self.budget == 0 {
                return Err(Error::Budget(
                    "recursion-tree search ran out of steps".into(),
                ));
            }
            self.budget -= 1;
            for comp in self.split(set, y) {
                match self.solve(&comp)? {
                    Some(r) => self.parents[r] = Some(y),
                    None => continue 'cand,
                }
            }
            return Ok(Some(y));
        }
        self.dead.insert(set.to_vec());
        Ok(None)
    }
}

/// Builds a recursion tree for the embedding `map` of the tree `guest` into
/// `G^2_host`, preferring roots whose image has the lowest level.
pub fn build_taux(host: &OrderedTree, guest: &Forest, map: &[usize]) -> Result<Taux> {
    let n = guest.len();
    if n == 0 || !guest.is_tree() {
        return Err(Error::Precondition(
            "recursion tree needs a nonempty guest tree".into(),
        ));
    }
    let mut s = Search {
        host,
        guest,
        map,
        parents: vec![None; n],
        dead: HashSet::new(),
        budget: 64 * n * n + 1024,
    };
    let all: Vec<usize> = (0..n).collect();
    let root = s.solve(&all)?.ok_or_else(|| {
        Error::Invariant("no dominating recursion tree exists for this map".into())
    })?;
    s.parents[root] = None;
    Ok(Taux {
        root,
        parents: s.parents,
    })
}
