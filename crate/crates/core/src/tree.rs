//! Rooted, ordered trees addressed by DFS preorder index.
//!
//! Vertex `u` owns the index interval `[u, u + nu(u))`, so subtree tests are
//! range checks and the first `t` vertices always form a rooted subtree.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderedTree {
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    level: Vec<usize>,
    nu: Vec<usize>,
    levels: Vec<Vec<usize>>,
    pos_in_level: Vec<usize>,
}

/// Serialized form: `{"n", "parents", "children"}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeJson {
    pub n: usize,
    pub parents: Vec<Option<usize>>,
    pub children: Vec<Vec<usize>>,
}

/// Result of [`OrderedTree::merge_subtrees`]: `origin[x]` is the source
/// vertex of `x`, `None` for the new root.
#[derive(Clone, Debug)]
pub struct Merged {
    pub tree: OrderedTree,
    pub origin: Vec<Option<usize>>,
}

impl OrderedTree {
    /// Builds from a child-list description rooted at `root`. Vertices are
    /// relabelled into DFS preorder; the returned vector maps old ids to new.
    pub fn from_children(root: usize, children: &[Vec<usize>]) -> Result<(Self, Vec<usize>)> {
        let n = children.len();
        if root >= n {
            return Err(Error::InvalidTree(format!("root {root} out of range")));
        }
        let mut relabel = vec![usize::MAX; n];
        let mut order = Vec::with_capacity(n);
        let mut stack = vec![root];
        while let Some(u) = stack.pop() {
            if relabel[u] != usize::MAX {
                return Err(Error::InvalidTree(format!("vertex {u} reached twice")));
            }
            relabel[u] = order.len();
            order.push(u);
            for &c in children[u].iter().rev() {
                if c >= n {
                    return Err(Error::InvalidTree(format!("child {c} out of range")));
                }
                stack.push(c);
            }
        }
        if order.len() != n {
            return Err(Error::InvalidTree(
                "vertices unreachable from the root".into(),
            ));
        }
        let new_children: Vec<Vec<usize>> = order
            .iter()
            .map(|&u| children[u].iter().map(|&c| relabel[c]).collect())
            .collect();
        Ok((Self::from_dfs_children(new_children), relabel))
    }

    /// Builds from a parent array; children keep increasing id order.
    pub fn from_parents(parents: &[Option<usize>]) -> Result<(Self, Vec<usize>)> {
        let n = parents.len();
        let mut children = vec![Vec::new(); n];
        let mut root = None;
        for (u, p) in parents.iter().enumerate() {
            match *p {
                None if root.is_some() => {
                    return Err(Error::InvalidTree("more than one root".into()))
                }
                None => root = Some(u),
                Some(p) if p >= n => {
                    return Err(Error::InvalidTree(format!("parent {p} out of range")))
                }
                Some(p) => children[p].push(u),
            }
        }
        let root = root.ok_or_else(|| Error::InvalidTree("no root".into()))?;
        Self::from_children(root, &children)
    }

    /// Children lists must already be in DFS preorder.
    fn from_dfs_children(children: Vec<Vec<usize>>) -> Self {
        let n = children.len();
        let mut parent = vec![None; n];
        let mut level = vec![0; n];
        for u in 0..n {
            for &c in &children[u] {
                parent[c] = Some(u);
                level[c] = level[u] + 1;
            }
        }
        let mut nu = vec![1; n];
        for u in (0..n).rev() {
            if let Some(p) = parent[u] {
                nu[p] += nu[u];
            }
        }
        let height = level.iter().copied().max().unwrap_or(0);
        let mut levels = vec![Vec::new(); if n == 0 { 0 } else { height + 1 }];
        let mut pos_in_level = vec![0; n];
        for u in 0..n {
            pos_in_level[u] = levels[level[u]].len();
            levels[level[u]].push(u);
        }
        OrderedTree {
            parent,
            children,
            level,
            nu,
            levels,
            pos_in_level,
        }
    }

    pub fn single() -> Self {
        Self::from_dfs_children(vec![Vec::new()])
    }

    /// Perfect binary tree with `k` levels below the root.
    pub fn perfect_binary(k: usize) -> Self {
        let n = (1usize << (k + 1)) - 1;
        let mut children = vec![Vec::new(); n];
        // preorder: left subtree of u starts at u+1, right at u+1+size/2
        fn fill(children: &mut [Vec<usize>], u: usize, depth: usize) {
            if depth == 0 {
                return;
            }
            let half = (1usize << depth) - 1;
            let (a, b) = (u + 1, u + 1 + half);
            children[u] = vec![a, b];
            fill(children, a, depth - 1);
            fill(children, b, depth - 1);
        }
        fill(&mut children, 0, k);
        Self::from_dfs_children(children)
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn parent(&self, u: usize) -> Option<usize> {
        self.parent[u]
    }

    pub fn children(&self, u: usize) -> &[usize] {
        &self.children[u]
    }

    pub fn level(&self, u: usize) -> usize {
        self.level[u]
    }

    /// Size of the subtree rooted at `u`.
    pub fn nu(&self, u: usize) -> usize {
        self.nu[u]
    }

    /// Index of the deepest level; 0 for a single vertex.
    pub fn height(&self) -> usize {
        self.levels.len().saturating_sub(1)
    }

    pub fn level_vertices(&self, d: usize) -> &[usize] {
        self.levels.get(d).map(|v| v.as_slice()).unwrap_or(&[])
    }

    /// `[u, u + nu(u))`.
    pub fn subtree_range(&self, u: usize) -> std::ops::Range<usize> {
        u..u + self.nu[u]
    }

    pub fn is_ancestor_or_self(&self, a: usize, b: usize) -> bool {
        a <= b && b < a + self.nu[a]
    }

    /// Nearest left cousin: the previous vertex on the same level.
    pub fn left_cousin(&self, u: usize) -> Option<usize> {
        let p = self.pos_in_level[u];
        (p > 0).then(|| self.levels[self.level[u]][p - 1])
    }

    pub fn right_cousin(&self, u: usize) -> Option<usize> {
        let lv = &self.levels[self.level[u]];
        lv.get(self.pos_in_level[u] + 1).copied()
    }

    /// The `i`-th vertex on the path to the root, saturating at the root.
    pub fn ancestor(&self, mut u: usize, i: usize) -> usize {
        for _ in 0..i {
            match self.parent[u] {
                Some(p) => u = p,
                None => break,
            }
        }
        u
    }

    /// Vertices of level `d` inside the DFS index range `[lo, hi)`.
    pub fn level_slice(&self, d: usize, lo: usize, hi: usize) -> &[usize] {
        let lv = self.level_vertices(d);
        let a = lv.partition_point(|&x| x < lo);
        let b = lv.partition_point(|&x| x < hi);
        &lv[a..b]
    }

    pub fn leaves(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&u| self.children[u].is_empty())
            .collect()
    }

    /// The tree induced on the first `t` vertices in DFS order.
    pub fn prefix(&self, t: usize) -> Result<Self> {
        if t == 0 || t > self.len() {
            return Err(Error::Precondition(format!(
                "prefix size {t} not in [1, {}]",
                self.len()
            )));
        }
        let children = (0..t)
            .map(|u| {
                self.children[u]
                    .iter()
                    .copied()
                    .filter(|&c| c < t)
                    .collect()
            })
            .collect();
        Ok(Self::from_dfs_children(children))
    }

    /// The subtree rooted at `u`, relabelled so `u` becomes 0.
    pub fn subtree(&self, u: usize) -> Self {
        let children = self
            .subtree_range(u)
            .map(|x| self.children[x].iter().map(|&c| c - u).collect())
            .collect();
        Self::from_dfs_children(children)
    }

    /// Adds a new root above consecutive cousins `us` (each `us[i+1]` is the
    /// nearest right cousin of `us[i]`) keeping their full subtrees.
    pub fn merge_subtrees(&self, us: &[usize]) -> Result<Merged> {
        if us.is_empty() {
            return Err(Error::Precondition("empty merge list".into()));
        }
        for w in us.windows(2) {
            if self.right_cousin(w[0]) != Some(w[1]) {
                return Err(Error::Precondition(format!(
                    "{} is not the nearest right cousin of {}",
                    w[1], w[0]
                )));
            }
        }
        let total: usize = 1 + us.iter().map(|&u| self.nu[u]).sum::<usize>();
        let mut origin = Vec::with_capacity(total);
        origin.push(None);
        let mut children = vec![Vec::new(); total];
        for &u in us {
            let base = origin.len();
            children[0].push(base);
            for x in self.subtree_range(u) {
                origin.push(Some(x));
                children[base + x - u] = self.children[x].iter().map(|&c| base + c - u).collect();
            }
        }
        Ok(Merged {
            tree: Self::from_dfs_children(children),
            origin,
        })
    }

    pub fn to_json(&self) -> TreeJson {
        TreeJson {
            n: self.len(),
            parents: self.parent.clone(),
            children: self.children.clone(),
        }
    }

    /// Parses the JSON form, normalizing to DFS order. The relabelling is
    /// returned alongside.
    pub fn from_json(j: &TreeJson) -> Result<(Self, Vec<usize>)> {
        if j.parents.len() != j.n || j.children.len() != j.n {
            return Err(Error::Input("array lengths disagree with n".into()));
        }
        if j.n == 0 {
            return Err(Error::Input("empty tree".into()));
        }
        for (u, cs) in j.children.iter().enumerate() {
            for &c in cs {
                if c >= j.n || j.parents[c] != Some(u) {
                    return Err(Error::Input(format!(
                        "child list of {u} disagrees with parents"
                    )));
                }
            }
        }
        let listed: usize = j.children.iter().map(|c| c.len()).sum();
        if listed + 1 != j.n {
            return Err(Error::Input(
                "children lists do not cover every non-root".into(),
            ));
        }
        let root = j
            .parents
            .iter()
            .position(|p| p.is_none())
            .ok_or_else(|| Error::Input("no root".into()))?;
        Self::from_children(root, &j.children)
    }

    /// Undirected tree edges `(parent, child)`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (1..self.len())
            .filter_map(|u| self.parent[u].map(|p| (p, u)))
            .collect()
    }
}
