//! Undirected forests used as embedding guests.

use crate::error::{Error, Result};
use crate::tree::OrderedTree;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Forest {
    adj: Vec<Vec<usize>>,
}

impl Forest {
    /// Fails if the edges contain a cycle, a loop, or an out-of-range end.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut dsu: Vec<usize> = (0..n).collect();
        fn find(d: &mut [usize], mut x: usize) -> usize {
            while d[x] != x {
                d[x] = d[d[x]];
                x = d[x];
            }
            x
        }
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::Input(format!("edge ({a},{b}) out of range")));
            }
            let (ra, rb) = (find(&mut dsu, a), find(&mut dsu, b));
            if ra == rb {
                return Err(Error::Input(format!("edge ({a},{b}) closes a cycle")));
            }
            dsu[ra] = rb;
            adj[a].push(b);
            adj[b].push(a);
        }
        for l in &mut adj {
            l.sort_unstable();
        }
        Ok(Forest { adj })
    }

    pub fn from_tree(t: &OrderedTree) -> Self {
        Self::from_edges(t.len(), &t.edges()).expect("tree edges form a forest")
    }

    pub fn edgeless(n: usize) -> Self {
        Forest {
            adj: vec![Vec::new(); n],
        }
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adj[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adj[u].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a].binary_search(&b).is_ok()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (u, l) in self.adj.iter().enumerate() {
            out.extend(l.iter().filter(|&&w| w > u).map(|&w| (u, w)));
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn is_tree(&self) -> bool {
        !self.is_empty() && self.edge_count() + 1 == self.len()
    }

    /// Component id per vertex plus the number of components, ids in order
    /// of smallest member.
    pub fn components(&self) -> (Vec<usize>, usize) {
        self.components_without(usize::MAX)
    }

    /// Components of the forest with `cut` deleted; `cut` gets `usize::MAX`.
    pub fn components_without(&self, cut: usize) -> (Vec<usize>, usize) {
        let n = self.len();
        let mut comp = vec![usize::MAX; n];
        let mut count = 0;
        let mut stack = Vec::new();
        for s in 0..n {
            if s == cut || comp[s] != usize::MAX {
                continue;
            }
            comp[s] = count;
            stack.push(s);
            while let Some(u) = stack.pop() {
                for &w in &self.adj[u] {
                    if w != cut && comp[w] == usize::MAX {
                        comp[w] = count;
                        stack.push(w);
                    }
                }
            }
            count += 1;
        }
        (comp, count)
    }

    /// Induced subforest on `keep` (in the given order); vertex `i` of the
    /// result is `keep[i]`.
    pub fn induced(&self, keep: &[usize]) -> Forest {
        let mut idx = vec![usize::MAX; self.len()];
        for (i, &u) in keep.iter().enumerate() {
            idx[u] = i;
        }
        let adj = keep
            .iter()
            .map(|&u| {
                let mut l: Vec<usize> = self.adj[u]
                    .iter()
                    .filter(|&&w| idx[w] != usize::MAX)
                    .map(|&w| idx[w])
                    .collect();
                l.sort_unstable();
                l
            })
            .collect();
        Forest { adj }
    }

    /// Connects the components into a single tree by chaining the smallest
    /// vertex of each component to the smallest vertex of the next one.
    /// Returns the tree and the added edges.
    pub fn chained(&self) -> (Forest, Vec<(usize, usize)>) {
        let (comp, count) = self.components();
        let mut reps = vec![usize::MAX; count];
        for (u, &c) in comp.iter().enumerate() {
            if reps[c] == usize::MAX {
                reps[c] = u;
            }
        }
        let added: Vec<(usize, usize)> = reps.windows(2).map(|w| (w[0], w[1])).collect();
        let mut all = self.edges();
        all.extend(added.iter().copied());
        (
            Forest::from_edges(self.len(), &all).expect("chaining keeps acyclicity"),
            added,
        )
    }

    /// Leaves (degree exactly one).
    pub fn leaves(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&u| self.adj[u].len() == 1)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_cycles() {
        assert!(Forest::from_edges(3, &[(0, 1), (1, 2), (2, 0)]).is_err());
        assert!(Forest::from_edges(2, &[(0, 0)]).is_err());
    }

    #[test]
    fn components_and_cut() {
        let f = Forest::from_edges(6, &[(0, 1), (1, 2), (1, 3), (4, 5)]).unwrap();
        assert_eq!(f.components().1, 2);
        let (c, k) = f.components_without(1);
        assert_eq!(k, 4);
        assert_eq!(c[1], usize::MAX);
        let (t, added) = f.chained();
        assert!(t.is_tree());
        assert_eq!(added, vec![(0, 4)]);
    }
}
