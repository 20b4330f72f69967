//! File formats shared by the command line and the examples.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forest::Forest;
use crate::graph::{generate, GeneratedGraph, Graph};
use crate::tree::{OrderedTree, TreeJson};
use crate::treewidth::TreeDecomposition;

/// A generated host: the base tree travels with the edges so embedding can
/// rebuild the exact graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HostFile {
    pub family: String,
    pub k: usize,
    /// Absent for the legacy construction.
    pub h: Option<usize>,
    pub tree: TreeJson,
    pub edges: Vec<(usize, usize)>,
}

impl HostFile {
    pub fn from_graph(family: &str, k: usize, g: &GeneratedGraph) -> Self {
        HostFile {
            family: family.into(),
            k,
            h: g.h,
            tree: g.tree.to_json(),
            edges: g.graph.edges().to_vec(),
        }
    }

    /// Rebuilds the graph from the tree and checks it matches the stored
    /// edges.
    pub fn graph(&self) -> Result<GeneratedGraph> {
        let (tree, relabel) = OrderedTree::from_json(&self.tree)?;
        if relabel.iter().enumerate().any(|(i, &r)| i != r) {
            return Err(Error::Input("host tree is not in DFS order".into()));
        }
        let g = match self.h {
            Some(h) => generate(&tree, h),
            None => return Err(Error::Input("legacy hosts cannot be embedded into".into())),
        };
        if g.graph.edges() != self.edges.as_slice() {
            return Err(Error::Input(
                "stored edges disagree with the host tree".into(),
            ));
        }
        Ok(g)
    }
}

/// `{"n", "edges"}`, optionally with a decomposition and the seed that made
/// it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphFile {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<TreeDecomposition>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl GraphFile {
    pub fn graph(&self) -> Result<Graph> {
        if let Some(&(a, b)) = self
            .edges
            .iter()
            .find(|&&(a, b)| a >= self.n || b >= self.n)
        {
            return Err(Error::Input(format!(
                "edge ({a},{b}) outside {} vertices",
                self.n
            )));
        }
        Ok(Graph::from_edges(self.n, self.edges.iter().copied()))
    }

    pub fn forest(&self) -> Result<Forest> {
        if let Some(&(a, b)) = self
            .edges
            .iter()
            .find(|&&(a, b)| a >= self.n || b >= self.n)
        {
            return Err(Error::Input(format!(
                "edge ({a},{b}) outside {} vertices",
                self.n
            )));
        }
        Forest::from_edges(self.n, &self.edges)
    }
}

/// Reads a guest given either as `{"n", "edges"}` or as a tree
/// `{"n", "parents", "children"}` (ids kept as given).
pub fn parse_guest(text: &str) -> Result<Forest> {
    if let Ok(g) = serde_json::from_str::<GraphFile>(text) {
        return g.forest();
    }
    let t: TreeJson =
        serde_json::from_str(text).map_err(|e| Error::Input(format!("guest: {e}")))?;
    OrderedTree::from_json(&t)?;
    let edges: Vec<(usize, usize)> = t
        .parents
        .iter()
        .enumerate()
        .filter_map(|(u, p)| p.map(|p| (p, u)))
        .collect();
    Forest::from_edges(t.n, &edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn host_round_trip() {
        let g = generate(&OrderedTree::perfect_binary(3), 2);
        let f = HostFile::from_graph("bk", 3, &g);
        let text = serde_json::to_string(&f).unwrap();
        let back: HostFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.graph().unwrap().graph, g.graph);
        assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }

    #[test]
    fn guest_formats() {
        let a = parse_guest(r#"{"n":3,"edges":[[0,1],[1,2]]}"#).unwrap();
        let b = parse_guest(r#"{"n":3,"parents":[null,0,1],"children":[[1],[2],[]]}"#).unwrap();
        assert_eq!(a.edges(), b.edges());
        assert!(parse_guest(r#"{"n":2,"edges":[[0,5]]}"#).is_err());
    }
}
