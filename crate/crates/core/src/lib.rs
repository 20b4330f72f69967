//! Sparse universal graphs for trees, built from ordered trees with bounded
//! subtree imbalance, plus the blow-up for bounded treewidth and exhaustive
//! checkers for small sizes.

pub mod bounds;
pub mod embed;
pub mod error;
pub mod forest;
pub mod graph;
pub mod io;
pub mod ks;
pub mod oracle;
pub mod splitter;
pub mod taux;
pub mod tree;
pub mod treewidth;

pub use error::{Error, Result};
pub use forest::Forest;
pub use graph::{generate, generate_legacy, ArcRule, GeneratedGraph, Graph};
pub use tree::OrderedTree;
