//! Edge counts of the binary-tree construction against the T_k one at
//! n = |T_k|.

use treeverse::graph::generate_prefix;
use treeverse::ks::{prefix_universal_graph, tk_size};
use treeverse::OrderedTree;

fn main() -> treeverse::Result<()> {
    let kmax: usize = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(7);
    println!(
        "{:>8} {:>10} {:>10} {:>7} {:>7} {:>7}",
        "n", "binary", "T_k", "ratio", "c_bin", "c_tk"
    );
    for k in 2..=kmax {
        let n = tk_size(k) as usize;
        let l = (usize::BITS - n.leading_zeros()) as usize;
        let old = generate_prefix(&OrderedTree::perfect_binary(l), 0, n)?.edge_count();
        let new = prefix_universal_graph(n)?.graph.edge_count();
        let nl = n as f64 * (n as f64).log2();
        println!(
            "{n:>8} {old:>10} {new:>10} {:>7.3} {:>7.3} {:>7.3}",
            new as f64 / old as f64,
            old as f64 / nl,
            new as f64 / nl
        );
    }
    Ok(())
}
