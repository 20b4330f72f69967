//! Builds the n-vertex universal graph for trees and checks its edge bound.
//!
//! cargo run --release --example build_universal -- 500

use treeverse::bounds::edge_bound_holds;
use treeverse::ks::prefix_universal_graph;

fn main() -> treeverse::Result<()> {
    let n: usize = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(500);
    let u = prefix_universal_graph(n)?;
    let s = u.stats();
    println!(
        "n = {n}, cut from T_{} ({} vertices)",
        u.k,
        treeverse::ks::tk_size(u.k)
    );
    println!("{s:#?}");
    let e = u.graph.edge_count() as u64;
    println!(
        "edges / (n log2 n) = {:.3}",
        e as f64 / (n as f64 * (n as f64).log2().max(1.0))
    );
    println!(
        "within 14/5 n log2 n + 600 n: {}",
        edge_bound_holds(e, n as u64)
    );
    Ok(())
}
