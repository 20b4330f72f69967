//! Exhaustive checks: every tree up to 10 vertices through the embedder
//! (and up to 8 through backtracking), then every window of G^2_{T_3}.

use treeverse::ks::{build_tk, prefix_universal_graph};
use treeverse::oracle::{verify_interval_universal, verify_universal};

fn main() -> treeverse::Result<()> {
    for n in 1..=10 {
        let host = prefix_universal_graph(n)?;
        let r = verify_universal(&host.graph, n, 8)?;
        println!("n={n:>2}: {:>3} trees, ok {}", r.classes, r.ok());
    }
    let g = treeverse::generate(&build_tk(3)?.tree, 2);
    let r = verify_interval_universal(&g, 6, 6)?;
    println!(
        "G^2_T3 windows: {} windows, {} checks, {} failures",
        r.windows,
        r.checks,
        r.failures.len()
    );
    Ok(())
}
