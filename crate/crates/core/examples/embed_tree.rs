//! Embeds a random tree into the universal graph of its order and shows
//! which recursion branches it went through.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use treeverse::embed::{embed_traced, validate_embedding};
use treeverse::ks::prefix_universal_graph;
use treeverse::Forest;

fn main() -> treeverse::Result<()> {
    let n: usize = 120;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let edges: Vec<_> = (1..n)
        .map(|i| (rng.gen_range(i.saturating_sub(5)..i), i))
        .collect();
    let guest = Forest::from_edges(n, &edges)?;

    let host = prefix_universal_graph(n)?;
    let (e, trace) = embed_traced(&host.graph.tree, &guest, 0, 1)?;
    let report = validate_embedding(&host.graph, &guest, &e.map);

    println!(
        "guest vertex 0 -> host {} (level {})",
        e.map[0],
        host.graph.tree.level(e.map[0])
    );
    println!(
        "valid: {}, recursion depth {}",
        report.ok(),
        trace.max_depth
    );
    for (step, count) in trace.step_counts() {
        println!("  {step:>18}: {count}");
    }
    Ok(())
}
