//! The legacy construction: the window x6..x11 of G(3) is not complete, so
//! it is not a smaller copy of the construction, although it still holds
//! every 6-vertex tree.

use treeverse::graph::generate_legacy;
use treeverse::oracle::verify_universal_bruteforce;

fn main() -> treeverse::Result<()> {
    let g = generate_legacy(3);
    let window: Vec<usize> = (5..11).collect();
    let local = g.graph.induced(&window);
    println!("edges in x6..x11: {} of 15", local.edge_count());
    for a in 0..6 {
        for b in a + 1..6 {
            if !local.has_edge(a, b) {
                println!("  missing x{}x{}", a + 6, b + 6);
            }
        }
    }
    let r = verify_universal_bruteforce(&local, 6)?;
    println!(
        "6-vertex trees found: {}/{}",
        r.classes - r.oracle_failures.len(),
        r.classes
    );
    Ok(())
}
