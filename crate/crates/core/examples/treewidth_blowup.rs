//! Graphs of treewidth k inside a blown-up universal graph: generate a
//! partial k-tree, shrink its decomposition, and map it.

use treeverse::treewidth::{
    build_universal_tw, embed_tw, gen_partial_ktree, normalize_decomposition, validate_tw_embedding,
};

fn main() -> treeverse::Result<()> {
    let (n, k, seed) = (60, 3, 2024);
    let (h, witness) = gen_partial_ktree(n, k, seed)?;
    let d = normalize_decomposition(&h, &witness, k)?;
    println!(
        "{} edges; witness {} bags -> {} bags of width {}",
        h.edge_count(),
        witness.len(),
        d.len(),
        d.width()
    );

    let g = build_universal_tw(n, k)?;
    println!("{:#?}", g.stats());
    let e = embed_tw(&h, &d, &g)?;
    let rep = validate_tw_embedding(&h, &g, &e.pi);
    println!("embedding valid: {}", rep.ok());
    for v in 0..5 {
        let (x, slot) = g.split(e.pi[v]);
        println!("  vertex {v} -> base {x}, slot {slot}");
    }
    Ok(())
}
