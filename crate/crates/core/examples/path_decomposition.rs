//! Bags made of a leaf and its neighbours form a path decomposition of the
//! binary-tree construction; prints widths and per-level occupancy.

use treeverse::treewidth::{level_occupancy, path_decomposition_gb, validate_decomposition};

fn main() -> treeverse::Result<()> {
    for l in 1..=7 {
        let (g, d) = path_decomposition_gb(l)?;
        let rep = validate_decomposition(&g.graph, &d);
        println!(
            "l={l}: {} vertices, {} bags, valid {}, width {} (cap {}), occupancy {:?}",
            g.len(),
            d.len(),
            rep.ok(),
            rep.width,
            4 * l + 8,
            level_occupancy(&g.tree, &d)
        );
    }
    Ok(())
}
