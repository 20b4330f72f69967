//! Merging consecutive cousins of T_k under a new root keeps the (4,1)
//! shape, and the merged graph maps back into the original.

use treeverse::graph::verify_merge_embedding;
use treeverse::ks::{build_tk, is_ks_tree};

fn main() -> treeverse::Result<()> {
    let t = build_tk(4)?.tree;
    for d in 2..=t.height() {
        let lv = t.level_vertices(d);
        let us = &lv[lv.len() / 2..(lv.len() / 2 + 3).min(lv.len())];
        let m = t.merge_subtrees(us)?;
        let balanced = is_ks_tree(&m.tree, 4, 1).is_ok();
        match verify_merge_embedding(&t, us, 2) {
            Ok(r) => println!(
                "level {d}: merge {us:?} -> {} vertices, (4,1) {balanced}, {} edges checked, {} violations",
                r.merged_vertices,
                r.checked_edges,
                r.violations.len()
            ),
            Err(e) => println!("level {d}: {e}"),
        }
    }
    Ok(())
}
