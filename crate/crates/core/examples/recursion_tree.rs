//! The recursion tree behind an embedding: every node's image is adjacent to
//! the images below it, and sibling subtrees are separated by the node.

use treeverse::embed::embed_with_trace;
use treeverse::ks::prefix_universal_graph;
use treeverse::Forest;

fn main() -> treeverse::Result<()> {
    // a caterpillar: spine 0..10, two legs per spine vertex
    let mut edges: Vec<(usize, usize)> = (1..10).map(|i| (i - 1, i)).collect();
    for s in 0..10 {
        edges.push((s, 10 + 2 * s));
        edges.push((s, 11 + 2 * s));
    }
    let guest = Forest::from_edges(30, &edges)?;
    let host = prefix_universal_graph(30)?;
    let (e, _, taux) = embed_with_trace(&host.graph.tree, &guest, 0, 0)?;

    let depth = taux.depths();
    println!("root {} at host vertex {}", taux.root, e.map[taux.root]);
    println!("height {}", depth.iter().max().unwrap());
    let kids = taux.children();
    for v in 0..10 {
        println!("spine {v:>2}: depth {}, children {:?}", depth[v], kids[v]);
    }
    Ok(())
}
