#![allow(dead_code)]

use proptest::prelude::*;
use rand::Rng;
use treeverse::Forest;

/// Number of shapes `random_tree` knows.
pub const SHAPES: usize = 6;

/// Random tree on `n` vertices in one of several shapes: uniform recursive,
/// Prüfer-uniform, caterpillar-ish, broom, spider, and a narrow-window
/// recursive tree.
pub fn random_tree(n: usize, shape: usize, rng: &mut impl Rng) -> Forest {
    let e: Vec<(usize, usize)> = match shape % SHAPES {
        0 => (1..n).map(|i| (rng.gen_range(0..i), i)).collect(),
        1 => pruefer_edges(n, rng),
        2 => (1..n)
            .map(|i| (i - 1 - rng.gen_range(0..3usize).min(i - 1), i))
            .collect(),
        3 => {
            let spine = rng.gen_range(1..=n.max(1));
            (1..n)
                .map(|i| {
                    if i < spine {
                        (i - 1, i)
                    } else {
                        (rng.gen_range(0..spine), i)
                    }
                })
                .collect()
        }
        4 => {
            let legs = rng.gen_range(2..6);
            (1..n)
                .map(|i| if i <= legs { (0, i) } else { (i - legs, i) })
                .collect()
        }
        _ => {
            let c = rng.gen_range(1..4);
            (1..n)
                .map(|i| {
                    if i < c {
                        (0, i)
                    } else {
                        (rng.gen_range(i.saturating_sub(4)..i), i)
                    }
                })
                .collect()
        }
    };
    Forest::from_edges(n, &e).unwrap()
}

fn pruefer_edges(n: usize, rng: &mut impl Rng) -> Vec<(usize, usize)> {
    if n <= 2 {
        return (1..n).map(|i| (0, i)).collect();
    }
    let seq: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
    let mut deg = vec![1; n];
    for &s in &seq {
        deg[s] += 1;
    }
    let mut e = Vec::with_capacity(n - 1);
    for &s in &seq {
        let leaf = (0..n).find(|&v| deg[v] == 1).unwrap();
        e.push((leaf, s));
        deg[leaf] -= 1;
        deg[s] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&v| deg[v] == 1).collect();
    e.push((rest[0], rest[1]));
    e
}

/// Random forest: a random tree with each edge dropped with probability
/// `drop`.
pub fn random_forest(n: usize, drop: f64, rng: &mut impl Rng) -> Forest {
    let t = random_tree(n, rng.gen_range(0..SHAPES), rng);
    let e: Vec<_> = t
        .edges()
        .into_iter()
        .filter(|_| !rng.gen_bool(drop))
        .collect();
    Forest::from_edges(n, &e).unwrap()
}

/// Parent vectors of recursive trees: vertex `i` hangs below some `j < i`.
pub fn parents(max_n: usize) -> impl Strategy<Value = Vec<usize>> {
    (1..=max_n).prop_flat_map(|n| (1..n).map(|i| 0..i).collect::<Vec<_>>())
}

pub fn tree_from_parents(p: &[usize]) -> Forest {
    let e: Vec<_> = p.iter().enumerate().map(|(i, &q)| (q, i + 1)).collect();
    Forest::from_edges(p.len() + 1, &e).unwrap()
}
