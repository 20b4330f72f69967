//! Ground truth by exhaustion: free trees up to isomorphism, backtracking
//! subgraph search, universality sweeps, and exact minimum universal graphs
//! for tiny orders.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::embed::{embed, validate_embedding};
use crate::error::{Error, Result};
use crate::forest::Forest;
use crate::graph::{GeneratedGraph, Graph};
use crate::ks::is_ks_tree;
use crate::tree::OrderedTree;

/// Largest order [`enumerate_trees`] accepts.
pub const CATALOG_CAP: usize = 16;
/// Largest host [`contains_tree_bruteforce`] accepts.
pub const BRUTE_CAP: usize = 64;
/// Largest order [`exact_min_universal_edges`] accepts.
pub const EXACT_CAP: usize = 6;

/// AHU code of `t` rooted at `root`: `(` + sorted child codes + `)`.
fn rooted_code(t: &Forest, root: usize) -> String {
    fn go(t: &Forest, u: usize, from: usize) -> String {
        let mut kids: Vec<String> = t
            .neighbors(u)
            .iter()
            .filter(|&&w| w != from)
            .map(|&w| go(t, w, u))
            .collect();
        kids.sort();
        let mut s = String::with_capacity(2 + kids.iter().map(String::len).sum::<usize>());
        s.push('(');
        for k in kids {
            s.push_str(&k);
        }
        s.push(')');
        s
    }
    go(t, root, usize::MAX)
}

/// One or two vertices minimizing the largest component left on removal.
pub fn centroids(t: &Forest) -> Vec<usize> {
    let n = t.len();
    let mut order = vec![0];
    let mut parent = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut i = 0;
    while i < order.len() {
        let u = order[i];
        for &w in t.neighbors(u) {
            if !seen[w] {
                seen[w] = true;
                parent[w] = u;
                order.push(w);
            }
        }
        i += 1;
    }
    let mut size = vec![1usize; n];
    for &u in order.iter().rev() {
        if parent[u] != usize::MAX {
            size[parent[u]] += size[u];
        }
    }
    let worst: Vec<usize> = (0..n)
        .map(|u| {
            let below = t
                .neighbors(u)
                .iter()
                .filter(|&&w| parent[w] == u)
                .map(|&w| size[w])
                .max()
                .unwrap_or(0);
            below.max(n - size[u])
        })
        .collect();
    let best = *worst.iter().min().unwrap();
    (0..n).filter(|&u| worst[u] == best).collect()
}

/// Canonical code of a free tree; equal iff isomorphic.
pub fn canonical_code(t: &Forest) -> String {
    if t.is_empty() {
        return String::new();
    }
    centroids(t)
        .into_iter()
        .map(|c| rooted_code(t, c))
        .min()
        .unwrap()
}

/// Ordered tree read off a code, children in code order.
fn tree_from_code(code: &str) -> OrderedTree {
    let mut children: Vec<Vec<usize>> = Vec::new();
    let mut stack: Vec<usize> = Vec::new();
    for ch in code.chars() {
        if ch == '(' {
            let id = children.len();
            children.push(Vec::new());
            if let Some(&p) = stack.last() {
                children[p].push(id);
            }
            stack.push(id);
        } else {
            stack.pop();
        }
    }
    OrderedTree::from_children(0, &children)
        .expect("codes describe trees")
        .0
}

/// All free trees on `n` vertices, one per class.
#[derive(Clone, Debug)]
pub struct TreeCatalog {
    pub n: usize,
    pub codes: Vec<String>,
    pub trees: Vec<OrderedTree>,
}

impl TreeCatalog {
    pub fn len(&self) -> usize {
        self.trees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trees.is_empty()
    }

    pub fn forests(&self) -> Vec<Forest> {
        self.trees.iter().map(Forest::from_tree).collect()
    }

    fn from_codes(n: usize, codes: BTreeSet<String>) -> Self {
        let codes: Vec<String> = codes.into_iter().collect();
        let trees = codes.iter().map(|c| tree_from_code(c)).collect();
        TreeCatalog { n, codes, trees }
    }
}

fn cap(n: usize) -> Result<()> {
    if n > CATALOG_CAP {
        return Err(Error::Budget(format!(
            "tree enumeration capped at {CATALOG_CAP}, asked for {n}"
        )));
    }
    Ok(())
}

/// Grows every tree on `n - 1` vertices by one leaf in every position and
/// keeps one tree per canonical code.
pub fn enumerate_trees(n: usize) -> Result<TreeCatalog> {
    cap(n)?;
    let mut codes: BTreeSet<String> = BTreeSet::new();
    if n == 0 {
        return Ok(TreeCatalog {
            n,
            codes: Vec::new(),
            trees: Vec::new(),
        });
    }
    codes.insert("()".into());
    for size in 2..=n {
        let mut next = BTreeSet::new();
        for c in &codes {
            let t = Forest::from_tree(&tree_from_code(c));
            let mut edges = t.edges();
            for u in 0..size - 1 {
                edges.push((u, size - 1));
                next.insert(canonical_code(&Forest::from_edges(size, &edges).unwrap()));
                edges.pop();
            }
        }
        codes = next;
    }
    Ok(TreeCatalog::from_codes(n, codes))
}

/// Every rooted tree on `n` vertices as a level sequence, in the classic
/// successor order starting from the path, reduced to free classes.
pub fn enumerate_trees_by_levels(n: usize) -> Result<TreeCatalog> {
    cap(n)?;
    let mut codes = BTreeSet::new();
    if n == 0 {
        return Ok(TreeCatalog {
            n,
            codes: Vec::new(),
            trees: Vec::new(),
        });
    }
    let mut level: Vec<usize> = (1..=n).collect();
    loop {
        let mut stack: Vec<usize> = Vec::new();
        let mut edges = Vec::new();
        for (i, &l) in level.iter().enumerate() {
            stack.truncate(l - 1);
            if let Some(&p) = stack.last() {
                edges.push((p, i));
            }
            stack.push(i);
        }
        codes.insert(canonical_code(&Forest::from_edges(n, &edges).unwrap()));
        let Some(p) = (0..n).rev().find(|&i| level[i] > 2) else {
            break;
        };
        let q = (0..p).rev().find(|&i| level[i] == level[p] - 1).unwrap();
        for i in p..n {
            level[i] = level[i - (p - q)];
        }
    }
    Ok(TreeCatalog::from_codes(n, codes))
}

/// Decodes every Prüfer sequence; `n^(n-2)` work, so capped at 9.
pub fn enumerate_trees_by_pruefer(n: usize) -> Result<TreeCatalog> {
    if n > 9 {
        return Err(Error::Budget(
            "Prüfer enumeration capped at 9 vertices".into(),
        ));
    }
    let mut codes = BTreeSet::new();
    if n <= 2 {
        return enumerate_trees(n);
    }
    let mut seq = vec![0usize; n - 2];
    loop {
        codes.insert(canonical_code(&pruefer_decode(n, &seq)));
        let mut i = 0;
        while i < seq.len() && seq[i] == n - 1 {
            seq[i] = 0;
            i += 1;
        }
        if i == seq.len() {
            break;
        }
        seq[i] += 1;
    }
    Ok(TreeCatalog::from_codes(n, codes))
}

pub fn pruefer_decode(n: usize, seq: &[usize]) -> Forest {
    let mut degree = vec![1usize; n];
    for &s in seq {
        degree[s] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &s in seq {
        let leaf = (0..n).find(|&v| degree[v] == 1).unwrap();
        edges.push((leaf, s));
        degree[leaf] -= 1;
        degree[s] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    edges.push((rest[0], rest[1]));
    Forest::from_edges(n, &edges).unwrap()
}

/// Number of free trees on `n` vertices from the rooted-tree recurrence and
/// the dissimilarity characteristic, no enumeration involved.
pub fn count_free_trees(n: usize) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut r = vec![0u64; n + 1];
    r[1] = 1;
    for m in 1..n {
        // r[m+1] = (1/m) Σ_{k=1..m} (Σ_{d|k} d r[d]) r[m-k+1]
        let mut total = 0u64;
        for k in 1..=m {
            let s: u64 = (1..=k)
                .filter(|d| k % d == 0)
                .map(|d| d as u64 * r[d])
                .sum();
            total += s * r[m - k + 1];
        }
        r[m + 1] = total / m as u64;
    }
    let pairs: u64 = (1..n).map(|i| r[i] * r[n - i]).sum();
    let mut free = 2 * r[n] - pairs;
    if n % 2 == 0 {
        free += r[n / 2];
    }
    free / 2
}

/// A map of the tree `t` into `g` preserving edges, or `None` if there is
/// none. Exhaustive.
pub fn contains_tree_bruteforce(g: &Graph, t: &Forest) -> Result<Option<Vec<usize>>> {
    let n = g.vertex_count();
    let m = t.len();
    if n > BRUTE_CAP {
        return Err(Error::Budget(format!(
            "brute-force host capped at {BRUTE_CAP} vertices"
        )));
    }
    if m == 0 {
        return Ok(Some(Vec::new()));
    }
    if !t.is_tree() {
        return Err(Error::Precondition("guest must be a tree".into()));
    }
    if m > n {
        return Ok(None);
    }
    let root = (0..m)
        .max_by_key(|&v| (t.degree(v), std::cmp::Reverse(v)))
        .unwrap();
    // BFS from the root, larger subtrees first
    let mut parent = vec![usize::MAX; m];
    let mut order = vec![root];
    let mut seen = vec![false; m];
    seen[root] = true;
    let mut i = 0;
    while i < order.len() {
        let u = order[i];
        for &w in t.neighbors(u) {
            if !seen[w] {
                seen[w] = true;
                parent[w] = u;
                order.push(w);
            }
        }
        i += 1;
    }
    let mut size = vec![1usize; m];
    for &u in order.iter().rev() {
        if parent[u] != usize::MAX {
            size[parent[u]] += size[u];
        }
    }
    let mut order = vec![root];
    let mut i = 0;
    while i < order.len() {
        let u = order[i];
        let mut kids: Vec<usize> = t
            .neighbors(u)
            .iter()
            .copied()
            .filter(|&w| parent[w] == u)
            .collect();
        kids.sort_by_key(|&w| std::cmp::Reverse(size[w]));
        order.extend(kids);
        i += 1;
    }
    let mut hosts: Vec<usize> = (0..n).collect();
    hosts.sort_by_key(|&h| std::cmp::Reverse(g.degree(h)));
    let mut phi = vec![usize::MAX; m];
    let mut used = vec![false; n];

    #[allow(clippy::too_many_arguments)]
    fn place(
        i: usize,
        order: &[usize],
        parent: &[usize],
        t: &Forest,
        g: &Graph,
        hosts: &[usize],
        phi: &mut [usize],
        used: &mut [bool],
    ) -> bool {
        if i == order.len() {
            return true;
        }
        let v = order[i];
        let cands: &[usize] = if i == 0 {
            hosts
        } else {
            g.neighbors(phi[parent[v]])
        };
        for &h in cands {
            if used[h] || g.degree(h) < t.degree(v) {
                continue;
            }
            used[h] = true;
            phi[v] = h;
            if place(i + 1, order, parent, t, g, hosts, phi, used) {
                return true;
            }
            used[h] = false;
        }
        phi[v] = usize::MAX;
        false
    }

    Ok(place(0, &order, &parent, t, g, &hosts, &mut phi, &mut used).then_some(phi))
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct UniversalityReport {
    pub n: usize,
    pub classes: usize,
    /// Trees (as canonical codes) the embedder could not place or placed
    /// wrongly.
    pub embed_failures: Vec<String>,
    /// Trees the exhaustive search checked.
    pub oracle_checked: usize,
    /// Trees the exhaustive search found no copy of.
    pub oracle_failures: Vec<String>,
}

impl UniversalityReport {
    pub fn ok(&self) -> bool {
        self.embed_failures.is_empty() && self.oracle_failures.is_empty()
    }
}

/// Runs the embedder on every `n`-vertex tree into `host` (which must be a
/// `G^2` of a (4,1)-tree with at least `n` vertices), and the exhaustive
/// search too when `n <= oracle_upto`.
pub fn verify_universal(
    host: &GeneratedGraph,
    n: usize,
    oracle_upto: usize,
) -> Result<UniversalityReport> {
    if host.h != Some(2) || is_ks_tree(&host.tree, 4, 1).is_err() {
        return Err(Error::Precondition(
            "host must be G^2 of a (4,1)-tree".into(),
        ));
    }
    let cat = enumerate_trees(n)?;
    let mut rep = UniversalityReport {
        n,
        classes: cat.len(),
        ..Default::default()
    };
    for (code, t) in cat.codes.iter().zip(cat.forests()) {
        let ok = match embed(&host.tree, &t, 0, 0) {
            Ok(e) => validate_embedding(host, &t, &e.map).ok(),
            Err(_) => false,
        };
        if !ok {
            rep.embed_failures.push(code.clone());
        }
        if n <= oracle_upto {
            rep.oracle_checked += 1;
            if contains_tree_bruteforce(&host.graph, &t)?.is_none() {
                rep.oracle_failures.push(code.clone());
            }
        }
    }
    Ok(rep)
}

/// Exhaustive-search-only universality check for any graph.
pub fn verify_universal_bruteforce(g: &Graph, n: usize) -> Result<UniversalityReport> {
    let cat = enumerate_trees(n)?;
    let mut rep = UniversalityReport {
        n,
        classes: cat.len(),
        ..Default::default()
    };
    for (code, t) in cat.codes.iter().zip(cat.forests()) {
        rep.oracle_checked += 1;
        if contains_tree_bruteforce(g, &t)?.is_none() {
            rep.oracle_failures.push(code.clone());
        }
    }
    Ok(rep)
}

/// A window `[start, start + len)` and a tree it misses.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WindowWitness {
    pub start: usize,
    pub len: usize,
    pub tree: String,
    pub edges: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct IntervalReport {
    pub windows: usize,
    pub checks: usize,
    pub oracle_checks: usize,
    pub failures: Vec<WindowWitness>,
}

impl IntervalReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks every DFS window of length `1..=max_m`. For `G^2` hosts the
/// embedder places each tree into the prefix ending at the window, whose
/// uncovered part is exactly what precedes the window; windows up to
/// `oracle_upto` are also searched exhaustively. Other hosts are searched
/// exhaustively only.
pub fn verify_interval_universal(
    host: &GeneratedGraph,
    max_m: usize,
    oracle_upto: usize,
) -> Result<IntervalReport> {
    let n = host.len();
    let use_embedder = host.h == Some(2);
    let mut rep = IntervalReport::default();
    for m in 1..=max_m.min(n) {
        let cat = enumerate_trees(m)?;
        let forests = cat.forests();
        for start in 0..=n - m {
            rep.windows += 1;
            let window: Vec<usize> = (start..start + m).collect();
            let local = host.graph.induced(&window);
            let prefix = if use_embedder {
                Some(host.tree.prefix(start + m)?)
            } else {
                None
            };
            for (code, t) in cat.codes.iter().zip(&forests) {
                rep.checks += 1;
                let mut ok = true;
                if let Some(p) = &prefix {
                    ok = match embed(p, t, 0, 0) {
                        Ok(e) => {
                            e.map.iter().all(|&h| h >= start)
                                && t.edges()
                                    .iter()
                                    .all(|&(a, b)| host.has_edge(e.map[a], e.map[b]))
                        }
                        Err(_) => false,
                    };
                }
                if !use_embedder || m <= oracle_upto {
                    rep.oracle_checks += 1;
                    let found = contains_tree_bruteforce(&local, t)?.is_some();
                    ok &= found;
                }
                if !ok {
                    rep.failures.push(WindowWitness {
                        start,
                        len: m,
                        tree: code.clone(),
                        edges: t.edges(),
                    });
                }
            }
        }
    }
    Ok(rep)
}

/// Whether `g` contains every tree on `m` vertices for each window of the
/// vertex order (`interval`) or just the whole graph.
fn universal(g: &Graph, catalogs: &[Vec<Forest>], interval: bool) -> bool {
    let n = g.vertex_count();
    if !interval {
        return catalogs[n]
            .iter()
            .all(|t| matches!(contains_tree_bruteforce(g, t), Ok(Some(_))));
    }
    (1..=n).rev().all(|m| {
        (0..=n - m).all(|s| {
            let w: Vec<usize> = (s..s + m).collect();
            let sub = g.induced(&w);
            catalogs[m]
                .iter()
                .all(|t| matches!(contains_tree_bruteforce(&sub, t), Ok(Some(_))))
        })
    })
}

/// Least number of edges of an `n`-vertex graph containing every `n`-vertex
/// tree, or with `interval`, of an ordered graph whose every window of `m`
/// consecutive vertices contains every `m`-vertex tree. Searches all edge
/// sets by increasing size.
pub fn exact_min_universal_edges(n: usize, interval: bool) -> Result<usize> {
    if n > EXACT_CAP {
        return Err(Error::Budget(format!(
            "exact search capped at {EXACT_CAP} vertices"
        )));
    }
    if n <= 1 {
        return Ok(0);
    }
    let catalogs: Vec<Vec<Forest>> = (0..=n)
        .map(|m| enumerate_trees(m).map(|c| c.forests()))
        .collect::<Result<_>>()?;
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .collect();
    for e in n - 1..=pairs.len() {
        let mut pick: Vec<usize> = (0..e).collect();
        loop {
            let g = Graph::from_edges(n, pick.iter().map(|&i| pairs[i]));
            if universal(&g, &catalogs, interval) {
                return Ok(e);
            }
            // next combination
            let mut i = e;
            while i > 0 && pick[i - 1] == pairs.len() - e + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            pick[i - 1] += 1;
            for j in i..e {
                pick[j] = pick[j - 1] + 1;
            }
        }
    }
    Err(Error::Invariant(
        "the complete graph is universal, search cannot end empty".into(),
    ))
}

/// Fixed-point fractional bits of [`Psi`].
const PSI_BITS: u32 = 40;

/// `n log2 n - 4 n sqrt(log2 n)` in fixed point with 40 fractional bits,
/// computed with integer arithmetic only (truncating; error below `n·2^-36`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Psi {
    pub n: u64,
    pub scaled: i128,
}

impl Psi {
    pub fn to_f64(self) -> f64 {
        self.scaled as f64 / (1u64 << PSI_BITS) as f64
    }

    /// Whether `psi(n) <= c`, up to the fixed-point error.
    pub fn at_most(self, c: i64) -> bool {
        self.scaled <= (c as i128) << PSI_BITS
    }
}

impl std::fmt::Display for Psi {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        // six decimals, rounded half away from zero, from integers only
        let one = 1i128 << PSI_BITS;
        let micro = (self.scaled.abs() * 1_000_000 + one / 2) / one;
        let sign = if self.scaled < 0 && micro != 0 {
            "-"
        } else {
            ""
        };
        write!(f, "{sign}{}.{:06}", micro / 1_000_000, micro % 1_000_000)
    }
}

/// `log2 n` with [`PSI_BITS`] fractional bits, by repeated squaring.
fn log2_fixed(n: u64) -> u128 {
    let int = 63 - n.leading_zeros() as u128;
    const F: u32 = 62;
    // y = n / 2^int in [1, 2) with F fractional bits
    let mut y: u128 = ((n as u128) << F) >> int;
    let mut frac: u128 = 0;
    for _ in 0..PSI_BITS {
        y = (y * y) >> F;
        frac <<= 1;
        if y >= 2u128 << F {
            y >>= 1;
            frac |= 1;
        }
    }
    (int << PSI_BITS) | frac
}

fn isqrt(v: u128) -> u128 {
    if v < 2 {
        return v;
    }
    let mut x = (v as f64).sqrt() as u128;
    while x * x > v {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= v {
        x += 1;
    }
    x
}

pub fn psi_lower_bound(n: u64) -> Psi {
    if n <= 1 {
        return Psi { n, scaled: 0 };
    }
    let l = log2_fixed(n);
    let root = isqrt(l << PSI_BITS);
    let scaled = n as i128 * l as i128 - 4 * n as i128 * root as i128;
    Psi { n, scaled }
}
