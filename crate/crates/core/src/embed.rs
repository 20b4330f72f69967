//! Recursive embedding of forests into `G^2_T` for (4,1)-trees `T`.
//!
//! Every embedding produced here leaves an initial DFS segment of the host
//! uncovered, puts `x1` on a vertex of minimum level among the image, and,
//! when the host root has two children and `n - 2 >= |guest| >= nu(v_2) >= 2`,
//! puts `x2` on a vertex of level at most 2. Each recursive call checks these
//! promises and its own edges against its own host before returning.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forest::Forest;
use crate::graph::{adjacent, GeneratedGraph};
use crate::ks::is_ks_tree;
use crate::splitter::{self, Collection, Kind};
use crate::taux::{build_taux, check_taux, Taux};
use crate::tree::OrderedTree;

/// Which branch of the recursion handled a call.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Step {
    /// Host of height at most 2; `G^2_T` is complete.
    Base,
    /// Last child of the root is a leaf.
    LeafChild,
    /// Guest smaller than the last child's subtree.
    IntoLastChild,
    /// Root has one child.
    OneChild,
    /// Guest fits beside the first child's subtree.
    DropFirstChild,
    TwoChildrenSmall,
    TwoChildrenFull,
    Feasible,
    /// Critical split trimmed inside its smallest component.
    CriticalTrim,
    /// Critical split one vertex over the feasible window with nothing
    /// left beside `w`; handled like the feasible split.
    CriticalTight,
    /// Critical split with `w` below `v_{t-1}`; last resort, accepted only
    /// if its own check passes.
    CriticalFallback,
    /// Critical split where `w` is `x1`, or where the `w`-edges into the
    /// rest of the guest need `w` on `v_{t-1}`.
    CriticalLeaf,
    /// Critical split with `x1` next to `w`, rebuilt around a vertex whose
    /// only neighbors are `w`, `x1` and `w'`.
    CriticalPinned,
    /// Critical split with `x1` next to `w`, putting `w` on `v_t`.
    CriticalSwapped,
}

impl Step {
    pub fn label(self) -> &'static str {
        match self {
            Step::Base => "base",
            Step::LeafChild => "leaf-child",
            Step::IntoLastChild => "into-last-child",
            Step::OneChild => "one-child",
            Step::DropFirstChild => "drop-first-child",
            Step::TwoChildrenSmall => "two-children-small",
            Step::TwoChildrenFull => "two-children-full",
            Step::Feasible => "feasible",
            Step::CriticalTrim => "critical-trim",
            Step::CriticalTight => "critical-tight",
            Step::CriticalFallback => "critical-fallback",
            Step::CriticalLeaf => "critical-leaf",
            Step::CriticalPinned => "critical-pinned",
            Step::CriticalSwapped => "critical-swapped",
        }
    }
}

/// One recursive call: the branch taken and the guest vertices it cut at.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Record {
    pub step: Step,
    pub guest_size: usize,
    pub host_size: usize,
    pub cuts: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Embedding {
    pub map: Vec<usize>,
    pub host_n: usize,
    pub admissible_complement: bool,
}

/// `{"guest_n", "host_n", "map", "admissible_complement"}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingJson {
    pub guest_n: usize,
    pub host_n: usize,
    pub map: Vec<usize>,
    pub admissible_complement: bool,
}

impl Embedding {
    pub fn to_json(&self) -> EmbeddingJson {
        EmbeddingJson {
            guest_n: self.map.len(),
            host_n: self.host_n,
            map: self.map.clone(),
            admissible_complement: self.admissible_complement,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Trace {
    pub records: Vec<Record>,
    pub max_depth: usize,
}

impl Trace {
    pub fn step_counts(&self) -> BTreeMap<&'static str, usize> {
        let mut m = BTreeMap::new();
        for r in &self.records {
            *m.entry(r.step.label()).or_insert(0) += 1;
        }
        m
    }
}

/// Embeds `guest` into `G^2_tree`.
pub fn embed(tree: &OrderedTree, guest: &Forest, x1: usize, x2: usize) -> Result<Embedding> {
    embed_traced(tree, guest, x1, x2).map(|(e, _)| e)
}

/// As [`embed`], also returning the per-call records.
pub fn embed_traced(
    tree: &OrderedTree,
    guest: &Forest,
    x1: usize,
    x2: usize,
) -> Result<(Embedding, Trace)> {
    let m = guest.len();
    if m == 0 {
        return Ok((
            Embedding {
                map: Vec::new(),
                host_n: tree.len(),
                admissible_complement: true,
            },
            Trace::default(),
        ));
    }
    if m > tree.len() {
        return Err(Error::Precondition(format!(
            "guest has {m} vertices, host {}",
            tree.len()
        )));
    }
    if x1 >= m || x2 >= m {
        return Err(Error::Precondition(format!(
            "role vertices {x1}, {x2} outside guest of size {m}"
        )));
    }
    if let Err(v) = is_ks_tree(tree, 4, 1) {
        return Err(Error::Precondition(format!(
            "host is not a (4,1)-tree: {v:?}"
        )));
    }
    let mut cx = Ctx {
        trace: Trace::default(),
        depth: 0,
    };
    let ids: Vec<usize> = (0..m).collect();
    let map = cx.run(tree, guest, &ids, x1, x2)?;
    let n = tree.len();
    let widest = (0..n).map(|u| tree.children(u).len()).max().unwrap_or(0);
    let limit = (tree.height() + 1) * (widest + 1);
    if cx.trace.max_depth > limit {
        return Err(Error::Invariant(format!(
            "recursion depth {} above {limit}",
            cx.trace.max_depth
        )));
    }
    let admissible = map.iter().all(|&h| h >= n - m);
    Ok((
        Embedding {
            map,
            host_n: n,
            admissible_complement: admissible,
        },
        cx.trace,
    ))
}

/// As [`embed_traced`] for a guest tree, plus a recursion tree whose
/// invariants are checked before returning.
pub fn embed_with_trace(
    tree: &OrderedTree,
    guest: &Forest,
    x1: usize,
    x2: usize,
) -> Result<(Embedding, Trace, Taux)> {
    if !guest.is_tree() {
        return Err(Error::Precondition(
            "traced embedding needs a guest tree".into(),
        ));
    }
    let (e, trace) = embed_traced(tree, guest, x1, x2)?;
    let taux = build_taux(tree, guest, &e.map)?;
    let rep = check_taux(tree, guest, &e.map, &taux);
    if !rep.ok() {
        return Err(Error::Invariant(format!(
            "recursion tree check failed: {rep:?}"
        )));
    }
    Ok((e, trace, taux))
}

/// Problems found by [`validate_embedding`]; empty lists mean valid.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub out_of_range: Vec<usize>,
    pub collisions: Vec<(usize, usize)>,
    pub missing_edges: Vec<(usize, usize)>,
    pub admissible_complement: bool,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.out_of_range.is_empty() && self.collisions.is_empty() && self.missing_edges.is_empty()
    }
}

/// Checks injectivity, that every guest edge lands on a host edge, and
/// whether the uncovered host vertices form an initial DFS segment.
pub fn validate_embedding(
    host: &GeneratedGraph,
    guest: &Forest,
    map: &[usize],
) -> ValidationReport {
    let n = host.len();
    let mut rep = ValidationReport::default();
    let mut owner = vec![usize::MAX; n];
    for (g, &h) in map.iter().enumerate() {
        if h >= n {
            rep.out_of_range.push(g);
            continue;
        }
        if owner[h] != usize::MAX {
            rep.collisions.push((owner[h], g));
        } else {
            owner[h] = g;
        }
    }
    if map.len() != guest.len() {
        rep.out_of_range.extend(map.len()..guest.len());
    }
    for (a, b) in guest.edges() {
        let (Some(&ha), Some(&hb)) = (map.get(a), map.get(b)) else {
            continue;
        };
        if ha < n && hb < n && !host.has_edge(ha, hb) {
            rep.missing_edges.push((a, b));
        }
    }
    let used = owner.iter().filter(|&&o| o != usize::MAX).count();
    rep.admissible_complement = owner[..n - used.min(n)].iter().all(|&o| o == usize::MAX);
    rep
}

struct Ctx {
    trace: Trace,
    depth: usize,
}

/// A host derived from the current one, with the map back into it.
struct View {
    tree: OrderedTree,
    back: Vec<usize>,
}

impl View {
    fn prefix(t: &OrderedTree, len: usize) -> Result<View> {
        Ok(View {
            tree: t.prefix(len)?,
            back: (0..len).collect(),
        })
    }

    fn subtree(t: &OrderedTree, u: usize) -> View {
        View {
            tree: t.subtree(u),
            back: t.subtree_range(u).collect(),
        }
    }

    /// Merge of consecutive cousins; the new root stands for the parent of
    /// the last one.
    fn merge(t: &OrderedTree, us: &[usize]) -> Result<View> {
        let top = t
            .parent(*us.last().unwrap())
            .expect("merged vertices are not the root");
        let m = t.merge_subtrees(us)?;
        let back = m.origin.iter().map(|o| o.unwrap_or(top)).collect();
        Ok(View { tree: m.tree, back })
    }
}

fn sorted_without(m: usize, drop: &[usize]) -> Vec<usize> {
    (0..m).filter(|v| !drop.contains(v)).collect()
}

/// Leaf of `g[set]` with the largest id and its neighbor; for an edgeless
/// set, the two largest vertices.
fn leaf_and_neighbor(g: &Forest, set: &[usize]) -> Option<(usize, usize)> {
    let inside = |v: usize| set.binary_search(&v).is_ok();
    for &v in set.iter().rev() {
        let nb: Vec<usize> = g
            .neighbors(v)
            .iter()
            .copied()
            .filter(|&u| inside(u))
            .collect();
        if nb.len() == 1 {
            return Some((v, nb[0]));
        }
    }
    if set.len() >= 2
        && set
            .iter()
            .all(|&v| g.neighbors(v).iter().all(|&u| !inside(u)))
    {
        return Some((set[set.len() - 1], set[set.len() - 2]));
    }
    None
}

impl Ctx {
    fn run(
        &mut self,
        t: &OrderedTree,
        g: &Forest,
        ids: &[usize],
        x1: usize,
        x2: usize,
    ) -> Result<Vec<usize>> {
        let (g, _) = g.chained();
        self.depth += 1;
        self.trace.max_depth = self.trace.max_depth.max(self.depth);
        let at = self.trace.records.len();
        let out = self.dispatch(t, &g, ids, x1, x2);
        self.depth -= 1;
        let phi = out?;
        check_call(t, &g, x1, x2, &phi).map_err(|e| match (e, self.trace.records.get(at)) {
            (Error::Invariant(msg), Some(r)) => {
                Error::Invariant(format!("{msg} [step {}]", r.step.label()))
            }
            (e, _) => e,
        })?;
        Ok(phi)
    }

    /// Embeds `g[keep]` (keep sorted) into `view`, writing into `phi`.
    #[allow(clippy::too_many_arguments)]
    fn sub(
        &mut self,
        view: &View,
        g: &Forest,
        ids: &[usize],
        keep: &[usize],
        r1: Option<usize>,
        r2: Option<usize>,
        phi: &mut [usize],
    ) -> Result<()> {
        if keep.is_empty() {
            return Ok(());
        }
        let local = |r: Option<usize>| r.and_then(|r| keep.binary_search(&r).ok());
        let l1 = local(r1).unwrap_or(0);
        let l2 = local(r2).unwrap_or(l1);
        let sg = g.induced(keep);
        let sids: Vec<usize> = keep.iter().map(|&k| ids[k]).collect();
        let r = self.run(&view.tree, &sg, &sids, l1, l2)?;
        for (i, &k) in keep.iter().enumerate() {
            phi[k] = view.back[r[i]];
        }
        Ok(())
    }

    fn record(&mut self, step: Step, t: &OrderedTree, g: &Forest, ids: &[usize], cuts: &[usize]) {
        self.trace.records.push(Record {
            step,
            guest_size: g.len(),
            host_size: t.len(),
            cuts: cuts.iter().map(|&c| ids[c]).collect(),
        });
    }

    fn dispatch(
        &mut self,
        t: &OrderedTree,
        g: &Forest,
        ids: &[usize],
        x1: usize,
        x2: usize,
    ) -> Result<Vec<usize>> {
        let n = t.len();
        let m = g.len();
        let mut phi = vec![usize::MAX; m];
        if t.height() <= 2 {
            self.record(Step::Base, t, g, ids, &[]);
            let start = n - m;
            let top = (start..n).min_by_key(|&h| (t.level(h), h)).unwrap();
            phi[x1] = top;
            let mut free = (start..n).filter(|&h| h != top);
            for (v, slot) in phi.iter_mut().enumerate() {
                if v != x1 {
                    *slot = free.next().unwrap();
                }
            }
            return Ok(phi);
        }
        let kids = t.children(0).to_vec();
        let tc = kids.len();
        let vt = kids[tc - 1];
        let others = |r: usize| if r != x1 { Some(r) } else { None };

        if t.nu(vt) == 1 {
            self.record(Step::LeafChild, t, g, ids, &[x1]);
            let keep = sorted_without(m, &[x1]);
            let view = View::prefix(t, n - 1)?;
            self.sub(&view, g, ids, &keep, others(x2), others(x2), &mut phi)?;
            if m < n {
                phi[x1] = vt;
            } else {
                let u = phi.iter().position(|&h| h == 0).unwrap();
                phi[u] = vt;
                phi[x1] = 0;
            }
            return Ok(phi);
        }
        if m < t.nu(vt) {
            self.record(Step::IntoLastChild, t, g, ids, &[]);
            let all: Vec<usize> = (0..m).collect();
            self.sub(
                &View::subtree(t, vt),
                g,
                ids,
                &all,
                Some(x1),
                Some(x2),
                &mut phi,
            )?;
            return Ok(phi);
        }
        if tc == 1 {
            self.record(Step::OneChild, t, g, ids, &[x1]);
            let view = View::subtree(t, kids[0]);
            if m < n {
                let all: Vec<usize> = (0..m).collect();
                self.sub(&view, g, ids, &all, Some(x1), Some(x2), &mut phi)?;
            } else {
                let keep = sorted_without(m, &[x1]);
                self.sub(&view, g, ids, &keep, others(x2), others(x2), &mut phi)?;
                phi[x1] = 0;
            }
            return Ok(phi);
        }
        let beside: usize = kids[1..].iter().map(|&k| t.nu(k)).sum();
        if tc >= 3 && m <= beside {
            self.record(Step::DropFirstChild, t, g, ids, &[]);
            let all: Vec<usize> = (0..m).collect();
            self.sub(
                &View::merge(t, &kids[1..])?,
                g,
                ids,
                &all,
                Some(x1),
                Some(x2),
                &mut phi,
            )?;
            return Ok(phi);
        }
        if tc == 2 {
            return self.two_children(t, g, ids, x1, x2, phi);
        }
        self.three_or_more(t, g, ids, x1, phi)
    }

    fn two_children(
        &mut self,
        t: &OrderedTree,
        g: &Forest,
        ids: &[usize],
        x1: usize,
        x2: usize,
        mut phi: Vec<usize>,
    ) -> Result<Vec<usize>> {
        let (n, m) = (t.len(), g.len());
        let (v1, v2) = (t.children(0)[0], t.children(0)[1]);
        let mut us = t.children(v1).to_vec();
        us.extend_from_slice(t.children(v2));
        let view = View::merge(t, &us)?;
        if m + 2 <= n {
            self.record(Step::TwoChildrenSmall, t, g, ids, &[x1]);
            let keep = sorted_without(m, &[x1]);
            let r2 = if x2 != x1 { Some(x2) } else { None };
            self.sub(&view, g, ids, &keep, r2, r2, &mut phi)?;
            phi[x1] = v2;
            return Ok(phi);
        }
        let rest = sorted_without(m, &[x1]);
        let (w, wp) = leaf_and_neighbor(g, &rest)
            .ok_or_else(|| Error::Invariant("no leaf or isolated pair in guest minus x1".into()))?;
        self.record(Step::TwoChildrenFull, t, g, ids, &[x1, w, wp]);
        let keep = sorted_without(m, &[x1, w]);
        self.sub(&view, g, ids, &keep, Some(wp), Some(wp), &mut phi)?;
        phi[w] = v1;
        phi[x1] = if m + 1 == n { v2 } else { 0 };
        Ok(phi)
    }

    fn three_or_more(
        &mut self,
        t: &OrderedTree,
        g: &Forest,
        ids: &[usize],
        x1: usize,
        phi: Vec<usize>,
    ) -> Result<Vec<usize>> {
        let kids = t.children(0);
        let tc = kids.len();
        let (x, y) = (t.nu(kids[tc - 1]), t.nu(kids[tc - 2]));
        let col = if x > y {
            splitter::find_feasible_or_critical(g, x1, x, y)?
        } else {
            let mut c = splitter::find_components_window(g, x1, x - 1)?;
            c.kind = Kind::Feasible;
            c
        };
        match col.kind {
            Kind::Critical => {
                let z = t.nu(kids[tc - 3]);
                if col.total() + 2 == x + y && g.len() >= x + y + z {
                    self.feasible(t, g, ids, x1, &col, phi, Step::CriticalTight)
                } else {
                    self.critical(t, g, ids, x1, &col, phi)
                }
            }
            _ => self.feasible(t, g, ids, x1, &col, phi, Step::Feasible),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn feasible(
        &mut self,
        t: &OrderedTree,
        g: &Forest,
        ids: &[usize],
        x1: usize,
        col: &Collection,
        mut phi: Vec<usize>,
        step: Step,
    ) -> Result<Vec<usize>> {
        let (n, m) = (t.len(), g.len());
        let kids = t.children(0);
        let (vt1, vt) = (kids[kids.len() - 2], kids[kids.len() - 1]);
        let w = col.w;
        self.record(step, t, g, ids, &[w]);
        let mut part0: Vec<usize> = col.components.concat();
        part0.push(w);
        part0.sort_unstable();
        let part1 = sorted_without(m, &part0);
        self.sub(
            &View::merge(t, &[vt1, vt])?,
            g,
            ids,
            &part0,
            Some(w),
            Some(w),
            &mut phi,
        )?;
        if phi[w] != vt {
            return Err(Error::Invariant(format!(
                "feasible split: w landed on {} not {vt}",
                phi[w]
            )));
        }
        if !part1.is_empty() {
            let view = View::prefix(t, n - part0.len())?;
            let r1 = if x1 != w { Some(x1) } else { None };
            self.sub(&view, g, ids, &part1, r1, r1, &mut phi)?;
        }
        if w == x1 && m == n {
            let u = phi.iter().position(|&h| h == 0).unwrap();
            phi[u] = vt;
            phi[x1] = 0;
        }
        Ok(phi)
    }

    fn critical(
        &mut self,
        t: &OrderedTree,
        g: &Forest,
        ids: &[usize],
        x1: usize,
        col: &Collection,
        phi: Vec<usize>,
    ) -> Result<Vec<usize>> {
        let m = g.len();
        let kids = t.children(0).to_vec();
        let tc = kids.len();
        let (vt2, vt1, vt) = (kids[tc - 3], kids[tc - 2], kids[tc - 1]);
        let (x, y, z) = (t.nu(vt), t.nu(vt1), t.nu(vt2));
        let w = col.w;
        let mut comps = col.components.clone();
        comps.sort_by(|a, b| a.len().cmp(&b.len()).then(a[0].cmp(&b[0])));
        let attach = |c: &[usize]| c.iter().copied().find(|&v| g.has_edge(v, w)).unwrap();
        let ws: Vec<usize> = comps.iter().map(|c| attach(c)).collect();
        let w1 = ws[0];
        let mut sub_nodes = comps.concat();
        sub_nodes.push(w);
        sub_nodes.sort_unstable();
        let sub_forest = g.induced(&sub_nodes);
        let local = |v: usize| sub_nodes.binary_search(&v).unwrap();
        let local_comps: Vec<Vec<usize>> = comps
            .iter()
            .map(|c| c.iter().map(|&v| local(v)).collect())
            .collect();
        let refine = splitter::refine_critical(&sub_forest, local(w), &local_comps, x, y)?;
        let wp = sub_nodes[refine.w_prime];
        let mut cp: Vec<usize> = refine
            .components
            .concat()
            .iter()
            .map(|&v| sub_nodes[v])
            .collect();
        cp.sort_unstable();

        let in_c: Vec<bool> = {
            let mut b = vec![false; m];
            for c in &comps {
                for &v in c {
                    b[v] = true;
                }
            }
            b
        };
        let c0: Vec<usize> = if m >= x + y + z {
            vec![w]
        } else {
            (0..m).filter(|&v| !in_c[v]).collect()
        };
        let rest: Vec<usize> = if m >= x + y + z {
            (0..m).filter(|&v| !in_c[v] && v != w).collect()
        } else {
            Vec::new()
        };
        let x1_near = x1 != w && c0.binary_search(&x1).is_ok();
        let total_rest: usize = comps[1..].iter().map(Vec::len).sum();
        // C_1 ∪ C_0 minus the given vertices and C'
        let base = |drop: &[usize]| -> Vec<usize> {
            let mut s: Vec<usize> = comps[0]
                .iter()
                .chain(c0.iter())
                .copied()
                .filter(|v| !drop.contains(v) && cp.binary_search(v).is_err())
                .collect();
            s.sort_unstable();
            s
        };
        let with = |extra: &[usize]| -> Vec<usize> {
            let mut s = cp.clone();
            s.extend_from_slice(extra);
            s.sort_unstable();
            s
        };

        let mut plans: Vec<Plan> = Vec::new();
        if refine.branch_a {
            let mut s0 = with(&c0);
            s0.dedup();
            let s1: Vec<usize> = comps[0]
                .iter()
                .copied()
                .filter(|v| cp.binary_search(v).is_err())
                .collect();
            let r0 = if x1_near { (x1, Some(w)) } else { (w, None) };
            plans.push(Plan {
                step: Step::CriticalTrim,
                s0,
                s1,
                roles1: (wp, Some(w1)),
                roles0: r0,
                proven: true,
            });
        } else if x1_near {
            if let Some(zv) = pinned_vertex(g, &base(&[wp]), w, x1) {
                let s0 = base(&[wp, zv]);
                plans.push(Plan {
                    step: Step::CriticalPinned,
                    s0,
                    s1: with(&[zv, wp]),
                    roles1: (wp, Some(zv)),
                    roles0: (x1, Some(w)),
                    proven: true,
                });
            }
            let lo = x - (total_rest + 2);
            let hi = x + y - (total_rest + 4);
            if let Some((a, k)) = swap_split(g, &comps[0], lo, hi) {
                let mut s0: Vec<usize> = k
                    .iter()
                    .chain(c0.iter())
                    .copied()
                    .filter(|&v| v != w)
                    .collect();
                s0.sort_unstable();
                let mut s1: Vec<usize> = comps[0]
                    .iter()
                    .copied()
                    .filter(|v| k.binary_search(v).is_err())
                    .collect();
                s1.push(w);
                s1.sort_unstable();
                let root = k.iter().copied().find(|&v| g.has_edge(v, a));
                plans.push(Plan {
                    step: Step::CriticalSwapped,
                    s0,
                    s1,
                    roles1: (w, Some(a)),
                    roles0: (x1, root),
                    proven: true,
                });
            }
            // w on v_t; w' needs its one neighbor left in T''_0 at level <= 2
            let s0 = base(&[w, wp]);
            let inner: Vec<usize> = g
                .neighbors(wp)
                .iter()
                .copied()
                .filter(|v| s0.binary_search(v).is_ok())
                .collect();
            plans.push(Plan {
                step: Step::CriticalSwapped,
                s0: s0.clone(),
                s1: with(&[w, wp]),
                roles1: (w, Some(wp)),
                roles0: (x1, inner.first().copied()),
                proven: inner.len() <= 1,
            });
            let r2 = if w1 != wp { Some(w1) } else { None };
            plans.push(Plan {
                step: Step::CriticalFallback,
                s0,
                s1: with(&[w, wp]),
                roles1: (wp, Some(w)),
                roles0: (x1, r2),
                proven: false,
            });
        } else {
            // w = x1, or x1 in the rest: keep w on v_{t-1}
            let r = base(&[w, wp]);
            let (zv, zn) = leaf_and_neighbor(g, &r).ok_or_else(|| {
                Error::Invariant("critical split: no leaf for the third sub-case".into())
            })?;
            let s0 = base(&[zv, wp]);
            plans.push(Plan {
                step: Step::CriticalLeaf,
                s0,
                s1: with(&[zv, wp]),
                roles1: (wp, Some(zv)),
                roles0: (w, Some(zn)),
                proven: true,
            });
        }
        let job = Job {
            comps: &comps,
            ws: &ws,
            rest: &rest,
            x1,
            w,
        };
        let mut last = None;
        for plan in plans {
            let mark = self.trace.records.len();
            self.record(plan.step, t, g, ids, &[w, wp]);
            if plan.proven {
                return self.execute(t, g, ids, &job, &plan, phi);
            }
            match self.execute(t, g, ids, &job, &plan, phi.clone()) {
                Ok(out) if check_call(t, g, x1, x1, &out).is_ok() => return Ok(out),
                Ok(_) => {
                    last = Some(Error::Invariant(format!(
                        "{:?} attempt left an edge unmapped",
                        plan.step
                    )))
                }
                Err(e) => last = Some(e),
            }
            self.trace.records.truncate(mark);
        }
        Err(last.unwrap_or_else(|| Error::Invariant("critical split: no plan".into())))
    }

    fn execute(
        &mut self,
        t: &OrderedTree,
        g: &Forest,
        ids: &[usize],
        job: &Job,
        plan: &Plan,
        mut phi: Vec<usize>,
    ) -> Result<Vec<usize>> {
        let (n, m) = (t.len(), g.len());
        let kids = t.children(0);
        let tc = kids.len();
        let (vt2, vt1, vt) = (kids[tc - 3], kids[tc - 2], kids[tc - 1]);
        let mut used = 0;
        for j in (1..job.comps.len()).rev() {
            let cur = t.prefix(n - used)?;
            let view = View::subtree(&cur, vt);
            let mut cj = job.comps[j].clone();
            cj.sort_unstable();
            self.sub(
                &view,
                g,
                ids,
                &cj,
                Some(job.ws[j]),
                Some(job.ws[j]),
                &mut phi,
            )?;
            if t.parent(phi[job.ws[j]]) != Some(vt) {
                return Err(Error::Invariant(format!(
                    "critical split: piece {j} root not a child of v_t"
                )));
            }
            used += cj.len();
        }
        let (s0, s1) = (&plan.s0, &plan.s1);
        let view = View::merge(&t.prefix(n - used)?, &[vt1, vt])?;
        self.sub(
            &view,
            g,
            ids,
            s1,
            Some(plan.roles1.0),
            plan.roles1.1,
            &mut phi,
        )?;
        if phi[plan.roles1.0] != vt {
            return Err(Error::Invariant(format!(
                "critical split: {:?} anchor not on v_t",
                plan.step
            )));
        }
        used += s1.len();
        let view = View::merge(&t.prefix(n - used)?, &[vt2, vt1])?;
        self.sub(
            &view,
            g,
            ids,
            s0,
            Some(plan.roles0.0),
            plan.roles0.1,
            &mut phi,
        )?;
        if s0.binary_search(&plan.roles0.0).is_ok() && phi[plan.roles0.0] != vt1 {
            return Err(Error::Invariant(format!(
                "critical split: {:?} anchor on level {} instead of v_(t-1)",
                plan.step,
                t.level(phi[plan.roles0.0])
            )));
        }
        used += s0.len();
        if !job.rest.is_empty() {
            let view = View::prefix(t, n - used)?;
            let r1 = if job.rest.binary_search(&job.x1).is_ok() {
                Some(job.x1)
            } else {
                None
            };
            self.sub(&view, g, ids, job.rest, r1, r1, &mut phi)?;
        }
        if job.x1 == job.w && m == n {
            let u = phi.iter().position(|&h| h == 0).unwrap();
            phi[u] = phi[job.x1];
            phi[job.x1] = 0;
        }
        Ok(phi)
    }
}

/// Vertex sets and roles for one way of finishing a critical split.
struct Plan {
    step: Step,
    /// Goes into the merge of `v_{t-2}` and `v_{t-1}`.
    s0: Vec<usize>,
    /// Goes into the merge of `v_{t-1}` and `v_t`.
    s1: Vec<usize>,
    roles1: (usize, Option<usize>),
    roles0: (usize, Option<usize>),
    /// Whether every edge is covered by construction; otherwise the result
    /// is checked and the next plan tried.
    proven: bool,
}

struct Job<'a> {
    comps: &'a [Vec<usize>],
    ws: &'a [usize],
    rest: &'a [usize],
    x1: usize,
    w: usize,
}

/// A vertex `a` of the tree `g[c1]` and one `a`-component `K` of it (possibly
/// empty) such that `|c1| - 1 - |K|` lies in `[lo, hi]`. Largest `a` first,
/// then smallest qualifying component.
fn swap_split(g: &Forest, c1: &[usize], lo: usize, hi: usize) -> Option<(usize, Vec<usize>)> {
    let sub = g.induced(c1);
    let total = c1.len() - 1;
    if (lo..=hi).contains(&total) {
        return Some((c1[c1.len() - 1], Vec::new()));
    }
    for a in (0..c1.len()).rev() {
        let (comp, count) = sub.components_without(a);
        let mut sizes = vec![0usize; count];
        for (v, &c) in comp.iter().enumerate() {
            if v != a {
                sizes[c] += 1;
            }
        }
        let pick = (0..count)
            .filter(|&c| total >= sizes[c] && (lo..=hi).contains(&(total - sizes[c])))
            .min_by_key(|&c| sizes[c]);
        if let Some(c) = pick {
            let k = (0..c1.len())
                .filter(|&v| v != a && comp[v] == c)
                .map(|v| c1[v])
                .collect();
            return Some((c1[a], k));
        }
    }
    None
}

/// A vertex of `set` other than `w`, `x1` whose neighbors inside `set` are
/// among `w`, `x1`; largest id first.
fn pinned_vertex(g: &Forest, set: &[usize], w: usize, x1: usize) -> Option<usize> {
    set.iter().rev().copied().find(|&v| {
        v != w
            && v != x1
            && g.neighbors(v)
                .iter()
                .all(|&u| u == w || u == x1 || set.binary_search(&u).is_err())
    })
}

/// Per-call contract: image is a final DFS segment, injective, `x1` at
/// minimum level, `x2` at level <= 2 when required, and every edge of the
/// (chained) guest lands on an edge of `G^2_t`.
fn check_call(t: &OrderedTree, g: &Forest, x1: usize, x2: usize, phi: &[usize]) -> Result<()> {
    let (n, m) = (t.len(), g.len());
    let mut seen = vec![false; n];
    for &h in phi {
        if h < n - m || h >= n || seen[h] {
            return Err(Error::Invariant(format!(
                "image {h} breaks the final segment [{}, {n})",
                n - m
            )));
        }
        seen[h] = true;
    }
    let min = phi.iter().map(|&h| t.level(h)).min().unwrap();
    if t.level(phi[x1]) != min {
        return Err(Error::Invariant(format!(
            "x1 at level {} above minimum {min}",
            t.level(phi[x1])
        )));
    }
    let kids = t.children(0);
    if kids.len() == 2 {
        let nu = t.nu(kids[1]);
        if nu >= 2 && m >= nu && m + 2 <= n && t.level(phi[x2]) > 2 {
            return Err(Error::Invariant(format!(
                "x2 at level {}",
                t.level(phi[x2])
            )));
        }
    }
    for (a, b) in g.edges() {
        if !adjacent(t, 2, phi[a], phi[b]) {
            return Err(Error::Invariant(format!(
                "edge ({a},{b}) mapped to non-adjacent ({},{}) in host of size {n}",
                phi[a], phi[b]
            )));
        }
    }
    Ok(())
}
