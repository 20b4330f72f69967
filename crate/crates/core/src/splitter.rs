//! Cutting a forest at one vertex into pieces of controlled total size.
//!
//! All routines work on a [`Forest`] and return vertex sets of components of
//! the forest with the cut vertex removed. Ties break towards the component
//! with the smallest vertex id.

use crate::error::{Error, Result};
use crate::forest::Forest;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Plain,
    /// `x <= |C ∪ {w}| <= x + y - 2`.
    Feasible,
    /// At least two components, `x + y - 2 <= |C| <= 2x - 3`, and dropping
    /// any one component leaves at most `x - 2`.
    Critical,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Collection {
    /// The cut vertex.
    pub w: usize,
    /// Chosen components of the forest minus `w`, each sorted.
    pub components: Vec<Vec<usize>>,
    pub kind: Kind,
}

impl Collection {
    pub fn total(&self) -> usize {
        self.components.iter().map(Vec::len).sum()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.components.iter().any(|c| c.binary_search(&v).is_ok())
    }
}

/// Components of `f - w`, excluding the one holding `avoid`, restricted to
/// the vertex set `scope` (a union of components of `f - w` plus possibly
/// `w`). Sorted by size descending, then smallest id.
fn pieces(f: &Forest, w: usize, avoid: Option<usize>, scope: &[bool]) -> Vec<Vec<usize>> {
    let n = f.len();
    let mut seen = vec![false; n];
    seen[w] = true;
    let mut out = Vec::new();
    for s in 0..n {
        if seen[s] || !scope[s] {
            continue;
        }
        let mut comp = vec![s];
        seen[s] = true;
        let mut i = 0;
        while i < comp.len() {
            let u = comp[i];
            i += 1;
            for &x in f.neighbors(u) {
                if !seen[x] && scope[x] {
                    seen[x] = true;
                    comp.push(x);
                }
            }
        }
        comp.sort_unstable();
        if avoid.is_some_and(|a| comp.binary_search(&a).is_ok()) {
            continue;
        }
        out.push(comp);
    }
    out.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
    out
}

/// Where the walk stands: cut vertex, the component it came from, and the
/// region (a component of the forest) still being searched.
struct Walk {
    w: usize,
    from: Option<usize>,
    scope: Vec<bool>,
}

impl Walk {
    fn start(f: &Forest, u: usize) -> Self {
        Walk {
            w: u,
            from: None,
            scope: vec![true; f.len()],
        }
    }

    fn available(&self, f: &Forest) -> Vec<Vec<usize>> {
        pieces(f, self.w, self.from, &self.scope)
    }

    /// Moves into `comp`, a component of `f - w` not containing `from`.
    fn descend(&mut self, f: &Forest, comp: &[usize]) {
        let next = comp
            .iter()
            .copied()
            .find(|&c| f.has_edge(c, self.w))
            .unwrap_or(comp[0]);
        let mut scope = vec![false; f.len()];
        for &c in comp {
            scope[c] = true;
        }
        // the old cut vertex stays reachable so its side can be excluded
        scope[self.w] = true;
        self.from = Some(self.w);
        self.w = next;
        self.scope = scope;
    }
}

/// Finds `w` and components of `f - w` avoiding `u` with total size in
/// `[x, 2x - 1]`.
pub fn find_components_window(f: &Forest, u: usize, x: usize) -> Result<Collection> {
    if x == 0 || f.len() < x + 1 || u >= f.len() {
        return Err(Error::Precondition(format!(
            "window search needs x >= 1 and at least x+1 = {} vertices, got {}",
            x + 1,
            f.len()
        )));
    }
    let mut walk = Walk::start(f, u);
    loop {
        let avail = walk.available(f);
        if let Some(c) = avail
            .iter()
            .filter(|c| c.len() >= x && c.len() < 2 * x)
            .min_by_key(|c| c[0])
        {
            return Ok(Collection {
                w: walk.w,
                components: vec![c.clone()],
                kind: Kind::Plain,
            });
        }
        if let Some(big) = avail.iter().find(|c| c.len() >= 2 * x) {
            let big = big.clone();
            walk.descend(f, &big);
            continue;
        }
        let mut chosen = Vec::new();
        let mut sum = 0;
        for c in avail {
            if sum >= x {
                break;
            }
            sum += c.len();
            chosen.push(c);
        }
        debug_assert!(sum >= x && sum < 2 * x);
        return Ok(Collection {
            w: walk.w,
            components: chosen,
            kind: Kind::Plain,
        });
    }
}

/// Finds `w` and components avoiding `u` that are either feasible or
/// critical for `(x, y)`, `x > y >= 2`.
pub fn find_feasible_or_critical(f: &Forest, u: usize, x: usize, y: usize) -> Result<Collection> {
    if !(x > y && y >= 2) || f.len() < x || u >= f.len() {
        return Err(Error::Precondition(format!(
            "need x > y >= 2 and at least x vertices (x={x}, y={y}, n={})",
            f.len()
        )));
    }
    let start = find_components_window(f, u, x - 1)?;
    let mut w = start.w;
    let mut comps = start.components;
    loop {
        let total: usize = comps.iter().map(Vec::len).sum();
        if total + 1 <= x + y - 2 {
            return Ok(Collection {
                w,
                components: comps,
                kind: Kind::Feasible,
            });
        }
        // minimal subfamily reaching x + y - 2
        comps.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
        let mut d: Vec<Vec<usize>> = Vec::new();
        let mut sum = 0;
        for c in comps.iter() {
            if sum >= x + y - 2 {
                break;
            }
            sum += c.len();
            d.push(c.clone());
        }
        let mut i = 0;
        while i < d.len() {
            if sum - d[i].len() >= x + y - 2 {
                sum -= d[i].len();
                d.remove(i);
            } else {
                i += 1;
            }
        }
        if d.len() >= 2 {
            let (mi, min) = d
                .iter()
                .enumerate()
                .min_by_key(|(_, c)| (c.len(), c[0]))
                .unwrap();
            if sum - min.len() >= x - 1 {
                d.remove(mi);
                return Ok(Collection {
                    w,
                    components: d,
                    kind: Kind::Feasible,
                });
            }
            return Ok(Collection {
                w,
                components: d,
                kind: Kind::Critical,
            });
        }
        // single component: step to its vertex next to w
        let d1 = d.pop().unwrap();
        let next = d1
            .iter()
            .copied()
            .find(|&c| f.has_edge(c, w))
            .unwrap_or(d1[0]);
        let mut scope = vec![false; f.len()];
        for &c in &d1 {
            scope[c] = true;
        }
        comps = pieces(f, next, None, &scope);
        w = next;
    }
}

/// Output of [`refine_critical`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Refinement {
    pub w_prime: usize,
    pub components: Vec<Vec<usize>>,
    /// `true` for the branch where `T'_0` minus the pieces and `w` is in the
    /// window, `false` for the branch built around the other components.
    pub branch_a: bool,
}

/// Splits the smallest component of a critical collection.
///
/// `f` is the forest spanned by `w` and the components, `comps` are sorted
/// by size ascending, `w1` is the neighbor of `w` in `comps[0]`. Needs
/// `x <= 4y`, which host subtree sizes in a (4,1)-tree always satisfy;
/// without it the second branch can overshoot its window.
pub fn refine_critical(
    f: &Forest,
    w: usize,
    comps: &[Vec<usize>],
    x: usize,
    y: usize,
) -> Result<Refinement> {
    let total: usize = comps.iter().map(Vec::len).sum();
    let max_part = total - comps.iter().map(Vec::len).min().unwrap_or(0);
    if comps.len() < 2 || total + 2 < x + y || total + 3 > 2 * x || max_part + 2 > x {
        return Err(Error::Precondition("collection is not critical".into()));
    }
    if x > 4 * y {
        return Err(Error::Precondition(format!("x = {x} above 4y = {}", 4 * y)));
    }
    let c1 = &comps[0];
    let w1 = c1
        .iter()
        .copied()
        .find(|&c| f.has_edge(c, w))
        .ok_or_else(|| Error::Precondition("smallest component not attached to w".into()))?;
    let t0 = total + 1;
    let zp = t0 as i64 - x as i64 - y as i64;
    let sub = f.induced(c1);
    let local_w1 = c1.binary_search(&w1).unwrap();
    let lift = |col: Collection| -> (usize, Vec<Vec<usize>>) {
        let comps = col
            .components
            .iter()
            .map(|c| c.iter().map(|&i| c1[i]).collect::<Vec<_>>())
            .collect();
        (c1[col.w], comps)
    };
    if zp <= y as i64 - 2 {
        if zp + 1 == 0 {
            return Ok(Refinement {
                w_prime: w1,
                components: Vec::new(),
                branch_a: true,
            });
        }
        let col = find_components_window(&sub, local_w1, (zp + 1) as usize)?;
        let (wp, cs) = lift(col);
        return Ok(Refinement {
            w_prime: wp,
            components: cs,
            branch_a: true,
        });
    }
    let rest: usize = comps[1..].iter().map(Vec::len).sum();
    let target = x as i64 - rest as i64 - 2;
    if target <= 0 {
        return Ok(Refinement {
            w_prime: w1,
            components: Vec::new(),
            branch_a: false,
        });
    }
    let col = find_components_window(&sub, local_w1, target as usize)?;
    let (wp, cs) = lift(col);
    Ok(Refinement {
        w_prime: wp,
        components: cs,
        branch_a: false,
    })
}

/// Independent check that `col` is a valid collection for `f`: each set is
/// exactly one component of `f - w`, sets are distinct, none holds `u`.
pub fn components_are_valid(f: &Forest, col: &Collection, u: usize) -> bool {
    let (comp, _) = f.components_without(col.w);
    let mut used = std::collections::HashSet::new();
    for c in &col.components {
        if c.is_empty() || c.contains(&col.w) || c.contains(&u) {
            return false;
        }
        let id = comp[c[0]];
        if !used.insert(id) {
            return false;
        }
        let size = comp.iter().filter(|&&k| k == id).count();
        if size != c.len() || c.iter().any(|&v| comp[v] != id) {
            return false;
        }
    }
    true
}
