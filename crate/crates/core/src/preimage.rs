//! Exhaustive preimage search for small graphs.
//!
//! Each graph node `x` becomes an arc with two endpoint variables, `T(x)`
//! and `H(x)`. A preimage is a partition of the `2m` variables into digraph
//! nodes, so the search enumerates set partitions in restricted-growth
//! order: every partition, hence every preimage up to labeled isomorphism,
//! is produced exactly once. Only sink-normalized preimages are produced
//! (every sink has exactly one entering arc), since any preimage can be
//! normalized without changing its intersection graph.

use std::collections::HashSet;
use std::ops::ControlFlow;
use std::time::Instant;

use serde::Serialize;

use crate::error::{FlgError, Result};
use crate::graph::{Digraph, UGraph};
use crate::intersect::{check_certificate, ArcCertificate};

const NONE: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    /// Maximum number of digraph nodes; `None` means `2m`.
    pub node_budget: Option<usize>,
    /// Maximum number of variable assignments tried.
    pub max_steps: u64,
    /// Re-check pairwise that no two results are labeled-isomorphic.
    pub dedup: bool,
    /// Wall-clock cutoff, checked every few thousand steps.
    pub deadline: Option<Instant>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            node_budget: None,
            max_steps: 2_000_000_000,
            dedup: true,
            deadline: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    pub steps: u64,
    pub found: usize,
    /// Stopped early because the visitor asked to.
    pub stopped: bool,
}

#[derive(Debug, Clone)]
pub struct PreimageSet {
    /// Every member uses the identity certificate: arc `i` is graph node `i`.
    pub members: Vec<(Digraph, ArcCertificate)>,
    pub canonical: bool,
    pub stats: SearchStats,
}

impl PreimageSet {
    pub fn count(&self) -> usize {
        self.members.len()
    }
}

#[derive(Debug, Clone)]
pub enum Decision {
    Yes(Digraph, ArcCertificate),
    No,
    Unknown { steps: u64 },
}

struct Search<'a> {
    g: &'a UGraph,
    order: Vec<u32>,
    cls: Vec<u32>,
    members: Vec<Vec<u32>>,
    tails: Vec<u32>,
    node_budget: usize,
    max_steps: u64,
    deadline: Option<Instant>,
    steps: u64,
    found: usize,
}

#[inline]
fn node_of(v: u32) -> usize {
    (v >> 1) as usize
}

#[inline]
fn is_tail(v: u32) -> bool {
    v & 1 == 0
}

impl<'a> Search<'a> {
    fn new(g: &'a UGraph, node_budget: usize, max_steps: u64) -> Self {
        let m = g.node_count();
        Search {
            g,
            order: variable_order(g),
            cls: vec![NONE; 2 * m],
            members: Vec::new(),
            tails: Vec::new(),
            node_budget,
            max_steps,
            deadline: None,
            steps: 0,
            found: 0,
        }
    }

    /// Variables that may never share a digraph node.
    fn forbidden(&self, v: u32, w: u32) -> bool {
        let (x, y) = (node_of(v), node_of(w));
        if x == y {
            return true;
        }
        if self.g.has_edge(x, y) {
            return false;
        }
        // Non-adjacent arcs may only share their heads.
        is_tail(v) || is_tail(w)
    }


    /// Some adjacency case for `x`, `y` is still satisfiable.
    fn pair_possible(&self, x: usize, y: usize) -> bool {
        let t = |z: usize| self.cls[2 * z];
        let h = |z: usize| self.cls[2 * z + 1];
        let may_equal = |a: u32, b: u32| a == NONE || b == NONE || a == b;
        may_equal(t(x), t(y)) || may_equal(h(x), t(y)) || may_equal(h(y), t(x))
    }

    /// A class holding only heads needs an unassigned tail able to join
    /// it, unless it holds a single head.
    fn sink_possible(&self, k: usize) -> bool {
        if self.tails[k] > 0 || self.members[k].len() < 2 {
            return true;
        }
        let heads = &self.members[k];
        let first = node_of(heads[0]);
        self.g.neighbors(first).iter().any(|&z| {
            self.cls[2 * z] == NONE
                && heads
                    .iter()
                    .all(|&hv| node_of(hv) != z && self.g.has_edge(node_of(hv), z))
        })
    }

    fn consistent_after(&self, v: u32, k: usize) -> bool {
        let x = node_of(v);
        if !self.g.neighbors(x).iter().all(|&y| self.pair_possible(x, y)) {
            return false;
        }
        self.sink_possible(k)
    }

    fn assign(&mut self, v: u32, k: usize) {
        if k == self.members.len() {
            self.members.push(Vec::new());
            self.tails.push(0);
        }
        self.members[k].push(v);
        if is_tail(v) {
            self.tails[k] += 1;
        }
        self.cls[v as usize] = k as u32;
    }

    fn unassign(&mut self, v: u32, k: usize) {
        self.members[k].pop();
        if is_tail(v) {
            self.tails[k] -= 1;
        }
        if self.members[k].is_empty() {
            self.members.pop();
            self.tails.pop();
        }
        self.cls[v as usize] = NONE;
    }

    fn complete(&self) -> bool {
        (0..self.members.len()).all(|k| self.tails[k] > 0 || self.members[k].len() == 1)
    }

    fn digraph(&self) -> Digraph {
        let m = self.g.node_count();
        Digraph::from_arcs(
            self.members.len(),
            (0..m).map(|x| (self.cls[2 * x] as usize, self.cls[2 * x + 1] as usize)),
        )
        .expect("tail and head classes differ")
    }

    fn run<F>(&mut self, depth: usize, visit: &mut F) -> Result<ControlFlow<()>>
    where
        F: FnMut(&Digraph) -> ControlFlow<()>,
    {
        if depth == self.order.len() {
            if !self.complete() {
                return Ok(ControlFlow::Continue(()));
            }
            self.found += 1;
            return Ok(visit(&self.digraph()));
        }
        let v = self.order[depth];
        let open = self.members.len();
        let limit = if open < self.node_budget { open + 1 } else { open };
        for k in 0..limit {
            self.steps += 1;
            let late = self.steps.is_multiple_of(4096) && self.deadline.is_some_and(|d| Instant::now() > d);
            if self.steps > self.max_steps || late {
                return Err(FlgError::BudgetExhausted(self.steps));
            }
            if k < open && self.members[k].iter().any(|&w| self.forbidden(v, w)) {
                continue;
            }
            self.assign(v, k);
            if self.consistent_after(v, k) && self.run(depth + 1, visit)?.is_break() {
                self.unassign(v, k);
                return Ok(ControlFlow::Break(()));
            }
            self.unassign(v, k);
        }
        Ok(ControlFlow::Continue(()))
    }
}

/// Nodes in max-connectivity order (each next node has the most already
/// placed neighbours), tail variable before head variable.
fn variable_order(g: &UGraph) -> Vec<u32> {
    let m = g.node_count();
    let mut placed = vec![false; m];
    let mut links = vec![0usize; m];
    let mut order = Vec::with_capacity(2 * m);
    for _ in 0..m {
        let next = (0..m)
            .filter(|&x| !placed[x])
            .max_by_key(|&x| (links[x], g.degree(x), std::cmp::Reverse(x)))
            .expect("unplaced node");
        placed[next] = true;
        for &y in g.neighbors(next) {
            links[y] += 1;
        }
        order.push(2 * next as u32);
        order.push(2 * next as u32 + 1);
    }
    order
}

/// Streams every sink-normalized preimage of `g` to `visit`; graph node
/// `i` is arc `i` of each digraph.
pub fn for_each_preimage<F>(g: &UGraph, opts: &SearchOptions, mut visit: F) -> Result<SearchStats>
where
    F: FnMut(&Digraph) -> ControlFlow<()>,
{
    let budget = opts.node_budget.unwrap_or(2 * g.node_count());
    let mut s = Search::new(g, budget, opts.max_steps);
    s.deadline = opts.deadline;
    let flow = s.run(0, &mut visit)?;
    Ok(SearchStats {
        steps: s.steps,
        found: s.found,
        stopped: flow.is_break(),
    })
}

/// All sink-normalized preimages of `g`, one per labeled-isomorphism class.
pub fn enumerate_preimages(g: &UGraph, opts: &SearchOptions) -> Result<PreimageSet> {
    let mut members = Vec::new();
    let stats = for_each_preimage(g, opts, |d| {
        members.push((d.clone(), ArcCertificate::identity(g.node_count())));
        ControlFlow::Continue(())
    })?;
    for (d, cert) in &members {
        if !check_certificate(g, d, cert)? {
            return Err(FlgError::Internal("search produced a non-preimage".into()));
        }
    }
    if opts.dedup {
        for i in 0..members.len() {
            for j in i + 1..members.len() {
                let (a, ca) = &members[i];
                let (b, cb) = &members[j];
                if labeled_digraph_iso(a, b, ca, cb) {
                    return Err(FlgError::Internal(format!(
                        "preimages {i} and {j} are isomorphic"
                    )));
                }
            }
        }
    }
    Ok(PreimageSet {
        members,
        canonical: opts.dedup,
        stats,
    })
}

/// Exhaustive decision with a step budget.
pub fn has_preimage(g: &UGraph, max_steps: u64) -> Decision {
    if g.node_count() == 0 {
        return Decision::Yes(Digraph::new(0), ArcCertificate::identity(0));
    }
    let opts = SearchOptions {
        max_steps,
        ..SearchOptions::default()
    };
    let mut witness = None;
    let result = for_each_preimage(g, &opts, |d| {
        witness = Some(d.clone());
        ControlFlow::Break(())
    });
    match (result, witness) {
        (_, Some(d)) => Decision::Yes(d, ArcCertificate::identity(g.node_count())),
        (Ok(_), None) => Decision::No,
        (Err(_), None) => Decision::Unknown { steps: max_steps },
    }
}

/// Whether some node bijection maps arc `cert1[x]` of `d1` onto arc
/// `cert2[x]` of `d2` for every graph node `x`. The bijection is forced by
/// the arcs, so this is a linear check.
pub fn labeled_digraph_iso(
    d1: &Digraph,
    d2: &Digraph,
    cert1: &ArcCertificate,
    cert2: &ArcCertificate,
) -> bool {
    if d1.node_count() != d2.node_count()
        || d1.arc_count() != d2.arc_count()
        || cert1.map.len() != cert2.map.len()
    {
        return false;
    }
    let mut fwd = vec![usize::MAX; d1.node_count()];
    let mut bwd = vec![usize::MAX; d2.node_count()];
    let mut bind = |u: usize, v: usize| {
        if fwd[u] == usize::MAX && bwd[v] == usize::MAX {
            fwd[u] = v;
            bwd[v] = u;
            true
        } else {
            fwd[u] == v && bwd[v] == u
        }
    };
    for (&a1, &a2) in cert1.map.iter().zip(&cert2.map) {
        if a1 >= d1.arc_count() || a2 >= d2.arc_count() {
            return false;
        }
        let (x, y) = (d1.arc(a1), d2.arc(a2));
        if !bind(x.tail, y.tail) || !bind(x.head, y.head) {
            return false;
        }
    }
    // Isolated nodes pair up arbitrarily; counts already match.
    true
}

/// Automorphisms of `g` as node permutations, or `None` past `limit`.
pub fn automorphisms(g: &UGraph, limit: usize) -> Option<Vec<Vec<usize>>> {
    let n = g.node_count();
    // Refine by degree, then by the sorted degrees of the neighbourhood.
    let mut color: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    for _ in 0..n {
        let sig: Vec<(usize, Vec<usize>)> = (0..n)
            .map(|v| {
                let mut nb: Vec<usize> = g.neighbors(v).iter().map(|&w| color[w]).collect();
                nb.sort_unstable();
                (color[v], nb)
            })
            .collect();
        let mut keys = sig.clone();
        keys.sort();
        keys.dedup();
        let next: Vec<usize> = sig
            .iter()
            .map(|s| keys.binary_search(s).expect("present"))
            .collect();
        let stable = distinct(&next) == distinct(&color);
        color = next;
        if stable {
            break;
        }
    }
    let mut out = Vec::new();
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    if extend_aut(g, &color, 0, &mut map, &mut used, &mut out, limit) {
        Some(out)
    } else {
        None
    }
}

fn distinct(c: &[usize]) -> usize {
    c.iter().collect::<HashSet<_>>().len()
}

fn extend_aut(
    g: &UGraph,
    color: &[usize],
    v: usize,
    map: &mut Vec<usize>,
    used: &mut Vec<bool>,
    out: &mut Vec<Vec<usize>>,
    limit: usize,
) -> bool {
    if v == g.node_count() {
        out.push(map.clone());
        return out.len() <= limit;
    }
    for w in 0..g.node_count() {
        if used[w] || color[w] != color[v] {
            continue;
        }
        let ok = g
            .neighbors(v)
            .iter()
            .filter(|&&u| u < v)
            .all(|&u| g.has_edge(map[u], w))
            && (0..v).filter(|&u| !g.has_edge(u, v)).all(|u| !g.has_edge(map[u], w));
        if !ok {
            continue;
        }
        map[v] = w;
        used[w] = true;
        let keep = extend_aut(g, color, v + 1, map, used, out, limit);
        used[w] = false;
        map[v] = usize::MAX;
        if !keep {
            return false;
        }
    }
    true
}

/// Canonical labeled form: endpoint classes renumbered in variable order.
fn canonical_form(d: &Digraph, relabel: impl Fn(usize) -> usize) -> Vec<u32> {
    canonical_form_on(d, relabel, |_| true)
}

/// Canonical form of the arcs whose (relabeled) graph node passes `keep`.
fn canonical_form_on(d: &Digraph, relabel: impl Fn(usize) -> usize, keep: impl Fn(usize) -> bool) -> Vec<u32> {
    let m = d.arc_count();
    let mut raw = vec![usize::MAX; 2 * m];
    for x in 0..m {
        let a = d.arc(x);
        let y = relabel(x);
        raw[2 * y] = a.tail;
        raw[2 * y + 1] = a.head;
    }
    let mut rename = vec![NONE; d.node_count()];
    let mut next = 0;
    raw.iter()
        .enumerate()
        .filter(|&(i, _)| keep(i / 2))
        .map(|(_, &c)| {
            if rename[c] == NONE {
                rename[c] = next;
                next += 1;
            }
            rename[c]
        })
        .collect()
}

/// Number of preimages up to isomorphism, i.e. orbits of the automorphism
/// group of `g` acting on preimages with the identity certificate.
pub fn count_up_to_automorphism(g: &UGraph, preimages: &[Digraph], aut_limit: usize) -> Option<usize> {
    let auts = automorphisms(g, aut_limit)?;
    let mut seen = HashSet::new();
    let mut orbits = 0;
    for d in preimages {
        if seen.contains(&canonical_form(d, |x| x)) {
            continue;
        }
        orbits += 1;
        for p in &auts {
            seen.insert(canonical_form(d, |x| p[x]));
        }
    }
    Some(orbits)
}

/// Orbits of preimages restricted to the arcs of graph nodes of degree at
/// least 2, so pendant arcs are ignored.
pub fn count_core_shapes(g: &UGraph, preimages: &[Digraph], aut_limit: usize) -> Option<usize> {
    let auts = automorphisms(g, aut_limit)?;
    let core = |x: usize| g.degree(x) >= 2;
    let mut seen = HashSet::new();
    let mut orbits = 0;
    for d in preimages {
        if seen.contains(&canonical_form_on(d, |x| x, core)) {
            continue;
        }
        orbits += 1;
        for p in &auts {
            seen.insert(canonical_form_on(d, |x| p[x], core));
        }
    }
    Some(orbits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intersect::intersection_graph;

    fn opts() -> SearchOptions {
        SearchOptions::default()
    }

    #[test]
    fn single_edge_preimages() {
        let g = UGraph::from_edges(2, [(0, 1)]).unwrap();
        let set = enumerate_preimages(&g, &opts()).unwrap();
        // Shared tail, 0 enters 1, 1 enters 0, antiparallel.
        assert_eq!(set.count(), 4);
    }

    #[test]
    fn c4_preimages_check() {
        let g = UGraph::from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        let set = enumerate_preimages(&g, &opts()).unwrap();
        assert!(set.count() > 0);
    }

    #[test]
    fn iso_examples() {
        let d = Digraph::from_arcs(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let id = ArcCertificate::identity(4);
        assert!(labeled_digraph_iso(&d, &d, &id, &id));
        let relabeled = Digraph::from_arcs(4, [(3, 2), (2, 1), (1, 0), (0, 3)]).unwrap();
        assert!(labeled_digraph_iso(&d, &relabeled, &id, &id));
        let rotated = ArcCertificate {
            map: vec![1, 2, 3, 0],
        };
        assert!(labeled_digraph_iso(&d, &d, &id, &rotated));
        let path = Digraph::from_arcs(4, [(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        assert!(!labeled_digraph_iso(&d, &path, &id, &id));
    }

    #[test]
    fn budget_is_reported() {
        let d = Digraph::from_arcs(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]).unwrap();
        let (g, _) = intersection_graph(&d).unwrap();
        assert!(matches!(has_preimage(&g, 3), Decision::Unknown { .. }));
        assert!(matches!(has_preimage(&g, 1_000_000), Decision::Yes(..)));
    }

    #[test]
    fn k23_has_no_preimage() {
        let g = UGraph::from_edges(5, [(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4)]).unwrap();
        assert!(matches!(has_preimage(&g, 10_000_000), Decision::No));
    }

    #[test]
    fn automorphism_counts() {
        let c5 = UGraph::from_edges(5, (0..5).map(|i| (i, (i + 1) % 5))).unwrap();
        assert_eq!(automorphisms(&c5, 1000).unwrap().len(), 10);
        let k13 = UGraph::from_edges(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(automorphisms(&k13, 1000).unwrap().len(), 6);
    }
}
