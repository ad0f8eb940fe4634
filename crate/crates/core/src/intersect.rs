//! Building `I(D)`, checking that a digraph is a preimage of a graph, and
//! the structural facts about preimages (sinks, forks, cycles, patterns).

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{FlgError, Result};
use crate::graph::{Arc, CyclePartition, Digraph, UGraph};

/// `map[x]` is the arc of the digraph that represents graph node `x`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArcCertificate {
    pub map: Vec<usize>,
}

impl ArcCertificate {
    pub fn identity(n: usize) -> Self {
        ArcCertificate {
            map: (0..n).collect(),
        }
    }

    /// Inverse map (arc -> graph node), or an error if the map is not a
    /// bijection onto `0..arc_count`.
    pub fn inverse(&self, arc_count: usize) -> Result<Vec<usize>> {
        if self.map.len() != arc_count {
            return Err(FlgError::BadCertificate(format!(
                "{} graph nodes but {} arcs",
                self.map.len(),
                arc_count
            )));
        }
        let mut inv = vec![usize::MAX; arc_count];
        for (x, &a) in self.map.iter().enumerate() {
            if a >= arc_count {
                return Err(FlgError::BadCertificate(format!("arc {a} does not exist")));
            }
            if inv[a] != usize::MAX {
                return Err(FlgError::BadCertificate(format!(
                    "arc {a} assigned to nodes {} and {x}",
                    inv[a]
                )));
            }
            inv[a] = x;
        }
        Ok(inv)
    }
}

/// The four-case adjacency rule for two distinct arcs.
pub fn arcs_adjacent(a: Arc, b: Arc) -> bool {
    a.tail == b.tail || a.head == b.tail || b.head == a.tail
}

/// Calls `f(i, j)` for every adjacent pair of arc indices. A pair may be
/// reported twice (an antiparallel pair is seen from both of its nodes).
fn for_each_adjacent_pair(d: &Digraph, mut f: impl FnMut(usize, usize) -> bool) -> bool {
    let out = d.out_arcs();
    let inc = d.in_arcs();
    for v in 0..d.node_count() {
        let o = &out[v];
        for (k, &x) in o.iter().enumerate() {
            for &y in &o[k + 1..] {
                if !f(x, y) {
                    return false;
                }
            }
        }
        for &x in &inc[v] {
            for &y in o {
                if !f(x, y) {
                    return false;
                }
            }
        }
    }
    true
}

/// `I(D)` with the identity certificate (graph node `i` is arc `i`).
pub fn intersection_graph(d: &Digraph) -> Result<(UGraph, ArcCertificate)> {
    if d.arc_count() == 0 {
        return Err(FlgError::EmptyArcSet);
    }
    let mut pairs = Vec::new();
    for_each_adjacent_pair(d, |x, y| {
        pairs.push((x.min(y), x.max(y)));
        true
    });
    pairs.sort_unstable();
    pairs.dedup();
    let g = UGraph::from_edges(d.arc_count(), pairs)?;
    Ok((g, ArcCertificate::identity(d.arc_count())))
}

/// Decides `g = I(d)` under the given node-to-arc bijection, in
/// `O(|E| log |E|)`; gives up early if `d` has more adjacencies than `g`.
pub fn check_certificate(g: &UGraph, d: &Digraph, cert: &ArcCertificate) -> Result<bool> {
    if cert.map.len() != g.node_count() {
        return Err(FlgError::BadCertificate(format!(
            "certificate covers {} nodes, graph has {}",
            cert.map.len(),
            g.node_count()
        )));
    }
    let inv = cert.inverse(d.arc_count())?;
    let limit = 2 * g.edge_count();
    let mut pairs = Vec::new();
    let mut ok = for_each_adjacent_pair(d, |x, y| {
        let (u, v) = (inv[x], inv[y]);
        if pairs.len() >= limit || !g.has_edge(u, v) {
            return false;
        }
        pairs.push((u.min(v), u.max(v)));
        true
    });
    if ok {
        pairs.sort_unstable();
        pairs.dedup();
        ok = pairs.len() == g.edge_count();
    }
    Ok(ok)
}

/// Gives every sink a single entering arc by splitting it; the first
/// entering arc (in arc order) keeps the original node.
pub fn normalize_sinks(d: &Digraph) -> Digraph {
    let out = d.out_degrees();
    let mut seen = vec![false; d.node_count()];
    let mut result = Digraph::new(d.node_count());
    for (i, a) in d.arcs().iter().enumerate() {
        let head = if out[a.head] == 0 && seen[a.head] {
            result.add_node()
        } else {
            seen[a.head] = true;
            a.head
        };
        result
            .add_arc(a.tail, head)
            .expect("endpoints are valid and distinct");
        if let Some(l) = d.label(i) {
            result.set_label(i, l);
        }
    }
    result
}

/// Every node leaves at most one arc, or exactly two arcs whose heads are
/// both sinks.
pub fn check_fork_property(d: &Digraph) -> bool {
    let out = d.out_arcs();
    out.iter().all(|arcs| match arcs.len() {
        0 | 1 => true,
        2 => arcs.iter().all(|&a| out[d.arc(a).head].is_empty()),
        _ => false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PatternName {
    T1,
    T2,
    T3,
    T4,
    F1,
    F2,
    F3,
    F4,
}

impl PatternName {
    pub const ALL: [PatternName; 8] = [
        PatternName::T1,
        PatternName::T2,
        PatternName::T3,
        PatternName::T4,
        PatternName::F1,
        PatternName::F2,
        PatternName::F3,
        PatternName::F4,
    ];

    /// The six patterns whose absence still leaves UFLP hard.
    pub const HARD: [PatternName; 6] = [
        PatternName::T1,
        PatternName::T2,
        PatternName::T3,
        PatternName::T4,
        PatternName::F1,
        PatternName::F2,
    ];
}

impl std::fmt::Display for PatternName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self:?}")
    }
}

impl std::str::FromStr for PatternName {
    type Err = FlgError;

    fn from_str(s: &str) -> Result<Self> {
        PatternName::ALL
            .into_iter()
            .find(|p| p.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| FlgError::Precondition(format!("unknown pattern `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForbiddenPattern {
    pub name: PatternName,
    pub template: Digraph,
}

impl ForbiddenPattern {
    pub fn new(name: PatternName) -> Self {
        use PatternName::*;
        // Node 0 is the centre of every template.
        let (n, arcs): (usize, &[(usize, usize)]) = match name {
            T1 => (4, &[(0, 1), (0, 2), (0, 3)]),
            T2 => (4, &[(1, 0), (0, 2), (0, 3)]),
            T3 => (3, &[(1, 2), (2, 0), (0, 1)]),
            T4 => (3, &[(0, 1), (1, 0), (0, 2)]),
            F1 => (5, &[(1, 0), (2, 0), (3, 0), (0, 4)]),
            F2 => (4, &[(1, 0), (2, 0), (0, 3), (3, 0)]),
            F3 => (4, &[(1, 0), (2, 0), (0, 3)]),
            F4 => (5, &[(1, 0), (2, 0), (0, 3), (3, 4)]),
        };
        let template = Digraph::from_arcs(n, arcs.iter().copied()).expect("valid template");
        ForbiddenPattern { name, template }
    }

    pub fn all() -> Vec<ForbiddenPattern> {
        PatternName::ALL.into_iter().map(Self::new).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PatternMatch {
    pub name: PatternName,
    /// `embedding[i]` is the digraph node playing template node `i`.
    pub embedding: Vec<usize>,
}

/// All subgraph embeddings of each template, one per image node set.
pub fn detect_patterns(d: &Digraph, patterns: &[ForbiddenPattern]) -> Vec<PatternMatch> {
    let arc_set: HashSet<(usize, usize)> = d.arcs().iter().map(|a| (a.tail, a.head)).collect();
    let mut neighbors = vec![BTreeSet::new(); d.node_count()];
    for a in d.arcs() {
        neighbors[a.tail].insert(a.head);
        neighbors[a.head].insert(a.tail);
    }
    let mut found = Vec::new();
    for p in patterns {
        let t = &p.template;
        let k = t.node_count();
        // Template nodes in BFS order from node 0 so each later node has an
        // already-placed template neighbour.
        let mut t_nb = vec![BTreeSet::new(); k];
        for a in t.arcs() {
            t_nb[a.tail].insert(a.head);
            t_nb[a.head].insert(a.tail);
        }
        let mut order = vec![0];
        let mut anchor = vec![usize::MAX; k];
        let mut i = 0;
        while i < order.len() {
            let u = order[i];
            for &w in &t_nb[u] {
                if !order.contains(&w) {
                    anchor[w] = u;
                    order.push(w);
                }
            }
            i += 1;
        }
        let mut seen_sets = HashSet::new();
        let mut map = vec![usize::MAX; k];
        let mut used = HashSet::new();
        let ctx = MatchCtx {
            t,
            order: &order,
            anchor: &anchor,
            arc_set: &arc_set,
            neighbors: &neighbors,
        };
        let mut emit = |m: &[usize]| {
            let key: BTreeSet<usize> = m.iter().copied().collect();
            if seen_sets.insert(key) {
                found.push(PatternMatch {
                    name: p.name,
                    embedding: m.to_vec(),
                });
            }
        };
        for start in 0..d.node_count() {
            map[0] = start;
            used.insert(start);
            ctx.extend(1, &mut map, &mut used, &mut emit);
            used.remove(&start);
        }
    }
    found
}

struct MatchCtx<'a> {
    t: &'a Digraph,
    order: &'a [usize],
    anchor: &'a [usize],
    arc_set: &'a HashSet<(usize, usize)>,
    neighbors: &'a [BTreeSet<usize>],
}

impl MatchCtx<'_> {
    fn extend(
        &self,
        depth: usize,
        map: &mut Vec<usize>,
        used: &mut HashSet<usize>,
        emit: &mut impl FnMut(&[usize]),
    ) {
        if depth == self.order.len() {
            emit(map);
            return;
        }
        let u = self.order[depth];
        let candidates: Vec<usize> = self.neighbors[map[self.anchor[u]]].iter().copied().collect();
        for c in candidates {
            if used.contains(&c) {
                continue;
            }
            map[u] = c;
            let consistent = self.t.arcs().iter().all(|a| {
                let (x, y) = (map[a.tail], map[a.head]);
                x == usize::MAX || y == usize::MAX || self.arc_set.contains(&(x, y))
            });
            if consistent {
                used.insert(c);
                self.extend(depth + 1, map, used, emit);
                used.remove(&c);
            }
            map[u] = usize::MAX;
        }
    }
}

/// Splits the arcs of a chordless cycle of `I(d)` into a cycle of `d` and
/// the chord arcs leaving its double-head nodes.
pub fn decompose_cycle_preimage(
    d: &Digraph,
    cert: &ArcCertificate,
    cycle_nodes: &[usize],
) -> Result<CyclePartition> {
    let k = cycle_nodes.len();
    if k < 4 {
        return Err(FlgError::NotChordlessCycle(format!("length {k} < 4")));
    }
    let distinct: HashSet<usize> = cycle_nodes.iter().copied().collect();
    if distinct.len() != k {
        return Err(FlgError::NotChordlessCycle("repeated node".into()));
    }
    let arcs: Vec<usize> = cycle_nodes
        .iter()
        .map(|&x| {
            cert.map.get(x).copied().filter(|&a| a < d.arc_count()).ok_or_else(|| {
                FlgError::BadCertificate(format!("node {x} has no arc"))
            })
        })
        .collect::<Result<_>>()?;
    for i in 0..k {
        for j in i + 1..k {
            let consecutive = j == i + 1 || (i == 0 && j == k - 1);
            if arcs_adjacent(d.arc(arcs[i]), d.arc(arcs[j])) != consecutive {
                return Err(FlgError::NotChordlessCycle(format!(
                    "nodes {} and {}",
                    cycle_nodes[i], cycle_nodes[j]
                )));
            }
        }
    }

    // A chord arc sits between two cycle arcs whose common head is the
    // chord's tail. The test can also flag a cycle arc next to a chord, so
    // candidate subsets are tried in scan order, cycle arcs first.
    let at = |i: usize| d.arc(arcs[i % k]);
    let candidate: Vec<usize> = (0..k)
        .filter(|&i| {
            let (p, x, q) = (at(i + k - 1), at(i), at(i + 1));
            p.head == q.head && x.tail == p.head
        })
        .collect();
    let mut chosen = vec![false; k];
    search_partition(d, &arcs, &candidate, 0, &mut chosen).ok_or(FlgError::NoCyclePartition)
}

fn search_partition(
    d: &Digraph,
    arcs: &[usize],
    candidate: &[usize],
    next: usize,
    chosen: &mut Vec<bool>,
) -> Option<CyclePartition> {
    if next == candidate.len() {
        return validate_partition(d, arcs, chosen);
    }
    let i = candidate[next];
    let k = arcs.len();
    if let Some(p) = search_partition(d, arcs, candidate, next + 1, chosen) {
        return Some(p);
    }
    // Chords are never consecutive on the cycle.
    if chosen[(i + k - 1) % k] || chosen[(i + 1) % k] {
        return None;
    }
    chosen[i] = true;
    let found = search_partition(d, arcs, candidate, next + 1, chosen);
    chosen[i] = false;
    found
}

fn validate_partition(d: &Digraph, arcs: &[usize], chosen: &[bool]) -> Option<CyclePartition> {
    let k = arcs.len();
    let cycle_arcs: Vec<usize> = (0..k).filter(|&i| !chosen[i]).map(|i| arcs[i]).collect();
    let chords: Vec<usize> = (0..k).filter(|&i| chosen[i]).map(|i| arcs[i]).collect();

    let mut incid: std::collections::BTreeMap<usize, (usize, usize)> = Default::default();
    for &a in &cycle_arcs {
        let arc = d.arc(a);
        incid.entry(arc.tail).or_default().0 += 1;
        incid.entry(arc.head).or_default().1 += 1;
    }
    if incid.len() != cycle_arcs.len() || incid.values().any(|&(o, i)| o + i != 2) {
        return None;
    }
    let mut tails2 = BTreeSet::new();
    let mut heads2 = Vec::new();
    let mut mixed = BTreeSet::new();
    for (&v, &(o, _)) in &incid {
        match o {
            2 => {
                tails2.insert(v);
            }
            0 => heads2.push(v),
            _ => {
                mixed.insert(v);
            }
        }
    }
    if heads2.len() != chords.len() {
        return None;
    }
    let mut chord_arcs = Vec::with_capacity(heads2.len());
    for &v in &heads2 {
        let c = chords.iter().copied().find(|&c| d.arc(c).tail == v)?;
        let h = d.arc(c).head;
        let outside = !incid.contains_key(&h);
        let beside = mixed.contains(&h)
            && cycle_arcs.iter().any(|&a| {
                let arc = d.arc(a);
                (arc.tail == v && arc.head == h) || (arc.head == v && arc.tail == h)
            });
        if !(outside || beside) {
            return None;
        }
        chord_arcs.push(c);
    }
    // C' must be one cycle, not several.
    let mut adj: std::collections::HashMap<usize, Vec<usize>> = Default::default();
    for &a in &cycle_arcs {
        let arc = d.arc(a);
        adj.entry(arc.tail).or_default().push(arc.head);
        adj.entry(arc.head).or_default().push(arc.tail);
    }
    let start = d.arc(cycle_arcs[0]).tail;
    let mut seen = HashSet::from([start]);
    let mut stack = vec![start];
    while let Some(u) = stack.pop() {
        for &w in &adj[&u] {
            if seen.insert(w) {
                stack.push(w);
            }
        }
    }
    if seen.len() != incid.len() {
        return None;
    }
    Some(CyclePartition {
        cycle_arcs,
        chord_arcs,
        tails2,
        heads2,
        mixed,
    })
}
