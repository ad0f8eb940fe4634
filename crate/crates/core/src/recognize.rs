//! Linear-time recognition of triangle-free FL graphs with a preimage
//! certificate.
//!
//! Edges joining two degree-2 nodes are removed (degrees taken once, on the
//! input). The input is FL iff every component of what remains has at most
//! one cycle. Trees and unicyclic components get explicit preimages, and
//! the removed edges are then put back one at a time, each step rewriting
//! the digraph locally.

use serde::Serialize;

use crate::error::{FlgError, Result};
use crate::graph::{cyclomatic_profile, find_triangle, Digraph, UGraph};
use crate::intersect::{check_certificate, ArcCertificate};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionTrace {
    pub removed_edges: Vec<(usize, usize)>,
    pub reduced_graph: UGraph,
}

/// How a pendant arc `y` meets its only neighbour `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ConnectionType {
    /// `x` enters `y`.
    I,
    /// `x` and `y` share their tail.
    II,
    /// `y` enters `x`.
    III,
}

impl ConnectionType {
    /// Pairs for which identifying `b'` with `b''` is safe.
    pub fn compatible(ab: ConnectionType, cb: ConnectionType) -> bool {
        use ConnectionType::*;
        matches!(
            (ab, cb),
            (I, I) | (I, III) | (II, III) | (III, I) | (III, II)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Refusal {
    /// Nodes of a component that keeps two or more independent cycles.
    pub component: Vec<usize>,
    pub cycles: usize,
}

#[derive(Debug, Clone)]
pub enum Recognition {
    Accepted(Digraph, ArcCertificate),
    Refused(Refusal),
}

impl Recognition {
    pub fn is_accepted(&self) -> bool {
        matches!(self, Recognition::Accepted(..))
    }
}

fn ensure_triangle_free(g: &UGraph) -> Result<()> {
    match find_triangle(g) {
        Some(t) => Err(FlgError::Triangle(t)),
        None => Ok(()),
    }
}

/// Removes, all at once, every edge whose endpoints both have degree 2.
pub fn reduce_graph(g: &UGraph) -> Result<ReductionTrace> {
    ensure_triangle_free(g)?;
    Ok(reduce_unchecked(g))
}

fn reduce_unchecked(g: &UGraph) -> ReductionTrace {
    let mut removed = Vec::new();
    let mut kept = Vec::with_capacity(g.edge_count());
    for (u, v) in g.edges() {
        if g.degree(u) == 2 && g.degree(v) == 2 {
            removed.push((u, v));
        } else {
            kept.push((u, v));
        }
    }
    let reduced = UGraph::from_edges(g.node_count(), kept).expect("subgraph of a simple graph");
    ReductionTrace {
        removed_edges: removed,
        reduced_graph: reduced,
    }
}

fn first_refusal(reduced: &UGraph) -> Option<Refusal> {
    let profile = cyclomatic_profile(reduced);
    let bad = profile.iter().find(|p| p.cycles > 1)?;
    let (ids, _) = reduced.component_ids();
    let component = (0..reduced.node_count())
        .filter(|&v| ids[v] == bad.component)
        .collect();
    Some(Refusal {
        component,
        cycles: bad.cycles,
    })
}

pub fn is_fl_trianglefree(g: &UGraph) -> Result<bool> {
    let trace = reduce_graph(g)?;
    Ok(first_refusal(&trace.reduced_graph).is_none())
}

/// Mutable digraph whose arc slots are graph nodes, with O(1) arc moves.
#[derive(Debug, Clone)]
struct Work {
    tail: Vec<usize>,
    head: Vec<usize>,
    alive: Vec<bool>,
    out: Vec<Vec<usize>>,
    inn: Vec<Vec<usize>>,
    pos_out: Vec<usize>,
    pos_in: Vec<usize>,
}

const NIL: usize = usize::MAX;

impl Work {
    fn new(slots: usize) -> Self {
        Work {
            tail: vec![NIL; slots],
            head: vec![NIL; slots],
            alive: vec![false; slots],
            out: Vec::new(),
            inn: Vec::new(),
            pos_out: vec![NIL; slots],
            pos_in: vec![NIL; slots],
        }
    }

    fn from_digraph(d: &Digraph, cert: &ArcCertificate, extra_slots: usize) -> Self {
        let m = cert.map.len();
        let mut w = Work::new(m + extra_slots);
        for _ in 0..d.node_count() {
            w.new_node();
        }
        for (x, &a) in cert.map.iter().enumerate() {
            let arc = d.arc(a);
            w.add_arc(x, arc.tail, arc.head);
        }
        w
    }

    fn new_node(&mut self) -> usize {
        self.out.push(Vec::new());
        self.inn.push(Vec::new());
        self.out.len() - 1
    }

    fn add_arc(&mut self, a: usize, t: usize, h: usize) {
        debug_assert!(!self.alive[a] && t != h);
        self.alive[a] = true;
        self.tail[a] = t;
        self.head[a] = h;
        self.pos_out[a] = self.out[t].len();
        self.out[t].push(a);
        self.pos_in[a] = self.inn[h].len();
        self.inn[h].push(a);
    }

    fn unlink_out(&mut self, a: usize) {
        let t = self.tail[a];
        let p = self.pos_out[a];
        self.out[t].swap_remove(p);
        if let Some(&moved) = self.out[t].get(p) {
            self.pos_out[moved] = p;
        }
    }

    fn unlink_in(&mut self, a: usize) {
        let h = self.head[a];
        let p = self.pos_in[a];
        self.inn[h].swap_remove(p);
        if let Some(&moved) = self.inn[h].get(p) {
            self.pos_in[moved] = p;
        }
    }

    fn remove_arc(&mut self, a: usize) {
        self.unlink_out(a);
        self.unlink_in(a);
        self.alive[a] = false;
        self.tail[a] = NIL;
        self.head[a] = NIL;
    }

    fn set_tail(&mut self, a: usize, t: usize) {
        self.unlink_out(a);
        self.tail[a] = t;
        self.pos_out[a] = self.out[t].len();
        self.out[t].push(a);
    }

    fn set_head(&mut self, a: usize, h: usize) {
        self.unlink_in(a);
        self.head[a] = h;
        self.pos_in[a] = self.inn[h].len();
        self.inn[h].push(a);
    }

    /// Identifies nodes `x` and `y`, moving the smaller set of arc ends.
    /// Returns the surviving node.
    fn merge_node(&mut self, x: usize, y: usize) -> usize {
        if x == y {
            return y;
        }
        let size = |v: usize| self.out[v].len() + self.inn[v].len();
        let (x, y) = if size(x) > size(y) { (y, x) } else { (x, y) };
        while let Some(&a) = self.out[x].last() {
            self.set_tail(a, y);
        }
        while let Some(&a) = self.inn[x].last() {
            self.set_head(a, y);
        }
        y
    }

    fn is_sink(&self, v: usize) -> bool {
        self.out[v].is_empty()
    }

    /// Gives arc `a` a private head if its head is a shared sink.
    fn normalize_head(&mut self, a: usize) {
        let h = self.head[a];
        if self.is_sink(h) && self.inn[h].len() > 1 {
            let fresh = self.new_node();
            self.set_head(a, fresh);
        }
    }

    fn adjacent(&self, a: usize, b: usize) -> bool {
        self.tail[a] == self.tail[b] || self.head[a] == self.tail[b] || self.head[b] == self.tail[a]
    }

    /// Arcs adjacent to `a`, with repeats.
    fn neighbours(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        let (t, h) = (self.tail[a], self.head[a]);
        self.out[t]
            .iter()
            .chain(&self.inn[t])
            .chain(&self.out[h])
            .copied()
            .filter(move |&x| x != a)
    }

    fn local_size(&self, a: usize) -> usize {
        let (t, h) = (self.tail[a], self.head[a]);
        self.out[t].len() + self.inn[t].len() + self.out[h].len()
    }

    /// Makes `p` a pendant arc adjacent to `q` only; `q` has at most one
    /// neighbour and `p` is not in the digraph.
    fn attach_pendant(&mut self, p: usize, q: usize) {
        let (w, t) = (self.tail[q], self.head[q]);
        if self.out[w].len() == 1 {
            let fresh = self.new_node();
            self.add_arc(p, fresh, w);
        } else {
            if self.inn[t].len() > 1 {
                let fresh = self.new_node();
                self.set_head(q, fresh);
            }
            let fresh = self.new_node();
            let h = self.head[q];
            self.add_arc(p, h, fresh);
        }
    }

    fn classify(&self, x: usize, y: usize) -> Result<ConnectionType> {
        if self.tail[x] == self.tail[y] {
            Ok(ConnectionType::II)
        } else if self.head[x] == self.tail[y] {
            Ok(ConnectionType::I)
        } else if self.head[y] == self.tail[x] {
            Ok(ConnectionType::III)
        } else {
            Err(FlgError::Internal(format!("arcs {x} and {y} are not adjacent")))
        }
    }

    fn into_digraph(self, m: usize) -> Digraph {
        let mut map = vec![NIL; self.out.len()];
        let mut next = 0;
        let mut arcs = Vec::with_capacity(m);
        for a in 0..m {
            for v in [self.tail[a], self.head[a]] {
                if map[v] == NIL {
                    map[v] = next;
                    next += 1;
                }
            }
            arcs.push((map[self.tail[a]], map[self.head[a]]));
        }
        Digraph::from_arcs(next, arcs).expect("work digraph has no loops")
    }
}

/// Current graph during reinsertion (adjacency lists, unsorted).
struct Host {
    adj: Vec<Vec<usize>>,
}

impl Host {
    fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(&v) || self.adj[v].contains(&u)
    }
}

/// Preimage of a graph whose components each have at most one cycle:
/// trees hang from a root arc `(u0, v0)` with children `(v_i, u0)`, and a
/// cycle becomes a directed cycle with its trees rooted on it.
pub fn build_preimage_component(c: &UGraph) -> Result<(Digraph, ArcCertificate)> {
    let m = c.node_count();
    let mut w = Work::new(m);
    build_forest(c, &mut w)?;
    let d = w.into_digraph(m);
    Ok((d, ArcCertificate::identity(m)))
}

fn build_forest(c: &UGraph, w: &mut Work) -> Result<()> {
    let m = c.node_count();
    let (ids, count) = c.component_ids();
    let mut nodes = vec![0usize; count];
    let mut edges = vec![0usize; count];
    for v in 0..m {
        nodes[ids[v]] += 1;
        edges[ids[v]] += c.degree(v);
    }
    // Peel leaves: what survives in a unicyclic component is its cycle.
    let mut deg: Vec<usize> = (0..m).map(|v| c.degree(v)).collect();
    let mut on_cycle = vec![true; m];
    let mut stack: Vec<usize> = (0..m).filter(|&v| deg[v] <= 1).collect();
    while let Some(v) = stack.pop() {
        if !on_cycle[v] {
            continue;
        }
        on_cycle[v] = false;
        for &u in c.neighbors(v) {
            if on_cycle[u] {
                deg[u] -= 1;
                if deg[u] == 1 {
                    stack.push(u);
                }
            }
        }
    }
    let mut placed = vec![false; m];
    let mut queue = std::collections::VecDeque::new();
    for s in 0..m {
        if placed[s] {
            continue;
        }
        let comp = ids[s];
        let cycles = edges[comp] / 2 + 1 - nodes[comp];
        if cycles > 1 {
            let component = (0..m).filter(|&v| ids[v] == comp).collect();
            return Err(FlgError::TooManyCycles { component, cycles });
        }
        if cycles == 0 {
            let (u0, v0) = (w.new_node(), w.new_node());
            w.add_arc(s, u0, v0);
            placed[s] = true;
            queue.push_back(s);
        } else {
            if !on_cycle[s] {
                continue;
            }
            // Walk the cycle from s.
            let mut cyc = vec![s];
            let mut prev = NIL;
            let mut cur = s;
            loop {
                let next = c
                    .neighbors(cur)
                    .iter()
                    .copied()
                    .find(|&u| on_cycle[u] && u != prev && (cyc.len() < 2 || u != cyc[cyc.len() - 2]))
                    .expect("cycle continues");
                if next == s {
                    break;
                }
                cyc.push(next);
                prev = cur;
                cur = next;
            }
            let k = cyc.len();
            let ring: Vec<usize> = (0..k).map(|_| w.new_node()).collect();
            for (i, &x) in cyc.iter().enumerate() {
                w.add_arc(x, ring[i], ring[(i + 1) % k]);
                placed[x] = true;
                queue.push_back(x);
            }
        }
        while let Some(p) = queue.pop_front() {
            let anchor = w.tail[p];
            for &ch in c.neighbors(p) {
                if !placed[ch] {
                    placed[ch] = true;
                    let fresh = w.new_node();
                    w.add_arc(ch, fresh, anchor);
                    queue.push_back(ch);
                }
            }
        }
    }
    // Cycle components whose start node was peeled are reached from their
    // cycle nodes later in the scan; anything left means a bug.
    if placed.iter().any(|&p| !p) {
        return Err(FlgError::Internal("component left unplaced".into()));
    }
    Ok(())
}

/// Puts the edge `b c` back. `b` and `c` have degree at most one in the
/// host and no common neighbour.
fn reinsert(w: &mut Work, host: &mut Host, temp: usize, b: usize, c: usize) -> Result<()> {
    let (db, dc) = (host.adj[b].len(), host.adj[c].len());
    if db > 1 || dc > 1 {
        return Err(FlgError::Precondition(format!(
            "reinserting {b}-{c}: degrees {db}, {dc} in the host"
        )));
    }
    if db == 0 || dc == 0 {
        let (p, q) = if db == 0 { (b, c) } else { (c, b) };
        w.remove_arc(p);
        w.attach_pendant(p, q);
    } else {
        let a = host.adj[b][0];
        let d = host.adj[c][0];
        if a == d {
            return Err(FlgError::Precondition(format!(
                "{b} and {c} share the neighbour {a}"
            )));
        }
        let bp = b;
        let bpp = temp;
        w.attach_pendant(bpp, c);
        for x in [bp, bpp, c, a, d] {
            w.normalize_head(x);
        }
        for (x, y) in [(a, bp), (c, bpp)] {
            if w.tail[x] == w.head[y] && w.head[x] == w.tail[y] {
                let fresh = w.new_node();
                w.set_head(y, fresh);
            }
        }
        let mut rounds = 0;
        loop {
            let ta = w.classify(a, bp)?;
            let tc = w.classify(c, bpp)?;
            if ConnectionType::compatible(ta, tc) {
                break;
            }
            rounds += 1;
            if rounds > 3 {
                return Err(FlgError::Internal(format!(
                    "no compatible connection for {b}-{c}: {ta:?}/{tc:?}"
                )));
            }
            use ConnectionType::*;
            match (ta, tc) {
                (II, _) => {
                    let s = w.head[bp];
                    w.set_tail(a, s);
                }
                (_, II) => {
                    let u = w.head[bpp];
                    w.set_tail(c, u);
                }
                (III, III) => {
                    let (v, wn) = (w.tail[d], w.head[d]);
                    let t = w.tail[bpp];
                    if w.head[c] == v {
                        w.set_tail(c, t);
                    } else if wn == w.tail[c] {
                        let hc = w.head[c];
                        w.set_tail(bpp, hc);
                        w.set_head(bpp, t);
                    } else {
                        return Err(FlgError::Internal(format!(
                            "arc {d} does not meet arc {c} as expected"
                        )));
                    }
                }
                _ => unreachable!("remaining pairs are compatible"),
            }
        }
        let (r, s) = (w.tail[bp], w.head[bp]);
        let (t, u) = (w.tail[bpp], w.head[bpp]);
        w.remove_arc(bpp);
        let kept = w.merge_node(t, r);
        let gone = if kept == r { t } else { r };
        let fix = |v: usize| if v == gone { kept } else { v };
        w.merge_node(fix(u), fix(s));
    }
    host.adj[b].push(c);
    host.adj[c].push(b);
    if cfg!(debug_assertions) {
        local_check(w, host, &[b, c])?;
    }
    Ok(())
}

/// Compares the neighbourhoods of a few arcs, and of their neighbours, with
/// the host graph; skipped around large hubs to stay linear.
fn local_check(w: &Work, host: &Host, arcs: &[usize]) -> Result<()> {
    const CAP: usize = 64;
    let mut todo: Vec<usize> = arcs.to_vec();
    for &x in arcs {
        todo.extend(host.adj[x].iter().copied());
    }
    for x in todo {
        if w.local_size(x) > CAP || host.adj[x].len() > CAP {
            continue;
        }
        let mut got: Vec<usize> = w.neighbours(x).collect();
        got.sort_unstable();
        got.dedup();
        let mut want = host.adj[x].clone();
        want.sort_unstable();
        if got != want {
            return Err(FlgError::Internal(format!(
                "arc {x}: neighbours {got:?}, expected {want:?}"
            )));
        }
        debug_assert!(want.iter().all(|&y| w.adjacent(x, y) && host.has_edge(x, y)));
    }
    Ok(())
}

/// Reinserts `b c` into a preimage `d` of `h`, returning a preimage of
/// `h + bc`.
pub fn reinsert_edge(
    h: &UGraph,
    d: &Digraph,
    cert: &ArcCertificate,
    b: usize,
    c: usize,
) -> Result<(Digraph, ArcCertificate)> {
    ensure_triangle_free(h)?;
    if !check_certificate(h, d, cert)? {
        return Err(FlgError::BadCertificate("input is not a preimage".into()));
    }
    if h.has_edge(b, c) {
        return Err(FlgError::DuplicateEdge(b.min(c), b.max(c)));
    }
    let m = h.node_count();
    let mut w = Work::from_digraph(d, cert, 1);
    let mut host = Host {
        adj: (0..m).map(|v| h.neighbors(v).to_vec()).collect(),
    };
    reinsert(&mut w, &mut host, m, b, c)?;
    let out = w.into_digraph(m);
    let mut target = h.clone();
    target.add_edge(b, c)?;
    let cert = ArcCertificate::identity(m);
    if !check_certificate(&target, &out, &cert)? {
        return Err(FlgError::Internal(format!("reinsertion of {b}-{c} failed")));
    }
    Ok((out, cert))
}

/// Decides whether a triangle-free graph is FL; on acceptance returns a
/// preimage with graph node `i` mapped to arc `i`.
pub fn recognize(g: &UGraph) -> Result<Recognition> {
    ensure_triangle_free(g)?;
    let mut trace = reduce_unchecked(g);
    if let Some(refusal) = first_refusal(&trace.reduced_graph) {
        return Ok(Recognition::Refused(refusal));
    }
    // Components of g with at most one cycle are built directly, so a cycle
    // comes out as a directed ring rather than a chain of reinsertions.
    let (comp, count) = g.component_ids();
    let mut excess = vec![0isize; count];
    for v in 0..g.node_count() {
        excess[comp[v]] += g.degree(v) as isize - 2;
    }
    // excess is 2 * (edges - nodes), so a single cycle means excess <= 0.
    let (keep, removed): (Vec<_>, Vec<_>) = trace
        .removed_edges
        .into_iter()
        .partition(|&(b, _)| excess[comp[b]] <= 0);
    for &(b, c) in &keep {
        trace.reduced_graph.add_edge(b, c)?;
    }
    trace.removed_edges = removed;
    let m = g.node_count();
    let mut w = Work::new(m + 1);
    build_forest(&trace.reduced_graph, &mut w)?;
    let mut host = Host {
        adj: (0..m)
            .map(|v| trace.reduced_graph.neighbors(v).to_vec())
            .collect(),
    };
    for &(b, c) in trace.removed_edges.iter().rev() {
        reinsert(&mut w, &mut host, m, b, c)?;
    }
    let d = w.into_digraph(m);
    let cert = ArcCertificate::identity(m);
    if !check_certificate(g, &d, &cert)? {
        return Err(FlgError::Internal("final certificate check failed".into()));
    }
    Ok(Recognition::Accepted(d, cert))
}
