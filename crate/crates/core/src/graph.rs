//! Directed multigraphs (preimages) and simple undirected graphs, with the
//! line-oriented text formats and DOT export used by the CLI.
//!
//! Files are 1-indexed; everything in memory is 0-indexed.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::str::FromStr;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{FlgError, Result};

/// Exact node weight.
pub type Weight = Rational64;

/// An arc `(tail, head)`; never a loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Arc {
    pub tail: usize,
    pub head: usize,
}

impl Arc {
    pub fn new(tail: usize, head: usize) -> Self {
        Arc { tail, head }
    }
}

/// Directed multigraph with identified arcs. Parallel and antiparallel arcs
/// are allowed, self-loops are not.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Digraph {
    node_count: usize,
    arcs: Vec<Arc>,
    labels: Vec<Option<String>>,
}

impl Digraph {
    pub fn new(node_count: usize) -> Self {
        Digraph {
            node_count,
            arcs: Vec::new(),
            labels: Vec::new(),
        }
    }

    pub fn from_arcs<I>(node_count: usize, arcs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut d = Digraph::new(node_count);
        for (t, h) in arcs {
            d.add_arc(t, h)?;
        }
        Ok(d)
    }

    pub fn add_node(&mut self) -> usize {
        self.node_count += 1;
        self.node_count - 1
    }

    /// Appends an arc and returns its index.
    pub fn add_arc(&mut self, tail: usize, head: usize) -> Result<usize> {
        for node in [tail, head] {
            if node >= self.node_count {
                return Err(FlgError::NodeOutOfRange {
                    node,
                    count: self.node_count,
                });
            }
        }
        if tail == head {
            return Err(FlgError::SelfLoop(tail));
        }
        self.arcs.push(Arc::new(tail, head));
        self.labels.push(None);
        Ok(self.arcs.len() - 1)
    }

    pub fn set_label(&mut self, arc: usize, label: impl Into<String>) {
        self.labels[arc] = Some(label.into());
    }

    pub fn label(&self, arc: usize) -> Option<&str> {
        self.labels[arc].as_deref()
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc(&self, index: usize) -> Arc {
        self.arcs[index]
    }

    pub fn out_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.node_count];
        for a in &self.arcs {
            deg[a.tail] += 1;
        }
        deg
    }

    pub fn in_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.node_count];
        for a in &self.arcs {
            deg[a.head] += 1;
        }
        deg
    }

    /// Arc indices leaving each node.
    pub fn out_arcs(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.node_count];
        for (i, a) in self.arcs.iter().enumerate() {
            out[a.tail].push(i);
        }
        out
    }

    /// Arc indices entering each node.
    pub fn in_arcs(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.node_count];
        for (i, a) in self.arcs.iter().enumerate() {
            inc[a.head].push(i);
        }
        inc
    }

    /// Parses the `p dgr <n> <m>` format.
    pub fn parse(text: &str) -> Result<Self> {
        let mut header: Option<(usize, usize)> = None;
        let mut d = Digraph::new(0);
        let mut pending_labels = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('c') {
                continue;
            }
            let mut fields = line.split_whitespace();
            let tag = fields.next().unwrap_or_default();
            match tag {
                "p" => {
                    if header.is_some() {
                        return Err(FlgError::parse(line_no, "duplicate header"));
                    }
                    if fields.next() != Some("dgr") {
                        return Err(FlgError::parse(line_no, "expected `p dgr <n> <m>`"));
                    }
                    let n = parse_count(fields.next(), line_no)?;
                    let m = parse_count(fields.next(), line_no)?;
                    d = Digraph::new(n);
                    header = Some((n, m));
                }
                "a" => {
                    if header.is_none() {
                        return Err(FlgError::parse(line_no, "arc before header"));
                    }
                    let t = parse_node(fields.next(), d.node_count, line_no)?;
                    let h = parse_node(fields.next(), d.node_count, line_no)?;
                    if t == h {
                        return Err(FlgError::SelfLoop(t));
                    }
                    d.add_arc(t, h)?;
                }
                "l" => {
                    let arc = parse_count(fields.next(), line_no)?;
                    let label: Vec<&str> = fields.collect();
                    if arc == 0 || label.is_empty() {
                        return Err(FlgError::parse(line_no, "expected `l <arc> <label>`"));
                    }
                    pending_labels.push((line_no, arc - 1, label.join(" ")));
                }
                _ => return Err(FlgError::parse(line_no, format!("unknown line tag `{tag}`"))),
            }
        }
        let (_, m) = header.ok_or_else(|| FlgError::parse(0, "missing `p dgr` header"))?;
        if d.arc_count() != m {
            return Err(FlgError::parse(
                0,
                format!("header announces {m} arcs, found {}", d.arc_count()),
            ));
        }
        for (line_no, arc, label) in pending_labels {
            if arc >= m {
                return Err(FlgError::parse(line_no, "label refers to a missing arc"));
            }
            d.set_label(arc, label);
        }
        Ok(d)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("p dgr {} {}\n", self.node_count, self.arcs.len());
        for a in &self.arcs {
            let _ = writeln!(s, "a {} {}", a.tail + 1, a.head + 1);
        }
        for (i, l) in self.labels.iter().enumerate() {
            if let Some(l) = l {
                let _ = writeln!(s, "l {} {}", i + 1, l);
            }
        }
        s
    }

    pub fn to_dot(&self, name: &str) -> String {
        let mut s = format!("digraph {} {{\n", dot_id(name));
        for v in 0..self.node_count {
            let _ = writeln!(s, "  {};", v + 1);
        }
        for (i, a) in self.arcs.iter().enumerate() {
            let label = self.labels[i].clone().unwrap_or_else(|| (i + 1).to_string());
            let _ = writeln!(
                s,
                "  {} -> {} [label={}];",
                a.tail + 1,
                a.head + 1,
                dot_id(&label)
            );
        }
        s.push_str("}\n");
        s
    }

    /// Drops nodes touched by no arc and renumbers the rest in order of
    /// first appearance along the arc list.
    pub fn compacted(&self) -> Digraph {
        let mut map = vec![usize::MAX; self.node_count];
        let mut next = 0;
        let mut arcs = Vec::with_capacity(self.arcs.len());
        for a in &self.arcs {
            for v in [a.tail, a.head] {
                if map[v] == usize::MAX {
                    map[v] = next;
                    next += 1;
                }
            }
            arcs.push(Arc::new(map[a.tail], map[a.head]));
        }
        Digraph {
            node_count: next,
            arcs,
            labels: self.labels.clone(),
        }
    }
}

/// Simple undirected graph with optional exact node weights.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct UGraph {
    adj: Vec<Vec<usize>>,
    edge_count: usize,
    weights: Option<Vec<Weight>>,
}

impl UGraph {
    pub fn new(node_count: usize) -> Self {
        UGraph {
            adj: vec![Vec::new(); node_count],
            edge_count: 0,
            weights: None,
        }
    }

    /// Builds a graph from an edge list in `O(|E| log |E|)`.
    pub fn from_edges<I>(node_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut adj = vec![Vec::new(); node_count];
        let mut edge_count = 0;
        for (u, v) in edges {
            check_node(u, node_count)?;
            check_node(v, node_count)?;
            if u == v {
                return Err(FlgError::SelfLoop(u));
            }
            adj[u].push(v);
            adj[v].push(u);
            edge_count += 1;
        }
        for (u, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(FlgError::DuplicateEdge(u.min(w[0]), u.max(w[0])));
            }
        }
        Ok(UGraph {
            adj,
            edge_count,
            weights: None,
        })
    }

    pub fn add_node(&mut self) -> usize {
        self.adj.push(Vec::new());
        if let Some(w) = self.weights.as_mut() {
            w.push(Weight::from_integer(1));
        }
        self.adj.len() - 1
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        check_node(u, self.adj.len())?;
        check_node(v, self.adj.len())?;
        if u == v {
            return Err(FlgError::SelfLoop(u));
        }
        match self.adj[u].binary_search(&v) {
            Ok(_) => Err(FlgError::DuplicateEdge(u.min(v), u.max(v))),
            Err(pos) => {
                self.adj[u].insert(pos, v);
                let pos = self.adj[v].binary_search(&u).unwrap_err();
                self.adj[v].insert(pos, u);
                self.edge_count += 1;
                Ok(())
            }
        }
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) -> bool {
        if let Ok(pos) = self.adj[u].binary_search(&v) {
            self.adj[u].remove(pos);
            let pos = self.adj[v].binary_search(&u).expect("symmetric adjacency");
            self.adj[v].remove(pos);
            self.edge_count -= 1;
            true
        } else {
            false
        }
    }

    pub fn with_weights(mut self, weights: Vec<Weight>) -> Result<Self> {
        if weights.len() != self.adj.len() {
            return Err(FlgError::Precondition(format!(
                "{} weights for {} nodes",
                weights.len(),
                self.adj.len()
            )));
        }
        self.weights = Some(weights);
        Ok(self)
    }

    pub fn clear_weights(&mut self) {
        self.weights = None;
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Sorted neighbor list.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, lexicographically sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count);
        for (u, list) in self.adj.iter().enumerate() {
            out.extend(list.iter().filter(|&&v| v > u).map(|&v| (u, v)));
        }
        out
    }

    pub fn weights(&self) -> Option<&[Weight]> {
        self.weights.as_deref()
    }

    /// Weight of `v`, 1 when the graph is unweighted.
    pub fn weight(&self, v: usize) -> Weight {
        self.weights
            .as_ref()
            .map_or(Weight::from_integer(1), |w| w[v])
    }

    /// Connected component id of every node, ids assigned in node order.
    pub fn component_ids(&self) -> (Vec<usize>, usize) {
        let n = self.adj.len();
        let mut comp = vec![usize::MAX; n];
        let mut count = 0;
        let mut stack = Vec::new();
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = count;
            stack.push(s);
            while let Some(u) = stack.pop() {
                for &v in &self.adj[u] {
                    if comp[v] == usize::MAX {
                        comp[v] = count;
                        stack.push(v);
                    }
                }
            }
            count += 1;
        }
        (comp, count)
    }

    pub fn components(&self) -> Vec<Vec<usize>> {
        let (ids, count) = self.component_ids();
        let mut out = vec![Vec::new(); count];
        for (v, &c) in ids.iter().enumerate() {
            out[c].push(v);
        }
        out
    }

    /// Subgraph induced by `nodes`; node `i` of the result is `nodes[i]`.
    pub fn induced(&self, nodes: &[usize]) -> UGraph {
        let mut index = std::collections::HashMap::with_capacity(nodes.len());
        for (i, &v) in nodes.iter().enumerate() {
            index.insert(v, i);
        }
        let mut adj = vec![Vec::new(); nodes.len()];
        let mut edge_count = 0;
        for (i, &v) in nodes.iter().enumerate() {
            for &w in &self.adj[v] {
                if let Some(&j) = index.get(&w) {
                    adj[i].push(j);
                    if j > i {
                        edge_count += 1;
                    }
                }
            }
            adj[i].sort_unstable();
        }
        let weights = self
            .weights
            .as_ref()
            .map(|w| nodes.iter().map(|&v| w[v]).collect());
        UGraph {
            adj,
            edge_count,
            weights,
        }
    }

    /// Parses the `p ugr <n> <m>` format with optional `w <v> <num>/<den>` lines.
    pub fn parse(text: &str) -> Result<Self> {
        let mut header: Option<usize> = None;
        let mut edges = Vec::new();
        let mut weight_lines = Vec::new();
        let mut n = 0;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('c') {
                continue;
            }
            let mut fields = line.split_whitespace();
            let tag = fields.next().unwrap_or_default();
            match tag {
                "p" => {
                    if header.is_some() {
                        return Err(FlgError::parse(line_no, "duplicate header"));
                    }
                    if fields.next() != Some("ugr") {
                        return Err(FlgError::parse(line_no, "expected `p ugr <n> <m>`"));
                    }
                    n = parse_count(fields.next(), line_no)?;
                    header = Some(parse_count(fields.next(), line_no)?);
                }
                "e" => {
                    if header.is_none() {
                        return Err(FlgError::parse(line_no, "edge before header"));
                    }
                    let u = parse_node(fields.next(), n, line_no)?;
                    let v = parse_node(fields.next(), n, line_no)?;
                    edges.push((u, v));
                }
                "w" => {
                    if header.is_none() {
                        return Err(FlgError::parse(line_no, "weight before header"));
                    }
                    let v = parse_node(fields.next(), n, line_no)?;
                    let w = parse_rational(fields.next(), line_no)?;
                    weight_lines.push((v, w));
                }
                _ => return Err(FlgError::parse(line_no, format!("unknown line tag `{tag}`"))),
            }
        }
        let m = header.ok_or_else(|| FlgError::parse(0, "missing `p ugr` header"))?;
        if edges.len() != m {
            return Err(FlgError::parse(
                0,
                format!("header announces {m} edges, found {}", edges.len()),
            ));
        }
        let mut g = UGraph::from_edges(n, edges)?;
        if !weight_lines.is_empty() {
            let mut w = vec![Weight::from_integer(1); n];
            for (v, x) in weight_lines {
                w[v] = x;
            }
            g.weights = Some(w);
        }
        Ok(g)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("p ugr {} {}\n", self.node_count(), self.edge_count);
        for (u, v) in self.edges() {
            let _ = writeln!(s, "e {} {}", u + 1, v + 1);
        }
        if let Some(w) = &self.weights {
            for (v, x) in w.iter().enumerate() {
                let _ = writeln!(s, "w {} {}/{}", v + 1, x.numer(), x.denom());
            }
        }
        s
    }

    /// DOT export; `labels` overrides the default 1-based node names.
    pub fn to_dot(&self, name: &str, labels: Option<&[String]>) -> String {
        let mut s = format!("graph {} {{\n", dot_id(name));
        for v in 0..self.node_count() {
            let label = labels
                .and_then(|l| l.get(v).cloned())
                .unwrap_or_else(|| (v + 1).to_string());
            let _ = writeln!(s, "  {} [label={}];", v + 1, dot_id(&label));
        }
        for (u, v) in self.edges() {
            let _ = writeln!(s, "  {} -- {};", u + 1, v + 1);
        }
        s.push_str("}\n");
        s
    }
}

/// Cycle structure of a component.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentProfile {
    pub component: usize,
    pub nodes: usize,
    pub edges: usize,
    pub cycles: usize,
}

/// Per connected component: node count, edge count and cyclomatic number.
pub fn cyclomatic_profile(g: &UGraph) -> Vec<ComponentProfile> {
    let (ids, count) = g.component_ids();
    let mut profile: Vec<ComponentProfile> = (0..count)
        .map(|component| ComponentProfile {
            component,
            nodes: 0,
            edges: 0,
            cycles: 0,
        })
        .collect();
    for v in 0..g.node_count() {
        profile[ids[v]].nodes += 1;
        profile[ids[v]].edges += g.neighbors(v).iter().filter(|&&w| w > v).count();
    }
    for p in &mut profile {
        p.cycles = p.edges + 1 - p.nodes;
    }
    profile
}

/// Some triangle of `g` as a sorted triple, if one exists.
///
/// Edges are oriented from lower to higher (degree, id) rank so every
/// triangle is seen once from its lowest vertex, `O(|E|^{3/2})`.
pub fn find_triangle(g: &UGraph) -> Option<[usize; 3]> {
    let n = g.node_count();
    let rank = |v: usize| (g.degree(v), v);
    let forward: Vec<Vec<usize>> = (0..n)
        .map(|u| {
            g.neighbors(u)
                .iter()
                .copied()
                .filter(|&v| rank(v) > rank(u))
                .collect()
        })
        .collect();
    let mut mark = vec![usize::MAX; n];
    for u in 0..n {
        for &v in &forward[u] {
            mark[v] = u;
        }
        for &v in &forward[u] {
            for &w in &forward[v] {
                if mark[w] == u {
                    let mut t = [u, v, w];
                    t.sort_unstable();
                    return Some(t);
                }
            }
        }
    }
    None
}

/// Partition of the nodes of a cycle of a digraph by arc orientation,
/// together with the chord arcs hanging off the double-head nodes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CyclePartition {
    /// Arc indices of the cycle, in cyclic order.
    pub cycle_arcs: Vec<usize>,
    /// Arc indices of the chords, `chord_arcs[i]` leaves `heads2[i]`.
    pub chord_arcs: Vec<usize>,
    /// Nodes that are the tail of two cycle arcs.
    pub tails2: BTreeSet<usize>,
    /// Nodes that are the head of two cycle arcs.
    pub heads2: Vec<usize>,
    /// Nodes that are the tail of one cycle arc and the head of the other.
    pub mixed: BTreeSet<usize>,
}

pub(crate) fn check_node(v: usize, count: usize) -> Result<()> {
    if v >= count {
        Err(FlgError::NodeOutOfRange { node: v, count })
    } else {
        Ok(())
    }
}

fn parse_count(field: Option<&str>, line: usize) -> Result<usize> {
    field
        .ok_or_else(|| FlgError::parse(line, "missing field"))?
        .parse()
        .map_err(|_| FlgError::parse(line, "expected a non-negative integer"))
}

fn parse_node(field: Option<&str>, count: usize, line: usize) -> Result<usize> {
    let v = parse_count(field, line)?;
    if v == 0 || v > count {
        return Err(FlgError::NodeOutOfRange {
            node: v.wrapping_sub(1),
            count,
        });
    }
    Ok(v - 1)
}

pub(crate) fn parse_rational(field: Option<&str>, line: usize) -> Result<Weight> {
    let raw = field.ok_or_else(|| FlgError::parse(line, "missing number"))?;
    let w = Weight::from_str(raw).map_err(|_| FlgError::parse(line, "expected <num>/<den>"))?;
    Ok(w)
}

fn dot_id(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}
