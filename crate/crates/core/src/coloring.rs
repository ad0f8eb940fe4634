//! Vertex colouring of triangle-free FL graphs, brute-force colouring
//! oracles, and the edge-colouring reduction.

use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use crate::error::{FlgError, Result};
use crate::graph::{Digraph, UGraph};
use crate::recognize::reduce_graph;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Coloring {
    pub colors: Vec<usize>,
}

impl Coloring {
    /// Relabels colours in first-seen order.
    pub fn canonical(colors: Vec<usize>) -> Self {
        let mut map = std::collections::HashMap::new();
        let colors = colors
            .into_iter()
            .map(|c| {
                let next = map.len();
                *map.entry(c).or_insert(next)
            })
            .collect();
        Coloring { colors }
    }

    pub fn count(&self) -> usize {
        self.colors.iter().max().map_or(0, |&c| c + 1)
    }

    pub fn is_proper(&self, g: &UGraph) -> bool {
        self.colors.len() == g.node_count()
            && g.edges().iter().all(|&(u, v)| self.colors[u] != self.colors[v])
    }

    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.count()];
        for (v, &c) in self.colors.iter().enumerate() {
            out[c].push(v);
        }
        out
    }
}

/// Colours the reduced graph: 2-colour every component by BFS, then fix an
/// odd cycle (at most one per component) with a third colour.
fn color_reduced(h: &UGraph) -> Vec<usize> {
    let n = h.node_count();
    let mut color = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for s in 0..n {
        if color[s] != usize::MAX {
            continue;
        }
        color[s] = 0;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            for &u in h.neighbors(v) {
                if color[u] == usize::MAX {
                    color[u] = 1 - color[v];
                    queue.push_back(u);
                }
            }
        }
    }
    // A component has at most one cycle, so one conflicting edge per
    // component; recolouring one endpoint with 2 resolves it.
    for (u, v) in h.edges() {
        if color[u] == color[v] {
            color[u] = 2;
        }
    }
    color
}

/// Proper colouring with at most 3 colours: colour the reduced graph, then
/// put removed edges back, repairing clashes locally.
pub fn color_trianglefree_fl(g: &UGraph) -> Result<Coloring> {
    let trace = reduce_graph(g)?;
    let h = &trace.reduced_graph;
    if crate::graph::cyclomatic_profile(h).iter().any(|p| p.cycles > 1) {
        return Err(FlgError::Precondition("not a facility location graph".into()));
    }
    let mut color = color_reduced(h);
    let mut adj: Vec<Vec<usize>> = (0..g.node_count()).map(|v| h.neighbors(v).to_vec()).collect();
    for &(b, c) in trace.removed_edges.iter().rev() {
        if color[b] == color[c] {
            let nb = adj[b].first().copied();
            let nc = adj[c].first().copied();
            match (nb, nc) {
                (Some(bp), Some(cp)) if color[bp] != color[cp] => color[b] = color[cp],
                (Some(bp), Some(cp)) => {
                    color[b] = third(color[bp], color[c]);
                    debug_assert_ne!(color[b], color[cp]);
                }
                (Some(bp), None) => color[c] = third(color[bp], color[b]),
                (None, Some(cp)) => color[b] = third(color[cp], color[c]),
                (None, None) => color[b] = third(color[c], color[c]),
            }
        }
        adj[b].push(c);
        adj[c].push(b);
    }
    let out = Coloring::canonical(color);
    assert!(out.is_proper(g), "colouring repair produced a clash");
    Ok(out)
}

fn third(x: usize, y: usize) -> usize {
    (0..3).find(|&c| c != x && c != y).expect("three colours")
}

/// Exact chromatic number of a triangle-free FL graph (at most 3).
pub fn chromatic_number_fl(g: &UGraph) -> Result<usize> {
    let c = color_trianglefree_fl(g)?;
    if c.count() < 3 {
        return Ok(c.count());
    }
    Ok(if is_bipartite(g) { 2 } else { 3 })
}

fn is_bipartite(g: &UGraph) -> bool {
    let n = g.node_count();
    let mut color = vec![usize::MAX; n];
    for s in 0..n {
        if color[s] != usize::MAX {
            continue;
        }
        color[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &u in g.neighbors(v) {
                if color[u] == usize::MAX {
                    color[u] = 1 - color[v];
                    queue.push_back(u);
                } else if color[u] == color[v] {
                    return false;
                }
            }
        }
    }
    true
}

/// Some proper `k`-colouring, found by backtracking, or `None`. Branches on
/// the uncoloured node seeing the most distinct colours. Closed twins are
/// interchangeable, so they are coloured in index order with increasing
/// colours.
pub fn chromatic_brute(g: &UGraph, k: usize) -> Option<Coloring> {
    let n = g.node_count();
    if n == 0 {
        return Some(Coloring { colors: Vec::new() });
    }
    if k == 0 {
        return None;
    }
    // prev[v]: the closest smaller closed twin of v.
    let mut prev = vec![usize::MAX; n];
    let mut by_nbhd: HashMap<Vec<usize>, usize> = HashMap::new();
    for v in 0..n {
        let mut key: Vec<usize> = g.neighbors(v).to_vec();
        key.push(v);
        key.sort_unstable();
        if let Some(w) = by_nbhd.insert(key, v) {
            prev[v] = w;
        }
    }
    struct Search<'a> {
        g: &'a UGraph,
        k: usize,
        prev: Vec<usize>,
        color: Vec<usize>,
        // seen[v][c]: neighbours of v currently coloured c.
        seen: Vec<Vec<u32>>,
    }
    impl Search<'_> {
        fn go(&mut self, left: usize, used: usize) -> bool {
            if left == 0 {
                return true;
            }
            let mut pick = usize::MAX;
            let mut key = (0, 0);
            for v in 0..self.g.node_count() {
                if self.color[v] != usize::MAX {
                    continue;
                }
                let sat = self.seen[v].iter().filter(|&&c| c > 0).count();
                if sat == self.k {
                    return false;
                }
                let p = self.prev[v];
                if p != usize::MAX && self.color[p] == usize::MAX {
                    continue;
                }
                let kv = (sat + 1, self.g.degree(v) + 1);
                if kv > key {
                    key = kv;
                    pick = v;
                }
            }
            let v = pick;
            let low = match self.prev[v] {
                usize::MAX => 0,
                p => self.color[p] + 1,
            };
            // A colour not used anywhere yet is tried once.
            for c in low..self.k.min(used + 1) {
                if self.seen[v][c] > 0 {
                    continue;
                }
                self.color[v] = c;
                for &u in self.g.neighbors(v) {
                    self.seen[u][c] += 1;
                }
                if self.go(left - 1, used.max(c + 1)) {
                    return true;
                }
                for &u in self.g.neighbors(v) {
                    self.seen[u][c] -= 1;
                }
                self.color[v] = usize::MAX;
            }
            false
        }
    }
    let mut s = Search {
        g,
        k,
        prev,
        color: vec![usize::MAX; n],
        seen: vec![vec![0u32; k]; n],
    };
    s.go(n, 0).then(|| Coloring::canonical(s.color))
}

pub fn chromatic_number_brute(g: &UGraph) -> usize {
    (0..=g.node_count())
        .find(|&k| chromatic_brute(g, k).is_some())
        .unwrap_or(g.node_count())
}

/// Arcs created for one source edge: the two arcs into its edge node and the
/// `k - 1` arcs leaving it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EdgeArcs {
    pub edge: (usize, usize),
    pub incoming: [usize; 2],
    pub pendants: Vec<usize>,
}

/// Digraph whose intersection graph is `k`-colourable iff `g` is
/// `k`-edge-colourable.
pub fn edgecolor_reduction(g: &UGraph, k: usize) -> Result<(Digraph, Vec<EdgeArcs>)> {
    if k == 0 {
        return Err(FlgError::Precondition("k must be at least 1".into()));
    }
    let mut d = Digraph::new(g.node_count());
    let mut notes = Vec::new();
    for (u, v) in g.edges() {
        let e = d.add_node();
        let a = d.add_arc(u, e)?;
        let b = d.add_arc(v, e)?;
        let mut pendants = Vec::with_capacity(k - 1);
        for _ in 1..k {
            let x = d.add_node();
            pendants.push(d.add_arc(e, x)?);
        }
        notes.push(EdgeArcs {
            edge: (u, v),
            incoming: [a, b],
            pendants,
        });
    }
    Ok((d, notes))
}

/// True iff the edges of `g` can be coloured with `k` colours.
pub fn edge_chromatic_brute(g: &UGraph, k: usize) -> bool {
    let edges = g.edges();
    let n = edges.len();
    let mut conflict = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (edges[i], edges[j]);
            if a.0 == b.0 || a.0 == b.1 || a.1 == b.0 || a.1 == b.1 {
                conflict[i].push(j);
                conflict[j].push(i);
            }
        }
    }
    let line = UGraph::from_edges(
        n,
        conflict
            .iter()
            .enumerate()
            .flat_map(|(i, c)| c.iter().filter(move |&&j| j > i).map(move |&j| (i, j))),
    )
    .expect("line graph is simple");
    chromatic_brute(&line, k).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intersect::intersection_graph;

    fn cycle(n: usize) -> UGraph {
        UGraph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    fn complete(n: usize) -> UGraph {
        UGraph::from_edges(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)))).unwrap()
    }

    #[test]
    fn fl_colouring_examples() {
        let p4 = UGraph::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        assert_eq!(color_trianglefree_fl(&p4).unwrap().count(), 2);
        assert_eq!(color_trianglefree_fl(&cycle(5)).unwrap().count(), 3);
        assert_eq!(color_trianglefree_fl(&UGraph::new(1)).unwrap().count(), 1);
        for n in 4..12 {
            let c = color_trianglefree_fl(&cycle(n)).unwrap();
            assert!(c.is_proper(&cycle(n)));
            assert_eq!(chromatic_number_fl(&cycle(n)).unwrap(), 2 + n % 2);
        }
    }

    #[test]
    fn brute_examples() {
        assert!(chromatic_brute(&cycle(5), 2).is_none());
        assert!(chromatic_brute(&cycle(5), 3).unwrap().is_proper(&cycle(5)));
        assert_eq!(chromatic_brute(&UGraph::new(0), 0).unwrap().colors.len(), 0);
        assert_eq!(chromatic_number_brute(&complete(4)), 4);
    }

    #[test]
    fn edge_colouring_examples() {
        assert!(edge_chromatic_brute(&complete(3), 3));
        assert!(!edge_chromatic_brute(&complete(3), 2));
        assert!(edge_chromatic_brute(&complete(4), 3));
        let star = UGraph::from_edges(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        assert!(!edge_chromatic_brute(&star, 2));
    }

    #[test]
    fn reduction_shape() {
        let (d, notes) = edgecolor_reduction(&complete(3), 3).unwrap();
        assert_eq!(notes.len(), 3);
        assert_eq!(d.arc_count(), 12);
        let (i, _) = intersection_graph(&d).unwrap();
        assert_eq!(chromatic_number_brute(&i), 3);
        let (d, _) = edgecolor_reduction(&complete(3), 2).unwrap();
        let (i, _) = intersection_graph(&d).unwrap();
        assert!(chromatic_brute(&i, 2).is_none());

        let edge = UGraph::from_edges(2, [(0, 1)]).unwrap();
        let (d, _) = edgecolor_reduction(&edge, 1).unwrap();
        let (i, _) = intersection_graph(&d).unwrap();
        assert_eq!(i.edge_count(), 0);
        assert!(chromatic_brute(&i, 1).is_some());
    }
}
