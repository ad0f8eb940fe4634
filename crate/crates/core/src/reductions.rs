//! Subdivision, cubic perfect matchings, and the pattern-free digraph built
//! from a bridgeless cubic graph.

use serde::Serialize;

use crate::error::{FlgError, Result};
use crate::graph::{Digraph, UGraph};
use crate::intersect::ArcCertificate;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Subdivided {
    pub edge: (usize, usize),
    /// Internal nodes, the first next to `edge.0`.
    pub inner: [usize; 2],
}

/// Replaces every edge `uv` (u < v) by a path `u, x1, x2, v`. Edge `i` in
/// sorted order gets internal nodes `n + 2i` and `n + 2i + 1`.
pub fn poljak_subdivision(g: &UGraph) -> (UGraph, Vec<Subdivided>) {
    let n = g.node_count();
    let edges = g.edges();
    let mut out = UGraph::new(n + 2 * edges.len());
    let mut notes = Vec::with_capacity(edges.len());
    for (i, &(u, v)) in edges.iter().enumerate() {
        let (x1, x2) = (n + 2 * i, n + 2 * i + 1);
        for (a, b) in [(u, x1), (x1, x2), (x2, v)] {
            out.add_edge(a, b).expect("fresh path");
        }
        notes.push(Subdivided {
            edge: (u, v),
            inner: [x1, x2],
        });
    }
    (out, notes)
}

pub fn is_cubic(g: &UGraph) -> bool {
    (0..g.node_count()).all(|v| g.degree(v) == 3)
}

/// Some bridge of `g`, if any (DFS low points, iterative).
pub fn find_bridge(g: &UGraph) -> Option<(usize, usize)> {
    let n = g.node_count();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut time = 0;
    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        // (node, parent, next neighbour index)
        let mut stack = vec![(root, usize::MAX, 0usize)];
        disc[root] = time;
        low[root] = time;
        time += 1;
        while let Some(&mut (v, parent, ref mut i)) = stack.last_mut() {
            if let Some(&u) = g.neighbors(v).get(*i) {
                *i += 1;
                if u == parent {
                    continue;
                }
                if disc[u] == usize::MAX {
                    disc[u] = time;
                    low[u] = time;
                    time += 1;
                    stack.push((u, v, 0));
                } else {
                    low[v] = low[v].min(disc[u]);
                }
            } else {
                stack.pop();
                if parent != usize::MAX {
                    low[parent] = low[parent].min(low[v]);
                    if low[v] > disc[parent] {
                        return Some((parent.min(v), parent.max(v)));
                    }
                }
            }
        }
    }
    None
}

fn check_bridgeless_cubic(g: &UGraph) -> Result<()> {
    if let Some(v) = (0..g.node_count()).find(|&v| g.degree(v) != 3) {
        return Err(FlgError::NotCubic(v, g.degree(v)));
    }
    if let Some((u, v)) = find_bridge(g) {
        return Err(FlgError::Bridge(u, v));
    }
    Ok(())
}

/// A perfect matching of a bridgeless cubic graph, by backtracking.
pub fn perfect_matching_cubic(g: &UGraph) -> Result<Vec<(usize, usize)>> {
    check_bridgeless_cubic(g)?;
    let n = g.node_count();
    let mut mate = vec![usize::MAX; n];
    fn go(g: &UGraph, mate: &mut [usize]) -> bool {
        let Some(v) = mate.iter().position(|&m| m == usize::MAX) else {
            return true;
        };
        for &u in g.neighbors(v) {
            if mate[u] == usize::MAX {
                mate[v] = u;
                mate[u] = v;
                if go(g, mate) {
                    return true;
                }
                mate[v] = usize::MAX;
                mate[u] = usize::MAX;
            }
        }
        false
    }
    if !go(g, &mut mate) {
        return Err(FlgError::Internal("no perfect matching found".into()));
    }
    Ok((0..n).filter(|&v| v < mate[v]).map(|v| (v, mate[v])).collect())
}

/// Digraph `D` with `I(D)` equal to the subdivision of `g`; the certificate
/// maps subdivision nodes to arcs.
pub fn cubic_to_hard_digraph(g: &UGraph) -> Result<(Digraph, ArcCertificate)> {
    let matching = perfect_matching_cubic(g)?;
    let n = g.node_count();
    let edges = g.edges();
    let (sub, notes) = poljak_subdivision(g);
    let index_of = |u: usize, v: usize| edges.binary_search(&(u.min(v), u.max(v))).expect("edge");
    let mut rest = g.clone();
    for &(u, v) in &matching {
        rest.remove_edge(u, v);
    }
    // Subdivision nodes along the path from `u` to `v`, excluding `u`.
    let step = |u: usize, v: usize| -> [usize; 3] {
        let s = &notes[index_of(u, v)];
        if u < v {
            [s.inner[0], s.inner[1], v]
        } else {
            [s.inner[1], s.inner[0], v]
        }
    };
    let mut d = Digraph::new(0);
    let mut map = vec![usize::MAX; sub.node_count()];
    let mut seen = vec![false; n];
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut walk = vec![start];
        let (mut prev, mut cur) = (usize::MAX, start);
        seen[start] = true;
        loop {
            let next = *rest
                .neighbors(cur)
                .iter()
                .find(|&&u| u != prev)
                .expect("2-regular");
            walk.extend(step(cur, next));
            if next == start {
                break;
            }
            seen[next] = true;
            prev = cur;
            cur = next;
        }
        walk.pop();
        let k = walk.len();
        let ring: Vec<usize> = (0..k).map(|_| d.add_node()).collect();
        for (i, &x) in walk.iter().enumerate() {
            map[x] = d.add_arc(ring[i], ring[(i + 1) % k])?;
        }
    }
    for &(u, v) in &matching {
        let s = &notes[index_of(u, v)];
        let t = d.add_node();
        let tu = d.arc(map[u]).tail;
        let tv = d.arc(map[v]).tail;
        map[s.inner[0]] = d.add_arc(t, tu)?;
        map[s.inner[1]] = d.add_arc(t, tv)?;
    }
    debug_assert!(map.iter().all(|&a| a != usize::MAX));
    Ok((d, ArcCertificate { map }))
}

pub fn petersen() -> UGraph {
    let mut e = Vec::new();
    for i in 0..5 {
        e.push((i, (i + 1) % 5));
        e.push((i, i + 5));
        e.push((5 + i, 5 + (i + 2) % 5));
    }
    UGraph::from_edges(10, e).expect("petersen")
}

/// Triangular prism: triangles 0,1,2 and 3,4,5 joined by rungs.
pub fn prism() -> UGraph {
    UGraph::from_edges(
        6,
        [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (0, 3), (1, 4), (2, 5)],
    )
    .expect("prism")
}

pub fn complete_graph(n: usize) -> UGraph {
    UGraph::from_edges(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)))).expect("complete")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intersect::{check_certificate, detect_patterns, ForbiddenPattern, PatternName};

    #[test]
    fn subdivision_sizes() {
        let (s, notes) = poljak_subdivision(&complete_graph(3));
        assert_eq!((s.node_count(), s.edge_count()), (9, 9));
        assert_eq!(notes[0].inner, [3, 4]);
        let (s, _) = poljak_subdivision(&UGraph::from_edges(2, [(0, 1)]).unwrap());
        assert_eq!(s.edges(), vec![(0, 2), (1, 3), (2, 3)]);
    }

    #[test]
    fn matchings() {
        assert_eq!(perfect_matching_cubic(&complete_graph(4)).unwrap().len(), 2);
        assert_eq!(perfect_matching_cubic(&petersen()).unwrap().len(), 5);
        assert_eq!(perfect_matching_cubic(&prism()).unwrap().len(), 3);
        assert!(matches!(
            perfect_matching_cubic(&complete_graph(3)),
            Err(FlgError::NotCubic(..))
        ));
    }

    #[test]
    fn bridges() {
        assert_eq!(find_bridge(&petersen()), None);
        let p3 = UGraph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        assert!(find_bridge(&p3).is_some());
        // Two K4 minus an edge, joined by a bridge: cubic with a bridge.
        let mut e = vec![(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)];
        e.extend([(5, 6), (5, 7), (6, 7), (6, 8), (7, 8)]);
        e.extend([(0, 4), (3, 4), (4, 9), (5, 9), (8, 9)]);
        let g = UGraph::from_edges(10, e).unwrap();
        assert!(is_cubic(&g));
        assert_eq!(find_bridge(&g), Some((4, 9)));
        assert!(matches!(perfect_matching_cubic(&g), Err(FlgError::Bridge(4, 9))));
    }

    #[test]
    fn hard_digraphs_check_and_avoid_patterns() {
        let hard: Vec<ForbiddenPattern> = PatternName::HARD.into_iter().map(ForbiddenPattern::new).collect();
        for g in [complete_graph(4), prism(), petersen()] {
            let (d, cert) = cubic_to_hard_digraph(&g).unwrap();
            let (sub, _) = poljak_subdivision(&g);
            assert!(check_certificate(&sub, &d, &cert).unwrap());
            assert!(d.in_degrees().iter().all(|&k| k <= 2));
            assert!(detect_patterns(&d, &hard).is_empty());
        }
    }
}
