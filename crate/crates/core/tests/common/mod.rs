#![allow(dead_code)]

use flg::graph::find_triangle;
use flg::intersect::intersection_graph;
use flg::optimize::UflpInstance;
use flg::{Digraph, UGraph, Weight};
use rand::Rng;

/// Grows a random digraph arc by arc, dropping arcs that would put a
/// triangle into its intersection graph. Returns the digraph and `I(D)`.
pub fn random_trianglefree_preimage<R: Rng>(rng: &mut R, arcs: usize) -> (Digraph, UGraph) {
    let mut d = Digraph::new(2);
    d.add_arc(0, 1).unwrap();
    let mut tries = 0;
    while d.arc_count() < arcs && tries < 20 * arcs {
        tries += 1;
        let n = d.node_count();
        let pick = |rng: &mut R| if rng.gen_bool(0.3) { n } else { rng.gen_range(0..n) };
        let (t, h) = (pick(rng), pick(rng));
        if t == h {
            continue;
        }
        let mut next = d.clone();
        while next.node_count() <= t.max(h) {
            next.add_node();
        }
        next.add_arc(t, h).unwrap();
        let (g, _) = intersection_graph(&next).unwrap();
        if find_triangle(&g).is_none() {
            d = next;
        }
    }
    let (g, _) = intersection_graph(&d).unwrap();
    (d, g)
}

/// Random tree on `tree_nodes` nodes plus `ears` paths of three edges
/// between distinct tree nodes. Every ear keeps a middle edge between two
/// degree-2 nodes, so the reduced graph is a forest and the graph is FL.
pub fn random_eared_tree<R: Rng>(rng: &mut R, tree_nodes: usize, ears: usize) -> UGraph {
    let n = tree_nodes + 2 * ears;
    let mut edges = Vec::with_capacity(tree_nodes - 1 + 3 * ears);
    for v in 1..tree_nodes {
        edges.push((rng.gen_range(0..v), v));
    }
    for e in 0..ears {
        let u = rng.gen_range(0..tree_nodes);
        let mut v = rng.gen_range(0..tree_nodes - 1);
        if v >= u {
            v += 1;
        }
        let (x, y) = (tree_nodes + 2 * e, tree_nodes + 2 * e + 1);
        edges.extend([(u, x), (x, y), (y, v)]);
    }
    UGraph::from_edges(n, edges).unwrap()
}

/// Random graph with `n` nodes and roughly `p * n^2 / 2` edges.
pub fn random_graph<R: Rng>(rng: &mut R, n: usize, p: f64) -> UGraph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    UGraph::from_edges(n, edges).unwrap()
}

pub fn random_rational<R: Rng>(rng: &mut R, max: i64) -> Weight {
    Weight::new(rng.gen_range(0..=max), rng.gen_range(1..=4))
}

/// UFLP instance on at most `max_nodes` nodes and `max_arcs` arcs.
pub fn random_uflp<R: Rng>(rng: &mut R, max_nodes: usize, max_arcs: usize) -> UflpInstance {
    let n = rng.gen_range(2..=max_nodes);
    let mut d = Digraph::new(n);
    let m = rng.gen_range(0..=max_arcs);
    for _ in 0..m {
        let t = rng.gen_range(0..n);
        let h = rng.gen_range(0..n);
        if t != h {
            d.add_arc(t, h).unwrap();
        }
    }
    let f = (0..n).map(|_| random_rational(rng, 12)).collect();
    let c = (0..d.arc_count()).map(|_| random_rational(rng, 12)).collect();
    UflpInstance::new(d, f, c).unwrap()
}
