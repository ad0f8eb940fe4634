use flg::graph::find_triangle;
use flg::intersect::{check_certificate, detect_patterns, ForbiddenPattern, PatternName};
use flg::reductions::{
    complete_graph, cubic_to_hard_digraph, find_bridge, is_cubic, perfect_matching_cubic, poljak_subdivision,
};
use flg::UGraph;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random simple cubic graph on `n` nodes by the pairing model.
fn random_cubic(rng: &mut ChaCha8Rng, n: usize) -> UGraph {
    loop {
        let mut points: Vec<usize> = (0..3 * n).map(|p| p / 3).collect();
        points.shuffle(rng);
        let mut edges: Vec<(usize, usize)> =
            points.chunks(2).map(|c| (c[0].min(c[1]), c[0].max(c[1]))).collect();
        if edges.iter().any(|(u, v)| u == v) {
            continue;
        }
        edges.sort_unstable();
        if edges.windows(2).any(|w| w[0] == w[1]) {
            continue;
        }
        return UGraph::from_edges(n, edges).unwrap();
    }
}

#[test]
fn matchings_of_random_bridgeless_cubic_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let mut tested = 0;
    while tested < 200 {
        let n = 2 * rng.gen_range(2..=9);
        let g = random_cubic(&mut rng, n);
        assert!(is_cubic(&g));
        if find_bridge(&g).is_some() {
            assert!(perfect_matching_cubic(&g).is_err());
            continue;
        }
        let m = perfect_matching_cubic(&g).unwrap();
        assert_eq!(m.len(), n / 2);
        let mut covered = vec![false; n];
        for &(u, v) in &m {
            assert!(g.has_edge(u, v));
            assert!(!covered[u] && !covered[v]);
            covered[u] = true;
            covered[v] = true;
        }
        tested += 1;
    }
}

#[test]
fn hard_digraphs_of_random_cubic_graphs() {
    let hard: Vec<ForbiddenPattern> = PatternName::HARD.into_iter().map(ForbiddenPattern::new).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut tested = 0;
    while tested < 100 {
        let n = 2 * rng.gen_range(2..=8);
        let g = random_cubic(&mut rng, n);
        if find_bridge(&g).is_some() {
            assert!(cubic_to_hard_digraph(&g).is_err());
            continue;
        }
        let (d, cert) = cubic_to_hard_digraph(&g).unwrap();
        let (sub, _) = poljak_subdivision(&g);
        assert!(check_certificate(&sub, &d, &cert).unwrap());
        assert!(detect_patterns(&d, &hard).is_empty(), "{:?}", g.edges());
        assert!(d.in_degrees().into_iter().all(|k| k <= 2));
        tested += 1;
    }
}

#[test]
fn subdivision_shape() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    for _ in 0..100 {
        let n = rng.gen_range(1..=10);
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(0.4) {
                    edges.push((u, v));
                }
            }
        }
        let g = UGraph::from_edges(n, edges).unwrap();
        let (sub, notes) = poljak_subdivision(&g);
        let e = g.edge_count();
        assert_eq!(sub.node_count(), n + 2 * e);
        assert_eq!(sub.edge_count(), 3 * e);
        assert!(find_triangle(&sub).is_none());
        for v in 0..n {
            assert_eq!(sub.degree(v), g.degree(v));
        }
        for s in &notes {
            let [x1, x2] = s.inner;
            assert!(sub.has_edge(s.edge.0, x1) && sub.has_edge(x1, x2) && sub.has_edge(x2, s.edge.1));
            assert_eq!((sub.degree(x1), sub.degree(x2)), (2, 2));
        }
    }
}

#[test]
fn non_cubic_and_bridged_inputs_are_rejected() {
    assert!(perfect_matching_cubic(&complete_graph(5)).is_err());
    // Two K4s with one edge removed each, joined by a bridge.
    let mut edges = Vec::new();
    for base in [0, 4] {
        for u in 0..4 {
            for v in u + 1..4 {
                if (u, v) != (0, 1) {
                    edges.push((base + u, base + v));
                }
            }
        }
    }
    edges.push((0, 4));
    edges.push((1, 5));
    let joined = UGraph::from_edges(8, edges).unwrap();
    assert!(is_cubic(&joined));
    assert!(find_bridge(&joined).is_none());
    assert!(perfect_matching_cubic(&joined).is_ok());

    // K4 with edge 0-1 subdivided by node 4, twice, bridged at the new nodes.
    let mut edges = Vec::new();
    for base in [0, 5] {
        edges.extend([(0, 4), (1, 4), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)].map(|(u, v)| (base + u, base + v)));
    }
    edges.push((4, 9));
    let bridged = UGraph::from_edges(10, edges).unwrap();
    assert!(is_cubic(&bridged));
    assert_eq!(find_bridge(&bridged).map(|(u, v)| (u.min(v), u.max(v))), Some((4, 9)));
    assert!(perfect_matching_cubic(&bridged).is_err());
    assert!(cubic_to_hard_digraph(&bridged).is_err());
}
