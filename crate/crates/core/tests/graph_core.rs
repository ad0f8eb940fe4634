use flg::graph::{cyclomatic_profile, find_triangle};
use flg::{Digraph, UGraph, Weight};
use proptest::prelude::*;

fn ugraph(max_nodes: usize, max_edges: usize) -> impl Strategy<Value = UGraph> {
    (1..=max_nodes).prop_flat_map(move |n| {
        prop::collection::btree_set((0..n, 0..n), 0..=max_edges).prop_map(move |pairs| {
            let edges: std::collections::BTreeSet<(usize, usize)> = pairs
                .into_iter()
                .filter(|(u, v)| u != v)
                .map(|(u, v)| (u.min(v), u.max(v)))
                .collect();
            UGraph::from_edges(n, edges).unwrap()
        })
    })
}

fn digraph(max_nodes: usize, max_arcs: usize) -> impl Strategy<Value = Digraph> {
    (2..=max_nodes).prop_flat_map(move |n| {
        prop::collection::vec((0..n, 0..n), 0..=max_arcs).prop_map(move |arcs| {
            Digraph::from_arcs(n, arcs.into_iter().filter(|(t, h)| t != h)).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn ugraph_text_round_trip(g in ugraph(64, 200), weighted in any::<bool>(), seed in any::<u64>()) {
        let g = if weighted {
            let w = (0..g.node_count() as u64)
                .map(|v| Weight::new((seed.wrapping_mul(v + 1) % 97) as i64 - 40, (v % 5 + 1) as i64))
                .collect();
            g.with_weights(w).unwrap()
        } else {
            g
        };
        let back = UGraph::parse(&g.to_text()).unwrap();
        prop_assert_eq!(back.node_count(), g.node_count());
        prop_assert_eq!(back.edges(), g.edges());
        prop_assert_eq!(back.weights(), g.weights());
    }

    #[test]
    fn digraph_text_round_trip(d in digraph(64, 200)) {
        let back = Digraph::parse(&d.to_text()).unwrap();
        prop_assert_eq!(back, d);
    }

    #[test]
    fn cyclomatic_totals(g in ugraph(30, 60)) {
        let profile = cyclomatic_profile(&g);
        let cycles: usize = profile.iter().map(|p| p.cycles).sum();
        prop_assert_eq!(cycles + g.node_count(), g.edge_count() + profile.len());
        prop_assert_eq!(profile.iter().map(|p| p.nodes).sum::<usize>(), g.node_count());
    }

    #[test]
    fn triangle_search_matches_triples(g in ugraph(12, 30)) {
        let n = g.node_count();
        let mut any = false;
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    any |= g.has_edge(a, b) && g.has_edge(b, c) && g.has_edge(a, c);
                }
            }
        }
        match find_triangle(&g) {
            Some([a, b, c]) => {
                prop_assert!(any);
                prop_assert!(g.has_edge(a, b) && g.has_edge(b, c) && g.has_edge(a, c));
            }
            None => prop_assert!(!any),
        }
    }
}

#[test]
fn parse_errors_name_the_line() {
    let err = UGraph::parse("p ugr 3 1\nc fine\ne 1 9\n").unwrap_err();
    assert!(err.to_string().contains('3') || err.to_string().contains('9'), "{err}");
    assert!(Digraph::parse("p dgr 2 1\na 1 1\n").is_err());
    assert!(UGraph::parse("p ugr 2 2\ne 1 2\n").is_err());
    assert!(UGraph::parse("e 1 2\n").is_err());
}
