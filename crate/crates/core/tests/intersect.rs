mod common;

use std::collections::BTreeSet;

use flg::graph::find_triangle;
use flg::intersect::{
    check_certificate, check_fork_property, detect_patterns, intersection_graph, normalize_sinks, ArcCertificate,
    ForbiddenPattern,
};
use flg::{Arc, Digraph};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn digraph(max_nodes: usize, max_arcs: usize) -> impl Strategy<Value = Digraph> {
    (2..=max_nodes).prop_flat_map(move |n| {
        prop::collection::vec((0..n, 0..n), 1..=max_arcs).prop_map(move |arcs| {
            let arcs: Vec<_> = arcs.into_iter().filter(|(t, h)| t != h).collect();
            let arcs = if arcs.is_empty() { vec![(0, 1)] } else { arcs };
            Digraph::from_arcs(n, arcs).unwrap()
        })
    })
}

/// The four cases, written out separately from the library.
fn adjacent(a: Arc, b: Arc) -> bool {
    let same_tail = a.tail == b.tail;
    let a_feeds_b = a.head == b.tail;
    let b_feeds_a = b.head == a.tail;
    let antiparallel = a.tail == b.head && a.head == b.tail;
    same_tail || a_feeds_b || b_feeds_a || antiparallel
}

/// Every injective node map of the template into `d`, reduced to image sets.
fn naive_matches(d: &Digraph, p: &ForbiddenPattern) -> BTreeSet<Vec<usize>> {
    let arcs: BTreeSet<(usize, usize)> = d.arcs().iter().map(|a| (a.tail, a.head)).collect();
    let k = p.template.node_count();
    let mut out = BTreeSet::new();
    let mut map = vec![0; k];
    fn go(
        i: usize,
        map: &mut Vec<usize>,
        d: &Digraph,
        p: &ForbiddenPattern,
        arcs: &BTreeSet<(usize, usize)>,
        out: &mut BTreeSet<Vec<usize>>,
    ) {
        if i == map.len() {
            if p.template.arcs().iter().all(|a| arcs.contains(&(map[a.tail], map[a.head]))) {
                let mut image = map.clone();
                image.sort_unstable();
                out.insert(image);
            }
            return;
        }
        for v in 0..d.node_count() {
            if !map[..i].contains(&v) {
                map[i] = v;
                go(i + 1, map, d, p, arcs, out);
            }
        }
    }
    go(0, &mut map, d, p, &arcs, &mut out);
    out
}

proptest! {
    #[test]
    fn adjacency_matches_definition(d in digraph(8, 10)) {
        let (g, cert) = intersection_graph(&d).unwrap();
        prop_assert_eq!(cert, ArcCertificate::identity(d.arc_count()));
        for i in 0..d.arc_count() {
            for j in 0..d.arc_count() {
                if i != j {
                    prop_assert_eq!(g.has_edge(i, j), adjacent(d.arc(i), d.arc(j)), "arcs {} {}", i, j);
                }
            }
        }
    }

    #[test]
    fn sink_normalization_is_idempotent_and_exact(d in digraph(8, 12)) {
        let (g, _) = intersection_graph(&d).unwrap();
        let once = normalize_sinks(&d);
        prop_assert_eq!(normalize_sinks(&once), once.clone());
        let id = ArcCertificate::identity(d.arc_count());
        prop_assert!(check_certificate(&g, &once, &id).unwrap());
    }

    #[test]
    fn patterns_match_naive_search(d in digraph(8, 12)) {
        for p in ForbiddenPattern::all() {
            let fast: BTreeSet<Vec<usize>> = detect_patterns(&d, std::slice::from_ref(&p))
                .into_iter()
                .map(|m| {
                    prop_assert_eq!(m.name, p.name);
                    let mut image = m.embedding.clone();
                    image.sort_unstable();
                    Ok(image)
                })
                .collect::<Result<_, TestCaseError>>()?;
            prop_assert_eq!(&fast, &naive_matches(&d, &p), "pattern {}", p.name);
        }
    }
}

/// At most two arcs leave any node, and when two do, not both heads have
/// arcs leaving them.
fn at_most_one_fork_branch_continues(d: &Digraph) -> bool {
    let out = d.out_arcs();
    out.iter().all(|arcs| match arcs.len() {
        0 | 1 => true,
        2 => arcs.iter().any(|&a| out[d.arc(a).head].is_empty()),
        _ => false,
    })
}

#[test]
fn forks_in_reduced_preimages() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut tested, mut strict) = (0, 0);
    for _ in 0..3000 {
        let (d, g) = common::random_trianglefree_preimage(&mut rng, 12);
        assert!(find_triangle(&g).is_none());
        // A component of I(D) is the intersection graph of its own arcs.
        for comp in g.components() {
            let adjacent_twos = comp
                .iter()
                .any(|&u| g.degree(u) == 2 && g.neighbors(u).iter().any(|&v| g.degree(v) == 2));
            if adjacent_twos {
                continue;
            }
            let sub = Digraph::from_arcs(d.node_count(), comp.iter().map(|&a| (d.arc(a).tail, d.arc(a).head))).unwrap();
            let sub = normalize_sinks(&sub);
            assert!(at_most_one_fork_branch_continues(&sub), "{}", sub.to_text());
            tested += 1;
            strict += check_fork_property(&sub) as usize;
        }
    }
    assert!(tested > 100, "only {tested} instances");
    assert!(strict > 0);
}

/// A connected triangle-free FL graph without adjacent degree-2 nodes whose
/// preimage has a fork with one continuing branch: node 0 leaves arcs to the
/// sink 1 and to node 2, which has an arc of its own.
#[test]
fn fork_with_one_continuing_branch() {
    let d = Digraph::from_arcs(8, [(0, 1), (0, 2), (2, 3), (3, 2), (4, 3), (5, 2), (6, 2), (7, 6)]).unwrap();
    let (g, _) = intersection_graph(&d).unwrap();
    assert!(find_triangle(&g).is_none());
    assert_eq!(g.component_ids().1, 1);
    assert!(!g.edges().into_iter().any(|(u, v)| g.degree(u) == 2 && g.degree(v) == 2));
    assert!(at_most_one_fork_branch_continues(&d));
    assert!(!check_fork_property(&d));
}
