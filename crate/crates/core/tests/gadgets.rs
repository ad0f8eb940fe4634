use flg::cnf::{CnfFormula, Literal};
use flg::gadgets::{assemble_gf, build_gad2, gad2_name, inverter, Builder, GadgetLabels};
use flg::graph::find_triangle;
use flg::preimage::{has_preimage, Decision};
use flg::UGraph;

/// The clause gadget with its two inverter blocks attached the other way
/// round.
fn gad2_swapped(j: usize) -> (UGraph, GadgetLabels) {
    let mut b = Builder::new();
    let n = |x: &str| gad2_name(x, j);
    for (u, v) in [
        ("r", "a"),
        ("a", "f"),
        ("f", "r"),
        ("s", "b"),
        ("b", "c"),
        ("c", "s"),
        ("t", "e"),
        ("e", "d"),
        ("d", "t"),
        ("r", "r'"),
        ("s", "s'"),
        ("t", "t'"),
        ("c", "d"),
    ] {
        b.edge(&n(u), &n(v));
    }
    for (block, [g, bb, g2, b2]) in [(2, ["f", "f'", "e", "e'"]), (1, ["a", "a'", "b", "b'"])] {
        let inv = |x: &str| gad2_name(&format!("inv{block}.{x}"), j);
        inverter(&mut b, inv);
        b.identify(&n(g), &inv("g"));
        b.identify(&n(bb), &inv("b"));
        b.identify(&n(g2), &inv("g'"));
        b.identify(&n(b2), &inv("b'"));
    }
    b.build().unwrap()
}

#[test]
fn clause_gadget_is_symmetric_in_its_inverters() {
    let (g1, l1) = build_gad2(1);
    let (g2, l2) = gad2_swapped(1);
    assert_eq!(g1.node_count(), g2.node_count());
    assert_eq!(g1.edge_count(), g2.edge_count());
    let map: Vec<usize> = (0..g1.node_count()).map(|v| l2.get(l1.primary(v))).collect();
    for (u, v) in g1.edges() {
        assert!(g2.has_edge(map[u], map[v]), "{} {}", l1.primary(u), l1.primary(v));
    }
}

#[test]
fn sat_graphs_contain_triangles() {
    let f = CnfFormula::new(
        4,
        vec![
            [Literal::pos(1), Literal::neg(2), Literal::pos(3)],
            [Literal::neg(1), Literal::pos(2), Literal::pos(4)],
            [Literal::pos(2), Literal::neg(3), Literal::neg(4)],
        ],
    )
    .unwrap();
    let (g, labels) = assemble_gf(&f).unwrap();
    assert!(find_triangle(&g).is_some());
    assert_eq!(labels.names.len(), g.node_count());
}

/// The unsatisfiable direction: all eight sign patterns over three
/// variables. The exhaustive search on the resulting graph is far beyond
/// desk scale, so this only runs on request.
#[test]
#[ignore = "exhaustive search on a graph with several hundred nodes"]
fn unsatisfiable_formula_has_no_preimage() {
    let clauses = (0..8)
        .map(|s| std::array::from_fn(|k| if s >> k & 1 == 1 { Literal::neg(k + 1) } else { Literal::pos(k + 1) }))
        .collect();
    let f = CnfFormula::new(3, clauses).unwrap();
    assert!(f.satisfying_assignments().unwrap().is_empty());
    let (g, _) = assemble_gf(&f).unwrap();
    assert!(matches!(has_preimage(&g, u64::MAX), Decision::No));
}
