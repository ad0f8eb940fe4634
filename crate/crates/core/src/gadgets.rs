//! The hardness gadgets: the wheel, the graphs `I`/`I'`, the inverter, the
//! variable and clause gadgets, and the graph `G_F` of a 3-SAT formula.
//!
//! Gadgets are assembled from named atoms; identifying two atoms merges
//! their nodes, and the merged node keeps every name.

use std::collections::HashMap;

use serde::Serialize;

use crate::cnf::CnfFormula;
use crate::error::{FlgError, Result};
use crate::graph::UGraph;

/// Node names of a built gadget; `names[v][0]` is the primary name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GadgetLabels {
    pub names: Vec<Vec<String>>,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

impl GadgetLabels {
    pub fn node(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Like [`node`](Self::node) but panics on unknown names; for gadget
    /// code that only asks for names it created.
    pub fn get(&self, name: &str) -> usize {
        self.node(name)
            .unwrap_or_else(|| panic!("no node named `{name}`"))
    }

    pub fn primary(&self, v: usize) -> &str {
        &self.names[v][0]
    }

    pub fn primaries(&self) -> Vec<String> {
        self.names.iter().map(|n| n[0].clone()).collect()
    }
}

/// Incremental gadget assembly over named atoms with union-find merging.
#[derive(Debug, Default, Clone)]
pub struct Builder {
    atoms: Vec<String>,
    index: HashMap<String, usize>,
    parent: Vec<usize>,
    edges: Vec<(usize, usize)>,
}

impl Builder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn atom(&mut self, name: &str) -> usize {
        if let Some(&a) = self.index.get(name) {
            return a;
        }
        let a = self.atoms.len();
        self.atoms.push(name.to_owned());
        self.index.insert(name.to_owned(), a);
        self.parent.push(a);
        a
    }

    pub fn edge(&mut self, u: &str, v: &str) {
        let (a, b) = (self.atom(u), self.atom(v));
        self.edges.push((a, b));
    }

    fn find(&mut self, mut a: usize) -> usize {
        while self.parent[a] != a {
            self.parent[a] = self.parent[self.parent[a]];
            a = self.parent[a];
        }
        a
    }

    /// Merges two atoms; the earlier-created one stays representative.
    pub fn identify(&mut self, u: &str, v: &str) {
        let (a, b) = (self.atom(u), self.atom(v));
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (keep, drop) = (ra.min(rb), ra.max(rb));
            self.parent[drop] = keep;
        }
    }

    /// Nodes are numbered by the creation order of their representatives;
    /// repeated edges between merged atoms collapse.
    pub fn build(mut self) -> Result<(UGraph, GadgetLabels)> {
        let mut node_of_root = HashMap::new();
        let mut names: Vec<Vec<String>> = Vec::new();
        let mut atom_node = vec![0; self.atoms.len()];
        for a in 0..self.atoms.len() {
            let r = self.find(a);
            let next = node_of_root.len();
            let v = *node_of_root.entry(r).or_insert(next);
            if v == names.len() {
                names.push(Vec::new());
            }
            atom_node[a] = v;
        }
        for a in 0..self.atoms.len() {
            names[atom_node[a]].push(self.atoms[a].clone());
        }
        let mut edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .map(|&(a, b)| {
                let (u, v) = (atom_node[a], atom_node[b]);
                (u.min(v), u.max(v))
            })
            .collect();
        edges.sort_unstable();
        edges.dedup();
        let g = UGraph::from_edges(names.len(), edges)?;
        let index = self
            .atoms
            .iter()
            .enumerate()
            .map(|(a, n)| (n.clone(), atom_node[a]))
            .collect();
        Ok((g, GadgetLabels { names, index }))
    }
}

const WHEEL_EDGES: [(&str, &str); 10] = [
    ("a", "b"),
    ("a", "c"),
    ("a", "d"),
    ("a", "e"),
    ("a", "f"),
    ("b", "c"),
    ("c", "d"),
    ("d", "e"),
    ("e", "f"),
    ("f", "b"),
];

/// Hub `a`, rim `b c d e f`.
pub fn wheel5(b: &mut Builder, name: impl Fn(&str) -> String) {
    for (u, v) in WHEEL_EDGES {
        b.edge(&name(u), &name(v));
    }
}

/// The wheel plus the branches `b-g`, `f-h` and the two triangle-closing
/// nodes `i` (on `c d`) and `j` (on `d e`). `name` maps the letters to
/// atom names.
pub fn graph_i(b: &mut Builder, name: impl Fn(&str) -> String) {
    wheel5(b, &name);
    for (u, v) in [
        ("b", "g"),
        ("f", "h"),
        ("i", "c"),
        ("i", "d"),
        ("j", "d"),
        ("j", "e"),
    ] {
        b.edge(&name(u), &name(v));
    }
}

/// `I'`: same shape as `I`, with the node on `c' d'` called `j'` and the
/// node on `d' e'` called `i'`.
pub fn graph_i_prime(b: &mut Builder, name: impl Fn(&str) -> String) {
    graph_i(b, |x| match x {
        "i" => name("j'"),
        "j" => name("i'"),
        _ => name(&format!("{x}'")),
    });
}

/// The inverter: `I` and `I'` glued at `j = j'`.
pub fn inverter(b: &mut Builder, name: impl Fn(&str) -> String) {
    graph_i(b, &name);
    graph_i_prime(b, &name);
    b.identify(&name("j"), &name("j'"));
}

pub fn build_wheel5() -> UGraph {
    let mut b = Builder::new();
    wheel5(&mut b, str::to_owned);
    b.build().expect("wheel is simple").0
}

pub fn build_i() -> (UGraph, GadgetLabels) {
    let mut b = Builder::new();
    graph_i(&mut b, str::to_owned);
    b.build().expect("I is simple")
}

pub fn build_i_prime() -> (UGraph, GadgetLabels) {
    let mut b = Builder::new();
    graph_i_prime(&mut b, str::to_owned);
    b.build().expect("I' is simple")
}

pub fn build_inv() -> (UGraph, GadgetLabels) {
    let mut b = Builder::new();
    inverter(&mut b, str::to_owned);
    b.build().expect("Inv is simple")
}

/// A triangle `0 1 2` with the branches `0-3`, `1-4`, `2-5`.
pub fn build_delta() -> UGraph {
    UGraph::from_edges(6, [(0, 1), (1, 2), (0, 2), (0, 3), (1, 4), (2, 5)]).expect("simple")
}

/// Name of letter `x` of copy `l` in the variable gadget of variable `i`
/// (both 1-based), e.g. `g^2_1`.
pub fn gad1_name(x: &str, i: usize, l: usize) -> String {
    format!("{x}^{i}_{l}")
}

/// `m` copies of `I`; copy `l` has `i^i_l` on `c d` and `i^i_{l+1}` on
/// `d e`, so consecutive copies share one node.
pub fn gad1_into(b: &mut Builder, i: usize, m: usize) {
    for l in 1..=m {
        graph_i(b, |x| match x {
            "i" => gad1_name("i", i, l),
            "j" => gad1_name("i", i, l + 1),
            _ => gad1_name(x, i, l),
        });
    }
}

pub fn build_gad1(i: usize, m: usize) -> Result<(UGraph, GadgetLabels)> {
    if m == 0 {
        return Err(FlgError::Precondition("variable gadget needs m >= 1".into()));
    }
    let mut b = Builder::new();
    gad1_into(&mut b, i, m);
    b.build()
}

/// Name of node `x` of the clause gadget of clause `j` (1-based), e.g.
/// `r'_3`. Nodes inside the two inverters are `inv1.x_j` / `inv2.x_j`.
pub fn gad2_name(x: &str, j: usize) -> String {
    format!("{x}_{j}")
}

/// Three triangles with branches, `r a f`, `s b c`, `t e d`; inverters join
/// `a-a'` to `b-b'` and `f-f'` to `e-e'`, and `c` is joined to `d`.
pub fn gad2_into(b: &mut Builder, j: usize) {
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
    for (block, [g, bb, g2, b2]) in [(1, ["a", "a'", "b", "b'"]), (2, ["f", "f'", "e", "e'"])] {
        let inv = |x: &str| gad2_name(&format!("inv{block}.{x}"), j);
        inverter(b, inv);
        b.identify(&n(g), &inv("g"));
        b.identify(&n(bb), &inv("b"));
        b.identify(&n(g2), &inv("g'"));
        b.identify(&n(b2), &inv("b'"));
    }
}

pub fn build_gad2(j: usize) -> (UGraph, GadgetLabels) {
    let mut b = Builder::new();
    gad2_into(&mut b, j);
    b.build().expect("clause gadget is simple")
}

/// The clause slots `r`, `s`, `t` in order.
pub const SLOTS: [&str; 3] = ["r", "s", "t"];

/// `G_F`: a variable gadget with one copy per clause for every variable,
/// a clause gadget per clause, and two identifications per literal.
pub fn assemble_gf(f: &CnfFormula) -> Result<(UGraph, GadgetLabels)> {
    f.check_distinct()?;
    let m = f.clauses.len();
    let mut b = Builder::new();
    for i in 1..=f.variable_count {
        gad1_into(&mut b, i, m.max(1));
    }
    for (jj, clause) in f.clauses.iter().enumerate() {
        let j = jj + 1;
        gad2_into(&mut b, j);
        for (slot, lit) in SLOTS.iter().zip(clause) {
            let v = lit.var;
            let (node, branch) = if lit.negated { ("h", "f") } else { ("g", "b") };
            b.identify(&gad2_name(slot, j), &gad1_name(node, v, j));
            b.identify(&gad2_name(&format!("{slot}'"), j), &gad1_name(branch, v, j));
        }
    }
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::find_triangle;

    #[test]
    fn golden_sizes() {
        let w = build_wheel5();
        assert_eq!((w.node_count(), w.edge_count()), (6, 10));
        let (i, _) = build_i();
        assert_eq!((i.node_count(), i.edge_count()), (10, 16));
        let (inv, _) = build_inv();
        assert_eq!((inv.node_count(), inv.edge_count()), (19, 32));
        for (m, n) in [(1, 10), (2, 19), (3, 28)] {
            let (g, _) = build_gad1(1, m).unwrap();
            assert_eq!((g.node_count(), g.edge_count()), (n, 16 * m));
        }
        let (g2, _) = build_gad2(1);
        assert_eq!((g2.node_count(), g2.edge_count()), (46, 77));
    }

    #[test]
    fn two_copy_chain_is_the_inverter() {
        let (chain, cl) = build_gad1(1, 2).unwrap();
        let (inv, il) = build_inv();
        // Same letters, copy 2 primed, shared node j = i^1_2.
        let rename = |name: &str| -> String {
            let (x, rest) = name.split_once('^').unwrap();
            let l: usize = rest.rsplit('_').next().unwrap().parse().unwrap();
            match (x, l) {
                ("i", 1) => "i".into(),
                ("i", 2) => "j".into(),
                ("i", 3) => "i'".into(),
                (x, 1) => x.into(),
                (x, _) => format!("{x}'"),
            }
        };
        for (u, v) in chain.edges() {
            let (a, b) = (il.get(&rename(cl.primary(u))), il.get(&rename(cl.primary(v))));
            assert!(inv.has_edge(a, b));
        }
        assert_eq!(chain.edge_count(), inv.edge_count());
    }

    #[test]
    fn clause_gadget_shape() {
        let (g, l) = build_gad2(1);
        let r = l.get("r_1");
        let mut nb: Vec<&str> = g.neighbors(r).iter().map(|&v| l.primary(v)).collect();
        nb.sort();
        assert_eq!(nb, vec!["a_1", "f_1", "r'_1"]);
        assert!(find_triangle(&g).is_some());
        // Without the inverters, the first triangle is cut off.
        let keep: Vec<usize> = (0..g.node_count())
            .filter(|&v| !l.names[v].iter().any(|n| n.starts_with("inv")))
            .collect();
        let sub = g.induced(&keep);
        let ids = sub.component_ids().0;
        let pos = |name: &str| keep.iter().position(|&v| v == l.get(name)).unwrap();
        assert_ne!(ids[pos("r_1")], ids[pos("s_1")]);
        assert_eq!(ids[pos("s_1")], ids[pos("t_1")]);
    }
}
