//! Exact stable-set and facility-location solvers for small instances.

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::coloring::color_trianglefree_fl;
use crate::error::{FlgError, Result};
use crate::graph::{parse_rational, Digraph, UGraph, Weight};
use crate::intersect::intersection_graph;

/// Largest graph `max_stable_set` accepts.
pub const STABLE_SET_GUARD: usize = 64;
/// Largest digraph `uflp_brute` accepts.
pub const UFLP_BRUTE_GUARD: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StableSet {
    pub nodes: Vec<usize>,
    #[serde(serialize_with = "ser_weight")]
    pub weight: Weight,
}

impl StableSet {
    pub fn is_stable(&self, g: &UGraph) -> bool {
        self.nodes
            .iter()
            .enumerate()
            .all(|(i, &u)| self.nodes[i + 1..].iter().all(|&v| !g.has_edge(u, v)))
    }
}

pub(crate) fn ser_weight<S: serde::Serializer>(w: &Weight, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&w.to_string())
}

struct Mwss<'a> {
    adj: Vec<u64>,
    w: &'a [Weight],
    best: Weight,
    best_set: u64,
}

impl Mwss<'_> {
    /// Upper bound: greedy clique cover, each clique contributing its
    /// heaviest member.
    fn bound(&self, mask: u64) -> Weight {
        let mut cliques: Vec<(u64, Weight)> = Vec::new();
        let mut m = mask;
        while m != 0 {
            let v = m.trailing_zeros() as usize;
            m &= m - 1;
            match cliques.iter_mut().find(|(c, _)| self.adj[v] & *c == *c) {
                Some((c, top)) => {
                    *c |= 1 << v;
                    if self.w[v] > *top {
                        *top = self.w[v];
                    }
                }
                None => cliques.push((1 << v, self.w[v])),
            }
        }
        cliques.into_iter().map(|(_, t)| t).sum()
    }

    fn search(&mut self, mut mask: u64, mut cur: Weight, mut set: u64) {
        // Forced moves: isolated nodes, and leaves at least as heavy as
        // their neighbour.
        loop {
            let mut forced = None;
            let mut m = mask;
            while m != 0 {
                let v = m.trailing_zeros() as usize;
                m &= m - 1;
                let nb = self.adj[v] & mask;
                if nb == 0 || (nb.count_ones() == 1 && self.w[v] >= self.w[nb.trailing_zeros() as usize]) {
                    forced = Some(v);
                    break;
                }
            }
            let Some(v) = forced else { break };
            cur += self.w[v];
            set |= 1 << v;
            mask &= !(self.adj[v] | 1 << v);
        }
        if mask == 0 {
            if cur > self.best {
                self.best = cur;
                self.best_set = set;
            }
            return;
        }
        if cur + self.bound(mask) <= self.best {
            return;
        }
        let mut pick = 0;
        let mut deg = 0;
        let mut m = mask;
        while m != 0 {
            let v = m.trailing_zeros() as usize;
            m &= m - 1;
            let d = (self.adj[v] & mask).count_ones();
            if d > deg {
                deg = d;
                pick = v;
            }
        }
        self.search(mask & !(self.adj[pick] | 1 << pick), cur + self.w[pick], set | 1 << pick);
        self.search(mask & !(1 << pick), cur, set);
    }
}

/// Maximum weight stable set (cardinality when unweighted), by branch and
/// bound.
pub fn max_stable_set(g: &UGraph) -> Result<StableSet> {
    let n = g.node_count();
    if n > STABLE_SET_GUARD {
        return Err(FlgError::SizeGuard(format!(
            "{n} nodes exceeds the stable set limit of {STABLE_SET_GUARD}"
        )));
    }
    let w: Vec<Weight> = (0..n).map(|v| g.weight(v)).collect();
    let mut adj = vec![0u64; n];
    for (u, v) in g.edges() {
        adj[u] |= 1 << v;
        adj[v] |= 1 << u;
    }
    let mask = (0..n).filter(|&v| w[v].is_positive()).fold(0u64, |m, v| m | 1 << v);
    let mut s = Mwss {
        adj,
        w: &w,
        best: Weight::zero(),
        best_set: 0,
    };
    s.search(mask, Weight::zero(), 0);
    let nodes: Vec<usize> = (0..n).filter(|&v| s.best_set >> v & 1 == 1).collect();
    Ok(StableSet {
        nodes,
        weight: s.best,
    })
}

/// Exhaustive stable set oracle for tiny graphs.
pub fn max_stable_set_brute(g: &UGraph) -> Result<StableSet> {
    let n = g.node_count();
    if n > 22 {
        return Err(FlgError::SizeGuard(format!("{n} nodes is too many to enumerate")));
    }
    let mut adj = vec![0u32; n];
    for (u, v) in g.edges() {
        adj[u] |= 1 << v;
        adj[v] |= 1 << u;
    }
    let mut best = (Weight::zero(), 0u32);
    for mask in 0u32..1 << n {
        if (0..n).any(|v| mask >> v & 1 == 1 && adj[v] & mask != 0) {
            continue;
        }
        let w: Weight = (0..n).filter(|&v| mask >> v & 1 == 1).map(|v| g.weight(v)).sum();
        if w > best.0 {
            best = (w, mask);
        }
    }
    Ok(StableSet {
        nodes: (0..n).filter(|&v| best.1 >> v & 1 == 1).collect(),
        weight: best.0,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UflpInstance {
    pub digraph: Digraph,
    pub open_cost: Vec<Weight>,
    pub assign_cost: Vec<Weight>,
}

impl UflpInstance {
    pub fn new(digraph: Digraph, open_cost: Vec<Weight>, assign_cost: Vec<Weight>) -> Result<Self> {
        if open_cost.len() != digraph.node_count() || assign_cost.len() != digraph.arc_count() {
            return Err(FlgError::Precondition(format!(
                "need {} opening and {} assignment costs, got {} and {}",
                digraph.node_count(),
                digraph.arc_count(),
                open_cost.len(),
                assign_cost.len()
            )));
        }
        Ok(UflpInstance {
            digraph,
            open_cost,
            assign_cost,
        })
    }

    /// Digraph format plus `f <node> <num>/<den>` and `k <arc> <num>/<den>`
    /// lines, all indices 1-based.
    pub fn parse(text: &str) -> Result<Self> {
        let mut rest = String::with_capacity(text.len());
        let mut opens = Vec::new();
        let mut assigns = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let mut fields = raw.split_whitespace();
            match fields.next() {
                Some(tag @ ("f" | "k")) => {
                    let i: usize = fields
                        .next()
                        .and_then(|s| s.parse().ok())
                        .filter(|&i| i > 0)
                        .ok_or_else(|| FlgError::parse(idx + 1, "expected a 1-based index"))?;
                    let w = parse_rational(fields.next(), idx + 1)?;
                    if tag == "f" { &mut opens } else { &mut assigns }.push((idx + 1, i - 1, w));
                    rest.push('\n');
                }
                _ => {
                    rest.push_str(raw);
                    rest.push('\n');
                }
            }
        }
        let digraph = Digraph::parse(&rest)?;
        let fill = |items: Vec<(usize, usize, Weight)>, len: usize, what: &str| -> Result<Vec<Weight>> {
            let mut out = vec![None; len];
            for (line, i, w) in items {
                let slot = out
                    .get_mut(i)
                    .ok_or_else(|| FlgError::parse(line, format!("{what} index out of range")))?;
                if slot.replace(w).is_some() {
                    return Err(FlgError::parse(line, format!("{what} given twice")));
                }
            }
            out.into_iter()
                .enumerate()
                .map(|(i, w)| w.ok_or_else(|| FlgError::parse(0, format!("{what} {} has no cost", i + 1))))
                .collect()
        };
        let open_cost = fill(opens, digraph.node_count(), "node")?;
        let assign_cost = fill(assigns, digraph.arc_count(), "arc")?;
        UflpInstance::new(digraph, open_cost, assign_cost)
    }

    pub fn to_text(&self) -> String {
        let mut s = self.digraph.to_text();
        for (v, f) in self.open_cost.iter().enumerate() {
            s.push_str(&format!("f {} {}\n", v + 1, f));
        }
        for (a, c) in self.assign_cost.iter().enumerate() {
            s.push_str(&format!("k {} {}\n", a + 1, c));
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UflpSolution {
    pub open: Vec<usize>,
    /// `(node, arc)` pairs: node served along that out-arc.
    pub assignment: Vec<(usize, usize)>,
    #[serde(serialize_with = "ser_weight")]
    pub objective: Weight,
}

impl UflpSolution {
    /// Every node is open xor assigned along one out-arc into an open node,
    /// and the objective matches the costs.
    pub fn is_valid(&self, inst: &UflpInstance) -> bool {
        let d = &inst.digraph;
        let n = d.node_count();
        let mut open = vec![false; n];
        for &v in &self.open {
            if v >= n || open[v] {
                return false;
            }
            open[v] = true;
        }
        let mut served = vec![false; n];
        let mut cost: Weight = self.open.iter().map(|&v| inst.open_cost[v]).sum();
        for &(u, a) in &self.assignment {
            if a >= d.arc_count() {
                return false;
            }
            let arc = d.arc(a);
            if arc.tail != u || open[u] || served[u] || !open[arc.head] {
                return false;
            }
            served[u] = true;
            cost += inst.assign_cost[a];
        }
        (0..n).all(|v| open[v] ^ served[v]) && cost == self.objective
    }
}

/// Weighted intersection graph (arc weight `f(tail) - c(arc)`) and the
/// offset `sum f`; the UFLP optimum is the offset minus the MWSS weight.
pub fn uflp_to_mwss(inst: &UflpInstance) -> Result<(UGraph, Weight)> {
    let g = if inst.digraph.arc_count() == 0 {
        UGraph::new(0)
    } else {
        intersection_graph(&inst.digraph)?.0
    };
    let weights = inst
        .digraph
        .arcs()
        .iter()
        .zip(&inst.assign_cost)
        .map(|(a, &c)| inst.open_cost[a.tail] - c)
        .collect();
    let g = g.with_weights(weights)?;
    Ok((g, inst.open_cost.iter().copied().sum()))
}

/// Tries every open set; ties go to the lexicographically smallest one.
pub fn uflp_brute(inst: &UflpInstance) -> Result<UflpSolution> {
    let d = &inst.digraph;
    let n = d.node_count();
    if n > UFLP_BRUTE_GUARD {
        return Err(FlgError::SizeGuard(format!(
            "{n} nodes exceeds the brute-force limit of {UFLP_BRUTE_GUARD}"
        )));
    }
    let out = d.out_arcs();
    let mut best: Option<UflpSolution> = None;
    for mask in 0u32..1 << n {
        let is_open = |v: usize| mask >> v & 1 == 1;
        let mut cost = Weight::zero();
        let mut assignment = Vec::new();
        let mut feasible = true;
        for v in 0..n {
            if is_open(v) {
                cost += inst.open_cost[v];
                continue;
            }
            let pick = out[v]
                .iter()
                .copied()
                .filter(|&a| is_open(d.arc(a).head))
                .min_by(|&a, &b| inst.assign_cost[a].cmp(&inst.assign_cost[b]).then(a.cmp(&b)));
            match pick {
                Some(a) => {
                    cost += inst.assign_cost[a];
                    assignment.push((v, a));
                }
                None => {
                    feasible = false;
                    break;
                }
            }
        }
        if !feasible {
            continue;
        }
        let open: Vec<usize> = (0..n).filter(|&v| is_open(v)).collect();
        let better = match &best {
            None => true,
            Some(b) => cost < b.objective || (cost == b.objective && open < b.open),
        };
        if better {
            best = Some(UflpSolution {
                open,
                assignment,
                objective: cost,
            });
        }
    }
    best.ok_or_else(|| FlgError::Internal("opening every node must be feasible".into()))
}

/// Exact UFLP through the stable-set formulation.
pub fn solve_uflp(inst: &UflpInstance) -> Result<UflpSolution> {
    let (g, offset) = uflp_to_mwss(inst)?;
    let s = max_stable_set(&g)?;
    let d = &inst.digraph;
    let mut assignment: Vec<(usize, usize)> = s.nodes.iter().map(|&a| (d.arc(a).tail, a)).collect();
    assignment.sort_unstable();
    let mut served = vec![false; d.node_count()];
    for &(u, _) in &assignment {
        served[u] = true;
    }
    let open = (0..d.node_count()).filter(|&v| !served[v]).collect();
    let sol = UflpSolution {
        open,
        assignment,
        objective: offset - s.weight,
    };
    debug_assert!(sol.is_valid(inst));
    Ok(sol)
}

/// Heaviest colour class of the 3-colouring, restricted to positive
/// weights: at least a third of the optimum.
pub fn approx_mwss_trianglefree(g: &UGraph) -> Result<StableSet> {
    let coloring = color_trianglefree_fl(g)?;
    let best = coloring
        .classes()
        .into_iter()
        .map(|class| {
            let nodes: Vec<usize> = class.into_iter().filter(|&v| g.weight(v).is_positive()).collect();
            let weight = nodes.iter().map(|&v| g.weight(v)).sum();
            StableSet { nodes, weight }
        })
        .max_by(|a, b| a.weight.cmp(&b.weight))
        .unwrap_or(StableSet {
            nodes: Vec::new(),
            weight: Weight::zero(),
        });
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reductions::petersen;

    fn w(n: i64) -> Weight {
        Weight::from_integer(n)
    }

    fn cycle(n: usize) -> UGraph {
        UGraph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    fn single_arc() -> UflpInstance {
        let d = Digraph::from_arcs(2, [(0, 1)]).unwrap();
        UflpInstance::new(d, vec![w(5), w(3)], vec![w(1)]).unwrap()
    }

    #[test]
    fn stable_set_examples() {
        assert_eq!(max_stable_set(&cycle(5)).unwrap().weight, w(2));
        assert_eq!(max_stable_set(&petersen()).unwrap().weight, w(4));
        let p3 = UGraph::from_edges(3, [(0, 1), (1, 2)])
            .unwrap()
            .with_weights(vec![w(5), w(1), w(5)])
            .unwrap();
        let s = max_stable_set(&p3).unwrap();
        assert_eq!((s.nodes, s.weight), (vec![0, 2], w(10)));
    }

    #[test]
    fn negative_weights_are_skipped() {
        let g = UGraph::new(2).with_weights(vec![w(-1), w(2)]).unwrap();
        assert_eq!(max_stable_set(&g).unwrap().nodes, vec![1]);
    }

    #[test]
    fn mwss_transform() {
        let (g, offset) = uflp_to_mwss(&single_arc()).unwrap();
        assert_eq!((g.node_count(), g.weight(0), offset), (1, w(4), w(8)));

        let none = UflpInstance::new(Digraph::new(2), vec![w(2), w(2)], vec![]).unwrap();
        let (g, offset) = uflp_to_mwss(&none).unwrap();
        assert_eq!((g.node_count(), offset), (0, w(4)));
        assert_eq!(solve_uflp(&none).unwrap().objective, w(4));

        let fork = Digraph::from_arcs(3, [(0, 1), (0, 2)]).unwrap();
        let inst = UflpInstance::new(fork, vec![w(1); 3], vec![w(0); 2]).unwrap();
        assert!(uflp_to_mwss(&inst).unwrap().0.has_edge(0, 1));
    }

    #[test]
    fn uflp_examples() {
        let b = uflp_brute(&single_arc()).unwrap();
        assert_eq!((b.open.clone(), b.objective), (vec![1], w(4)));
        assert!(b.is_valid(&single_arc()));
        assert_eq!(solve_uflp(&single_arc()).unwrap(), b);

        let none = UflpInstance::new(Digraph::new(2), vec![w(2), w(2)], vec![]).unwrap();
        assert_eq!(uflp_brute(&none).unwrap().objective, w(4));

        let two = Digraph::from_arcs(2, [(0, 1), (1, 0)]).unwrap();
        let inst = UflpInstance::new(two, vec![w(10), w(1)], vec![w(0), w(0)]).unwrap();
        let b = uflp_brute(&inst).unwrap();
        assert_eq!((b.open, b.assignment, b.objective), (vec![1], vec![(0, 0)], w(1)));

        let zero = UflpInstance::new(Digraph::from_arcs(3, [(0, 1), (1, 2)]).unwrap(), vec![w(0); 3], vec![w(0); 2]).unwrap();
        assert_eq!(solve_uflp(&zero).unwrap().objective, w(0));
    }

    #[test]
    fn instance_text_roundtrip() {
        let text = "p dgr 2 1\na 1 2\nf 1 5\nf 2 3/2\nk 1 -1/3\n";
        let inst = UflpInstance::parse(text).unwrap();
        assert_eq!(inst.open_cost[1], Weight::new(3, 2));
        assert_eq!(inst.assign_cost[0], Weight::new(-1, 3));
        assert_eq!(UflpInstance::parse(&inst.to_text()).unwrap(), inst);
        assert!(UflpInstance::parse("p dgr 2 1\na 1 2\nf 1 5\nk 1 1\n").is_err());
    }

    #[test]
    fn approximation_examples() {
        assert_eq!(approx_mwss_trianglefree(&cycle(6)).unwrap().weight, w(3));
        assert_eq!(approx_mwss_trianglefree(&cycle(5)).unwrap().weight, w(2));
    }
}
