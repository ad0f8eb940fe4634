//! Canonical forms and exhaustive generation of small graphs up to
//! isomorphism.
//!
//! Canonical labelling is individualization-refinement without automorphism
//! pruning, which is plenty below a dozen nodes.

use std::collections::HashSet;

use crate::error::{FlgError, Result};
use crate::graph::UGraph;

/// Largest node count handled here; edge sets are packed in a `u64`.
pub const MAX_NODES: usize = 11;

fn pair_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = (i.min(j), i.max(j));
    // Pairs (0,1), (0,2), ..., (0,n-1), (1,2), ...
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

/// Packed edge set of a graph with at most [`MAX_NODES`] nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SmallGraph {
    pub n: usize,
    pub bits: u64,
}

impl SmallGraph {
    pub fn from_ugraph(g: &UGraph) -> Result<Self> {
        let n = g.node_count();
        if n > MAX_NODES {
            return Err(FlgError::SizeGuard(format!("{n} nodes exceeds {MAX_NODES}")));
        }
        let bits = g.edges().iter().fold(0u64, |b, &(u, v)| b | 1 << pair_index(n, u, v));
        Ok(SmallGraph { n, bits })
    }

    pub fn to_ugraph(self) -> UGraph {
        UGraph::from_edges(self.n, self.edges()).expect("packed graph is simple")
    }

    pub fn has_edge(self, u: usize, v: usize) -> bool {
        u != v && self.bits >> pair_index(self.n, u, v) & 1 == 1
    }

    pub fn edges(self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in i + 1..self.n {
                if self.has_edge(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn edge_count(self) -> usize {
        self.bits.count_ones() as usize
    }

    fn rows(self) -> Vec<u16> {
        let mut rows = vec![0u16; self.n];
        for (u, v) in self.edges() {
            rows[u] |= 1 << v;
            rows[v] |= 1 << u;
        }
        rows
    }

    fn relabeled(self, label: &[usize]) -> u64 {
        self.edges()
            .iter()
            .fold(0u64, |b, &(u, v)| b | 1 << pair_index(self.n, label[u], label[v]))
    }

    /// Representative of the isomorphism class: the relabelling with the
    /// largest packed edge set among the leaves of the refinement tree.
    pub fn canonical(self) -> SmallGraph {
        let rows = self.rows();
        let mut best = None;
        let cells = vec![(0..self.n).collect::<Vec<_>>()];
        search(self, &rows, cells, &mut best);
        SmallGraph {
            n: self.n,
            bits: best.unwrap_or(0),
        }
    }

    pub fn is_triangle_free(self) -> bool {
        let rows = self.rows();
        self.edges().iter().all(|&(u, v)| rows[u] & rows[v] == 0)
    }
}

/// Splits cells by neighbour counts into every cell until stable.
fn refine(rows: &[u16], mut cells: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    loop {
        let masks: Vec<u16> = cells.iter().map(|c| c.iter().fold(0, |m, &v| m | 1 << v)).collect();
        let mut next = Vec::with_capacity(cells.len());
        for cell in &cells {
            if cell.len() == 1 {
                next.push(cell.clone());
                continue;
            }
            let mut keyed: Vec<(Vec<u32>, usize)> = cell
                .iter()
                .map(|&v| (masks.iter().map(|m| (rows[v] & m).count_ones()).collect(), v))
                .collect();
            keyed.sort();
            let mut start = 0;
            for i in 1..=keyed.len() {
                if i == keyed.len() || keyed[i].0 != keyed[start].0 {
                    next.push(keyed[start..i].iter().map(|&(_, v)| v).collect());
                    start = i;
                }
            }
        }
        if next.len() == cells.len() {
            return next;
        }
        cells = next;
    }
}

fn search(g: SmallGraph, rows: &[u16], cells: Vec<Vec<usize>>, best: &mut Option<u64>) {
    let cells = refine(rows, cells);
    let Some(k) = cells.iter().position(|c| c.len() > 1) else {
        let mut label = vec![0; g.n];
        for (i, c) in cells.iter().enumerate() {
            label[c[0]] = i;
        }
        let key = g.relabeled(&label);
        if best.is_none_or(|b| key > b) {
            *best = Some(key);
        }
        return;
    };
    for &v in &cells[k] {
        let mut next = cells.clone();
        let rest: Vec<usize> = cells[k].iter().copied().filter(|&u| u != v).collect();
        next.splice(k..=k, [vec![v], rest]);
        search(g, rows, next, best);
    }
}

/// All graphs on exactly `n` nodes with at most `max_edges` edges, one per
/// isomorphism class, optionally only the triangle-free ones. Classes are
/// grown one edge at a time.
pub fn graphs(n: usize, max_edges: usize, triangle_free: bool) -> Result<Vec<SmallGraph>> {
    if n > MAX_NODES {
        return Err(FlgError::SizeGuard(format!("{n} nodes exceeds {MAX_NODES}")));
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let mut layer = vec![SmallGraph { n, bits: 0 }];
    let mut all = layer.clone();
    for _ in 0..max_edges.min(pairs.len()) {
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for g in &layer {
            for &(u, v) in &pairs {
                if g.has_edge(u, v) {
                    continue;
                }
                let h = SmallGraph {
                    n,
                    bits: g.bits | 1 << pair_index(n, u, v),
                };
                if triangle_free && !h.is_triangle_free() {
                    continue;
                }
                let c = h.canonical();
                if seen.insert(c) {
                    next.push(c);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        all.extend(&next);
        layer = next;
    }
    Ok(all)
}
