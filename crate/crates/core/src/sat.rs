//! Checks of the two gadget lemmas by exhaustive preimage search, and
//! explicit preimages of `G_F` built from satisfying assignments.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Mutex, OnceLock};

use serde::Serialize;

use crate::cnf::{CnfFormula, Literal};
use crate::error::{FlgError, Result};
use crate::gadgets::{assemble_gf, build_gad1, build_gad2, gad1_name, gad2_name, GadgetLabels, SLOTS};
use crate::graph::Digraph;
use crate::intersect::{check_certificate, ArcCertificate};
use crate::preimage::{for_each_preimage, SearchOptions};

/// Digraph from `(label, tail, head)` triples with named nodes, numbered
/// by first appearance.
pub fn labeled_digraph(arcs: &[(&str, &str, &str)]) -> Digraph {
    let mut ids: HashMap<&str, usize> = HashMap::new();
    let mut id = |v| {
        let next = ids.len();
        *ids.entry(v).or_insert(next)
    };
    let pairs: Vec<(usize, usize)> = arcs.iter().map(|&(_, t, h)| (id(t), id(h))).collect();
    let mut d = Digraph::from_arcs(ids.len(), pairs).expect("no loops in reference digraphs");
    for (i, &(label, _, _)) in arcs.iter().enumerate() {
        d.set_label(i, label);
    }
    d
}

/// Preimage of `I` in which `b` enters `g` and `h` enters `f`.
pub fn i_preimage_d1() -> Digraph {
    labeled_digraph(&[
        ("e", "y", "z"),
        ("d", "y", "x"),
        ("f", "z", "t"),
        ("c", "x", "t"),
        ("a", "t", "y"),
        ("b", "t", "u"),
        ("j", "p", "y"),
        ("i", "x", "w"),
        ("h", "q", "z"),
        ("g", "u", "v"),
    ])
}

/// Preimage of `I` in which `g` enters `b` and `f` enters `h`.
pub fn i_preimage_d2() -> Digraph {
    labeled_digraph(&[
        ("d", "y", "z"),
        ("c", "y", "x"),
        ("e", "z", "t"),
        ("b", "x", "t"),
        ("a", "t", "y"),
        ("f", "t", "u"),
        ("i", "p", "y"),
        ("g", "w", "x"),
        ("j", "z", "q"),
        ("h", "u", "v"),
    ])
}

/// A preimage of the inverter; `j` is the shared node.
pub fn inverter_preimage() -> Digraph {
    labeled_digraph(&[
        ("c", "t", "z"),
        ("d", "x", "t"),
        ("b", "z", "q"),
        ("e", "x", "y"),
        ("a", "z", "x"),
        ("f", "y", "z"),
        ("i", "t", "u"),
        ("j", "w", "x"),
        ("g", "q", "v"),
        ("h", "p", "y"),
        ("a'", "c", "b"),
        ("d'", "b", "w"),
        ("c'", "w", "c"),
        ("g'", "d", "g"),
        ("b'", "c", "d"),
        ("e'", "b", "e"),
        ("i'", "a", "b"),
        ("f'", "e", "c"),
        ("h'", "f", "e"),
    ])
}

/// Certificate sending graph node `labels.get(name(label))` to the arc
/// carrying `label`.
pub fn certificate_by_labels(
    d: &Digraph,
    labels: &GadgetLabels,
    name: impl Fn(&str) -> String,
) -> Result<ArcCertificate> {
    let n = labels.names.len();
    let mut map = vec![usize::MAX; n];
    for a in 0..d.arc_count() {
        let label = d
            .label(a)
            .ok_or_else(|| FlgError::BadCertificate(format!("arc {a} has no label")))?;
        let full = name(label);
        let v = labels
            .node(&full)
            .ok_or_else(|| FlgError::BadCertificate(format!("no node named `{full}`")))?;
        if map[v] != usize::MAX {
            return Err(FlgError::BadCertificate(format!("node `{full}` covered twice")));
        }
        map[v] = a;
    }
    if map.contains(&usize::MAX) {
        return Err(FlgError::BadCertificate("some node has no arc".into()));
    }
    Ok(ArcCertificate { map })
}

/// How a branch arc `x'` meets its triangle arc `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// `x'` enters `x`.
    In,
    /// `x` enters `x'`.
    Out,
    /// Shared tail.
    Tail,
    /// Antiparallel pair.
    Both,
}

impl Branch {
    fn of(d: &Digraph, x: usize, xp: usize) -> Branch {
        let (a, b) = (d.arc(x), d.arc(xp));
        match (b.head == a.tail, a.head == b.tail) {
            (true, true) => Branch::Both,
            (true, false) => Branch::In,
            (false, true) => Branch::Out,
            _ => {
                debug_assert_eq!(a.tail, b.tail);
                Branch::Tail
            }
        }
    }

    pub fn enters(self) -> bool {
        matches!(self, Branch::In | Branch::Both)
    }
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Branch::In => "in",
            Branch::Out => "out",
            Branch::Tail => "tail",
            Branch::Both => "both",
        })
    }
}

pub type Configuration = [Branch; 3];

pub fn config_name(c: &Configuration) -> String {
    c.iter().map(Branch::to_string).collect::<Vec<_>>().join(",")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Verified,
    Failed,
    /// The search budget ran out; nothing is claimed.
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Gad1Report {
    pub m: usize,
    pub preimages: usize,
    /// `b` enters `g` and `h` enters `f` in every copy.
    pub scheme_i: usize,
    /// `g` enters `b` and `f` enters `h` in every copy.
    pub scheme_ii: usize,
    pub mixed: usize,
    pub steps: u64,
    pub status: Status,
}

fn enters(d: &Digraph, x: usize, y: usize) -> bool {
    d.arc(x).head == d.arc(y).tail
}

/// Enumerates the preimages of the variable gadget with `m` copies and
/// sorts them by orientation scheme.
pub fn verify_gad1(m: usize, opts: &SearchOptions) -> Result<Gad1Report> {
    let (g, labels) = build_gad1(1, m)?;
    let at = |x: &str, l: usize| labels.get(&gad1_name(x, 1, l));
    let opts = SearchOptions { dedup: false, ..*opts };
    let (mut total, mut one, mut two, mut mixed) = (0, 0, 0, 0);
    let result = for_each_preimage(&g, &opts, |d| {
        total += 1;
        let i = (1..=m).all(|l| enters(d, at("b", l), at("g", l)) && enters(d, at("h", l), at("f", l)));
        let ii = (1..=m).all(|l| enters(d, at("g", l), at("b", l)) && enters(d, at("f", l), at("h", l)));
        match (i, ii) {
            (true, false) => one += 1,
            (false, true) => two += 1,
            _ => mixed += 1,
        }
        std::ops::ControlFlow::Continue(())
    });
    let (steps, status) = match result {
        Ok(stats) => {
            let ok = mixed == 0 && one > 0 && two > 0;
            (stats.steps, if ok { Status::Verified } else { Status::Failed })
        }
        Err(FlgError::BudgetExhausted(steps)) => (steps, Status::Unknown),
        Err(e) => return Err(e),
    };
    Ok(Gad1Report {
        m,
        preimages: total,
        scheme_i: one,
        scheme_ii: two,
        mixed,
        steps,
        status,
    })
}

/// Partial drawings of clause gadget preimages: the sixteen arcs outside
/// the inverter boxes, as `(label, tail, head)`. Endpoints containing a dot
/// sit on an inverter box and are not constrained.
pub struct Sketch {
    pub name: &'static str,
    pub config: Configuration,
    pub arcs: [(&'static str, &'static str, &'static str); 16],
}

const fn common(
    rr: [(&'static str, &'static str, &'static str); 2],
    ss: [(&'static str, &'static str, &'static str); 2],
) -> [(&'static str, &'static str, &'static str); 16] {
    [
        rr[0],
        rr[1],
        ("a", "x3", "x4"),
        ("f", "x3", "x11"),
        ("a'", "x4", "x5.east"),
        ("f'", "x11", "x12.west"),
        ("b'", "x6", "x5.west"),
        ("e'", "x13", "x12.east"),
        ("b", "x7", "x6"),
        ("e", "x14", "x13"),
        ss[0],
        ("t", "x14", "x15"),
        ss[1],
        ("t'", "x15", "x16"),
        ("c", "x7", "x10"),
        ("d", "x10", "x14"),
    ]
}

const R_OUT: [(&str, &str, &str); 2] = [("r'", "x2", "x1"), ("r", "x3", "x2")];
const R_IN: [(&str, &str, &str); 2] = [("r'", "x1", "x2"), ("r", "x2", "x3")];
const S_IN: [(&str, &str, &str); 2] = [("s", "x8", "x7"), ("s'", "x9", "x8")];
const S_OUT: [(&str, &str, &str); 2] = [("s", "x7", "x8"), ("s'", "x8", "x9")];

pub const SKETCHES: [Sketch; 5] = [
    Sketch {
        name: "a",
        config: [Branch::Out, Branch::In, Branch::Out],
        arcs: common(R_OUT, S_IN),
    },
    Sketch {
        name: "b",
        config: [Branch::Out, Branch::Out, Branch::Out],
        arcs: common(R_OUT, S_OUT),
    },
    Sketch {
        name: "c",
        config: [Branch::In, Branch::In, Branch::Out],
        arcs: common(R_IN, S_IN),
    },
    Sketch {
        name: "d",
        config: [Branch::In, Branch::Out, Branch::Out],
        arcs: common(R_IN, S_OUT),
    },
    Sketch {
        name: "e",
        config: [Branch::Out, Branch::In, Branch::In],
        arcs: [
            ("r'", "x2", "x1"),
            ("r", "x3", "x2"),
            ("a", "x4", "x3"),
            ("f", "x3", "x11"),
            ("a'", "x5.east", "x4"),
            ("f'", "x11", "x12.west"),
            ("b'", "x5.west", "x6"),
            ("e'", "x13", "x12.east"),
            ("b", "x6", "x10"),
            ("e", "x14", "x13"),
            ("s", "x7", "x6"),
            ("t", "x15", "x14"),
            ("s'", "x8", "x7"),
            ("t'", "x16", "x15"),
            ("c", "x10", "x7"),
            ("d", "x14", "x10"),
        ],
    },
];

impl Sketch {
    /// Whether the drawn arcs of `d` (a clause gadget preimage with the
    /// identity certificate) meet exactly as sketched.
    pub fn matches(&self, d: &Digraph, labels: &GadgetLabels, j: usize) -> bool {
        let mut coord_node: HashMap<&str, usize> = HashMap::new();
        let mut node_coord: HashMap<usize, &str> = HashMap::new();
        for &(label, tail, head) in &self.arcs {
            let arc = d.arc(labels.get(&gad2_name(label, j)));
            for (coord, node) in [(tail, arc.tail), (head, arc.head)] {
                if coord.contains('.') {
                    continue;
                }
                if *coord_node.entry(coord).or_insert(node) != node
                    || *node_coord.entry(node).or_insert(coord) != coord
                {
                    return false;
                }
            }
        }
        true
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SketchMatch {
    pub sketch: String,
    pub configuration: String,
    pub matches: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Gad2Report {
    pub preimages: usize,
    /// Count per `(r, s, t)` branch configuration.
    pub configurations: BTreeMap<String, usize>,
    /// Preimages in which all of `r'`, `s'`, `t'` enter their triangle arcs.
    pub all_entering: usize,
    pub sketches: Vec<SketchMatch>,
    /// Distinct preimages matching at least one sketch.
    pub sketch_preimages: usize,
    pub steps: u64,
    pub status: Status,
}

pub fn configuration(d: &Digraph, labels: &GadgetLabels, j: usize) -> Configuration {
    SLOTS.map(|s| {
        let x = labels.get(&gad2_name(s, j));
        let xp = labels.get(&gad2_name(&format!("{s}'"), j));
        Branch::of(d, x, xp)
    })
}

/// Enumerates every preimage of the clause gadget.
pub fn verify_gad2(opts: &SearchOptions) -> Result<Gad2Report> {
    let (g, labels) = build_gad2(1);
    let opts = SearchOptions { dedup: false, ..*opts };
    let mut total = 0;
    let mut configurations = BTreeMap::new();
    let mut all_entering = 0;
    let mut per_sketch = [0usize; 5];
    let mut matched = 0;
    let result = for_each_preimage(&g, &opts, |d| {
        total += 1;
        let c = configuration(d, &labels, 1);
        *configurations.entry(config_name(&c)).or_insert(0) += 1;
        if c.iter().all(|b| b.enters()) {
            all_entering += 1;
        }
        let mut any = false;
        for (k, fig) in SKETCHES.iter().enumerate() {
            if fig.matches(d, &labels, 1) {
                per_sketch[k] += 1;
                any = true;
            }
        }
        matched += usize::from(any);
        std::ops::ControlFlow::Continue(())
    });
    let sketches: Vec<SketchMatch> = SKETCHES
        .iter()
        .zip(per_sketch)
        .map(|(fig, matches)| SketchMatch {
            sketch: fig.name.to_owned(),
            configuration: config_name(&fig.config),
            matches,
        })
        .collect();
    let (steps, status) = match result {
        Ok(stats) => {
            let ok = all_entering == 0 && per_sketch.iter().all(|&k| k > 0) && matched >= 5;
            (stats.steps, if ok { Status::Verified } else { Status::Failed })
        }
        Err(FlgError::BudgetExhausted(steps)) => (steps, Status::Unknown),
        Err(e) => return Err(e),
    };
    Ok(Gad2Report {
        preimages: total,
        configurations,
        all_entering,
        sketches,
        sketch_preimages: matched,
        steps,
        status,
    })
}

/// Clause gadget preimages found by search, with their configurations.
pub struct Catalogue {
    pub labels: GadgetLabels,
    pub entries: Vec<(Digraph, Configuration)>,
}

pub fn gad2_catalogue() -> &'static Catalogue {
    static CATALOGUE: OnceLock<Catalogue> = OnceLock::new();
    CATALOGUE.get_or_init(|| {
        let (g, labels) = build_gad2(1);
        let opts = SearchOptions {
            dedup: false,
            ..SearchOptions::default()
        };
        let mut entries = Vec::new();
        for_each_preimage(&g, &opts, |d| {
            entries.push((d.clone(), configuration(d, &labels, 1)));
            std::ops::ControlFlow::Continue(())
        })
        .expect("clause gadget search fits the default budget");
        Catalogue { labels, entries }
    })
}

/// Union of partial preimages glued along shared arcs: every copy of an arc
/// contributes its endpoints, and equal arcs get equal endpoints.
struct Glue {
    parent: Vec<usize>,
    ends: Vec<Option<(usize, usize)>>,
}

impl Glue {
    fn new(arcs: usize) -> Self {
        Glue {
            parent: Vec::new(),
            ends: vec![None; arcs],
        }
    }

    fn find(&mut self, mut a: usize) -> usize {
        while self.parent[a] != a {
            self.parent[a] = self.parent[self.parent[a]];
            a = self.parent[a];
        }
        a
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }

    fn add(&mut self, piece: &Digraph, node_of_arc: impl Fn(usize) -> usize) {
        let base = self.parent.len();
        self.parent.extend(base..base + piece.node_count());
        for a in 0..piece.arc_count() {
            let arc = piece.arc(a);
            let (t, h) = (base + arc.tail, base + arc.head);
            let v = node_of_arc(a);
            match self.ends[v] {
                None => self.ends[v] = Some((t, h)),
                Some((t0, h0)) => {
                    self.union(t, t0);
                    self.union(h, h0);
                }
            }
        }
    }

    fn finish(mut self) -> Result<(Digraph, ArcCertificate)> {
        let ends: Vec<(usize, usize)> = self
            .ends
            .clone()
            .into_iter()
            .enumerate()
            .map(|(v, e)| e.ok_or_else(|| FlgError::Internal(format!("node {v} got no arc"))))
            .collect::<Result<_>>()?;
        let mut id = HashMap::new();
        let mut arcs = Vec::with_capacity(ends.len());
        for (t, h) in ends {
            let (t, h) = (self.find(t), self.find(h));
            let mut node = |r| {
                let next = id.len();
                *id.entry(r).or_insert(next)
            };
            arcs.push((node(t), node(h)));
        }
        let d = Digraph::from_arcs(id.len(), arcs)
            .map_err(|e| FlgError::Internal(format!("glued pieces collapse an arc: {e}")))?;
        let m = d.arc_count();
        Ok((d, ArcCertificate::identity(m)))
    }
}

/// `x^i_l` of a variable gadget letter, with the chain nodes renamed.
fn gad1_letter(letter: &str, i: usize, l: usize) -> String {
    match letter {
        "i" => gad1_name("i", i, l),
        "j" => gad1_name("i", i, l + 1),
        x => gad1_name(x, i, l),
    }
}

/// Renames a node of the catalogue's clause gadget (clause 1) to clause `j`.
fn gad2_rename(name: &str, j: usize) -> String {
    let stem = name.strip_suffix("_1").expect("catalogue names end in _1");
    gad2_name(stem, j)
}

fn glue_gf(
    f: &CnfFormula,
    assignment: &[bool],
    clause_piece: impl Fn(usize) -> Result<usize>,
) -> Result<(Digraph, ArcCertificate)> {
    let (g, labels) = assemble_gf(f)?;
    let cat = gad2_catalogue();
    let mut glue = Glue::new(g.node_count());
    let copies = f.clauses.len().max(1);
    let (d1, d2) = (i_preimage_d1(), i_preimage_d2());
    for i in 1..=f.variable_count {
        let piece = if assignment[i - 1] { &d2 } else { &d1 };
        for l in 1..=copies {
            glue.add(piece, |a| labels.get(&gad1_letter(piece.label(a).expect("labelled"), i, l)));
        }
    }
    for j in 1..=f.clauses.len() {
        let (piece, _) = &cat.entries[clause_piece(j - 1)?];
        glue.add(piece, |a| labels.get(&gad2_rename(cat.labels.primary(a), j)));
    }
    let (d, cert) = glue.finish()?;
    if !check_certificate(&g, &d, &cert)? {
        return Err(FlgError::Internal("glued witness is not a preimage".into()));
    }
    Ok((d, cert))
}

type PieceKey = ([bool; 3], [bool; 3]);

/// Catalogue entry for a clause with the given literal signs and values,
/// checked on the one-clause formula with those literals.
fn clause_piece(negated: [bool; 3], values: [bool; 3]) -> Result<usize> {
    static CHOSEN: OnceLock<Mutex<HashMap<PieceKey, usize>>> = OnceLock::new();
    let chosen = CHOSEN.get_or_init(Default::default);
    if let Some(&k) = chosen.lock().expect("not poisoned").get(&(negated, values)) {
        return Ok(k);
    }
    let want = values.map(|v| if v { Branch::Out } else { Branch::In });
    let clause: [Literal; 3] = std::array::from_fn(|s| Literal {
        var: s + 1,
        negated: negated[s],
    });
    let f = CnfFormula::new(3, vec![clause])?;
    let assignment: Vec<bool> = (0..3).map(|s| values[s] ^ negated[s]).collect();
    let cat = gad2_catalogue();
    let found = cat
        .entries
        .iter()
        .enumerate()
        .filter(|(_, (_, c))| *c == want)
        .map(|(k, _)| k)
        .find(|&k| glue_gf(&f, &assignment, |_| Ok(k)).is_ok())
        .ok_or_else(|| {
            FlgError::Internal(format!(
                "no catalogued clause preimage fits configuration {}",
                config_name(&want)
            ))
        })?;
    chosen.lock().expect("not poisoned").insert((negated, values), found);
    Ok(found)
}

/// A preimage of `G_F` read off a satisfying assignment: each variable
/// gadget copy oriented by its value, each clause gadget taken from the
/// catalogue with matching branch orientations.
pub fn witness_from_assignment(f: &CnfFormula, assignment: &[bool]) -> Result<(Digraph, ArcCertificate)> {
    f.check_distinct()?;
    if assignment.len() != f.variable_count {
        return Err(FlgError::Precondition(format!(
            "assignment has {} values for {} variables",
            assignment.len(),
            f.variable_count
        )));
    }
    if let Some(j) = f.first_unsatisfied(assignment) {
        return Err(FlgError::Unsatisfied(j + 1));
    }
    glue_gf(f, assignment, |j| {
        let clause = &f.clauses[j];
        clause_piece(clause.map(|l| l.negated), clause.map(|l| l.value(assignment)))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadgets::{build_i, build_inv};

    #[test]
    fn reference_digraphs_are_preimages() {
        let (i, labels) = build_i();
        for d in [i_preimage_d1(), i_preimage_d2()] {
            let cert = certificate_by_labels(&d, &labels, str::to_owned).unwrap();
            assert!(check_certificate(&i, &d, &cert).unwrap());
        }
        let (inv, labels) = build_inv();
        let d = inverter_preimage();
        assert_eq!((d.node_count(), d.arc_count()), (16, 19));
        let cert = certificate_by_labels(&d, &labels, str::to_owned).unwrap();
        assert!(check_certificate(&inv, &d, &cert).unwrap());
    }

    #[test]
    fn gad1_single_copy() {
        let r = verify_gad1(1, &SearchOptions::default()).unwrap();
        assert_eq!((r.preimages, r.scheme_i, r.scheme_ii, r.mixed), (2, 1, 1, 0));
        assert_eq!(r.status, Status::Verified);
    }

    #[test]
    fn one_clause_witnesses() {
        let f = CnfFormula::new(3, vec![[Literal::pos(1), Literal::pos(2), Literal::pos(3)]]).unwrap();
        assert!(witness_from_assignment(&f, &[true, true, true]).is_ok());
        assert!(matches!(
            witness_from_assignment(&f, &[false, false, false]),
            Err(FlgError::Unsatisfied(1))
        ));
    }

    #[test]
    fn shared_variable_witness() {
        let f = CnfFormula::new(
            4,
            vec![
                [Literal::pos(1), Literal::neg(2), Literal::pos(3)],
                [Literal::neg(1), Literal::pos(2), Literal::pos(4)],
            ],
        )
        .unwrap();
        for a in f.satisfying_assignments().unwrap() {
            witness_from_assignment(&f, &a).unwrap();
        }
    }
}
