//! 3-SAT formulas in DIMACS CNF.

use std::collections::HashSet;

use serde::Serialize;

use crate::error::{FlgError, Result};

/// Variable `var` (1-based), possibly negated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Literal {
    pub var: usize,
    pub negated: bool,
}

impl Literal {
    pub fn pos(var: usize) -> Self {
        Literal { var, negated: false }
    }

    pub fn neg(var: usize) -> Self {
        Literal { var, negated: true }
    }

    pub fn value(&self, assignment: &[bool]) -> bool {
        assignment[self.var - 1] != self.negated
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CnfFormula {
    pub variable_count: usize,
    pub clauses: Vec<[Literal; 3]>,
}

impl CnfFormula {
    pub fn new(variable_count: usize, clauses: Vec<[Literal; 3]>) -> Result<Self> {
        let f = CnfFormula {
            variable_count,
            clauses,
        };
        for lit in f.clauses.iter().flatten() {
            if lit.var == 0 || lit.var > variable_count {
                return Err(FlgError::Precondition(format!(
                    "variable {} outside 1..={variable_count}",
                    lit.var
                )));
            }
        }
        Ok(f)
    }

    /// Every clause must use three different variables.
    pub fn check_distinct(&self) -> Result<()> {
        for (j, c) in self.clauses.iter().enumerate() {
            let vars: HashSet<usize> = c.iter().map(|l| l.var).collect();
            if vars.len() != 3 {
                return Err(FlgError::RepeatedVariable(j + 1));
            }
        }
        Ok(())
    }

    /// Index (0-based) of the first clause the assignment falsifies.
    pub fn first_unsatisfied(&self, assignment: &[bool]) -> Option<usize> {
        self.clauses
            .iter()
            .position(|c| !c.iter().any(|l| l.value(assignment)))
    }

    pub fn satisfied_by(&self, assignment: &[bool]) -> bool {
        assignment.len() == self.variable_count && self.first_unsatisfied(assignment).is_none()
    }

    /// All satisfying assignments, by exhaustive enumeration.
    pub fn satisfying_assignments(&self) -> Result<Vec<Vec<bool>>> {
        if self.variable_count > 20 {
            return Err(FlgError::SizeGuard(format!(
                "{} variables; exhaustive enumeration stops at 20",
                self.variable_count
            )));
        }
        let n = self.variable_count;
        Ok((0u32..1 << n)
            .map(|bits| (0..n).map(|i| bits >> i & 1 == 1).collect::<Vec<bool>>())
            .filter(|a| self.satisfied_by(a))
            .collect())
    }

    /// Parses DIMACS `p cnf <n> <m>`; every clause must have three literals.
    pub fn parse_dimacs(text: &str) -> Result<Self> {
        let mut header = None;
        let mut lits: Vec<i64> = Vec::new();
        let mut clauses = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
                continue;
            }
            if line.starts_with('p') {
                let f: Vec<&str> = line.split_whitespace().collect();
                if f.len() != 4 || f[1] != "cnf" {
                    return Err(FlgError::parse(line_no, "expected `p cnf <vars> <clauses>`"));
                }
                let n: usize = f[2].parse().map_err(|_| FlgError::parse(line_no, "bad count"))?;
                let m: usize = f[3].parse().map_err(|_| FlgError::parse(line_no, "bad count"))?;
                header = Some((n, m));
                continue;
            }
            if header.is_none() {
                return Err(FlgError::parse(line_no, "clause before header"));
            }
            for tok in line.split_whitespace() {
                let x: i64 = tok
                    .parse()
                    .map_err(|_| FlgError::parse(line_no, format!("bad literal `{tok}`")))?;
                if x == 0 {
                    if lits.len() != 3 {
                        return Err(FlgError::parse(
                            line_no,
                            format!("clause has {} literals, expected 3", lits.len()),
                        ));
                    }
                    let to_lit = |x: i64| Literal {
                        var: x.unsigned_abs() as usize,
                        negated: x < 0,
                    };
                    clauses.push([to_lit(lits[0]), to_lit(lits[1]), to_lit(lits[2])]);
                    lits.clear();
                } else {
                    lits.push(x);
                }
            }
        }
        let (n, m) = header.ok_or_else(|| FlgError::parse(0, "missing `p cnf` header"))?;
        if !lits.is_empty() {
            return Err(FlgError::parse(0, "last clause is not terminated by 0"));
        }
        if clauses.len() != m {
            return Err(FlgError::parse(
                0,
                format!("header announces {m} clauses, found {}", clauses.len()),
            ));
        }
        CnfFormula::new(n, clauses)
    }

    pub fn to_dimacs(&self) -> String {
        let mut s = format!("p cnf {} {}\n", self.variable_count, self.clauses.len());
        for c in &self.clauses {
            for l in c {
                let v = l.var as i64;
                s.push_str(&format!("{} ", if l.negated { -v } else { v }));
            }
            s.push_str("0\n");
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimacs_round_trip() {
        let f = CnfFormula::parse_dimacs("c x\np cnf 3 2\n1 -2 3 0\n-1 2 3 0\n").unwrap();
        assert_eq!(f.clauses[0][1], Literal::neg(2));
        assert_eq!(CnfFormula::parse_dimacs(&f.to_dimacs()).unwrap(), f);
    }

    #[test]
    fn rejects_short_clauses_and_repeats() {
        assert!(CnfFormula::parse_dimacs("p cnf 3 1\n1 2 0\n").is_err());
        let f = CnfFormula::parse_dimacs("p cnf 3 1\n1 -1 2 0\n").unwrap();
        assert_eq!(f.check_distinct(), Err(FlgError::RepeatedVariable(1)));
    }

    #[test]
    fn enumerates_models() {
        let f = CnfFormula::new(3, vec![[Literal::pos(1), Literal::pos(2), Literal::pos(3)]]).unwrap();
        assert_eq!(f.satisfying_assignments().unwrap().len(), 7);
        assert_eq!(f.first_unsatisfied(&[false, false, false]), Some(0));
    }
}
