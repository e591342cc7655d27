//! 3-CNF formulas: DIMACS input and brute-force satisfiability value.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Largest variable count accepted by the brute-force routines.
pub const BRUTE_FORCE_VARS: usize = 24;

/// A literal is a nonzero signed 1-based variable index.
pub type Literal = i32;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CnfFormula {
    pub vars: usize,
    pub clauses: Vec<[Literal; 3]>,
}

impl CnfFormula {
    pub fn new(vars: usize, clauses: Vec<[Literal; 3]>) -> Result<Self> {
        if clauses.is_empty() {
            return Err(Error::Malformed("formula has no clauses".into()));
        }
        for c in &clauses {
            for &l in c {
                if l == 0 || l.unsigned_abs() as usize > vars {
                    return Err(Error::Malformed(format!("literal {l} out of range")));
                }
            }
        }
        Ok(CnfFormula { vars, clauses })
    }

    pub fn clause_count(&self) -> usize {
        self.clauses.len()
    }

    /// Index of the literal's ξ coordinate: `2(k-1)` for `x_k`, `2(k-1)+1` for `¬x_k`.
    pub fn literal_slot(l: Literal) -> usize {
        let k = l.unsigned_abs() as usize - 1;
        2 * k + usize::from(l < 0)
    }

    pub fn literal_true(l: Literal, assignment: &[bool]) -> bool {
        assignment[l.unsigned_abs() as usize - 1] == (l > 0)
    }

    pub fn satisfied_count(&self, assignment: &[bool]) -> usize {
        self.clauses
            .iter()
            .filter(|c| c.iter().any(|&l| Self::literal_true(l, assignment)))
            .count()
    }

    pub fn satisfies(&self, assignment: &[bool]) -> bool {
        self.satisfied_count(assignment) == self.clauses.len()
    }

    fn check_cap(&self) -> Result<()> {
        if self.vars > BRUTE_FORCE_VARS {
            return Err(Error::Budget(format!(
                "{} variables exceed the brute-force cap of {BRUTE_FORCE_VARS}",
                self.vars
            )));
        }
        Ok(())
    }

    /// Maximum fraction of simultaneously satisfiable clauses.
    pub fn val(&self) -> Result<Rational> {
        self.check_cap()?;
        let best = assignments(self.vars).map(|a| self.satisfied_count(&a)).max().unwrap_or(0);
        Ok(Rational::new(best as i64, self.clauses.len() as i64))
    }

    /// The first satisfying assignment in counting order, if any.
    pub fn satisfying_assignment(&self) -> Result<Option<Vec<bool>>> {
        self.check_cap()?;
        Ok(assignments(self.vars).find(|a| self.satisfies(a)))
    }
}

/// All assignments in counting order: bit `k` of the counter is `x_{k+1}`.
pub fn assignments(vars: usize) -> impl Iterator<Item = Vec<bool>> {
    (0u64..1u64 << vars).map(move |bits| (0..vars).map(|k| bits >> k & 1 == 1).collect())
}

pub fn compute_val(phi: &CnfFormula) -> Result<Rational> {
    phi.val()
}

impl fmt::Display for CnfFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "p cnf {} {}", self.vars, self.clauses.len())?;
        for c in &self.clauses {
            writeln!(f, "{} {} {} 0", c[0], c[1], c[2])?;
        }
        Ok(())
    }
}

/// Parses DIMACS CNF. Clauses may span lines; each must have exactly three
/// literals.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current: Vec<Literal> = Vec::new();
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(Error::Parse { line: line_no, msg: "duplicate problem line".into() });
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 4 || parts[1] != "cnf" {
                return Err(Error::Parse { line: line_no, msg: "expected `p cnf <vars> <clauses>`".into() });
            }
            let num = |s: &str| {
                s.parse::<usize>().map_err(|_| Error::Parse { line: line_no, msg: format!("bad count `{s}`") })
            };
            header = Some((num(parts[2])?, num(parts[3])?));
            continue;
        }
        let Some((vars, _)) = header else {
            return Err(Error::Parse { line: line_no, msg: "clause before problem line".into() });
        };
        for tok in line.split_whitespace() {
            let l: Literal = tok
                .parse()
                .map_err(|_| Error::Parse { line: line_no, msg: format!("bad literal `{tok}`") })?;
            if l == 0 {
                let lits: [Literal; 3] = current.as_slice().try_into().map_err(|_| Error::Parse {
                    line: line_no,
                    msg: format!("clause has {} literals, expected 3", current.len()),
                })?;
                clauses.push(lits);
                current.clear();
            } else if l.unsigned_abs() as usize > vars {
                return Err(Error::Parse { line: line_no, msg: format!("literal {l} exceeds {vars} variables") });
            } else {
                current.push(l);
            }
        }
    }
    let Some((vars, count)) = header else {
        return Err(Error::Parse { line: last_line.max(1), msg: "missing problem line".into() });
    };
    if !current.is_empty() {
        return Err(Error::Parse { line: last_line, msg: "unterminated clause".into() });
    }
    if clauses.len() != count {
        return Err(Error::Parse {
            line: last_line,
            msg: format!("header declares {count} clauses, found {}", clauses.len()),
        });
    }
    CnfFormula::new(vars, clauses).map_err(|e| Error::Parse { line: last_line, msg: e.to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn parses_single_clause() {
        let f = parse_dimacs("c hello\np cnf 3 1\n1 2 3 0\n").unwrap();
        assert_eq!(f.clauses, vec![[1, 2, 3]]);
        assert_eq!(f.val().unwrap(), q(1, 1));
    }

    #[test]
    fn contradictory_pair_has_half() {
        let f = parse_dimacs("p cnf 1 2\n1 1 1 0\n-1 -1 -1 0\n").unwrap();
        assert_eq!(f.val().unwrap(), q(1, 2));
        assert_eq!(f.satisfying_assignment().unwrap(), None);
    }

    #[test]
    fn arity_error_has_line() {
        let err = parse_dimacs("p cnf 2 1\n1 2 0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn clause_across_lines() {
        let f = parse_dimacs("p cnf 3 1\n1 -2\n3 0\n").unwrap();
        assert_eq!(f.clauses, vec![[1, -2, 3]]);
    }

    #[test]
    fn display_round_trip() {
        let f = CnfFormula::new(2, vec![[1, -2, 2], [-1, -1, 2]]).unwrap();
        assert_eq!(parse_dimacs(&f.to_string()).unwrap(), f);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_dimacs("1 2 3 0\n").is_err());
        assert!(parse_dimacs("p cnf 2 1\n1 2 3 0\n").is_err());
        assert!(parse_dimacs("p cnf 3 2\n1 2 3 0\n").is_err());
        assert!(parse_dimacs("p cnf 3 1\n1 2 x 0\n").is_err());
    }
}
