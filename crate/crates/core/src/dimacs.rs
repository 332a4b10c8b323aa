//! DIMACS CNF export for cross-checking clause sets with external solvers.
//!
//! Variables are numbered from 1 in canonical order. A `c var <n> <KIND> <id>`
//! comment line per variable precedes the problem line so the numbering can be
//! mapped back.

use std::fmt::Write as _;

use crate::logic::{ClauseSet, VarKind};

pub fn to_dimacs(cs: &ClauseSet) -> String {
    let vars: Vec<_> = cs.variables().into_iter().collect();
    let mut out = String::new();
    for (i, v) in vars.iter().enumerate() {
        let kind = match v.kind {
            VarKind::Req => "REQ",
            VarKind::Test => "TEST",
            VarKind::Xpctd => "XPCTD",
        };
        let _ = writeln!(out, "c var {} {} {}", i + 1, kind, v.id);
    }
    let _ = writeln!(out, "p cnf {} {}", vars.len(), cs.len());
    for c in cs {
        for l in c.literals() {
            let n = vars.binary_search(&l.var).expect("variable collected above") as i64 + 1;
            let _ = write!(out, "{} ", if l.positive { n } else { -n });
        }
        out.push_str("0\n");
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dimacs {
    pub num_vars: usize,
    pub clauses: Vec<Vec<i64>>,
}

/// Reads the numeric clause body of a DIMACS file. Comments are skipped and
/// clauses may span lines.
pub fn parse_dimacs(text: &str) -> Result<Dimacs, String> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut cur = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('p') {
            let parts: Vec<&str> = line.split_whitespace().collect();
            match parts.as_slice() {
                ["p", "cnf", v, c] => {
                    let v = v.parse().map_err(|e| format!("line {}: {e}", lineno + 1))?;
                    let c = c.parse().map_err(|e| format!("line {}: {e}", lineno + 1))?;
                    header = Some((v, c));
                }
                _ => return Err(format!("line {}: malformed problem line", lineno + 1)),
            }
            continue;
        }
        let (num_vars, _) = header.ok_or_else(|| format!("line {}: clause before header", lineno + 1))?;
        for tok in line.split_whitespace() {
            let n: i64 = tok.parse().map_err(|e| format!("line {}: {e}", lineno + 1))?;
            if n == 0 {
                clauses.push(std::mem::take(&mut cur));
            } else if n.unsigned_abs() as usize > num_vars {
                return Err(format!("line {}: variable {n} out of range", lineno + 1));
            } else {
                cur.push(n);
            }
        }
    }
    let (num_vars, num_clauses) = header.ok_or("missing problem line")?;
    if !cur.is_empty() {
        return Err("unterminated clause".into());
    }
    if clauses.len() != num_clauses {
        return Err(format!("header declares {num_clauses} clauses, found {}", clauses.len()));
    }
    Ok(Dimacs { num_vars, clauses })
}
