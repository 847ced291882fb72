//! DIMACS CNF reading and writing.
//!
//! Output is normalized: a `p cnf` header followed by one clause per line,
//! literals separated by single spaces and terminated by `0`. Clause and
//! literal order are preserved, so `write(parse(write(f)))` is byte exact.

use std::fmt::Write as _;

use crate::cnf::{Clause, Formula, Literal};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParseOptions {
    /// Require the header clause count to match and every clause to have exactly
    /// three literals. When off, the clause count is not checked, a SATLIB `%`
    /// trailer ends the input, and literals repeated within a clause are merged.
    pub strict: bool,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions { strict: true }
    }
}

pub fn parse_dimacs(text: &str) -> Result<Formula> {
    parse_dimacs_with(text, ParseOptions::default())
}

pub fn parse_dimacs_with(text: &str, opts: ParseOptions) -> Result<Formula> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut pending: Vec<Literal> = Vec::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') && !opts.strict {
            break;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(Error::dimacs(line_no, "duplicate header"));
            }
            header =
                Some(parse_header(line).ok_or_else(|| Error::dimacs(line_no, format!("malformed header `{line}`")))?);
            continue;
        }
        let (n, _) = header.ok_or_else(|| Error::dimacs(line_no, "clause before header"))?;
        for tok in line.split_whitespace() {
            let v: i32 = tok
                .parse()
                .map_err(|_| Error::dimacs(line_no, format!("bad literal `{tok}`")))?;
            if v == 0 {
                clauses.push(finish_clause(&mut pending, opts, line_no)?);
                continue;
            }
            let lit = Literal::from_dimacs(v).ok_or_else(|| Error::dimacs(line_no, format!("bad literal `{tok}`")))?;
            if lit.var() > n {
                return Err(Error::dimacs(
                    line_no,
                    format!("literal {v} out of range for {n} variables"),
                ));
            }
            pending.push(lit);
        }
    }

    let (n, m) = header.ok_or_else(|| Error::dimacs(last_line, "missing `p cnf` header"))?;
    if !pending.is_empty() {
        return Err(Error::dimacs(last_line, "unterminated clause"));
    }
    if opts.strict && clauses.len() != m {
        return Err(Error::dimacs(
            last_line,
            format!("header declares {m} clauses, found {}", clauses.len()),
        ));
    }
    Formula::new(n, clauses)
}

fn parse_header(line: &str) -> Option<(usize, usize)> {
    let mut it = line.split_whitespace();
    if it.next()? != "p" || it.next()? != "cnf" {
        return None;
    }
    let n = it.next()?.parse().ok()?;
    let m = it.next()?.parse().ok()?;
    it.next().is_none().then_some((n, m))
}

fn finish_clause(pending: &mut Vec<Literal>, opts: ParseOptions, line: usize) -> Result<Clause> {
    let mut lits = std::mem::take(pending);
    if !opts.strict {
        let mut seen = Vec::with_capacity(lits.len());
        lits.retain(|l| {
            let fresh = !seen.contains(l);
            seen.push(*l);
            fresh
        });
    }
    let lits: [Literal; 3] = lits
        .try_into()
        .map_err(|v: Vec<Literal>| Error::dimacs(line, format!("clause has {} literals, expected 3", v.len())))?;
    Clause::new(lits).map_err(|e| Error::dimacs(line, e.to_string()))
}

pub fn write_dimacs(f: &Formula) -> String {
    let mut out = String::with_capacity(16 + f.num_clauses() * 12);
    writeln!(out, "p cnf {} {}", f.num_vars(), f.num_clauses()).unwrap();
    for clause in f.clauses() {
        let [a, b, c] = clause.literals();
        writeln!(out, "{a} {b} {c} 0").unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_single_clause() {
        let f = parse_dimacs("p cnf 3 1\n1 -2 3 0\n").unwrap();
        assert_eq!(f.num_vars(), 3);
        assert_eq!(
            f.clauses()[0].literals(),
            &[Literal::positive(1), Literal::negative(2), Literal::positive(3)]
        );
    }

    #[test]
    fn comments_and_multiline_clauses() {
        let f = parse_dimacs("c hello\np cnf 4 2\n1 -2\n 3 0 2 3\n4 0\n").unwrap();
        assert_eq!(f.num_clauses(), 2);
        assert_eq!(write_dimacs(&f), "p cnf 4 2\n1 -2 3 0\n2 3 4 0\n");
    }

    #[test]
    fn width_two_rejected() {
        assert!(parse_dimacs("p cnf 2 1\n1 -2 0\n").is_err());
        assert!(parse_dimacs_with("p cnf 2 1\n1 -2 0\n", ParseOptions { strict: false }).is_err());
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(
            parse_dimacs("p dnf 3 1\n1 2 3 0\n"),
            Err(Error::Dimacs { line: 1, .. })
        ));
        assert!(parse_dimacs("p cnf 3\n1 2 3 0\n").is_err());
        assert!(parse_dimacs("1 2 3 0\n").is_err());
        assert!(parse_dimacs("p cnf 3 1\n1 2 4 0\n").is_err());
        assert!(parse_dimacs("p cnf 3 1\n1 2 3\n").is_err());
        assert!(parse_dimacs("p cnf 3 2\n1 2 3 0\n").is_err());
        assert!(parse_dimacs("p cnf 3 1\n1 x 3 0\n").is_err());
        assert!(parse_dimacs("").is_err());
    }

    #[test]
    fn lenient_mode() {
        let text = "p cnf 3 5\n1 1 2 3 0\n%\n0\n";
        assert!(parse_dimacs(text).is_err());
        let f = parse_dimacs_with(text, ParseOptions { strict: false }).unwrap();
        assert_eq!(f.num_clauses(), 1);
    }

    #[test]
    fn empty_formula() {
        let f = parse_dimacs("p cnf 5 0\n").unwrap();
        assert_eq!(f, Formula::empty(5));
        assert_eq!(write_dimacs(&f), "p cnf 5 0\n");
    }
}
