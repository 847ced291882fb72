//! 3-CNF formulas, assignments and their evaluation.
//!
//! Variables are numbered `1..=n`. A [`Formula`] is strictly 3-CNF; clauses
//! narrower than three literals only appear in the residual
//! [`SimplifiedFormula`] produced while assigning literals.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A variable or its negation, stored as a signed DIMACS integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Literal(i32);

impl Literal {
    /// Panics if `var` is zero or does not fit a DIMACS integer.
    pub fn new(var: usize, positive: bool) -> Self {
        assert!(var >= 1 && var <= i32::MAX as usize, "variable index out of range");
        let v = var as i32;
        Literal(if positive { v } else { -v })
    }

    pub fn positive(var: usize) -> Self {
        Self::new(var, true)
    }

    pub fn negative(var: usize) -> Self {
        Self::new(var, false)
    }

    pub fn from_dimacs(value: i32) -> Option<Self> {
        (value != 0 && value != i32::MIN).then_some(Literal(value))
    }

    pub fn to_dimacs(self) -> i32 {
        self.0
    }

    #[inline]
    pub fn var(self) -> usize {
        self.0.unsigned_abs() as usize
    }

    #[inline]
    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    /// Truth value of the literal when its variable takes `value`.
    #[inline]
    pub fn eval(self, value: bool) -> bool {
        value == self.is_positive()
    }
}

impl std::ops::Not for Literal {
    type Output = Literal;

    fn not(self) -> Literal {
        Literal(-self.0)
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A disjunction of exactly three literals over pairwise distinct variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "[Literal; 3]", into = "[Literal; 3]")]
pub struct Clause([Literal; 3]);

impl Clause {
    pub fn new(literals: [Literal; 3]) -> Result<Self> {
        let [a, b, c] = literals;
        if a.var() == b.var() || a.var() == c.var() || b.var() == c.var() {
            return Err(Error::input(format!("clause ({a} {b} {c}) repeats a variable")));
        }
        Ok(Clause(literals))
    }

    #[inline]
    pub fn literals(&self) -> &[Literal; 3] {
        &self.0
    }

    pub fn is_satisfied_by(&self, a: &Assignment) -> bool {
        self.0.iter().any(|&l| a.satisfies(l))
    }
}

impl TryFrom<[Literal; 3]> for Clause {
    type Error = Error;

    fn try_from(literals: [Literal; 3]) -> Result<Self> {
        Clause::new(literals)
    }
}

impl From<Clause> for [Literal; 3] {
    fn from(c: Clause) -> Self {
        c.0
    }
}

/// An ordered conjunction of 3-clauses over `num_vars` variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Formula {
    num_vars: usize,
    clauses: Vec<Clause>,
}

impl Formula {
    pub fn new(num_vars: usize, clauses: Vec<Clause>) -> Result<Self> {
        for (i, clause) in clauses.iter().enumerate() {
            if let Some(l) = clause.literals().iter().find(|l| l.var() > num_vars) {
                return Err(Error::input(format!(
                    "clause {i}: literal {l} exceeds variable count {num_vars}"
                )));
            }
        }
        Ok(Formula { num_vars, clauses })
    }

    /// Builds a formula from signed DIMACS triples, mostly useful in tests.
    pub fn from_dimacs_clauses(num_vars: usize, clauses: &[[i32; 3]]) -> Result<Self> {
        let clauses = clauses
            .iter()
            .map(|t| {
                let lits = t.map(|v| Literal::from_dimacs(v).ok_or_else(|| Error::input("zero literal")));
                let [a, b, c] = lits;
                Clause::new([a?, b?, c?])
            })
            .collect::<Result<Vec<_>>>()?;
        Formula::new(num_vars, clauses)
    }

    pub fn empty(num_vars: usize) -> Self {
        Formula {
            num_vars,
            clauses: Vec::new(),
        }
    }

    #[inline]
    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    #[inline]
    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    #[inline]
    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    /// Clause density m/n.
    pub fn density(&self) -> f64 {
        if self.num_vars == 0 {
            0.0
        } else {
            self.clauses.len() as f64 / self.num_vars as f64
        }
    }

    /// For each variable (index 0 unused), the clauses it occurs in with the literal used there.
    pub fn occurrences(&self) -> Vec<Vec<(usize, Literal)>> {
        let mut occ = vec![Vec::new(); self.num_vars + 1];
        for (ci, clause) in self.clauses.iter().enumerate() {
            for &l in clause.literals() {
                occ[l.var()].push((ci, l));
            }
        }
        occ
    }

    fn check_assignment(&self, a: &Assignment) -> Result<()> {
        if a.len() != self.num_vars {
            return Err(Error::input(format!(
                "assignment has {} variables, formula has {}",
                a.len(),
                self.num_vars
            )));
        }
        Ok(())
    }

    pub fn evaluate(&self, a: &Assignment) -> Result<bool> {
        self.check_assignment(a)?;
        Ok(self.clauses.iter().all(|c| c.is_satisfied_by(a)))
    }

    /// Number of clauses left unsatisfied by `a`.
    pub fn energy(&self, a: &Assignment) -> Result<usize> {
        self.check_assignment(a)?;
        Ok(self.clauses.iter().filter(|c| !c.is_satisfied_by(a)).count())
    }

    pub fn check_literal(&self, lit: Literal) -> Result<()> {
        if lit.var() > self.num_vars {
            return Err(Error::input(format!(
                "literal {lit} exceeds variable count {}",
                self.num_vars
            )));
        }
        Ok(())
    }
}

/// Free function forms, matching the way the rest of the crate reads.
pub fn evaluate(f: &Formula, a: &Assignment) -> Result<bool> {
    f.evaluate(a)
}

pub fn energy(f: &Formula, a: &Assignment) -> Result<usize> {
    f.energy(a)
}

/// A total truth assignment of variables `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Assignment(Vec<bool>);

impl Assignment {
    pub fn new(values: Vec<bool>) -> Self {
        Assignment(values)
    }

    pub fn all_false(n: usize) -> Self {
        Assignment(vec![false; n])
    }

    /// The `index`-th assignment in binary order: bit `i` of `index` is the value of variable `i + 1`.
    pub fn from_index(n: usize, index: u64) -> Self {
        Assignment((0..n).map(|i| index >> i & 1 == 1).collect())
    }

    /// Spin vector with `S_i = +1` for true and `-1` for false.
    pub fn from_spins(spins: &[i8]) -> Result<Self> {
        spins
            .iter()
            .map(|&s| match s {
                1 => Ok(true),
                -1 => Ok(false),
                other => Err(Error::input(format!("spin must be +1 or -1, got {other}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Assignment)
    }

    pub fn spins(&self) -> Vec<i8> {
        self.0.iter().map(|&b| if b { 1 } else { -1 }).collect()
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn value(&self, var: usize) -> bool {
        self.0[var - 1]
    }

    pub fn set(&mut self, var: usize, value: bool) {
        self.0[var - 1] = value;
    }

    pub fn flip(&mut self, var: usize) {
        self.0[var - 1] ^= true;
    }

    #[inline]
    pub fn satisfies(&self, lit: Literal) -> bool {
        lit.eval(self.0[lit.var() - 1])
    }

    pub fn values(&self) -> &[bool] {
        &self.0
    }

    /// The satisfied literal of every variable, in variable order.
    pub fn literals(&self) -> impl Iterator<Item = Literal> + '_ {
        self.0.iter().enumerate().map(|(i, &b)| Literal::new(i + 1, b))
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for l in self.literals() {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Tri-state per-variable assignment.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PartialAssignment(Vec<Option<bool>>);

impl PartialAssignment {
    pub fn unassigned(n: usize) -> Self {
        PartialAssignment(vec![None; n])
    }

    pub fn from_literals(n: usize, literals: &[Literal]) -> Result<Self> {
        let mut pa = Self::unassigned(n);
        for &l in literals {
            pa.assign(l)?;
        }
        Ok(pa)
    }

    pub fn num_vars(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn get(&self, var: usize) -> Option<bool> {
        self.0[var - 1]
    }

    /// Makes `lit` true. Fails on out-of-range variables or conflicting values.
    pub fn assign(&mut self, lit: Literal) -> Result<()> {
        let slot = self
            .0
            .get_mut(lit.var().wrapping_sub(1))
            .ok_or_else(|| Error::input(format!("literal {lit} out of range")))?;
        match *slot {
            Some(v) if v != lit.is_positive() => {
                Err(Error::input(format!("literal {lit} conflicts with earlier value")))
            }
            _ => {
                *slot = Some(lit.is_positive());
                Ok(())
            }
        }
    }

    pub fn num_assigned(&self) -> usize {
        self.0.iter().filter(|v| v.is_some()).count()
    }

    pub fn is_total(&self) -> bool {
        self.0.iter().all(Option::is_some)
    }

    pub fn to_total(&self) -> Option<Assignment> {
        self.0.iter().copied().collect::<Option<Vec<_>>>().map(Assignment)
    }

    pub fn literals(&self) -> impl Iterator<Item = Literal> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.map(|b| Literal::new(i + 1, b)))
    }

    pub fn is_extended_by(&self, a: &Assignment) -> bool {
        self.0.iter().zip(a.values()).all(|(p, &v)| p.is_none_or(|p| p == v))
    }
}

impl From<&Assignment> for PartialAssignment {
    fn from(a: &Assignment) -> Self {
        PartialAssignment(a.values().iter().map(|&b| Some(b)).collect())
    }
}

/// Residual formula after assigning literals: satisfied clauses are dropped
/// and falsified literals removed, so clauses may be narrower than three.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplifiedFormula {
    num_vars: usize,
    clauses: Vec<Vec<Literal>>,
    assigned: PartialAssignment,
}

impl SimplifiedFormula {
    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Vec<Literal>] {
        &self.clauses
    }

    pub fn assigned(&self) -> &PartialAssignment {
        &self.assigned
    }

    /// True when some clause lost all of its literals.
    pub fn has_empty_clause(&self) -> bool {
        self.clauses.iter().any(Vec::is_empty)
    }

    /// True when no clauses remain.
    pub fn is_satisfied(&self) -> bool {
        self.clauses.is_empty()
    }

    /// Assigns `lit` true and simplifies.
    pub fn assign(&self, lit: Literal) -> Result<SimplifiedFormula> {
        let mut assigned = self.assigned.clone();
        assigned.assign(lit)?;
        let clauses = self
            .clauses
            .iter()
            .filter(|c| !c.contains(&lit))
            .map(|c| c.iter().copied().filter(|&l| l != !lit).collect())
            .collect();
        Ok(SimplifiedFormula {
            num_vars: self.num_vars,
            clauses,
            assigned,
        })
    }

    /// Whether a total assignment satisfies every residual clause.
    pub fn is_satisfied_by(&self, a: &Assignment) -> bool {
        self.clauses.iter().all(|c| c.iter().any(|&l| a.satisfies(l)))
    }
}

impl From<&Formula> for SimplifiedFormula {
    fn from(f: &Formula) -> Self {
        SimplifiedFormula {
            num_vars: f.num_vars,
            clauses: f.clauses.iter().map(|c| c.literals().to_vec()).collect(),
            assigned: PartialAssignment::unassigned(f.num_vars),
        }
    }
}

/// Assigns `lit` true in `f`, removing satisfied clauses and falsified literals.
pub fn simplify(f: &Formula, lit: Literal) -> Result<SimplifiedFormula> {
    f.check_literal(lit)?;
    SimplifiedFormula::from(f).assign(lit)
}
