//! Trail-based clause bookkeeping shared by the DPLL solver and the counters.

use crate::cnf::{Formula, Literal};

/// Per-clause true/false literal counts under a partial assignment, with an
/// undo trail. A clause is *falsified* when all three literals are false and
/// *decided* when it is either satisfied or falsified.
pub(crate) struct Tracker<'f> {
    formula: &'f Formula,
    occ_start: Vec<u32>,
    occ: Vec<(u32, bool)>,
    value: Vec<Option<bool>>,
    true_count: Vec<u8>,
    false_count: Vec<u8>,
    num_satisfied: usize,
    num_falsified: usize,
    trail: Vec<Literal>,
}

impl<'f> Tracker<'f> {
    pub fn new(formula: &'f Formula) -> Self {
        let n = formula.num_vars();
        let m = formula.num_clauses();
        let mut occ_start = vec![0u32; n + 2];
        for clause in formula.clauses() {
            for l in clause.literals() {
                occ_start[l.var() + 1] += 1;
            }
        }
        for v in 1..occ_start.len() {
            occ_start[v] += occ_start[v - 1];
        }
        let mut fill = occ_start.clone();
        let mut occ = vec![(0u32, false); 3 * m];
        for (ci, clause) in formula.clauses().iter().enumerate() {
            for l in clause.literals() {
                let slot = &mut fill[l.var()];
                occ[*slot as usize] = (ci as u32, l.is_positive());
                *slot += 1;
            }
        }
        Tracker {
            formula,
            occ_start,
            occ,
            value: vec![None; n + 1],
            true_count: vec![0; m],
            false_count: vec![0; m],
            num_satisfied: 0,
            num_falsified: 0,
            trail: Vec::with_capacity(n),
        }
    }

    #[inline]
    fn occ(&self, var: usize) -> std::ops::Range<usize> {
        self.occ_start[var] as usize..self.occ_start[var + 1] as usize
    }

    #[inline]
    pub fn formula(&self) -> &'f Formula {
        self.formula
    }

    #[inline]
    pub fn num_falsified(&self) -> usize {
        self.num_falsified
    }

    #[inline]
    pub fn all_satisfied(&self) -> bool {
        self.num_satisfied == self.formula.num_clauses()
    }

    #[inline]
    pub fn all_decided(&self) -> bool {
        self.num_satisfied + self.num_falsified == self.formula.num_clauses()
    }

    #[inline]
    pub fn value(&self, var: usize) -> Option<bool> {
        self.value[var]
    }

    #[inline]
    pub fn trail(&self) -> &[Literal] {
        &self.trail
    }

    #[inline]
    pub fn num_assigned(&self) -> usize {
        self.trail.len()
    }

    pub fn num_free(&self) -> usize {
        self.formula.num_vars() - self.trail.len()
    }

    /// Makes `lit` true. The variable must be unassigned.
    pub fn assign(&mut self, lit: Literal) {
        let var = lit.var();
        debug_assert!(self.value[var].is_none());
        let positive = lit.is_positive();
        self.value[var] = Some(positive);
        self.trail.push(lit);
        for i in self.occ(var) {
            let (c, sign) = self.occ[i];
            let c = c as usize;
            if sign == positive {
                self.true_count[c] += 1;
                if self.true_count[c] == 1 {
                    self.num_satisfied += 1;
                }
            } else {
                self.false_count[c] += 1;
                if self.false_count[c] == 3 {
                    self.num_falsified += 1;
                }
            }
        }
    }

    fn unassign_last(&mut self) {
        let lit = self.trail.pop().expect("trail is empty");
        let var = lit.var();
        let positive = lit.is_positive();
        self.value[var] = None;
        for i in self.occ(var) {
            let (c, sign) = self.occ[i];
            let c = c as usize;
            if sign == positive {
                if self.true_count[c] == 1 {
                    self.num_satisfied -= 1;
                }
                self.true_count[c] -= 1;
            } else {
                if self.false_count[c] == 3 {
                    self.num_falsified -= 1;
                }
                self.false_count[c] -= 1;
            }
        }
    }

    pub fn undo_to(&mut self, len: usize) {
        while self.trail.len() > len {
            self.unassign_last();
        }
    }

    #[inline]
    fn is_unit(&self, c: usize) -> bool {
        self.true_count[c] == 0 && self.false_count[c] == 2
    }

    fn unit_literal(&self, c: usize) -> Literal {
        *self.formula.clauses()[c]
            .literals()
            .iter()
            .find(|l| self.value[l.var()].is_none())
            .expect("unit clause has an unassigned literal")
    }

    /// First clause in formula order not satisfied by the current assignment.
    pub fn first_unsatisfied(&self) -> Option<usize> {
        (0..self.formula.num_clauses()).find(|&c| self.true_count[c] == 0)
    }

    /// First undecided clause with the fewest unassigned literals.
    pub fn shortest_undecided(&self) -> Option<usize> {
        let mut best = None;
        let mut best_free = 4;
        for c in 0..self.formula.num_clauses() {
            if self.true_count[c] == 0 && self.false_count[c] < 3 {
                let free = 3 - self.false_count[c];
                if free < best_free {
                    best = Some(c);
                    best_free = free;
                    if free == 1 {
                        break;
                    }
                }
            }
        }
        best
    }

    /// First literal of clause `c`, in stored order, whose variable is unassigned.
    pub fn first_free_literal(&self, c: usize) -> Option<Literal> {
        self.formula.clauses()[c]
            .literals()
            .iter()
            .copied()
            .find(|l| self.value[l.var()].is_none())
    }

    /// Unit propagation over the literals assigned since trail position `from`,
    /// treating every clause that is not yet falsified as mandatory. Stops once
    /// more than `budget` clauses are falsified and returns false.
    pub fn propagate_from(&mut self, from: usize, budget: usize) -> bool {
        let mut head = from;
        while head < self.trail.len() {
            if self.num_falsified > budget {
                return false;
            }
            let lit = self.trail[head];
            head += 1;
            let var = lit.var();
            for i in self.occ(var) {
                let (c, sign) = self.occ[i];
                let c = c as usize;
                // Only clauses where this assignment falsified a literal can become unit.
                if sign != lit.is_positive() && self.is_unit(c) {
                    let unit = self.unit_literal(c);
                    self.assign(unit);
                }
            }
        }
        self.num_falsified <= budget
    }

    /// Like [`Tracker::propagate_from`], starting from a full scan for unit clauses.
    pub fn propagate_all(&mut self, budget: usize) -> bool {
        if self.num_falsified > budget {
            return false;
        }
        let start = self.trail.len();
        for c in 0..self.formula.num_clauses() {
            if self.is_unit(c) {
                let unit = self.unit_literal(c);
                self.assign(unit);
            }
        }
        self.propagate_from(start, budget)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_undo() {
        let f = Formula::from_dimacs_clauses(4, &[[1, 2, 3], [-1, 2, 4], [-2, -3, -4]]).unwrap();
        let mut t = Tracker::new(&f);
        t.assign(Literal::negative(2));
        assert_eq!(t.num_satisfied, 1);
        assert_eq!(t.first_unsatisfied(), Some(0));
        t.assign(Literal::negative(3));
        t.assign(Literal::negative(1));
        assert_eq!(t.num_falsified(), 1);
        t.undo_to(1);
        assert_eq!(t.num_falsified(), 0);
        assert_eq!(t.num_assigned(), 1);
        t.undo_to(0);
        assert_eq!(t.num_satisfied, 0);
    }

    #[test]
    fn propagation_chain() {
        let f = Formula::from_dimacs_clauses(5, &[[-1, -2, 3], [-3, -1, 4], [-4, -2, 5]]).unwrap();
        let mut t = Tracker::new(&f);
        t.assign(Literal::positive(1));
        t.assign(Literal::positive(2));
        assert!(t.propagate_from(0, 0));
        assert_eq!(t.value(3), Some(true));
        assert_eq!(t.value(4), Some(true));
        assert_eq!(t.value(5), Some(true));
        assert!(t.all_satisfied());
    }

    #[test]
    fn propagation_conflict() {
        let f = Formula::from_dimacs_clauses(3, &[[-1, -2, 3], [-1, -2, -3]]).unwrap();
        let mut t = Tracker::new(&f);
        t.assign(Literal::positive(1));
        t.assign(Literal::positive(2));
        assert!(!t.propagate_all(0));
    }
}
