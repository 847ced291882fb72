use rand::Rng;

use crate::cnf::{Assignment, Formula};

/// Incremental bookkeeping for local search: the current assignment, the
/// number of true literals per clause, the list of unsatisfied clauses, and
/// per-variable make and break counts.
///
/// `make[v]` is the number of unsatisfied clauses a flip of `v` would satisfy,
/// `break[v]` the number of satisfied clauses it would falsify, so the flip
/// changes the number of unsatisfied clauses by `break[v] - make[v]`.
#[derive(Debug, Clone)]
pub struct SearchState<'f> {
    formula: &'f Formula,
    occ: Vec<Vec<(usize, bool)>>,
    values: Vec<bool>,
    true_count: Vec<u8>,
    unsat: Vec<usize>,
    unsat_pos: Vec<usize>,
    make: Vec<i32>,
    breaks: Vec<i32>,
}

const NOT_LISTED: usize = usize::MAX;

impl<'f> SearchState<'f> {
    pub fn new(formula: &'f Formula) -> Self {
        let n = formula.num_vars();
        let m = formula.num_clauses();
        let mut occ = vec![Vec::new(); n + 1];
        for (ci, clause) in formula.clauses().iter().enumerate() {
            for &l in clause.literals() {
                occ[l.var()].push((ci, l.is_positive()));
            }
        }
        let mut state = SearchState {
            formula,
            occ,
            values: vec![false; n + 1],
            true_count: vec![0; m],
            unsat: Vec::with_capacity(m),
            unsat_pos: vec![NOT_LISTED; m],
            make: vec![0; n + 1],
            breaks: vec![0; n + 1],
        };
        state.rebuild();
        state
    }

    pub fn randomize<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        for v in 1..self.values.len() {
            self.values[v] = rng.gen();
        }
        self.rebuild();
    }

    pub fn set_assignment(&mut self, a: &Assignment) {
        assert_eq!(a.len(), self.formula.num_vars());
        self.values[1..].copy_from_slice(a.values());
        self.rebuild();
    }

    /// Recomputes all derived data from the assignment.
    fn rebuild(&mut self) {
        self.make.iter_mut().for_each(|x| *x = 0);
        self.breaks.iter_mut().for_each(|x| *x = 0);
        self.unsat.clear();
        self.unsat_pos.iter_mut().for_each(|x| *x = NOT_LISTED);
        for (ci, clause) in self.formula.clauses().iter().enumerate() {
            let lits = clause.literals();
            let t = lits.iter().filter(|l| l.eval(self.values[l.var()])).count() as u8;
            self.true_count[ci] = t;
            match t {
                0 => {
                    self.unsat_pos[ci] = self.unsat.len();
                    self.unsat.push(ci);
                    for l in lits {
                        self.make[l.var()] += 1;
                    }
                }
                1 => {
                    let crit = lits.iter().find(|l| l.eval(self.values[l.var()])).unwrap();
                    self.breaks[crit.var()] += 1;
                }
                _ => {}
            }
        }
    }

    #[inline]
    pub fn formula(&self) -> &'f Formula {
        self.formula
    }

    #[inline]
    pub fn num_unsat(&self) -> usize {
        self.unsat.len()
    }

    #[inline]
    pub fn unsat_clauses(&self) -> &[usize] {
        &self.unsat
    }

    #[inline]
    pub fn value(&self, var: usize) -> bool {
        self.values[var]
    }

    #[inline]
    pub fn make(&self, var: usize) -> i32 {
        self.make[var]
    }

    #[inline]
    pub fn break_count(&self, var: usize) -> i32 {
        self.breaks[var]
    }

    /// Decrease in the number of unsatisfied clauses if `var` were flipped.
    #[inline]
    pub fn score(&self, var: usize) -> i32 {
        self.make[var] - self.breaks[var]
    }

    pub fn is_unsat(&self, clause: usize) -> bool {
        self.true_count[clause] == 0
    }

    pub fn assignment(&self) -> Assignment {
        Assignment::new(self.values[1..].to_vec())
    }

    /// A variable other than `skip` whose literal in `clause` is true.
    fn true_var_except(&self, clause: usize, skip: usize) -> usize {
        self.formula.clauses()[clause]
            .literals()
            .iter()
            .find(|l| l.var() != skip && l.eval(self.values[l.var()]))
            .map(|l| l.var())
            .expect("clause has a true literal")
    }

    fn push_unsat(&mut self, c: usize) {
        self.unsat_pos[c] = self.unsat.len();
        self.unsat.push(c);
    }

    fn remove_unsat(&mut self, c: usize) {
        let pos = self.unsat_pos[c];
        let last = *self.unsat.last().unwrap();
        self.unsat.swap_remove(pos);
        if last != c {
            self.unsat_pos[last] = pos;
        }
        self.unsat_pos[c] = NOT_LISTED;
    }

    pub fn flip(&mut self, var: usize) {
        let now = !self.values[var];
        self.values[var] = now;
        for i in 0..self.occ[var].len() {
            let (c, positive) = self.occ[var][i];
            if positive == now {
                // literal became true
                match self.true_count[c] {
                    0 => {
                        self.remove_unsat(c);
                        for l in self.formula.clauses()[c].literals() {
                            self.make[l.var()] -= 1;
                        }
                        self.breaks[var] += 1;
                    }
                    1 => {
                        let w = self.true_var_except(c, var);
                        self.breaks[w] -= 1;
                    }
                    _ => {}
                }
                self.true_count[c] += 1;
            } else {
                self.true_count[c] -= 1;
                match self.true_count[c] {
                    0 => {
                        self.breaks[var] -= 1;
                        self.push_unsat(c);
                        for l in self.formula.clauses()[c].literals() {
                            self.make[l.var()] += 1;
                        }
                    }
                    1 => {
                        let w = self.true_var_except(c, var);
                        self.breaks[w] += 1;
                    }
                    _ => {}
                }
            }
        }
    }

    /// Compares the incremental data against a from-scratch recomputation.
    pub fn is_consistent(&self) -> bool {
        let mut fresh = self.clone();
        fresh.rebuild();
        let mut a = self.unsat.clone();
        let mut b = fresh.unsat.clone();
        a.sort_unstable();
        b.sort_unstable();
        a == b
            && fresh.make == self.make
            && fresh.breaks == self.breaks
            && fresh.true_count == self.true_count
            && self.unsat.len() == self.formula.energy(&self.assignment()).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{generate, GenSpec};
    use crate::rng::seeded;

    #[test]
    fn incremental_matches_scratch() {
        let f = generate(&GenSpec::new(15, 64, 4).unwrap()).unwrap();
        let mut rng = seeded(8);
        let mut s = SearchState::new(&f);
        s.randomize(&mut rng);
        assert!(s.is_consistent());
        for _ in 0..2000 {
            let v = rng.gen_range(1..=15);
            let before = s.num_unsat() as i32;
            let expected = before - s.score(v);
            s.flip(v);
            assert_eq!(s.num_unsat() as i32, expected);
            assert!(s.is_consistent());
        }
    }
}
