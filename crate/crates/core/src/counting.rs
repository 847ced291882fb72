//! Exact model counting with an optional cap, backbones, and counts of
//! assignments at a given energy (number of violated clauses).
//!
//! The counter is an exhaustive backtracker over the assignment tree. It keeps
//! going past solutions, adds `2^free` at once when every clause is decided,
//! and prunes a branch as soon as more than `k` clauses are violated. Once the
//! violation budget is used up, remaining clauses must all be satisfied, so
//! unit propagation is sound from then on.

use serde::{Deserialize, Serialize};

use crate::cnf::{Assignment, Formula, Literal, PartialAssignment};
use crate::error::{Error, Result};
use crate::search::Tracker;

/// Largest variable count for which energy counts use a full Gray-code sweep.
pub const SWEEP_MAX_VARS: usize = 24;

/// Solution-count cap used by [`backbone`] before falling back to probing.
pub const BACKBONE_ENUMERATION_CAP: u128 = 256;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountResult {
    pub count: u128,
    /// The search stopped because `count` reached the cap.
    pub capped: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solutions: Option<Vec<Assignment>>,
}

#[inline]
fn pow2(free: usize) -> u128 {
    if free >= 128 {
        u128::MAX
    } else {
        1u128 << free
    }
}

struct Counter<'f> {
    tracker: Tracker<'f>,
    k: usize,
    cap: u128,
    count: u128,
    solutions: Option<Vec<Assignment>>,
}

impl<'f> Counter<'f> {
    fn new(f: &'f Formula, k: usize, cap: Option<u128>, collect: bool) -> Self {
        Counter {
            tracker: Tracker::new(f),
            k,
            cap: cap.unwrap_or(u128::MAX),
            count: 0,
            solutions: collect.then(Vec::new),
        }
    }

    fn done(&self) -> bool {
        self.count >= self.cap
    }

    fn add_free_block(&mut self) {
        let free = self.tracker.num_free();
        if let Some(sols) = self.solutions.as_mut() {
            let n = self.tracker.formula().num_vars();
            let mut base = vec![false; n];
            let mut free_vars = Vec::with_capacity(free);
            for v in 1..=n {
                match self.tracker.value(v) {
                    Some(b) => base[v - 1] = b,
                    None => free_vars.push(v),
                }
            }
            let mut mask: u128 = 0;
            while self.count < self.cap && (free >= 128 || mask < pow2(free)) {
                let mut values = base.clone();
                for (i, &v) in free_vars.iter().enumerate() {
                    values[v - 1] = mask >> i & 1 == 1;
                }
                sols.push(Assignment::new(values));
                self.count += 1;
                mask += 1;
            }
        } else {
            self.count = self.count.saturating_add(pow2(free)).min(self.cap);
        }
    }

    /// `propagating`: the caller already ran propagation to fixpoint on the trail.
    fn search(&mut self, propagating: bool, head: usize) {
        let t = &mut self.tracker;
        if t.num_falsified() > self.k {
            return;
        }
        let mark = t.num_assigned();
        if t.num_falsified() == self.k {
            let ok = if propagating {
                t.propagate_from(head, self.k)
            } else {
                t.propagate_all(self.k)
            };
            if !ok {
                t.undo_to(mark);
                return;
            }
        }
        let propagating = t.num_falsified() == self.k;
        if t.all_decided() {
            if t.num_falsified() == self.k {
                self.add_free_block();
            }
            self.tracker.undo_to(mark);
            return;
        }
        let c = t.shortest_undecided().expect("undecided clause exists");
        let var = t
            .first_free_literal(c)
            .expect("undecided clause has a free literal")
            .var();
        for value in [true, false] {
            let t = &mut self.tracker;
            let before = t.num_assigned();
            t.assign(Literal::new(var, value));
            self.search(propagating, before);
            self.tracker.undo_to(before);
            if self.done() {
                break;
            }
        }
        self.tracker.undo_to(mark);
    }

    fn run(mut self, prefix: Option<&PartialAssignment>) -> Result<CountResult> {
        if let Some(pa) = prefix {
            let n = self.tracker.formula().num_vars();
            if pa.num_vars() != n {
                return Err(Error::input(format!(
                    "partial assignment has {} variables, formula has {n}",
                    pa.num_vars()
                )));
            }
            for lit in pa.literals() {
                self.tracker.assign(lit);
            }
        }
        if self.cap > 0 {
            self.search(false, 0);
        }
        Ok(CountResult {
            count: self.count,
            capped: self.count >= self.cap,
            solutions: self.solutions,
        })
    }
}

fn check_cap(cap: Option<u128>) -> Result<()> {
    match cap {
        Some(0) => Err(Error::input("cap must be at least 1")),
        _ => Ok(()),
    }
}

/// `min(r, cap)` where `r` is the number of satisfying assignments; `None` means no cap.
/// With `cap = 2`, a formula has exactly one solution iff the result is `count = 1, capped = false`.
pub fn count_solutions(f: &Formula, cap: Option<u128>) -> Result<CountResult> {
    check_cap(cap)?;
    Counter::new(f, 0, cap, false).run(None)
}

pub fn enumerate_solutions(f: &Formula, cap: Option<u128>) -> Result<CountResult> {
    check_cap(cap)?;
    Counter::new(f, 0, cap, true).run(None)
}

/// Does `f` have exactly one satisfying assignment.
pub fn has_unique_solution(f: &Formula) -> bool {
    let r = Counter::new(f, 0, Some(2), false)
        .run(None)
        .expect("no prefix to validate");
    r.count == 1 && !r.capped
}

pub fn is_satisfiable(f: &Formula) -> bool {
    Counter::new(f, 0, Some(1), false)
        .run(None)
        .expect("no prefix to validate")
        .count
        > 0
}

/// Number of total assignments extending `pa` that violate exactly `k` clauses.
pub fn count_energy_states_under(f: &Formula, pa: &PartialAssignment, k: usize) -> Result<u128> {
    if k > f.num_clauses() {
        return Err(Error::input(format!(
            "energy {k} exceeds clause count {}",
            f.num_clauses()
        )));
    }
    Counter::new(f, k, None, false).run(Some(pa)).map(|r| r.count)
}

/// Number of assignments violating exactly `k` clauses. `k = 0` gives the
/// solution count and `k = 1` the number of excited states.
pub fn count_energy_states(f: &Formula, k: usize) -> Result<u128> {
    if k > f.num_clauses() {
        return Err(Error::input(format!(
            "energy {k} exceeds clause count {}",
            f.num_clauses()
        )));
    }
    if f.num_vars() <= SWEEP_MAX_VARS {
        Ok(energy_histogram(f)?[k])
    } else {
        count_energy_states_under(f, &PartialAssignment::unassigned(f.num_vars()), k)
    }
}

/// Number of assignments at every energy `0..=m`, by a Gray-code sweep over
/// all `2^n` assignments. Limited to `n <= 40`.
pub fn energy_histogram(f: &Formula) -> Result<Vec<u128>> {
    let n = f.num_vars();
    if n > 40 {
        return Err(Error::input(format!("{n} variables is too many for a full sweep")));
    }
    let m = f.num_clauses();
    let occ = f.occurrences();
    let mut value = vec![false; n + 1];
    let mut true_count: Vec<u8> = f
        .clauses()
        .iter()
        .map(|c| c.literals().iter().filter(|l| !l.is_positive()).count() as u8)
        .collect();
    let mut energy = true_count.iter().filter(|&&t| t == 0).count();
    let mut hist = vec![0u128; m + 1];
    hist[energy] += 1;
    for i in 1u64..(1u64 << n) {
        let var = i.trailing_zeros() as usize + 1;
        let now = !value[var];
        value[var] = now;
        for &(c, lit) in &occ[var] {
            if lit.eval(now) {
                if true_count[c] == 0 {
                    energy -= 1;
                }
                true_count[c] += 1;
            } else {
                true_count[c] -= 1;
                if true_count[c] == 0 {
                    energy += 1;
                }
            }
        }
        hist[energy] += 1;
    }
    Ok(hist)
}

pub type Backbone = Vec<(usize, bool)>;

/// Variables that take the same value in every solution, in variable order.
pub fn backbone(f: &Formula) -> Result<Backbone> {
    let res = enumerate_solutions(f, Some(BACKBONE_ENUMERATION_CAP))?;
    if res.count == 0 {
        return Err(Error::Unsatisfiable);
    }
    if res.capped {
        backbone_by_probing(f)
    } else {
        Ok(intersect(f.num_vars(), res.solutions.as_deref().unwrap_or_default()))
    }
}

fn intersect(n: usize, solutions: &[Assignment]) -> Backbone {
    let first = &solutions[0];
    (1..=n)
        .filter(|&v| solutions.iter().all(|s| s.value(v) == first.value(v)))
        .map(|v| (v, first.value(v)))
        .collect()
}

/// Backbone from the full solution list; `None` when the formula has more than `cap` solutions.
pub fn backbone_by_enumeration(f: &Formula, cap: u128) -> Result<Option<Backbone>> {
    let res = enumerate_solutions(f, Some(cap.saturating_add(1)))?;
    if res.count == 0 {
        return Err(Error::Unsatisfiable);
    }
    if res.capped {
        return Ok(None);
    }
    Ok(Some(intersect(
        f.num_vars(),
        res.solutions.as_deref().unwrap_or_default(),
    )))
}

/// Backbone from `2n` satisfiability checks, fixing each variable to each value.
pub fn backbone_by_probing(f: &Formula) -> Result<Backbone> {
    let n = f.num_vars();
    let sat_under = |lit: Literal| -> Result<bool> {
        let pa = PartialAssignment::from_literals(n, &[lit])?;
        Ok(Counter::new(f, 0, Some(1), false).run(Some(&pa))?.count > 0)
    };
    let mut out = Vec::new();
    let mut any_sat = false;
    for v in 1..=n {
        let t = sat_under(Literal::positive(v))?;
        let fl = sat_under(Literal::negative(v))?;
        any_sat |= t || fl;
        match (t, fl) {
            (true, false) => out.push((v, true)),
            (false, true) => out.push((v, false)),
            _ => {}
        }
    }
    if !any_sat && !(n == 0 && is_satisfiable(f)) {
        return Err(Error::Unsatisfiable);
    }
    Ok(out)
}
