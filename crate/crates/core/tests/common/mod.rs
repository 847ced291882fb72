//! Brute-force reference implementations over all `2^n` assignments.
//! Assignment index bit `i` holds the value of variable `i + 1`.

#![allow(dead_code)]

use onesat::Formula;

/// Per clause: the bits of its variables and the bits of its negated literals.
fn masks(f: &Formula) -> Vec<(u64, u64)> {
    f.clauses()
        .iter()
        .map(|c| {
            let mut vars = 0u64;
            let mut neg = 0u64;
            for l in c.literals() {
                let d = l.to_dimacs();
                let bit = 1u64 << (d.unsigned_abs() - 1);
                vars |= bit;
                if d < 0 {
                    neg |= bit;
                }
            }
            (vars, neg)
        })
        .collect()
}

/// Number of violated clauses for every assignment index.
pub fn energies(f: &Formula) -> Vec<u32> {
    let n = f.num_vars();
    assert!(n <= 26, "brute force is limited to small n");
    let ms = masks(f);
    (0..1u64 << n)
        .map(|x| ms.iter().filter(|&&(vars, neg)| (x ^ neg) & vars == 0).count() as u32)
        .collect()
}

pub fn energy_of(f: &Formula, x: u64) -> u32 {
    masks(f).iter().filter(|&&(vars, neg)| (x ^ neg) & vars == 0).count() as u32
}

pub fn solutions(f: &Formula) -> Vec<u64> {
    energies(f)
        .iter()
        .enumerate()
        .filter(|(_, &e)| e == 0)
        .map(|(x, _)| x as u64)
        .collect()
}

pub fn count_at(energies: &[u32], k: u32) -> u128 {
    energies.iter().filter(|&&e| e == k).count() as u128
}

/// `(var, value)` pairs fixed across all solutions; `None` when unsatisfiable.
pub fn backbone(n: usize, solutions: &[u64]) -> Option<Vec<(usize, bool)>> {
    let first = *solutions.first()?;
    Some(
        (0..n)
            .filter(|&i| solutions.iter().all(|s| (s >> i & 1) == (first >> i & 1)))
            .map(|i| (i + 1, first >> i & 1 == 1))
            .collect(),
    )
}

pub fn index_of(values: &[bool]) -> u64 {
    values
        .iter()
        .enumerate()
        .fold(0, |acc, (i, &b)| acc | (u64::from(b) << i))
}

/// Whether assignment index `x` agrees with every `(var, value)` in `fixed`.
pub fn extends(x: u64, fixed: &[(usize, bool)]) -> bool {
    fixed.iter().all(|&(v, b)| (x >> (v - 1) & 1 == 1) == b)
}
