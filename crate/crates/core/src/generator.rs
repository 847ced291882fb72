//! Uniform random 3-SAT: each clause picks three distinct variables uniformly
//! and negates each with probability 1/2, independently of the other clauses.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cnf::{Clause, Formula, Literal};
use crate::error::{Error, Result};
use crate::rng::seeded;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GenSpec {
    pub n: usize,
    pub m: usize,
    pub seed: u64,
}

impl GenSpec {
    pub fn new(n: usize, m: usize, seed: u64) -> Result<Self> {
        if n < 3 {
            return Err(Error::input(format!("need at least 3 variables, got {n}")));
        }
        Ok(GenSpec { n, m, seed })
    }

    /// Clause count `round(alpha * n)`, ties away from zero.
    pub fn from_alpha(n: usize, alpha: f64, seed: u64) -> Result<Self> {
        GenSpec::new(n, clauses_for_density(n, alpha)?, seed)
    }
}

pub fn clauses_for_density(n: usize, alpha: f64) -> Result<usize> {
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(Error::input(format!(
            "clause density must be finite and >= 0, got {alpha}"
        )));
    }
    Ok((alpha * n as f64).round() as usize)
}

/// Number of distinct 3-clauses over `n` variables, `8 * C(n, 3)`.
pub fn distinct_clause_count(n: usize) -> u64 {
    if n < 3 {
        return 0;
    }
    let n = n as u64;
    8 * (n * (n - 1) * (n - 2) / 6)
}

/// One clause drawn uniformly from the `8 * C(n, 3)` possibilities.
/// Distinct variables come from rejection sampling.
pub fn random_clause<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Clause> {
    if n < 3 {
        return Err(Error::input(format!("need at least 3 variables, got {n}")));
    }
    let a = rng.gen_range(1..=n);
    let b = loop {
        let v = rng.gen_range(1..=n);
        if v != a {
            break v;
        }
    };
    let c = loop {
        let v = rng.gen_range(1..=n);
        if v != a && v != b {
            break v;
        }
    };
    let lits = [a, b, c].map(|v| Literal::new(v, rng.gen::<bool>()));
    Clause::new(lits)
}

pub fn generate_with<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<Formula> {
    let clauses = (0..m).map(|_| random_clause(n, rng)).collect::<Result<Vec<_>>>()?;
    Formula::new(n, clauses)
}

pub fn generate(spec: &GenSpec) -> Result<Formula> {
    if spec.n < 3 {
        return Err(Error::input(format!("need at least 3 variables, got {}", spec.n)));
    }
    generate_with(spec.n, spec.m, &mut seeded(spec.seed))
}
