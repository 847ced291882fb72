//! Filter-generated ensembles: random formulas kept only when their solution
//! count matches the requested kind.
//!
//! Attempt `i` uses the formula generated from `derive_seed(master_seed, i)`,
//! and acceptance depends only on that formula, so the accepted set is the same
//! however attempts are scheduled.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cnf::Formula;
use crate::counting::count_solutions;
use crate::dimacs::write_dimacs;
use crate::error::{Error, Result};
use crate::generator::{clauses_for_density, generate, GenSpec};
use crate::rng::derive_seed;

/// Number of attempts classified per batch when the `parallel` feature is on.
const BATCH: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnsembleKind {
    /// Exactly one satisfying assignment.
    R1,
    /// At least one satisfying assignment.
    #[serde(alias = "satisfiable")]
    Sat,
    /// Every generated formula.
    Any,
}

impl std::str::FromStr for EnsembleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "r1" => Ok(EnsembleKind::R1),
            "sat" | "satisfiable" => Ok(EnsembleKind::Sat),
            "any" => Ok(EnsembleKind::Any),
            other => Err(Error::input(format!("unknown ensemble kind `{other}`"))),
        }
    }
}

impl EnsembleKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EnsembleKind::R1 => "r1",
            EnsembleKind::Sat => "sat",
            EnsembleKind::Any => "any",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    pub n: usize,
    pub m: usize,
    pub target_count: usize,
    pub master_seed: u64,
    pub max_attempts: u64,
}

impl EnsembleSpec {
    pub fn with_alpha(
        kind: EnsembleKind,
        n: usize,
        alpha: f64,
        target_count: usize,
        master_seed: u64,
        max_attempts: u64,
    ) -> Result<Self> {
        let spec = EnsembleSpec {
            kind,
            n,
            m: clauses_for_density(n, alpha)?,
            target_count,
            master_seed,
            max_attempts,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.target_count < 1 {
            return Err(Error::input("target_count must be at least 1"));
        }
        GenSpec::new(self.n, self.m, 0).map(|_| ())
    }

    pub fn alpha(&self) -> f64 {
        self.m as f64 / self.n as f64
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InstanceRecord {
    /// Position among accepted instances.
    pub index: usize,
    /// Attempt that produced the formula; also the number of formulas generated before it.
    pub attempt: u64,
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    /// Solution count, capped at 2 for `r1` and at 1 for `sat`; not computed for `any`.
    pub r: Option<u128>,
    pub r_capped: bool,
    #[serde(skip)]
    pub formula: Formula,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AcceptanceStats {
    pub attempts: u64,
    pub accepted: u64,
    pub p_hat: f64,
    /// 95% normal-approximation half width.
    pub half_width: f64,
}

impl AcceptanceStats {
    pub fn new(attempts: u64, accepted: u64) -> Self {
        let p_hat = if attempts == 0 {
            0.0
        } else {
            accepted as f64 / attempts as f64
        };
        let half_width = if attempts == 0 {
            0.0
        } else {
            1.96 * (p_hat * (1.0 - p_hat) / attempts as f64).sqrt()
        };
        AcceptanceStats {
            attempts,
            accepted,
            p_hat,
            half_width,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    pub spec: EnsembleSpec,
    pub records: Vec<InstanceRecord>,
    pub stats: AcceptanceStats,
    /// The attempt budget ran out before `target_count` instances were accepted.
    pub shortfall: bool,
}

/// Outcome of classifying one attempt: `Some((r, capped))` when accepted.
fn classify(kind: EnsembleKind, f: &Formula) -> Option<(Option<u128>, bool)> {
    match kind {
        EnsembleKind::Any => Some((None, false)),
        EnsembleKind::Sat => {
            let r = count_solutions(f, Some(1)).expect("valid cap");
            (r.count >= 1).then_some((Some(r.count), true))
        }
        EnsembleKind::R1 => {
            let r = count_solutions(f, Some(2)).expect("valid cap");
            (r.count == 1 && !r.capped).then_some((Some(1), false))
        }
    }
}

fn attempt(spec: &EnsembleSpec, i: u64) -> Option<(u64, u64, Formula, Option<u128>, bool)> {
    let seed = derive_seed(spec.master_seed, i);
    let f = generate(&GenSpec {
        n: spec.n,
        m: spec.m,
        seed,
    })
    .expect("spec validated");
    classify(spec.kind, &f).map(|(r, capped)| (i, seed, f, r, capped))
}

#[cfg(feature = "parallel")]
fn attempt_batch(spec: &EnsembleSpec, range: std::ops::Range<u64>) -> Vec<(u64, u64, Formula, Option<u128>, bool)> {
    use rayon::prelude::*;
    range.into_par_iter().filter_map(|i| attempt(spec, i)).collect()
}

#[cfg(not(feature = "parallel"))]
fn attempt_batch(spec: &EnsembleSpec, range: std::ops::Range<u64>) -> Vec<(u64, u64, Formula, Option<u128>, bool)> {
    range.filter_map(|i| attempt(spec, i)).collect()
}

pub fn build_ensemble(spec: &EnsembleSpec) -> Result<Ensemble> {
    spec.validate()?;
    let mut records = Vec::with_capacity(spec.target_count);
    let mut attempts = 0u64;
    'outer: while attempts < spec.max_attempts {
        let need = (spec.target_count - records.len()) as u64;
        // Serial builds would stop right at the last needed acceptance; batch sizes
        // only matter for throughput since results are truncated in attempt order.
        let width = if cfg!(feature = "parallel") {
            BATCH
        } else {
            need.max(1) * 16
        };
        let end = (attempts + width).min(spec.max_attempts);
        let batch = attempt_batch(spec, attempts..end);
        attempts = end;
        for (i, seed, formula, r, r_capped) in batch {
            records.push(InstanceRecord {
                index: records.len(),
                attempt: i,
                seed,
                n: spec.n,
                m: spec.m,
                r,
                r_capped,
                formula,
            });
            if records.len() == spec.target_count {
                attempts = i + 1;
                break 'outer;
            }
        }
    }
    let shortfall = records.len() < spec.target_count;
    Ok(Ensemble {
        spec: *spec,
        stats: AcceptanceStats::new(attempts, records.len() as u64),
        records,
        shortfall,
    })
}

/// Fraction of `samples` fresh formulas with exactly one solution.
pub fn estimate_p_r1(n: usize, alpha: f64, samples: u64, seed: u64) -> Result<AcceptanceStats> {
    if samples < 1 {
        return Err(Error::input("samples must be at least 1"));
    }
    let spec = EnsembleSpec::with_alpha(EnsembleKind::R1, n, alpha, 1, seed, samples)?;
    let mut accepted = 0u64;
    let mut start = 0;
    while start < samples {
        let end = (start + BATCH).min(samples);
        accepted += attempt_batch(&spec, start..end).len() as u64;
        start = end;
    }
    Ok(AcceptanceStats::new(samples, accepted))
}

pub fn instance_file_name(index: usize) -> String {
    format!("instance_{index:06}.cnf")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub index: usize,
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<u128>,
    pub attempts_before: u64,
    pub file: String,
}

impl From<&InstanceRecord> for ManifestEntry {
    fn from(rec: &InstanceRecord) -> Self {
        ManifestEntry {
            index: rec.index,
            seed: rec.seed,
            n: rec.n,
            m: rec.m,
            r: rec.r,
            attempts_before: rec.attempt,
            file: instance_file_name(rec.index),
        }
    }
}

/// Writes one DIMACS file per record and appends to `manifest.jsonl` in `dir`.
pub fn write_store(dir: &Path, records: &[InstanceRecord]) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    let mut manifest = fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(dir.join("manifest.jsonl"))?;
    for rec in records {
        fs::write(dir.join(instance_file_name(rec.index)), write_dimacs(&rec.formula))?;
        let line = serde_json::to_string(&ManifestEntry::from(rec)).map_err(std::io::Error::other)?;
        writeln!(manifest, "{line}")?;
    }
    Ok(())
}
