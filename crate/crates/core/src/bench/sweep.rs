use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::fit::{compare_models, ModelComparison};
use super::stats::{aggregate, RunStats};
use crate::dpll::{self, DpllConfig};
use crate::ensemble::{build_ensemble, Ensemble, EnsembleKind, EnsembleSpec, InstanceRecord};
use crate::error::{Error, Result};
use crate::generator::clauses_for_density;
use crate::rng::{derive_seed, seeded};
use crate::sls::{self, SlsParams};

pub const DEFAULT_INSTANCES_PER_POINT: usize = 200;
pub const DEFAULT_RUNS_PER_INSTANCE: usize = 100;
pub const DEFAULT_MAX_ATTEMPTS: u64 = 1_000_000_000;

/// Points whose success rate is at or below this are censored.
pub const MIN_SUCCESS_RATE: f64 = 0.5;

/// Fits need at least this many uncensored points.
pub const MIN_FIT_POINTS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Solver {
    Dpll(DpllConfig),
    Sls(SlsParams),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleTemplate {
    pub kind: EnsembleKind,
    /// Fixed clause density; required on an `n` axis, ignored on an `alpha` axis.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
}

impl EnsembleTemplate {
    pub fn label(&self) -> String {
        match self.alpha {
            Some(a) => format!("{}@{a}", self.kind.as_str()),
            None => self.kind.as_str().to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "axis", rename_all = "lowercase")]
pub enum Axis {
    /// Clause densities at a fixed variable count.
    Alpha { n: usize, values: Vec<f64> },
    /// Variable counts, each ensemble at its own fixed density.
    N { values: Vec<usize> },
}

fn default_instances() -> usize {
    DEFAULT_INSTANCES_PER_POINT
}

fn default_runs() -> usize {
    DEFAULT_RUNS_PER_INSTANCE
}

fn default_attempts() -> u64 {
    DEFAULT_MAX_ATTEMPTS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub solver: Solver,
    pub ensembles: Vec<EnsembleTemplate>,
    #[serde(flatten)]
    pub axis: Axis,
    #[serde(default = "default_instances")]
    pub instances_per_point: usize,
    /// Independent runs per instance; used by local search only.
    #[serde(default = "default_runs")]
    pub runs_per_instance: usize,
    /// Generation budget per point.
    #[serde(default = "default_attempts")]
    pub max_attempts: u64,
    #[serde(default)]
    pub seed: u64,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.ensembles.is_empty() {
            return Err(Error::input("no ensembles configured"));
        }
        let empty = match &self.axis {
            Axis::Alpha { values, .. } => values.is_empty(),
            Axis::N { values } => values.is_empty(),
        };
        if empty {
            return Err(Error::input("sweep axis is empty"));
        }
        if self.instances_per_point < 1 {
            return Err(Error::input("instances_per_point must be at least 1"));
        }
        if self.runs_per_instance < 1 {
            return Err(Error::input("runs_per_instance must be at least 1"));
        }
        if let Axis::N { .. } = self.axis {
            if let Some(t) = self.ensembles.iter().find(|t| t.alpha.is_none()) {
                return Err(Error::input(format!(
                    "ensemble `{}` needs a fixed alpha on an n axis",
                    t.kind.as_str()
                )));
            }
        }
        if let Solver::Sls(p) = &self.solver {
            p.validate()?;
        }
        Ok(())
    }

    fn runs(&self) -> usize {
        match self.solver {
            Solver::Dpll(_) => 1,
            Solver::Sls(_) => self.runs_per_instance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub label: String,
    pub kind: EnsembleKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    pub points: Vec<RunStats>,
}

impl Curve {
    /// (x, median) of the uncensored points.
    pub fn median_points(&self) -> Vec<(f64, f64)> {
        self.points
            .iter()
            .filter(|p| !p.censored)
            .map(|p| (p.x, p.median))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveFit {
    pub label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub comparison: Option<ModelComparison>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub curves: Vec<Curve>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fits: Vec<CurveFit>,
}

/// Running-time samples of one point: one value per run, runs grouped by instance.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSamples {
    pub values: Vec<f64>,
    pub runs_per_instance: usize,
    pub successes: usize,
}

/// Solves every instance and records the work metric: DPLL calls, or local
/// search flips over `runs` independent runs per instance.
pub fn measure(solver: &Solver, instances: &[InstanceRecord], runs: usize) -> Result<PointSamples> {
    let per_instance = |rec: &InstanceRecord| -> Result<(Vec<f64>, usize)> {
        match solver {
            Solver::Dpll(cfg) => {
                let cfg = DpllConfig {
                    record_tree: false,
                    ..*cfg
                };
                let out = dpll::solve(&rec.formula, &cfg);
                Ok((vec![out.calls as f64], 1))
            }
            Solver::Sls(params) => {
                let base = derive_seed(params.seed, rec.seed);
                let mut vals = Vec::with_capacity(runs);
                let mut ok = 0;
                for r in 0..runs {
                    let run = sls::run_with(&rec.formula, params, &mut seeded(derive_seed(base, r as u64)))?;
                    ok += usize::from(run.found);
                    vals.push(run.flips as f64);
                }
                Ok((vals, ok))
            }
        }
    };
    #[cfg(feature = "parallel")]
    let results: Vec<_> = {
        use rayon::prelude::*;
        instances.par_iter().map(per_instance).collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<_> = instances.iter().map(per_instance).collect::<Result<_>>()?;

    let runs = match solver {
        Solver::Dpll(_) => 1,
        Solver::Sls(_) => runs,
    };
    let successes = results.iter().map(|r| r.1).sum();
    let values = results.into_iter().flat_map(|r| r.0).collect();
    Ok(PointSamples {
        values,
        runs_per_instance: runs,
        successes,
    })
}

/// Reduces samples to a point; `censor` marks a generation shortfall.
pub fn summarize(x: f64, solver: &Solver, samples: &PointSamples, censor: bool) -> Result<RunStats> {
    let total = samples.values.len();
    if total == 0 {
        return Ok(RunStats {
            x,
            mean: f64::NAN,
            median: f64::NAN,
            max: f64::NAN,
            success_rate: 0.0,
            samples: 0,
            censored: true,
        });
    }
    let summary = aggregate(&samples.values, samples.runs_per_instance)?;
    let success_rate = samples.successes as f64 / total as f64;
    let low_success = matches!(solver, Solver::Sls(_)) && success_rate <= MIN_SUCCESS_RATE;
    Ok(RunStats::from_summary(x, summary, success_rate, censor || low_success))
}

/// Runs sweeps and keeps every generated ensemble, so points shared between
/// sweeps (same kind, size, density, seed and count) are generated once.
#[derive(Default)]
pub struct Sweeper {
    cache: HashMap<EnsembleSpec, Arc<Ensemble>>,
}

impl Sweeper {
    pub fn new() -> Self {
        Self::default()
    }

    /// Master seed for the ensemble at one point, derived from the sweep seed,
    /// the kind, the size and the clause count (not from positions in the config).
    pub fn point_seed(seed: u64, kind: EnsembleKind, n: usize, m: usize) -> u64 {
        let k = match kind {
            EnsembleKind::R1 => 1,
            EnsembleKind::Sat => 2,
            EnsembleKind::Any => 3,
        };
        derive_seed(derive_seed(derive_seed(seed, k), n as u64), m as u64)
    }

    pub fn ensemble(&mut self, spec: EnsembleSpec) -> Result<Arc<Ensemble>> {
        if let Some(e) = self.cache.get(&spec) {
            return Ok(Arc::clone(e));
        }
        let e = Arc::new(build_ensemble(&spec)?);
        self.cache.insert(spec, Arc::clone(&e));
        Ok(e)
    }

    pub fn ensemble_at(
        &mut self,
        kind: EnsembleKind,
        n: usize,
        alpha: f64,
        count: usize,
        seed: u64,
        max_attempts: u64,
    ) -> Result<Arc<Ensemble>> {
        let m = clauses_for_density(n, alpha)?;
        let spec = EnsembleSpec {
            kind,
            n,
            m,
            target_count: count,
            master_seed: Self::point_seed(seed, kind, n, m),
            max_attempts,
        };
        spec.validate()?;
        self.ensemble(spec)
    }

    pub fn run(&mut self, cfg: &SweepConfig) -> Result<SweepResult> {
        cfg.validate()?;
        let mut curves = Vec::with_capacity(cfg.ensembles.len());
        for template in &cfg.ensembles {
            let points: Vec<(f64, usize, f64)> = match &cfg.axis {
                Axis::Alpha { n, values } => values.iter().map(|&a| (a, *n, a)).collect(),
                Axis::N { values } => {
                    let a = template.alpha.expect("validated");
                    values.iter().map(|&n| (n as f64, n, a)).collect()
                }
            };
            let mut stats = Vec::with_capacity(points.len());
            for (x, n, alpha) in points {
                let e = self.ensemble_at(
                    template.kind,
                    n,
                    alpha,
                    cfg.instances_per_point,
                    cfg.seed,
                    cfg.max_attempts,
                )?;
                let samples = measure(&cfg.solver, &e.records, cfg.runs())?;
                stats.push(summarize(x, &cfg.solver, &samples, e.shortfall)?);
            }
            curves.push(Curve {
                label: match cfg.axis {
                    Axis::Alpha { .. } => template.kind.as_str().to_string(),
                    Axis::N { .. } => template.label(),
                },
                kind: template.kind,
                alpha: template.alpha,
                points: stats,
            });
        }
        let fits = match cfg.axis {
            Axis::N { .. } => curves.iter().map(fit_curve).collect(),
            Axis::Alpha { .. } => Vec::new(),
        };
        Ok(SweepResult { curves, fits })
    }

    /// Running time against clause density at fixed `n`.
    pub fn alpha_sweep(&mut self, cfg: &SweepConfig) -> Result<SweepResult> {
        match cfg.axis {
            Axis::Alpha { .. } => self.run(cfg),
            Axis::N { .. } => Err(Error::input("alpha sweep needs an alpha axis")),
        }
    }

    /// Running time against `n` at fixed clause densities, with fits.
    pub fn scaling_run(&mut self, cfg: &SweepConfig) -> Result<SweepResult> {
        match cfg.axis {
            Axis::N { .. } => self.run(cfg),
            Axis::Alpha { .. } => Err(Error::input("scaling run needs an n axis")),
        }
    }
}

pub fn alpha_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    Sweeper::new().alpha_sweep(cfg)
}

pub fn scaling_run(cfg: &SweepConfig) -> Result<SweepResult> {
    Sweeper::new().scaling_run(cfg)
}

/// Exponential and power-law fits of the uncensored medians.
pub fn fit_curve(curve: &Curve) -> CurveFit {
    let pts = curve.median_points();
    let (comparison, error) = if pts.len() < MIN_FIT_POINTS {
        (
            None,
            Some(format!("{} uncensored points, need {MIN_FIT_POINTS}", pts.len())),
        )
    } else {
        match compare_models(&pts) {
            Ok(c) => (Some(c), None),
            Err(e) => (None, Some(e.to_string())),
        }
    };
    CurveFit {
        label: curve.label.clone(),
        comparison,
        error,
    }
}

pub fn emit_csv(points: &[RunStats]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for p in points {
        w.serialize(p).map_err(|e| Error::input(e.to_string()))?;
    }
    if points.is_empty() {
        w.write_record(["x", "mean", "median", "max", "success_rate", "samples", "censored"])
            .map_err(|e| Error::input(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::input(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::input(e.to_string()))
}

pub fn parse_csv(text: &str) -> Result<Vec<RunStats>> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect::<std::result::Result<Vec<RunStats>, _>>()
        .map_err(|e| Error::input(format!("csv: {e}")))
}

/// Whitespace-separated columns with a `#` header, one block per curve
/// separated by two blank lines (gnuplot `index` convention).
pub fn plot_data(result: &SweepResult) -> String {
    let mut out = String::new();
    for (i, curve) in result.curves.iter().enumerate() {
        if i > 0 {
            out.push_str("\n\n");
        }
        writeln!(out, "# {}", curve.label).unwrap();
        out.push_str("# x mean median max success_rate samples censored\n");
        for p in &curve.points {
            writeln!(
                out,
                "{} {} {} {} {} {} {}",
                p.x,
                p.mean,
                p.median,
                p.max,
                p.success_rate,
                p.samples,
                u8::from(p.censored)
            )
            .unwrap();
        }
    }
    out
}
