//! Stochastic local search: GWSAT, Walksat (SKC) and Adaptive Novelty+.
//!
//! Each run starts from a uniformly random assignment and flips one variable
//! per step until every clause is satisfied or `max_flips` is reached, then
//! restarts, up to `tries` times. The running-time metric is the total number
//! of flips.

mod state;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cnf::{Assignment, Formula};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, seeded};

pub use state::SearchState;

/// In debug builds the incremental state is checked against a recomputation this often.
pub const CONSISTENCY_CHECK_INTERVAL: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Gwsat,
    Walksat,
    #[serde(rename = "anovelty+", alias = "adaptive-novelty-plus")]
    AdaptiveNoveltyPlus,
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gwsat" => Ok(Algorithm::Gwsat),
            "walksat" => Ok(Algorithm::Walksat),
            "anovelty+" | "adaptive-novelty-plus" => Ok(Algorithm::AdaptiveNoveltyPlus),
            other => Err(Error::input(format!("unknown local search algorithm `{other}`"))),
        }
    }
}

/// Noise adaptation constants for Adaptive Novelty+.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AdaptiveNoise {
    /// Stagnation window as a fraction of the clause count.
    pub theta: f64,
    /// Fraction of the remaining headroom added to the noise on stagnation.
    pub increase: f64,
    /// Fraction of the noise removed on improvement.
    pub decrease: f64,
}

impl Default for AdaptiveNoise {
    fn default() -> Self {
        AdaptiveNoise {
            theta: 1.0 / 6.0,
            increase: 0.2,
            decrease: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SlsParams {
    pub algorithm: Algorithm,
    /// Random-walk probability `p` of GWSAT and Walksat.
    pub walk_probability: f64,
    /// Random-walk probability of Novelty+.
    pub wp: f64,
    pub max_flips: u64,
    pub tries: u32,
    pub seed: u64,
    pub noise: AdaptiveNoise,
}

impl Default for SlsParams {
    fn default() -> Self {
        SlsParams {
            algorithm: Algorithm::Gwsat,
            walk_probability: 0.5,
            wp: 0.01,
            max_flips: 1_000_000,
            tries: 1,
            seed: 0,
            noise: AdaptiveNoise::default(),
        }
    }
}

impl SlsParams {
    pub fn new(algorithm: Algorithm) -> Self {
        SlsParams {
            algorithm,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, x: f64| {
            if (0.0..=1.0).contains(&x) {
                Ok(())
            } else {
                Err(Error::input(format!("{name} must lie in [0, 1], got {x}")))
            }
        };
        unit("walk probability", self.walk_probability)?;
        unit("wp", self.wp)?;
        unit("noise increase", self.noise.increase)?;
        unit("noise decrease", self.noise.decrease)?;
        if !(self.noise.theta.is_finite() && self.noise.theta >= 0.0) {
            return Err(Error::input("theta must be finite and non-negative"));
        }
        if self.max_flips < 1 {
            return Err(Error::input("max_flips must be at least 1"));
        }
        if self.tries < 1 {
            return Err(Error::input("tries must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlsRun {
    pub found: bool,
    /// Flips until the solution, or `max_flips * tries` when none was found.
    pub flips: u64,
    /// Index of the try that ended the run.
    #[serde(rename = "try")]
    pub try_index: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub assignment: Option<Assignment>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    /// Random variable of a random unsatisfied clause.
    Walk,
    /// GSAT step: a variable with the best score over the whole formula.
    Greedy,
    /// Walksat: a variable whose flip breaks no clause.
    Freebie,
    /// Walksat: a variable with the fewest breaks.
    MinBreak,
    /// Novelty: best variable of the clause.
    NoveltyBest,
    /// Novelty: second-best variable, taken because the best was flipped most recently.
    NoveltySecond,
}

/// What the search is about to do, shown to an observer before the flip.
pub struct Step<'a, 'f> {
    pub flip: u64,
    pub var: usize,
    pub kind: StepKind,
    pub clause: Option<usize>,
    /// Novelty noise in effect, for Adaptive Novelty+.
    pub noise: Option<f64>,
    pub state: &'a SearchState<'f>,
}

fn pick_unsat_clause<R: Rng + ?Sized>(state: &SearchState<'_>, rng: &mut R) -> usize {
    let unsat = state.unsat_clauses();
    unsat[rng.gen_range(0..unsat.len())]
}

fn random_var_of<R: Rng + ?Sized>(state: &SearchState<'_>, clause: usize, rng: &mut R) -> usize {
    state.formula().clauses()[clause].literals()[rng.gen_range(0..3)].var()
}

/// Picks uniformly among the items minimizing `key`.
fn argmin_uniform<R: Rng + ?Sized, K: Ord + Copy>(
    items: impl Iterator<Item = usize>,
    key: impl Fn(usize) -> K,
    rng: &mut R,
) -> usize {
    let mut best: Option<(K, usize)> = None;
    let mut ties = 0u32;
    for v in items {
        let k = key(v);
        match best {
            Some((bk, _)) if k > bk => {}
            Some((bk, _)) if k == bk => {
                ties += 1;
                if rng.gen_range(0..ties) == 0 {
                    best = Some((k, v));
                }
            }
            _ => {
                best = Some((k, v));
                ties = 1;
            }
        }
    }
    best.expect("nonempty candidate set").1
}

/// Per-try Adaptive Novelty+ bookkeeping.
struct NoveltyState {
    noise: f64,
    last_flip: Vec<Option<u64>>,
    adapt_step: u64,
    adapt_energy: usize,
}

impl NoveltyState {
    fn new(n: usize, energy: usize) -> Self {
        NoveltyState {
            noise: 0.0,
            last_flip: vec![None; n + 1],
            adapt_step: 0,
            adapt_energy: energy,
        }
    }

    /// Called after every flip with the new energy.
    fn adapt(&mut self, step: u64, energy: usize, m: usize, cfg: &AdaptiveNoise) {
        if energy < self.adapt_energy {
            self.noise -= self.noise * cfg.decrease;
            self.adapt_step = step;
            self.adapt_energy = energy;
        } else if (step - self.adapt_step) as f64 > cfg.theta * m as f64 {
            self.noise += (1.0 - self.noise) * cfg.increase;
            self.adapt_step = step;
            self.adapt_energy = energy;
        }
    }
}

fn novelty_pick<R: Rng + ?Sized>(
    state: &SearchState<'_>,
    clause: usize,
    nov: &NoveltyState,
    rng: &mut R,
) -> (usize, StepKind) {
    let lits = state.formula().clauses()[clause].literals();
    // Rank by score, descending; ties go to the variable flipped longest ago.
    let mut vars: Vec<usize> = lits.iter().map(|l| l.var()).collect();
    vars.sort_by(|&a, &b| {
        state
            .score(b)
            .cmp(&state.score(a))
            .then(nov.last_flip[a].cmp(&nov.last_flip[b]))
    });
    let youngest = vars
        .iter()
        .copied()
        .filter(|&v| nov.last_flip[v].is_some())
        .max_by_key(|&v| nov.last_flip[v]);
    let (best, second) = (vars[0], vars[1]);
    if Some(best) == youngest && rng.gen_bool(nov.noise) {
        (second, StepKind::NoveltySecond)
    } else {
        (best, StepKind::NoveltyBest)
    }
}

/// Runs the configured algorithm with the given random stream, reporting every
/// step to `observe` before the flip is made.
pub fn run_observed<R, O>(f: &Formula, params: &SlsParams, rng: &mut R, mut observe: O) -> Result<SlsRun>
where
    R: Rng + ?Sized,
    O: FnMut(&Step<'_, '_>),
{
    params.validate()?;
    let n = f.num_vars();
    let m = f.num_clauses();
    let mut state = SearchState::new(f);
    let mut flips = 0u64;
    for t in 0..params.tries {
        state.randomize(rng);
        let mut nov = NoveltyState::new(n, state.num_unsat());
        let mut step = 0u64;
        loop {
            if state.num_unsat() == 0 {
                return Ok(SlsRun {
                    found: true,
                    flips,
                    try_index: t,
                    assignment: Some(state.assignment()),
                });
            }
            if step == params.max_flips {
                break;
            }
            let (var, kind, clause) = match params.algorithm {
                Algorithm::Gwsat => {
                    if rng.gen_bool(params.walk_probability) {
                        let c = pick_unsat_clause(&state, rng);
                        (random_var_of(&state, c, rng), StepKind::Walk, Some(c))
                    } else {
                        let v = argmin_uniform(1..=n, |v| -state.score(v), rng);
                        (v, StepKind::Greedy, None)
                    }
                }
                Algorithm::Walksat => {
                    let c = pick_unsat_clause(&state, rng);
                    let vars = f.clauses()[c].literals().map(|l| l.var());
                    if vars.iter().any(|&v| state.break_count(v) == 0) {
                        let v = argmin_uniform(vars.iter().copied().filter(|&v| state.break_count(v) == 0), |_| 0, rng);
                        (v, StepKind::Freebie, Some(c))
                    } else if rng.gen_bool(params.walk_probability) {
                        (random_var_of(&state, c, rng), StepKind::Walk, Some(c))
                    } else {
                        let v = argmin_uniform(vars.iter().copied(), |v| state.break_count(v), rng);
                        (v, StepKind::MinBreak, Some(c))
                    }
                }
                Algorithm::AdaptiveNoveltyPlus => {
                    let c = pick_unsat_clause(&state, rng);
                    if rng.gen_bool(params.wp) {
                        (random_var_of(&state, c, rng), StepKind::Walk, Some(c))
                    } else {
                        let (v, kind) = novelty_pick(&state, c, &nov, rng);
                        (v, kind, Some(c))
                    }
                }
            };
            observe(&Step {
                flip: flips,
                var,
                kind,
                clause,
                noise: (params.algorithm == Algorithm::AdaptiveNoveltyPlus).then_some(nov.noise),
                state: &state,
            });
            state.flip(var);
            flips += 1;
            step += 1;
            if params.algorithm == Algorithm::AdaptiveNoveltyPlus {
                nov.last_flip[var] = Some(step);
                nov.adapt(step, state.num_unsat(), m, &params.noise);
            }
            #[cfg(debug_assertions)]
            if flips.is_multiple_of(CONSISTENCY_CHECK_INTERVAL) {
                debug_assert!(state.is_consistent(), "incremental state diverged at flip {flips}");
            }
        }
    }
    Ok(SlsRun {
        found: false,
        flips,
        try_index: params.tries - 1,
        assignment: None,
    })
}

pub fn run_with<R: Rng + ?Sized>(f: &Formula, params: &SlsParams, rng: &mut R) -> Result<SlsRun> {
    run_observed(f, params, rng, |_| {})
}

/// Runs with a stream seeded from `params.seed`.
pub fn run(f: &Formula, params: &SlsParams) -> Result<SlsRun> {
    run_with(f, params, &mut seeded(params.seed))
}

pub fn gwsat<R: Rng + ?Sized>(f: &Formula, params: &SlsParams, rng: &mut R) -> Result<SlsRun> {
    run_with(
        f,
        &SlsParams {
            algorithm: Algorithm::Gwsat,
            ..*params
        },
        rng,
    )
}

pub fn walksat<R: Rng + ?Sized>(f: &Formula, params: &SlsParams, rng: &mut R) -> Result<SlsRun> {
    run_with(
        f,
        &SlsParams {
            algorithm: Algorithm::Walksat,
            ..*params
        },
        rng,
    )
}

pub fn adaptive_novelty_plus<R: Rng + ?Sized>(f: &Formula, params: &SlsParams, rng: &mut R) -> Result<SlsRun> {
    run_with(
        f,
        &SlsParams {
            algorithm: Algorithm::AdaptiveNoveltyPlus,
            ..*params
        },
        rng,
    )
}

/// Seed of the `run`-th independent run derived from `params.seed`.
pub fn run_seed(params: &SlsParams, run: u64) -> u64 {
    derive_seed(params.seed, run)
}

/// `runs` independent runs with seeds from [`run_seed`].
pub fn run_many(f: &Formula, params: &SlsParams, runs: u64) -> Result<Vec<(u64, SlsRun)>> {
    (0..runs)
        .map(|r| {
            let seed = run_seed(params, r);
            run_with(f, params, &mut seeded(seed)).map(|run| (seed, run))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::is_satisfiable;
    use crate::generator::{generate, GenSpec};

    fn sat_instance(n: usize, m: usize, seed: u64) -> Formula {
        (seed..)
            .map(|s| generate(&GenSpec::new(n, m, s).unwrap()).unwrap())
            .find(is_satisfiable)
            .unwrap()
    }

    #[test]
    fn already_satisfied_start() {
        for alg in [Algorithm::Gwsat, Algorithm::Walksat, Algorithm::AdaptiveNoveltyPlus] {
            let r = run(&Formula::empty(5), &SlsParams::new(alg)).unwrap();
            assert!(r.found);
            assert_eq!(r.flips, 0);
        }
    }

    #[test]
    fn params_validation() {
        let bad = SlsParams {
            walk_probability: 1.5,
            ..Default::default()
        };
        assert!(run(&Formula::empty(3), &bad).is_err());
        let bad = SlsParams {
            max_flips: 0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = SlsParams {
            tries: 0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        assert_eq!(
            "anovelty+".parse::<Algorithm>().unwrap(),
            Algorithm::AdaptiveNoveltyPlus
        );
        assert!("gsat".parse::<Algorithm>().is_err());
    }

    #[test]
    fn pure_gsat_steps_are_greedy() {
        let f = sat_instance(20, 80, 1);
        let params = SlsParams {
            walk_probability: 0.0,
            max_flips: 500,
            tries: 3,
            ..Default::default()
        };
        let mut steps = 0;
        run_observed(&f, &params, &mut seeded(3), |s| {
            let best = (1..=20).map(|v| s.state.score(v)).max().unwrap();
            assert_eq!(s.kind, StepKind::Greedy);
            assert_eq!(s.state.score(s.var), best);
            steps += 1;
        })
        .unwrap();
        assert!(steps > 0);
    }

    #[test]
    fn pure_walk_flips_unsat_clause_vars() {
        let f = sat_instance(20, 85, 2);
        let params = SlsParams {
            walk_probability: 1.0,
            max_flips: 2000,
            ..Default::default()
        };
        run_observed(&f, &params, &mut seeded(4), |s| {
            assert_eq!(s.kind, StepKind::Walk);
            let c = s.clause.unwrap();
            assert!(s.state.is_unsat(c));
            assert!(f.clauses()[c].literals().iter().any(|l| l.var() == s.var));
        })
        .unwrap();
    }

    #[test]
    fn walksat_flips_from_unsat_clause() {
        let f = sat_instance(20, 85, 3);
        let params = SlsParams::new(Algorithm::Walksat);
        let r = run_observed(&f, &params, &mut seeded(5), |s| {
            let c = s.clause.unwrap();
            assert!(s.state.is_unsat(c));
            assert!(f.clauses()[c].literals().iter().any(|l| l.var() == s.var));
            if s.kind == StepKind::Freebie {
                assert_eq!(s.state.break_count(s.var), 0);
            }
        })
        .unwrap();
        assert!(r.found);
        assert!(f.evaluate(r.assignment.as_ref().unwrap()).unwrap());
    }

    #[test]
    fn novelty_noise_bounded() {
        let f = sat_instance(30, 128, 4);
        let params = SlsParams {
            max_flips: 20_000,
            ..SlsParams::new(Algorithm::AdaptiveNoveltyPlus)
        };
        let r = run_observed(&f, &params, &mut seeded(6), |s| {
            let noise = s.noise.unwrap();
            assert!((0.0..=1.0).contains(&noise));
        })
        .unwrap();
        assert!(r.found);
    }

    #[test]
    fn unsat_formula_hits_cutoff() {
        let cl: Vec<[i32; 3]> = (0..8)
            .map(|s| {
                let sign = |b: i32, v: i32| if s >> b & 1 == 1 { -v } else { v };
                [sign(0, 1), sign(1, 2), sign(2, 3)]
            })
            .collect();
        let f = Formula::from_dimacs_clauses(3, &cl).unwrap();
        for alg in [Algorithm::Gwsat, Algorithm::Walksat, Algorithm::AdaptiveNoveltyPlus] {
            let params = SlsParams {
                max_flips: 100,
                tries: 3,
                ..SlsParams::new(alg)
            };
            let r = run(&f, &params).unwrap();
            assert!(!r.found);
            assert_eq!(r.flips, 300);
            assert_eq!(r.try_index, 2);
        }
    }

    #[test]
    fn seeded_runs_repeat() {
        let f = sat_instance(25, 100, 5);
        for alg in [Algorithm::Gwsat, Algorithm::Walksat, Algorithm::AdaptiveNoveltyPlus] {
            let p = SlsParams {
                seed: 77,
                ..SlsParams::new(alg)
            };
            assert_eq!(run(&f, &p).unwrap(), run(&f, &p).unwrap());
            let many = run_many(&f, &p, 3).unwrap();
            assert_eq!(many, run_many(&f, &p, 3).unwrap());
            assert!(many.iter().all(|(_, r)| r.found));
        }
    }
}
