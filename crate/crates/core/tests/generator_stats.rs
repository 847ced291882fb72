use std::collections::HashMap;

use statrs::distribution::{ChiSquared, ContinuousCDF};

use onesat::counting::count_solutions;
use onesat::dimacs::write_dimacs;
use onesat::generator::{distinct_clause_count, generate, random_clause, GenSpec};
use onesat::rng::{derive_seed, seeded};

/// Chi-square p-value of clause frequencies against the uniform distribution
/// over all `8 * C(n, 3)` clauses, with clauses compared as sets of literals.
fn uniformity_p_value(n: usize, draws: usize, seed: u64) -> f64 {
    let mut rng = seeded(seed);
    let mut hist: HashMap<[i32; 3], u64> = HashMap::new();
    for _ in 0..draws {
        let c = random_clause(n, &mut rng).unwrap();
        let mut key = c.literals().map(|l| l.to_dimacs());
        key.sort_by_key(|l| l.abs());
        *hist.entry(key).or_default() += 1;
    }
    let cells = distinct_clause_count(n) as usize;
    assert!(hist.len() <= cells);
    let expected = draws as f64 / cells as f64;
    let observed_part: f64 = hist.values().map(|&o| (o as f64 - expected).powi(2) / expected).sum();
    let stat = observed_part + (cells - hist.len()) as f64 * expected;
    ChiSquared::new((cells - 1) as f64).unwrap().sf(stat)
}

#[test]
fn clause_space_size() {
    assert_eq!(distinct_clause_count(3), 8);
    assert_eq!(distinct_clause_count(30), 8 * 4060);
}

#[test]
fn clauses_uniform_small_n() {
    let p = uniformity_p_value(3, 80_000, 1);
    assert!(p > 1e-3, "p = {p}");
    let p = uniformity_p_value(6, 160_000, 2);
    assert!(p > 1e-3, "p = {p}");
}

#[test]
fn clauses_uniform_n30() {
    let p = uniformity_p_value(30, 1_000_000, 3);
    assert!(p > 1e-3, "p = {p}");
}

#[test]
fn construction_invariants() {
    let f = generate(&GenSpec::new(30, 90, 5).unwrap()).unwrap();
    assert_eq!(f.num_clauses(), 90);
    for c in f.clauses() {
        let mut vars: Vec<usize> = c.literals().iter().map(|l| l.var()).collect();
        assert!(vars.iter().all(|&v| (1..=30).contains(&v)));
        vars.sort_unstable();
        vars.dedup();
        assert_eq!(vars.len(), 3);
    }
    assert_eq!(generate(&GenSpec::new(20, 0, 1).unwrap()).unwrap().num_clauses(), 0);
}

#[test]
fn byte_identical_output() {
    let spec = GenSpec::new(20, 60, 1).unwrap();
    assert_eq!(
        write_dimacs(&generate(&spec).unwrap()),
        write_dimacs(&generate(&spec).unwrap())
    );
    let other = GenSpec::new(20, 60, 2).unwrap();
    assert_ne!(generate(&spec).unwrap(), generate(&other).unwrap());
}

#[test]
fn density_rounding() {
    assert_eq!(GenSpec::from_alpha(10, 4.25, 0).unwrap().m, 43);
    assert_eq!(GenSpec::from_alpha(20, 4.25, 0).unwrap().m, 85);
    assert_eq!(GenSpec::from_alpha(26, 3.0, 0).unwrap().m, 78);
    assert!(GenSpec::from_alpha(10, -1.0, 0).is_err());
}

#[test]
fn mean_solution_count_near_first_moment() {
    let (n, m) = (12, 24);
    let counts: Vec<f64> = (0..1000)
        .map(|i| {
            let f = generate(&GenSpec::new(n, m, derive_seed(77, i)).unwrap()).unwrap();
            count_solutions(&f, None).unwrap().count as f64
        })
        .collect();
    let mean = counts.iter().sum::<f64>() / counts.len() as f64;
    let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (counts.len() - 1) as f64;
    let se = (var / counts.len() as f64).sqrt();
    let expected = 4096.0 * (7.0f64 / 8.0).powi(m as i32);
    assert!(
        (mean - expected).abs() <= 3.0 * se,
        "mean {mean}, expected {expected}, se {se}"
    );
}
