mod common;

use onesat::counting::{
    backbone, backbone_by_enumeration, backbone_by_probing, count_energy_states, count_energy_states_under,
    count_solutions, energy_histogram, enumerate_solutions, has_unique_solution, is_satisfiable,
};
use onesat::generator::{generate, GenSpec};
use onesat::rng::derive_seed;
use onesat::{Error, Formula, Literal, PartialAssignment};

fn instance(n: usize, alpha: f64, seed: u64) -> Formula {
    generate(&GenSpec::from_alpha(n, alpha, seed).unwrap()).unwrap()
}

#[test]
fn counts_and_caps_at_threshold() {
    for i in 0..1000 {
        let f = instance(12, 4.25, derive_seed(1, i));
        let r = common::solutions(&f).len() as u128;
        assert_eq!(count_solutions(&f, None).unwrap().count, r);
        let capped = count_solutions(&f, Some(2)).unwrap();
        assert_eq!(capped.count, r.min(2));
        assert_eq!(capped.capped, r >= 2);
        assert_eq!(has_unique_solution(&f), r == 1);
        assert_eq!(is_satisfiable(&f), r > 0);
    }
}

#[test]
fn enumeration_lists_every_solution() {
    let f = instance(10, 3.0, 11);
    let mut got: Vec<u64> = enumerate_solutions(&f, None)
        .unwrap()
        .solutions
        .unwrap()
        .iter()
        .map(|a| common::index_of(a.values()))
        .collect();
    got.sort_unstable();
    assert_eq!(got, common::solutions(&f));
    let capped = enumerate_solutions(&f, Some(3)).unwrap();
    assert_eq!(capped.solutions.unwrap().len(), 3);
    assert!(capped.capped);
}

#[test]
fn backbones_agree_with_brute_force() {
    let mut checked = 0;
    for i in 0..300 {
        let f = instance(12, 3.8, derive_seed(9, i));
        let sols = common::solutions(&f);
        match common::backbone(12, &sols) {
            None => {
                assert_eq!(backbone(&f), Err(Error::Unsatisfiable));
                assert_eq!(backbone_by_probing(&f), Err(Error::Unsatisfiable));
            }
            Some(want) => {
                assert_eq!(backbone(&f).unwrap(), want);
                assert_eq!(backbone_by_probing(&f).unwrap(), want);
                let by_enum = backbone_by_enumeration(&f, 8).unwrap();
                assert_eq!(by_enum.is_some(), sols.len() <= 8);
                if let Some(b) = by_enum {
                    assert_eq!(b, want);
                }
                checked += 1;
            }
        }
    }
    assert!(checked > 50);
}

#[test]
fn energy_levels_match_brute_force() {
    for i in 0..20 {
        let f = instance(14, 4.0, derive_seed(21, i));
        let en = common::energies(&f);
        let hist = energy_histogram(&f).unwrap();
        assert_eq!(hist.iter().sum::<u128>(), 1 << 14);
        for (k, &h) in hist.iter().enumerate() {
            assert_eq!(h, common::count_at(&en, k as u32));
        }
        for (k, &h) in hist.iter().enumerate().take(4) {
            assert_eq!(count_energy_states(&f, k).unwrap(), h);
        }
    }
}

#[test]
fn prefix_counts_match_brute_force() {
    let f = instance(12, 3.0, 5);
    let en = common::energies(&f);
    let prefixes: [&[i32]; 4] = [&[], &[1], &[-3, 7], &[2, -4, 6, -8, 10]];
    for raw in prefixes {
        let lits: Vec<Literal> = raw.iter().map(|&d| Literal::from_dimacs(d).unwrap()).collect();
        let pa = PartialAssignment::from_literals(12, &lits).unwrap();
        let fixed: Vec<(usize, bool)> = lits.iter().map(|l| (l.var(), l.is_positive())).collect();
        for k in 0..=2 {
            let want = en
                .iter()
                .enumerate()
                .filter(|&(x, &e)| e == k as u32 && common::extends(x as u64, &fixed))
                .count() as u128;
            assert_eq!(
                count_energy_states_under(&f, &pa, k).unwrap(),
                want,
                "prefix {raw:?}, k={k}"
            );
        }
    }
}

#[test]
fn sweep_and_search_agree_beyond_brute_force_sizes() {
    for i in 0..3 {
        let f = instance(20, 3.0, derive_seed(4, i));
        let free = PartialAssignment::unassigned(20);
        let hist = energy_histogram(&f).unwrap();
        for (k, &h) in hist.iter().enumerate().take(3) {
            assert_eq!(count_energy_states_under(&f, &free, k).unwrap(), h);
        }
    }
}

#[test]
fn invalid_requests() {
    let f = instance(10, 3.0, 1);
    assert!(count_solutions(&f, Some(0)).is_err());
    assert!(count_energy_states(&f, 31).is_err());
    assert!(count_energy_states_under(&f, &PartialAssignment::unassigned(9), 0).is_err());
    assert!(energy_histogram(&Formula::empty(41)).is_err());
}
