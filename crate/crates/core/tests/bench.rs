use onesat::bench::stats::{aggregate, RunStats, Summary};
use onesat::bench::{emit_csv, fit_curve, parse_csv, summarize, Axis, Curve, PointSamples, Solver, SweepConfig};
use onesat::ensemble::EnsembleKind;
use onesat::sls::SlsParams;
use proptest::prelude::*;
use serde::Deserialize;

#[derive(Deserialize)]
struct Fixture {
    runs_per_instance: usize,
    values: Vec<f64>,
    expected: Summary,
}

#[test]
fn aggregate_matches_fixture() {
    let fx: Fixture = serde_json::from_str(include_str!("golden/aggregate.json")).unwrap();
    let got = aggregate(&fx.values, fx.runs_per_instance).unwrap();
    assert_eq!(got, fx.expected);
    assert!(aggregate(&fx.values, 3).is_err());
    assert!(aggregate(&[], 1).is_err());
}

#[test]
fn csv_matches_fixture() {
    let points = vec![
        RunStats {
            x: 3.0,
            mean: 16.7,
            median: 5.0,
            max: 65.0,
            success_rate: 1.0,
            samples: 5,
            censored: false,
        },
        RunStats {
            x: 4.5,
            mean: 0.25,
            median: 0.5,
            max: 1e6,
            success_rate: 0.5,
            samples: 2,
            censored: true,
        },
    ];
    let text = emit_csv(&points).unwrap();
    assert_eq!(text, include_str!("golden/points.csv"));
    assert_eq!(parse_csv(&text).unwrap(), points);
    assert!(parse_csv(&emit_csv(&[]).unwrap()).unwrap().is_empty());
}

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![
        -1e12..1e12f64,
        Just(0.0),
        Just(1e-300),
        (0u32..1_000_000).prop_map(f64::from)
    ]
}

fn run_stats() -> impl Strategy<Value = RunStats> {
    (
        finite(),
        finite(),
        finite(),
        finite(),
        0.0..=1.0f64,
        0usize..100_000,
        any::<bool>(),
    )
        .prop_map(|(x, mean, median, max, success_rate, samples, censored)| RunStats {
            x,
            mean,
            median,
            max,
            success_rate,
            samples,
            censored,
        })
}

proptest! {
    #[test]
    fn csv_round_trip(points in proptest::collection::vec(run_stats(), 0..20)) {
        let text = emit_csv(&points).unwrap();
        prop_assert_eq!(parse_csv(&text).unwrap(), points);
    }

    #[test]
    fn aggregate_bounds(values in proptest::collection::vec(0u32..10_000, 1..40), runs in 1usize..4) {
        let values: Vec<f64> = values.iter().map(|&v| f64::from(v)).collect();
        let usable = values.len() / runs * runs;
        prop_assume!(usable > 0);
        let s = aggregate(&values[..usable], runs).unwrap();
        let lo = values[..usable].iter().copied().fold(f64::INFINITY, f64::min);
        prop_assert_eq!(s.samples, usable / runs);
        prop_assert!(lo <= s.median && s.median <= s.max);
        prop_assert!(lo <= s.mean && s.mean <= s.max);
    }
}

fn point(x: f64, median: f64, censored: bool) -> RunStats {
    RunStats {
        x,
        mean: median,
        median,
        max: median,
        success_rate: 1.0,
        samples: 10,
        censored,
    }
}

#[test]
fn censored_points_are_not_fitted() {
    let curve = |points| Curve {
        label: "r1@3".into(),
        kind: EnsembleKind::R1,
        alpha: Some(3.0),
        points,
    };
    let pts: Vec<RunStats> = (0..5)
        .map(|i| {
            point(
                10.0 + 2.0 * i as f64,
                4.0 * 2f64.powf(0.25 * (10.0 + 2.0 * i as f64)),
                false,
            )
        })
        .collect();
    let clean = fit_curve(&curve(pts.clone())).comparison.unwrap();

    let mut with_outlier = pts.clone();
    with_outlier.push(point(20.0, 1e9, true));
    let fitted = fit_curve(&curve(with_outlier)).comparison.unwrap();
    assert_eq!(fitted, clean);
    assert!((fitted.exponential.exponent - 0.25).abs() < 1e-12);

    let mut sparse = pts[..2].to_vec();
    sparse.push(point(30.0, 7.0, true));
    let fit = fit_curve(&curve(sparse));
    assert!(fit.comparison.is_none());
    assert!(fit.error.unwrap().contains("need 3"));
}

#[test]
fn low_success_is_censored() {
    let sls = Solver::Sls(SlsParams::default());
    let samples = PointSamples {
        values: vec![5.0, 9.0, 7.0, 1.0],
        runs_per_instance: 2,
        successes: 2,
    };
    let p = summarize(4.0, &sls, &samples, false).unwrap();
    assert!(p.censored);
    assert_eq!(p.success_rate, 0.5);
    assert_eq!(p.median, 5.5);
    let samples = PointSamples {
        successes: 3,
        ..samples
    };
    assert!(!summarize(4.0, &sls, &samples, false).unwrap().censored);
    assert!(summarize(4.0, &sls, &samples, true).unwrap().censored);
    let empty = PointSamples {
        values: vec![],
        runs_per_instance: 1,
        successes: 0,
    };
    assert!(summarize(4.0, &sls, &empty, false).unwrap().censored);
}

#[test]
fn config_parsing() {
    let cfg: SweepConfig = serde_json::from_str(
        r#"{"solver": {"kind": "sls", "algorithm": "walksat", "walk_probability": 0.5},
            "ensembles": [{"kind": "r1"}, {"kind": "sat"}],
            "axis": "alpha", "n": 16, "values": [3, 4.5], "seed": 4}"#,
    )
    .unwrap();
    cfg.validate().unwrap();
    assert_eq!(
        cfg.axis,
        Axis::Alpha {
            n: 16,
            values: vec![3.0, 4.5]
        }
    );
    assert!(matches!(cfg.solver, Solver::Sls(_)));
    let back: SweepConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
    assert_eq!(back, cfg);

    let bad: SweepConfig = serde_json::from_str(
        r#"{"solver": {"kind": "dpll"}, "ensembles": [{"kind": "r1"}], "axis": "n", "values": [10, 12]}"#,
    )
    .unwrap();
    assert!(bad.validate().is_err());
    assert!(serde_json::from_str::<SweepConfig>(r#"{"solver": {"kind": "cdcl"}, "ensembles": []}"#).is_err());
}
