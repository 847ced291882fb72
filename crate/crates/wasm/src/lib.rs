//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every export returns a JSON string. The `*_json` functions hold the logic
//! and are plain Rust so they can be tested natively.

use onesat::bench::{self, Axis, EnsembleTemplate, Solver, SweepConfig};
use onesat::dimacs::{parse_dimacs, write_dimacs};
use onesat::dpll::{self, annotate_excited, DpllConfig, NodeKind, Status};
use onesat::ensemble::{build_ensemble, estimate_p_r1, EnsembleKind, EnsembleSpec};
use onesat::rng::derive_seed;
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Generation budget for a single demo instance.
const MAX_ATTEMPTS: u64 = 2_000_000;
/// Above this size the tree is returned without excited-state counts.
const EXCITED_MAX_NODES: usize = 4000;

type Result<T> = onesat::Result<T>;

#[derive(Serialize)]
struct PPoint {
    alpha: f64,
    p_hat: f64,
    half_width: f64,
}

pub fn p_r1_curve_json(n: usize, alphas: &[f64], samples: u32, seed: u32) -> Result<String> {
    let points = alphas
        .iter()
        .enumerate()
        .map(|(i, &alpha)| {
            let s = estimate_p_r1(n, alpha, u64::from(samples), derive_seed(u64::from(seed), i as u64))?;
            Ok(PPoint {
                alpha,
                p_hat: s.p_hat,
                half_width: s.half_width,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(serde_json::to_string(&points).expect("serializable"))
}

/// First instance of the requested ensemble, as DIMACS text.
pub fn generate_instance_text(kind: &str, n: usize, alpha: f64, seed: u32) -> Result<String> {
    let spec = EnsembleSpec::with_alpha(kind.parse()?, n, alpha, 1, u64::from(seed), MAX_ATTEMPTS)?;
    let e = build_ensemble(&spec)?;
    match e.records.first() {
        Some(rec) => Ok(write_dimacs(&rec.formula)),
        None => Err(onesat::Error::Input(format!(
            "no {kind} instance in {MAX_ATTEMPTS} attempts"
        ))),
    }
}

#[derive(Serialize)]
struct TreeNode {
    id: usize,
    parent: Option<usize>,
    depth: usize,
    /// DIMACS literal of the branch, 0 at the root.
    branch: i32,
    kind: NodeKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    excited: Option<u128>,
}

#[derive(Serialize)]
struct TreeView {
    status: &'static str,
    calls: u64,
    assignment: Vec<i32>,
    nodes: Vec<TreeNode>,
}

pub fn dpll_tree_json(dimacs: &str, unit_propagation: bool) -> Result<String> {
    let f = parse_dimacs(dimacs)?;
    let cfg = DpllConfig {
        unit_propagation,
        record_tree: true,
        ..DpllConfig::default()
    };
    let out = dpll::solve(&f, &cfg);
    let mut tree = out.tree.expect("tree recorded");
    if tree.len() <= EXCITED_MAX_NODES {
        tree = annotate_excited(&tree, &f)?;
    }
    let (status, assignment) = match &out.status {
        Status::Sat(a) => (
            "SAT",
            (1..=f.num_vars())
                .map(|v| if a.value(v) { v as i32 } else { -(v as i32) })
                .collect(),
        ),
        Status::Unsat => ("UNSAT", Vec::new()),
    };
    let nodes = tree
        .nodes()
        .iter()
        .map(|n| TreeNode {
            id: n.id,
            parent: n.parent,
            depth: n.depth,
            branch: n.branch.map_or(0, |l| l.to_dimacs()),
            kind: n.kind,
            excited: n.excited,
        })
        .collect();
    let view = TreeView {
        status,
        calls: out.calls,
        assignment,
        nodes,
    };
    Ok(serde_json::to_string(&view).expect("serializable"))
}

/// Median DPLL calls over `instances` formulas of each kind at each density.
pub fn alpha_sweep_json(kinds: &str, n: usize, alphas: &[f64], instances: usize, seed: u32) -> Result<String> {
    let ensembles = kinds
        .split(',')
        .map(|k| {
            Ok(EnsembleTemplate {
                kind: k.trim().parse::<EnsembleKind>()?,
                alpha: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let cfg = SweepConfig {
        solver: Solver::Dpll(DpllConfig::default()),
        ensembles,
        axis: Axis::Alpha {
            n,
            values: alphas.to_vec(),
        },
        instances_per_point: instances,
        runs_per_instance: 1,
        max_attempts: MAX_ATTEMPTS,
        seed: u64::from(seed),
    };
    let result = bench::alpha_sweep(&cfg)?;
    Ok(serde_json::to_string(&result.curves).expect("serializable"))
}

fn js(r: Result<String>) -> std::result::Result<String, JsError> {
    r.map_err(|e| JsError::new(&e.to_string()))
}

/// Estimated fraction of random formulas with exactly one solution, per density.
#[wasm_bindgen]
pub fn p_r1_curve(n: usize, alphas: &[f64], samples: u32, seed: u32) -> std::result::Result<String, JsError> {
    js(p_r1_curve_json(n, alphas, samples, seed))
}

#[wasm_bindgen]
pub fn generate_instance(kind: &str, n: usize, alpha: f64, seed: u32) -> std::result::Result<String, JsError> {
    js(generate_instance_text(kind, n, alpha, seed))
}

#[wasm_bindgen]
pub fn dpll_tree(dimacs: &str, unit_propagation: bool) -> std::result::Result<String, JsError> {
    js(dpll_tree_json(dimacs, unit_propagation))
}

#[wasm_bindgen]
pub fn alpha_sweep(
    kinds: &str,
    n: usize,
    alphas: &[f64],
    instances: usize,
    seed: u32,
) -> std::result::Result<String, JsError> {
    js(alpha_sweep_json(kinds, n, alphas, instances, seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    #[test]
    fn p_curve_shape() {
        let v: Value = serde_json::from_str(&p_r1_curve_json(10, &[2.0, 4.5], 400, 1).unwrap()).unwrap();
        let pts = v.as_array().unwrap();
        assert_eq!(pts.len(), 2);
        assert_eq!(pts[1]["alpha"], 4.5);
        assert!(pts[1]["p_hat"].as_f64().unwrap() > pts[0]["p_hat"].as_f64().unwrap());
    }

    #[test]
    fn tree_of_generated_instance() {
        let text = generate_instance_text("r1", 12, 4.0, 3).unwrap();
        let f = parse_dimacs(&text).unwrap();
        assert_eq!(onesat::counting::count_solutions(&f, None).unwrap().count, 1);
        let v: Value = serde_json::from_str(&dpll_tree_json(&text, false).unwrap()).unwrap();
        assert_eq!(v["status"], "SAT");
        let nodes = v["nodes"].as_array().unwrap();
        assert_eq!(nodes.len() as u64, v["calls"].as_u64().unwrap());
        assert_eq!(nodes[0]["branch"], 0);
        assert!(nodes.iter().all(|n| n["excited"].is_u64()));
        assert_eq!(nodes.iter().filter(|n| n["kind"] == "solution").count(), 1);
    }

    #[test]
    fn sweep_curves() {
        let v: Value = serde_json::from_str(&alpha_sweep_json("r1, any", 10, &[3.0, 5.0], 5, 2).unwrap()).unwrap();
        let curves = v.as_array().unwrap();
        assert_eq!(curves.len(), 2);
        assert_eq!(curves[1]["label"], "any");
        assert_eq!(curves[0]["points"].as_array().unwrap().len(), 2);
    }

    #[test]
    fn bad_input() {
        assert!(dpll_tree_json("p cnf 3 1\n1 2 0\n", false).is_err());
        assert!(generate_instance_text("r2", 10, 4.0, 0).is_err());
        assert!(alpha_sweep_json("r1", 10, &[], 5, 0).is_err());
    }
}
