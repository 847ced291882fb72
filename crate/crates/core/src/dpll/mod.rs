//! Recursive DPLL with the "first free variable of the first unsatisfied
//! clause" branching rule.
//!
//! Every invocation of the recursive procedure is one *call*; the call count is
//! the running-time metric. Unit propagation is off by default, so each level
//! of the search tree assigns exactly one more variable.

mod tree;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cnf::{Assignment, Formula, Literal};
use crate::rng::{seeded, SeedRng};
use crate::search::Tracker;

pub use tree::{annotate_excited, export_tree, Node, NodeKind, SearchTree, TreeFormat, TreeLabel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branching {
    /// First unassigned variable, in stored literal order, of the first clause
    /// (in formula order) not yet satisfied.
    #[default]
    FirstUnsatisfiedClause,
    /// Smallest-index unassigned variable occurring in an unsatisfied clause.
    LowestIndex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "order", content = "seed")]
pub enum ValueOrder {
    #[default]
    TrueFirst,
    FalseFirst,
    /// Coin flip per branching node from a stream seeded with the given value.
    Randomized(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct DpllConfig {
    pub branching: Branching,
    pub value_order: ValueOrder,
    pub unit_propagation: bool,
    pub record_tree: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", content = "assignment", rename_all = "UPPERCASE")]
pub enum Status {
    Sat(Assignment),
    Unsat,
}

impl Status {
    pub fn is_sat(&self) -> bool {
        matches!(self, Status::Sat(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DpllOutcome {
    pub status: Status,
    pub calls: u64,
    pub tree: Option<SearchTree>,
}

struct Dpll<'f> {
    tracker: Tracker<'f>,
    cfg: DpllConfig,
    rng: Option<SeedRng>,
    calls: u64,
    tree: Option<SearchTree>,
    solution: Option<Assignment>,
}

impl<'f> Dpll<'f> {
    fn branch_variable(&self) -> usize {
        let t = &self.tracker;
        match self.cfg.branching {
            Branching::FirstUnsatisfiedClause => {
                let c = t.first_unsatisfied().expect("formula not yet satisfied");
                t.first_free_literal(c)
                    .expect("no falsified clause at a branching node")
                    .var()
            }
            Branching::LowestIndex => t
                .formula()
                .clauses()
                .iter()
                .filter(|c| !c.literals().iter().any(|l| t.value(l.var()) == Some(l.is_positive())))
                .flat_map(|c| c.literals().iter().map(|l| l.var()))
                .filter(|&v| t.value(v).is_none())
                .min()
                .expect("no falsified clause at a branching node"),
        }
    }

    fn first_value(&mut self) -> bool {
        match self.cfg.value_order {
            ValueOrder::TrueFirst => true,
            ValueOrder::FalseFirst => false,
            ValueOrder::Randomized(_) => self.rng.as_mut().expect("rng for randomized order").gen(),
        }
    }

    /// One recursive call. Returns true once a solution has been found.
    fn visit(&mut self, parent: Option<usize>, branch: Option<Literal>) -> bool {
        self.calls += 1;
        let mark = self.tracker.num_assigned();
        if let Some(lit) = branch {
            self.tracker.assign(lit);
        }
        if self.cfg.unit_propagation {
            if mark == 0 && branch.is_none() {
                self.tracker.propagate_all(0);
            } else {
                self.tracker.propagate_from(mark, 0);
            }
        }
        let kind = if self.tracker.num_falsified() > 0 {
            NodeKind::Contradiction
        } else if self.tracker.all_satisfied() {
            NodeKind::Solution
        } else {
            NodeKind::Internal
        };
        let id = self.tree.as_mut().map(|tree| {
            let assigned = self.tracker.trail()[mark..].to_vec();
            tree.push(parent, self.tracker.num_assigned(), branch, assigned, kind)
        });

        let found = match kind {
            NodeKind::Contradiction => false,
            NodeKind::Solution => {
                let n = self.tracker.formula().num_vars();
                let values = (1..=n).map(|v| self.tracker.value(v).unwrap_or(false)).collect();
                self.solution = Some(Assignment::new(values));
                true
            }
            NodeKind::Internal => {
                let var = self.branch_variable();
                let first = self.first_value();
                self.visit(id, Some(Literal::new(var, first))) || self.visit(id, Some(Literal::new(var, !first)))
            }
        };
        if !found {
            self.tracker.undo_to(mark);
        }
        found
    }
}

/// Runs DPLL to the first solution or to a refutation.
pub fn solve(f: &Formula, cfg: &DpllConfig) -> DpllOutcome {
    let mut dpll = Dpll {
        tracker: Tracker::new(f),
        cfg: *cfg,
        rng: match cfg.value_order {
            ValueOrder::Randomized(seed) => Some(seeded(seed)),
            _ => None,
        },
        calls: 0,
        tree: cfg.record_tree.then(SearchTree::default),
        solution: None,
    };
    dpll.visit(None, None);
    DpllOutcome {
        status: match dpll.solution {
            Some(a) => Status::Sat(a),
            None => Status::Unsat,
        },
        calls: dpll.calls,
        tree: dpll.tree,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::SimplifiedFormula;
    use crate::generator::{generate, GenSpec};

    fn all_eight() -> Formula {
        let cl: Vec<[i32; 3]> = (0..8)
            .map(|s| {
                let sign = |b: i32, v: i32| if s >> b & 1 == 1 { -v } else { v };
                [sign(0, 1), sign(1, 2), sign(2, 3)]
            })
            .collect();
        Formula::from_dimacs_clauses(3, &cl).unwrap()
    }

    #[test]
    fn unsat_all_sign_patterns() {
        let out = solve(
            &all_eight(),
            &DpllConfig {
                record_tree: true,
                ..Default::default()
            },
        );
        assert_eq!(out.status, Status::Unsat);
        // Full binary tree over three variables.
        assert_eq!(out.calls, 15);
        assert_eq!(out.tree.unwrap().len(), 15);
    }

    #[test]
    fn empty_formula_root_solution() {
        let out = solve(&Formula::empty(4), &DpllConfig::default());
        assert_eq!(out.status, Status::Sat(Assignment::all_false(4)));
        assert_eq!(out.calls, 1);
    }

    #[test]
    fn first_unsatisfied_clause_rule() {
        // After b2 = T satisfies clause 0, the next branch must be on b5 (first literal of clause 1).
        let f = Formula::from_dimacs_clauses(5, &[[2, 1, 3], [5, -4, 1], [-2, -5, 4]]).unwrap();
        let out = solve(
            &f,
            &DpllConfig {
                record_tree: true,
                ..Default::default()
            },
        );
        let tree = out.tree.unwrap();
        let branches: Vec<_> = tree.nodes().iter().filter_map(|n| n.branch).collect();
        assert_eq!(branches[0], Literal::positive(2));
        assert_eq!(branches[1], Literal::positive(5));
        assert!(out.status.is_sat());
    }

    #[test]
    fn tree_invariants_and_determinism() {
        for seed in 0..20 {
            let f = generate(&GenSpec::new(12, 50, seed).unwrap()).unwrap();
            for unit_propagation in [false, true] {
                let cfg = DpllConfig {
                    record_tree: true,
                    unit_propagation,
                    ..Default::default()
                };
                let out = solve(&f, &cfg);
                assert_eq!(out, solve(&f, &cfg));
                let tree = out.tree.as_ref().unwrap();
                assert_eq!(tree.len() as u64, out.calls);
                assert_eq!(tree.nodes()[0].depth, 0);
                let solutions = tree.nodes().iter().filter(|n| n.kind == NodeKind::Solution).count();
                assert_eq!(solutions, usize::from(out.status.is_sat()));
                for node in tree.nodes() {
                    let kids = tree.children(node.id).count();
                    match node.kind {
                        NodeKind::Internal => assert!((1..=2).contains(&kids)),
                        _ => assert_eq!(kids, 0),
                    }
                    if let Some(p) = node.parent {
                        let parent_depth = tree.nodes()[p].depth;
                        if unit_propagation {
                            assert!(node.depth > parent_depth);
                        } else {
                            assert_eq!(node.depth, parent_depth + 1);
                        }
                    }
                    if node.kind == NodeKind::Contradiction {
                        let mut residual = SimplifiedFormula::from(&f);
                        for lit in tree.path_literals(node.id) {
                            residual = residual.assign(lit).unwrap();
                        }
                        assert!(residual.has_empty_clause());
                    }
                }
                if let Status::Sat(a) = &out.status {
                    assert!(f.evaluate(a).unwrap());
                }
            }
        }
    }

    #[test]
    fn randomized_value_order_is_seeded() {
        let f = generate(&GenSpec::new(14, 50, 3).unwrap()).unwrap();
        let cfg = |s| DpllConfig {
            value_order: ValueOrder::Randomized(s),
            ..Default::default()
        };
        assert_eq!(solve(&f, &cfg(5)), solve(&f, &cfg(5)));
        let lowest = DpllConfig {
            branching: Branching::LowestIndex,
            ..Default::default()
        };
        assert_eq!(
            solve(&f, &lowest).status.is_sat(),
            solve(&f, &DpllConfig::default()).status.is_sat()
        );
    }
}
