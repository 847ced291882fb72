//! Single-solution random 3-SAT: instance generation, exact counting,
//! instrumented DPLL and stochastic local search, and the experiment harness
//! that compares hardness across ensembles.

pub mod bench;
pub mod cnf;
pub mod counting;
pub mod dimacs;
pub mod dpll;
pub mod ensemble;
mod error;
pub mod generator;
pub mod rng;
mod search;
pub mod sls;

pub use cnf::{Assignment, Clause, Formula, Literal, PartialAssignment, SimplifiedFormula};
pub use error::{Error, Result};
