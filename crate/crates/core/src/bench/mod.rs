//! Experiment harness: density sweeps at fixed size, size scaling at fixed
//! density, point statistics, and running-time fits.

pub mod fit;
pub mod stats;
pub mod sweep;

pub use fit::{compare_models, fit_exponential, fit_powerlaw, FitResult, Model, ModelComparison};
pub use stats::{aggregate, median, RunStats, Summary};
pub use sweep::{
    alpha_sweep, emit_csv, fit_curve, measure, parse_csv, plot_data, scaling_run, summarize, Axis, Curve, CurveFit,
    EnsembleTemplate, PointSamples, Solver, SweepConfig, SweepResult, Sweeper,
};
