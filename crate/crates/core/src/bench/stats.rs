use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Median with the mean of the two middle values for even lengths. Sorts in place.
pub fn median(xs: &mut [f64]) -> f64 {
    assert!(!xs.is_empty(), "median of empty sample");
    xs.sort_by(f64::total_cmp);
    let mid = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[mid]
    } else {
        (xs[mid - 1] + xs[mid]) / 2.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    /// Number of instances.
    pub samples: usize,
    pub mean: f64,
    pub median: f64,
    pub max: f64,
}

/// `samples` holds `runs_per_instance` consecutive values per instance. Each
/// instance is reduced to the median of its runs, and the point to the mean,
/// median and max over instances.
pub fn aggregate(samples: &[f64], runs_per_instance: usize) -> Result<Summary> {
    if samples.is_empty() {
        return Err(Error::input("cannot aggregate an empty sample"));
    }
    if runs_per_instance == 0 || !samples.len().is_multiple_of(runs_per_instance) {
        return Err(Error::input(format!(
            "{} samples do not split into runs of {runs_per_instance}",
            samples.len()
        )));
    }
    let mut per_instance: Vec<f64> = samples
        .chunks(runs_per_instance)
        .map(|runs| median(&mut runs.to_vec()))
        .collect();
    let mean = per_instance.iter().sum::<f64>() / per_instance.len() as f64;
    let max = per_instance.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let med = median(&mut per_instance);
    Ok(Summary {
        samples: per_instance.len(),
        mean,
        median: med,
        max,
    })
}

/// One point of a benchmark curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    /// Clause density or variable count, depending on the sweep axis.
    pub x: f64,
    pub mean: f64,
    pub median: f64,
    pub max: f64,
    pub success_rate: f64,
    pub samples: usize,
    /// Too few successful runs (or too few instances) for a meaningful median.
    pub censored: bool,
}

impl RunStats {
    pub fn from_summary(x: f64, s: Summary, success_rate: f64, censored: bool) -> Self {
        RunStats {
            x,
            mean: s.mean,
            median: s.median,
            max: s.max,
            success_rate,
            samples: s.samples,
            censored,
        }
    }
}
