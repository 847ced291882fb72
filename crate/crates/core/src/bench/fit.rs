//! Least-squares fits of running time against problem size in log space.
//!
//! The exponential model `a * 2^(b n)` is fit by regressing `log2 T` on `n`,
//! the power law `c * n^k` by regressing `ln T` on `ln n`. Residuals are
//! reported as sums of squares of natural-log errors so the two models can be
//! compared on the same point set.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    /// `a * 2^(b * n)`
    Exponential,
    /// `c * n^k`
    Powerlaw,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: Model,
    /// `a` for the exponential, `c` for the power law.
    pub prefactor: f64,
    /// `b` for the exponential, `k` for the power law.
    pub exponent: f64,
    /// Sum of squared residuals of `ln T`.
    pub rss: f64,
    pub points: usize,
}

impl FitResult {
    pub fn predict(&self, n: f64) -> f64 {
        match self.model {
            Model::Exponential => self.prefactor * (self.exponent * n).exp2(),
            Model::Powerlaw => self.prefactor * n.powf(self.exponent),
        }
    }
}

/// Ordinary least squares `y = intercept + slope * x`, returning (intercept, slope, rss).
fn linear(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    let len = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / len;
    let my = ys.iter().sum::<f64>() / len;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("all x values coincide".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    Ok((intercept, slope, rss))
}

fn check(points: &[(f64, f64)]) -> Result<()> {
    if points.len() < 2 {
        return Err(Error::Fit(format!("need at least 2 points, got {}", points.len())));
    }
    if let Some(&(n, t)) = points
        .iter()
        .find(|&&(n, t)| !(t > 0.0 && t.is_finite() && n.is_finite()))
    {
        return Err(Error::Fit(format!("point ({n}, {t}) is not positive and finite")));
    }
    Ok(())
}

pub fn fit_exponential(points: &[(f64, f64)]) -> Result<FitResult> {
    check(points)?;
    let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.log2()).collect();
    let (intercept, slope, rss2) = linear(&xs, &ys)?;
    let ln2 = std::f64::consts::LN_2;
    Ok(FitResult {
        model: Model::Exponential,
        prefactor: intercept.exp2(),
        exponent: slope,
        rss: rss2 * ln2 * ln2,
        points: points.len(),
    })
}

pub fn fit_powerlaw(points: &[(f64, f64)]) -> Result<FitResult> {
    check(points)?;
    if let Some(&(n, _)) = points.iter().find(|p| p.0 <= 0.0) {
        return Err(Error::Fit(format!("power law needs positive n, got {n}")));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let (intercept, slope, rss) = linear(&xs, &ys)?;
    Ok(FitResult {
        model: Model::Powerlaw,
        prefactor: intercept.exp(),
        exponent: slope,
        rss,
        points: points.len(),
    })
}

/// Both fits on the same points, and the model with the smaller residual.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelComparison {
    pub exponential: FitResult,
    pub powerlaw: FitResult,
    pub preferred: Model,
}

pub fn compare_models(points: &[(f64, f64)]) -> Result<ModelComparison> {
    let exponential = fit_exponential(points)?;
    let powerlaw = fit_powerlaw(points)?;
    let preferred = if exponential.rss < powerlaw.rss {
        Model::Exponential
    } else {
        Model::Powerlaw
    };
    Ok(ModelComparison {
        exponential,
        powerlaw,
        preferred,
    })
}
