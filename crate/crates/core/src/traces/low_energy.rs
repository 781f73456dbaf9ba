//! Low-energy expansion `sigma'(lambda) = lambda^{n-3} (a0 + a1 lambda + a2 lambda^{n-2} log lambda + ...)`.

use crate::error::{Error, Result};
use crate::fit::{least_squares, power_law};
use crate::model_ball::BallModel;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowEnergyFit {
    /// `f(0, 0) = a0`.
    pub f00: f64,
    pub coefficients: Vec<f64>,
    pub fit_window: (f64, f64),
    /// Root-mean-square misfit of `sigma' / lambda^{n-3}`.
    pub residual: f64,
    /// Log-log slope of `|sigma'|` on the window.
    pub raw_slope: f64,
}

const POINTS: usize = 48;
const MAX_CONDITION: f64 = 1e10;

/// Fit the ansatz to samples `(lambda, sigma'(lambda))` of an `n`-dimensional model.
pub fn fit_low_energy_samples(n: u32, lambda: &[f64], sigma_prime: &[f64]) -> Result<LowEnergyFit> {
    if n < 3 {
        return Err(Error::InvalidInput(format!(
            "low-energy ansatz needs n >= 3, got {n}"
        )));
    }
    let q = n as i32 - 3;
    let rows: Vec<Vec<f64>> = lambda
        .iter()
        .map(|x| vec![1.0, *x, x.powi(n as i32 - 2) * x.ln()])
        .collect();
    let y: Vec<f64> = lambda
        .iter()
        .zip(sigma_prime)
        .map(|(x, s)| s / x.powi(q))
        .collect();
    let fit = least_squares(&rows, &y)?;
    if fit.condition > MAX_CONDITION {
        return Err(Error::Fit(format!(
            "ill-conditioned low-energy fit, condition {:e}",
            fit.condition
        )));
    }
    let (raw_slope, _, _) = power_law(lambda, sigma_prime)?;
    let lo = lambda.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = lambda.iter().copied().fold(0.0, f64::max);
    Ok(LowEnergyFit {
        f00: fit.coefficients[0],
        coefficients: fit.coefficients,
        fit_window: (lo, hi),
        residual: fit.residual,
        raw_slope,
    })
}

/// Fit on `(lambda_min, lambda_max]` with geometrically spaced samples; a zero
/// lower end is replaced by `lambda_max / 100`.
pub fn fit_low_energy(
    model: &BallModel,
    window: (f64, f64),
    sigma_tol: f64,
) -> Result<LowEnergyFit> {
    let (lo, hi) = window;
    if !(hi > 0.0 && hi <= 0.5 && lo >= 0.0 && lo < hi) {
        return Err(Error::InvalidInput(format!(
            "low-energy window {window:?} outside (0, 0.5]"
        )));
    }
    let lo = if lo > 0.0 { lo } else { 0.01 * hi };
    if hi / lo < 2.0 {
        return Err(Error::Fit(format!(
            "low-energy window {window:?} too narrow"
        )));
    }
    let xs: Vec<f64> = (0..POINTS)
        .map(|i| lo * (hi / lo).powf(i as f64 / (POINTS - 1) as f64))
        .collect();
    let ys = xs
        .par_iter()
        .map(|x| model.sigma_prime(*x, sigma_tol))
        .collect::<Result<Vec<_>>>()?;
    fit_low_energy_samples(model.dimension, &xs, &ys)
}
