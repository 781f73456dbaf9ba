//! Linear least squares and power-law fits.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// Result of a linear least-squares fit.
#[derive(Debug, Clone)]
pub struct LinearFit {
    pub coefficients: Vec<f64>,
    /// Root-mean-square residual.
    pub residual: f64,
    /// Ratio of the largest to smallest singular value of the scaled design.
    pub condition: f64,
}

/// Minimise `|A c - y|` for rows of `A` given as basis-function values.
///
/// Columns are scaled to unit norm before the SVD so that the condition
/// number reflects the basis and not its units.
pub fn least_squares(rows: &[Vec<f64>], y: &[f64]) -> Result<LinearFit> {
    let m = rows.len();
    let n = rows.first().map(|r| r.len()).unwrap_or(0);
    if m < n || n == 0 {
        return Err(Error::Fit(format!("{m} samples for {n} unknowns")));
    }
    let a = DMatrix::from_fn(m, n, |i, j| rows[i][j]);
    let scale: Vec<f64> = (0..n)
        .map(|j| {
            let s = a.column(j).norm();
            if s > 0.0 {
                s
            } else {
                1.0
            }
        })
        .collect();
    let scaled = DMatrix::from_fn(m, n, |i, j| a[(i, j)] / scale[j]);
    let b = DVector::from_column_slice(y);
    let svd = scaled.svd(true, true);
    let sv = &svd.singular_values;
    let max = sv.max();
    let min = sv.min();
    if !(min > 0.0) || !max.is_finite() {
        return Err(Error::Fit("singular design matrix".into()));
    }
    let sol = svd.solve(&b, 0.0).map_err(|e| Error::Fit(e.to_string()))?;
    let coefficients: Vec<f64> = (0..n).map(|j| sol[j] / scale[j]).collect();
    let res = &a * DVector::from_column_slice(&coefficients) - &b;
    Ok(LinearFit {
        coefficients,
        residual: (res.norm_squared() / m as f64).sqrt(),
        condition: max / min,
    })
}

/// Fit `y = A x^p` by least squares on `(ln x, ln |y|)`; returns `(p, A, rms residual in ln)`.
pub fn power_law(x: &[f64], y: &[f64]) -> Result<(f64, f64, f64)> {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| **a > 0.0 && **b != 0.0 && b.is_finite())
        .map(|(a, b)| (a.ln(), b.abs().ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::Fit("power law needs two usable points".into()));
    }
    let rows: Vec<Vec<f64>> = pts.iter().map(|(lx, _)| vec![1.0, *lx]).collect();
    let ly: Vec<f64> = pts.iter().map(|(_, ly)| *ly).collect();
    let fit = least_squares(&rows, &ly)?;
    Ok((fit.coefficients[1], fit.coefficients[0].exp(), fit.residual))
}
