//! Smeared form of the trace formula: `(u phi)^(lambda)` against
//! `sum m(zeta) phi^(lambda - zeta)` for a test function `phi` on `(0, inf)`.

use super::{wave_trace_bk, CutoffFunction, CutoffKind, ResonanceTail, SpectralDensity};
use crate::error::{Error, Result};
use crate::fit::power_law;
use crate::quadrature::gauss_legendre;
use crate::resonance_finder::ResonanceSet;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmearedReport {
    pub phi: String,
    pub lambda: Vec<f64>,
    pub left: Vec<Complex64>,
    pub right: Vec<Complex64>,
    pub discrepancy: Vec<f64>,
    /// Left quadrature error plus the truncated resonance tail.
    pub bound: Vec<f64>,
    pub max_discrepancy: f64,
    /// Log-log slope of the discrepancy over the grid.
    pub decay_exponent: Option<f64>,
}

const NODES: usize = 16;

/// `sum m(zeta) phi^(lambda - zeta)` over the stored resonances.
pub fn resonance_transform(set: &ResonanceSet, phi: &CutoffFunction, lambda: f64) -> Complex64 {
    set.entries
        .iter()
        .map(|e| phi.fourier(Complex64::new(lambda, 0.0) - e.project()) * e.total_multiplicity())
        .sum()
}

/// Composite Gauss-Legendre nodes and weights on the support of `phi`, times `phi`.
fn weighted_nodes(phi: &CutoffFunction, panels: usize) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(NODES);
    let (a, b) = phi.support();
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * NODES);
    for p in 0..panels {
        let c = a + (p as f64 + 0.5) * h;
        for (xk, wk) in x.iter().zip(&w) {
            let t = c + 0.5 * h * xk;
            out.push((t, 0.5 * h * wk * phi.eval(t)));
        }
    }
    out
}

/// Both sides on `lambda_grid`, with `u` from the Birman-Krein side.
pub fn smeared_check(
    density: &SpectralDensity,
    set: &ResonanceSet,
    phi: &CutoffFunction,
    lambda_grid: &[f64],
    panels: usize,
) -> Result<SmearedReport> {
    if !matches!(phi.kind, CutoffKind::Test { .. }) {
        return Err(Error::InvalidInput(format!(
            "{} is not supported in (0, inf)",
            phi.id()
        )));
    }
    let tail = if set.is_empty() {
        None
    } else {
        Some(ResonanceTail::from_set(set, 8)?)
    };
    let sample = |panels: usize| -> Result<Vec<(f64, f64, f64, f64)>> {
        weighted_nodes(phi, panels)
            .par_iter()
            .map(|&(t, w)| {
                let u = wave_trace_bk(density, t, 0)?;
                Ok((t, w, u.value, u.error))
            })
            .collect()
    };
    let coarse = sample(panels)?;
    let fine = sample(2 * panels)?;
    let transform = |s: &[(f64, f64, f64, f64)], lam: f64| -> (Complex64, f64) {
        let mut v = Complex64::new(0.0, 0.0);
        let mut e = 0.0;
        for (t, w, u, err) in s {
            v += Complex64::from_polar(w * u, -lam * t);
            e += w.abs() * err;
        }
        (v, e)
    };
    let tail_weight: f64 = match &tail {
        Some(tl) => fine
            .iter()
            .map(|(t, w, _, _)| w.abs() * tl.bound(*t, 0))
            .sum(),
        None => 0.0,
    };

    let mut report = SmearedReport {
        phi: phi.id(),
        lambda: lambda_grid.to_vec(),
        left: Vec::new(),
        right: Vec::new(),
        discrepancy: Vec::new(),
        bound: Vec::new(),
        max_discrepancy: 0.0,
        decay_exponent: None,
    };
    let rights: Vec<Complex64> = lambda_grid
        .par_iter()
        .map(|&l| resonance_transform(set, phi, l))
        .collect();
    for (&lam, right) in lambda_grid.iter().zip(rights) {
        let (left, err) = transform(&fine, lam);
        let (left_coarse, _) = transform(&coarse, lam);
        let disc = (left - right).norm();
        report.left.push(left);
        report.right.push(right);
        report.discrepancy.push(disc);
        report
            .bound
            .push(err + (left - left_coarse).norm() + tail_weight);
        report.max_discrepancy = report.max_discrepancy.max(disc);
    }
    if lambda_grid.len() >= 2 {
        report.decay_exponent = power_law(lambda_grid, &report.discrepancy)
            .ok()
            .map(|(p, _, _)| p);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resonance_finder::{Resonance, SearchRegion};

    #[test]
    fn empty_set_gives_zero() {
        let set = ResonanceSet::empty(
            3,
            SearchRegion::UpperHalfPlane {
                r_min: 0.1,
                r_max: 10.0,
            },
        );
        let phi = CutoffFunction::test(2.0, 5.0).unwrap();
        for l in [1.0, 7.5, 30.0] {
            assert_eq!(resonance_transform(&set, &phi, l), Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn single_resonance_transform() {
        // u = e^{i zeta t} has (u phi)^(lambda) = phi^(lambda - zeta)
        let z = Complex64::new(4.0, 0.5);
        let mut set = ResonanceSet::empty(
            3,
            SearchRegion::UpperHalfPlane {
                r_min: 0.1,
                r_max: 10.0,
            },
        );
        set.entries.push(Resonance {
            r: z.norm(),
            theta: z.arg(),
            multiplicity: 1,
            mode: 0,
            weight: 1,
        });
        let phi = CutoffFunction::test(1.0, 4.0).unwrap();
        let lam = 3.0;
        let direct: Complex64 = weighted_nodes(&phi, 64)
            .iter()
            .map(|(t, w)| (Complex64::i() * z * *t).exp() * Complex64::from_polar(*w, -lam * t))
            .sum();
        assert!((resonance_transform(&set, &phi, lam) - direct).norm() < 1e-10);
    }
}
