//! Heat trace `integral_0^inf e^{-t lambda^2} sigma'(lambda) d lambda`.

use super::spectral::SpectralSource;
use super::{Side, TraceSample};
use crate::error::{Error, Result};
use crate::quadrature::integrate;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HeatOptions {
    /// Upper limit in `s = lambda sqrt(t)`.
    pub s_max: f64,
    pub quad_tol: f64,
    /// Required relative change under refinement near `s = 0`.
    pub refine_tol: f64,
}

impl Default for HeatOptions {
    fn default() -> Self {
        Self {
            s_max: 7.0,
            quad_tol: 1e-12,
            refine_tol: 1e-8,
        }
    }
}

/// `integral_0^{s_max} e^{-s^2} sigma'(s / sqrt t) ds / sqrt t` with a split at `s = split`.
fn integral(model: &dyn SpectralSource, t: f64, split: f64, o: &HeatOptions) -> Result<(f64, f64)> {
    let rt = t.sqrt();
    if model.dimension() == 2 {
        // sigma' ~ 1/(lambda log^2 lambda) at 0; move the weight onto sigma below the split:
        // integral_0^c e^{-s^2} sigma'(s/rt) ds/rt = e^{-c^2} sigma(c/rt) + 2 integral_0^c s e^{-s^2} sigma(s/rt) ds
        let c = split.max(1e-300);
        let lam_c = c / rt;
        let by_parts = (-c * c).exp() * model.phase(lam_c)?;
        let (inner, e1) = integrate(
            |s| Ok(2.0 * s * (-s * s).exp() * model.phase(s / rt)?),
            0.0,
            c,
            o.quad_tol,
            o.quad_tol,
            4000,
        )?;
        let (outer, e2) = integrate(
            |s| Ok((-s * s).exp() * model.sigma_prime(s / rt)? / rt),
            c,
            o.s_max,
            o.quad_tol,
            o.quad_tol,
            4000,
        )?;
        return Ok((by_parts + inner + outer, e1 + e2));
    }
    let f = |s: f64| -> Result<f64> {
        if s == 0.0 {
            return Ok(0.0);
        }
        Ok((-s * s).exp() * model.sigma_prime(s / rt)? / rt)
    };
    let (a, e1) = integrate(f, 0.0, split, o.quad_tol, o.quad_tol, 4000)?;
    let (b, e2) = integrate(f, split, o.s_max, o.quad_tol, o.quad_tol, 4000)?;
    Ok((a + b, e1 + e2))
}

/// Heat trace at `t > 0`; the eigenvalue sum is empty for the ball models.
pub fn heat_trace(
    model: &dyn SpectralSource,
    t: f64,
    options: &HeatOptions,
) -> Result<TraceSample> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidInput(format!("heat trace at t = {t}")));
    }
    let mut split = 1.0;
    let (mut prev, mut err) = integral(model, t, split, options)?;
    for _ in 0..8 {
        split *= 0.1;
        let (v, e) = integral(model, t, split, options)?;
        let change = (v - prev).abs();
        prev = v;
        err = e + change;
        if change <= options.refine_tol * v.abs() {
            return Ok(TraceSample {
                t,
                derivative: 0,
                value: v,
                error: err,
                side: Side::Heat,
                components: None,
            });
        }
    }
    Err(Error::Quadrature(format!(
        "heat trace at t = {t} not stable under refinement near 0 (last error {err:e})"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model_ball::BallModel;
    use crate::traces::spectral::{FnSource, ModelSource};

    fn source(d: u32, r: f64) -> ModelSource {
        ModelSource {
            model: BallModel::dirichlet(d, r).unwrap(),
            tol: 1e-15,
        }
    }

    #[test]
    fn radius_scaling() {
        // sigma'_R(lambda) = R sigma'_1(lambda R) gives H_R(t) = H_1(t / R^2)
        let o = HeatOptions::default();
        let a = heat_trace(&source(3, 2.0), 8.0, &o).unwrap();
        let b = heat_trace(&source(3, 1.0), 2.0, &o).unwrap();
        assert!(
            (a.value - b.value).abs() < 1e-9 * b.value.abs(),
            "{a:?} {b:?}"
        );
    }

    #[test]
    fn linear_in_sigma_prime() {
        let o = HeatOptions::default();
        let m = source(4, 1.0);
        let scaled = FnSource {
            dimension: 4,
            sigma_prime: |x: f64| -2.5 * m.sigma_prime(x).unwrap(),
            phase: |x: f64| -2.5 * m.phase(x).unwrap(),
        };
        let a = heat_trace(&m, 30.0, &o).unwrap();
        let b = heat_trace(&scaled, 30.0, &o).unwrap();
        assert!((b.value + 2.5 * a.value).abs() < 1e-12 * a.value.abs());
    }

    #[test]
    fn gaussian_moment() {
        // sigma' = lambda: integral lambda e^{-t lambda^2} = 1/(2t)
        let s = FnSource {
            dimension: 4,
            sigma_prime: |x: f64| x,
            phase: |x: f64| 0.5 * x * x,
        };
        let h = heat_trace(&s, 7.0, &HeatOptions::default()).unwrap();
        assert!((h.value - 1.0 / 14.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_nonpositive_time() {
        assert!(heat_trace(&source(4, 1.0), 0.0, &HeatOptions::default()).is_err());
    }

    #[test]
    fn two_dimensional_trace_is_finite() {
        let a = heat_trace(&source(2, 1.0), 50.0, &HeatOptions::default()).unwrap();
        assert!(
            a.value.is_finite() && a.error < 1e-6 * a.value.abs().max(1e-3),
            "{a:?}"
        );
    }
}
