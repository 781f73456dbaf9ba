//! Fourier moments `F_k(t) = integral_0^inf lambda^k sigma'(lambda) e^{i t lambda} d lambda`.
//!
//! The half line is cut into three pieces. `[0, a]` uses panels graded
//! geometrically towards 0; `[a, L]` uses Filon panels of fixed width that are
//! halved until their Legendre tail is negligible; `[L, inf)` uses a fit of
//! `sigma'` to `sum_j c_j lambda^{d-1-j}` on `[L/2, L]` whose power integrals
//! are taken in closed form (Abel summation at infinity).
//!
//! In two dimensions `sigma'` is not integrable in floating point near 0 and
//! the `k = 0` moment on `[0, a]` is integrated by parts against `sigma` with
//! `sigma(0+) = 0`.

use crate::error::{Error, Result};
use crate::fit::least_squares;
use crate::model_ball::BallModel;
use crate::quadrature::{exp_integral_e1, gauss_legendre, FilonPanel};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// A scattering phase derivative on `(0, inf)`.
pub trait SpectralSource: Send + Sync {
    fn dimension(&self) -> u32;
    fn sigma_prime(&self, lambda: f64) -> Result<f64>;
    /// `sigma` with `sigma(0+) = 0`; only used in two dimensions.
    fn phase(&self, lambda: f64) -> Result<f64>;
}

/// A ball model with its mode-sum tolerance.
#[derive(Debug, Clone, Copy)]
pub struct ModelSource {
    pub model: BallModel,
    pub tol: f64,
}

impl SpectralSource for ModelSource {
    fn dimension(&self) -> u32 {
        self.model.dimension
    }
    fn sigma_prime(&self, lambda: f64) -> Result<f64> {
        self.model.sigma_prime(lambda, self.tol)
    }
    fn phase(&self, lambda: f64) -> Result<f64> {
        self.model.phase(lambda, self.tol)
    }
}

/// Closure-backed source, for closed-form densities.
pub struct FnSource<F, G> {
    pub dimension: u32,
    pub sigma_prime: F,
    pub phase: G,
}

impl<F, G> SpectralSource for FnSource<F, G>
where
    F: Fn(f64) -> f64 + Send + Sync,
    G: Fn(f64) -> f64 + Send + Sync,
{
    fn dimension(&self) -> u32 {
        self.dimension
    }
    fn sigma_prime(&self, lambda: f64) -> Result<f64> {
        Ok((self.sigma_prime)(lambda))
    }
    fn phase(&self, lambda: f64) -> Result<f64> {
        Ok((self.phase)(lambda))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BkOptions {
    /// Right end of the graded low-energy piece.
    pub low_edge: f64,
    /// Start of the asymptotic tail.
    pub lambda_max: f64,
    pub panel_width: f64,
    /// Gauss-Legendre nodes per panel.
    pub nodes: usize,
    /// Number of powers in the tail fit.
    pub tail_terms: usize,
    pub grading_levels: u32,
    /// Largest `k` for which moments are prepared.
    pub max_derivative: u32,
    /// Panels are halved until the Legendre tail is below this fraction of the panel mass.
    pub panel_tol: f64,
    /// Relative truncation tolerance of the mode sums.
    pub sigma_tol: f64,
}

impl Default for BkOptions {
    fn default() -> Self {
        Self {
            low_edge: 0.5,
            lambda_max: 60.0,
            panel_width: 1.0,
            nodes: 24,
            tail_terms: 8,
            grading_levels: 48,
            max_derivative: 1,
            panel_tol: 1e-13,
            sigma_tol: 1e-15,
        }
    }
}

#[derive(Debug, Clone)]
struct Sampled {
    a: f64,
    b: f64,
    values: Vec<f64>,
}

#[derive(Debug, Clone)]
struct TailFit {
    powers: Vec<i32>,
    full: Vec<f64>,
    reduced: Vec<f64>,
    /// Root-mean-square misfit relative to `max |sigma'|` on the window.
    residual: f64,
    scale: f64,
}

/// `integral_L^inf lambda^p e^{i t lambda} d lambda` for `t > 0`, Abel-summed.
pub fn power_tail(p: i32, t: f64, l: f64) -> Complex64 {
    let it = Complex64::new(0.0, t);
    let e = Complex64::from_polar(1.0, t * l);
    if p >= 0 {
        let mut acc = -e / it;
        for q in 1..=p {
            acc = -l.powi(q) * e / it - (q as f64 / it) * acc;
        }
        acc
    } else {
        let mut acc = exp_integral_e1(-it * l);
        for q in (p..-1).rev() {
            // acc holds I_{q+1}
            acc = (-it * acc - l.powi(q + 1) * e) / (q + 1) as f64;
        }
        acc
    }
}

/// Sampled `sigma'` (and `sigma` in two dimensions) ready for Fourier moments.
#[derive(Clone)]
pub struct SpectralDensity {
    source: Arc<dyn SpectralSource>,
    pub options: BkOptions,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    low: Vec<Sampled>,
    low_phase: Option<(Vec<Sampled>, f64)>,
    middle: Vec<Sampled>,
    /// Filon panels of `lambda^k sigma'` on `[0, a]` and `[a, L]`, per `k`.
    low_filon: Vec<Vec<FilonPanel>>,
    middle_filon: Vec<Vec<FilonPanel>>,
    phase_filon: Vec<FilonPanel>,
    tail: TailFit,
    /// `|sigma'|` (or `|sigma|`) at the innermost graded node.
    floor: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moment {
    pub value: Complex64,
    pub error: f64,
}

impl std::ops::Add for Moment {
    type Output = Moment;
    fn add(self, o: Moment) -> Moment {
        Moment {
            value: self.value + o.value,
            error: self.error + o.error,
        }
    }
}

fn sample<F>(intervals: &[(f64, f64)], nodes: &[f64], f: F) -> Result<Vec<Sampled>>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    intervals
        .par_iter()
        .map(|&(a, b)| {
            let c = 0.5 * (a + b);
            let h = 0.5 * (b - a);
            let values = nodes
                .iter()
                .map(|x| f(c + h * x))
                .collect::<Result<Vec<_>>>()?;
            Ok(Sampled { a, b, values })
        })
        .collect()
}

impl std::fmt::Debug for SpectralDensity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralDensity")
            .field("dimension", &self.dimension())
            .field("options", &self.options)
            .field("middle_panels", &self.middle.len())
            .finish()
    }
}

impl SpectralDensity {
    pub fn new(model: &BallModel, options: BkOptions) -> Result<Self> {
        let source = ModelSource {
            model: *model,
            tol: options.sigma_tol,
        };
        Self::from_source(Arc::new(source), options)
    }

    pub fn from_source(source: Arc<dyn SpectralSource>, options: BkOptions) -> Result<Self> {
        let o = options;
        let model = source.as_ref();
        if !(o.low_edge > 0.0 && o.lambda_max > 4.0 * o.low_edge && o.panel_width > 0.0) {
            return Err(Error::InvalidInput(format!("spectral options {o:?}")));
        }
        if o.nodes < 8 || o.tail_terms < 2 {
            return Err(Error::InvalidInput("too few nodes or tail terms".into()));
        }
        let (nodes, weights) = gauss_legendre(o.nodes);
        let sp = |x: f64| model.sigma_prime(x);

        let graded: Vec<(f64, f64)> = (0..o.grading_levels)
            .map(|j| {
                (
                    o.low_edge * 0.5f64.powi(j as i32 + 1),
                    o.low_edge * 0.5f64.powi(j as i32),
                )
            })
            .collect();
        let low = sample(&graded, &nodes, sp)?;
        let eps = o.low_edge * 0.5f64.powi(o.grading_levels as i32);
        let low_phase = if model.dimension() == 2 {
            let s = sample(&graded, &nodes, |x| model.phase(x))?;
            Some((s, model.phase(o.low_edge)?))
        } else {
            None
        };
        let floor = match &low_phase {
            Some((s, _)) => s
                .last()
                .map(|p| p.values.iter().fold(0.0, |m: f64, v| m.max(v.abs()))),
            None => low
                .last()
                .map(|p| p.values.iter().fold(0.0, |m: f64, v| m.max(v.abs()))),
        }
        .unwrap_or(0.0)
            * eps;

        // middle panels, halved until resolved
        let n = ((o.lambda_max - o.low_edge) / o.panel_width).ceil() as usize;
        let w = (o.lambda_max - o.low_edge) / n as f64;
        let mut pending: Vec<(f64, f64)> = (0..n)
            .map(|i| (o.low_edge + i as f64 * w, o.low_edge + (i + 1) as f64 * w))
            .collect();
        let mut middle = Vec::new();
        for _ in 0..6 {
            if pending.is_empty() {
                break;
            }
            let s = sample(&pending, &nodes, sp)?;
            pending.clear();
            for p in s {
                let panel = FilonPanel::from_samples(p.a, p.b, &nodes, &weights, &p.values);
                let mass = (p.b - p.a) * p.values.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
                if panel.tail_coefficient() > o.panel_tol * mass && p.b - p.a > 1e-3 * o.panel_width
                {
                    let m = 0.5 * (p.a + p.b);
                    pending.push((p.a, m));
                    pending.push((m, p.b));
                } else {
                    middle.push(p);
                }
            }
        }
        if !pending.is_empty() {
            return Err(Error::Quadrature(format!(
                "{} panels unresolved after halving",
                pending.len()
            )));
        }
        middle.sort_by(|x, y| x.a.total_cmp(&y.a));

        let tail = Self::fit_tail(model, &o)?;
        let mut s = Self {
            source: source.clone(),
            options: o,
            nodes,
            weights,
            low,
            low_phase,
            middle,
            low_filon: Vec::new(),
            middle_filon: Vec::new(),
            phase_filon: Vec::new(),
            tail,
            floor,
        };
        s.build_filon();
        Ok(s)
    }

    fn fit_tail(model: &dyn SpectralSource, o: &BkOptions) -> Result<TailFit> {
        let d = model.dimension() as i32;
        let m = 6 * o.tail_terms;
        let (lo, hi) = (0.5 * o.lambda_max, o.lambda_max);
        let xs: Vec<f64> = (0..m)
            .map(|i| {
                let c = (std::f64::consts::PI * (i as f64 + 0.5) / m as f64).cos();
                0.5 * (lo + hi) + 0.5 * (hi - lo) * c
            })
            .collect();
        let ys = xs
            .par_iter()
            .map(|x| model.sigma_prime(*x))
            .collect::<Result<Vec<_>>>()?;
        let scale = ys.iter().fold(0.0, |a: f64, v| a.max(v.abs()));
        let powers: Vec<i32> = (0..o.tail_terms as i32).map(|j| d - 1 - j).collect();
        let solve = |k: usize| -> Result<(Vec<f64>, f64)> {
            let rows: Vec<Vec<f64>> = xs
                .iter()
                .map(|x| powers[..k].iter().map(|p| x.powi(*p)).collect())
                .collect();
            let f = least_squares(&rows, &ys)?;
            Ok((f.coefficients, f.residual))
        };
        let (full, residual) = solve(o.tail_terms)?;
        let (reduced, _) = solve(o.tail_terms - 1)?;
        Ok(TailFit {
            powers,
            full,
            reduced,
            residual: residual / scale,
            scale,
        })
    }

    fn build_filon(&mut self) {
        let (x, w) = (&self.nodes, &self.weights);
        let panels = |set: &[Sampled], k: u32| -> Vec<FilonPanel> {
            set.iter()
                .map(|p| {
                    let c = 0.5 * (p.a + p.b);
                    let h = 0.5 * (p.b - p.a);
                    let v: Vec<f64> = p
                        .values
                        .iter()
                        .zip(x)
                        .map(|(v, xk)| v * (c + h * xk).powi(k as i32))
                        .collect();
                    FilonPanel::from_samples(p.a, p.b, x, w, &v)
                })
                .collect()
        };
        self.low_filon = (0..=self.options.max_derivative)
            .map(|k| panels(&self.low, k))
            .collect();
        self.middle_filon = (0..=self.options.max_derivative)
            .map(|k| panels(&self.middle, k))
            .collect();
        if let Some((s, _)) = &self.low_phase {
            self.phase_filon = panels(s, 0);
        }
    }

    pub fn dimension(&self) -> u32 {
        self.source.dimension()
    }

    pub fn sigma_prime(&self, lambda: f64) -> Result<f64> {
        self.source.sigma_prime(lambda)
    }

    /// Relative misfit of the asymptotic tail fit.
    pub fn tail_residual(&self) -> f64 {
        self.tail.residual
    }

    /// Number of Filon panels on `[a, L]`.
    pub fn middle_panels(&self) -> usize {
        self.middle.len()
    }

    fn filon_sum(panels: &[FilonPanel], t: f64) -> Result<Moment> {
        let mut m = Moment {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
        };
        for p in panels {
            m.value += p.fourier(t)?;
            m.error += p.tail_coefficient();
        }
        Ok(m)
    }

    fn check_k(&self, k: u32, t: f64) -> Result<()> {
        if k > self.options.max_derivative {
            return Err(Error::InvalidInput(format!(
                "moment k = {k} beyond the prepared {}",
                self.options.max_derivative
            )));
        }
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::InvalidInput(format!("t = {t}")));
        }
        Ok(())
    }

    /// Moment over the low-energy piece `[0, a]`.
    pub fn low_moment(&self, k: u32, t: f64) -> Result<Moment> {
        self.check_k(k, t)?;
        let a = self.options.low_edge;
        match (&self.low_phase, k) {
            (Some((_, sigma_a)), 0) => {
                // integral sigma' e^{itx} = sigma(a) e^{ita} - i t integral sigma e^{itx}
                let inner = Self::filon_sum(&self.phase_filon, t)?;
                Ok(Moment {
                    value: *sigma_a * Complex64::from_polar(1.0, t * a)
                        - Complex64::new(0.0, t) * inner.value,
                    error: t * (inner.error + self.floor),
                })
            }
            _ => {
                let mut m = Self::filon_sum(&self.low_filon[k as usize], t)?;
                let eps = a * 0.5f64.powi(self.options.grading_levels as i32);
                m.error += self.floor * eps.powi(k as i32);
                Ok(m)
            }
        }
    }

    /// Moment over `[a, L]`.
    pub fn middle_moment(&self, k: u32, t: f64) -> Result<Moment> {
        self.check_k(k, t)?;
        Self::filon_sum(&self.middle_filon[k as usize], t)
    }

    /// Moment over `[L, inf)` from the fitted powers.
    pub fn tail_moment(&self, k: u32, t: f64) -> Result<Moment> {
        self.check_k(k, t)?;
        let l = self.options.lambda_max;
        let sum = |c: &[f64]| -> Complex64 {
            c.iter()
                .zip(&self.tail.powers)
                .map(|(c, p)| *c * power_tail(p + k as i32, t, l))
                .sum()
        };
        let full = sum(&self.tail.full);
        let reduced = sum(&self.tail.reduced);
        // misfit of size r on the window contributes about r L^k / t after one integration by parts
        let misfit = 2.0 * self.tail.residual * self.tail.scale * l.powi(k as i32) / t;
        Ok(Moment {
            value: full,
            error: (full - reduced).norm() + misfit,
        })
    }

    /// `F_k(t)` with an error estimate.
    pub fn moment(&self, k: u32, t: f64) -> Result<Moment> {
        Ok(self.low_moment(k, t)? + self.middle_moment(k, t)? + self.tail_moment(k, t)?)
    }

    /// Filon panels of `g(x) x^k sigma'(x)` on `[a, b]`.
    pub fn weighted_panels<G>(&self, g: G, a: f64, b: f64, k: u32) -> Result<Vec<FilonPanel>>
    where
        G: Fn(f64) -> f64 + Sync,
    {
        let o = &self.options;
        let src = self.source.as_ref();
        let n = ((b - a) / (0.25 * o.panel_width)).ceil().max(1.0) as usize;
        let w = (b - a) / n as f64;
        let iv: Vec<(f64, f64)> = (0..n)
            .map(|i| (a + i as f64 * w, a + (i + 1) as f64 * w))
            .collect();
        let s = sample(&iv, &self.nodes, |x| {
            Ok(g(x) * x.powi(k as i32) * src.sigma_prime(x)?)
        })?;
        Ok(s.iter()
            .map(|p| FilonPanel::from_samples(p.a, p.b, &self.nodes, &self.weights, &p.values))
            .collect())
    }

    /// `integral f(x) e^{i t x} dx` over a set of panels, with the summed Legendre tails.
    pub fn panel_moment(panels: &[FilonPanel], t: f64) -> Result<Moment> {
        Self::filon_sum(panels, t)
    }
}
