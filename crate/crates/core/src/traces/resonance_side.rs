//! Resonance side of the trace formula: a truncated resonance sum, the
//! low-energy integral against a bump `psi`, and a bound on the truncated tail.

use super::{i_pow, Components, CutoffFunction, Side, SpectralDensity, TraceSample};
use crate::error::{Error, Result};
use crate::fit::power_law;
use crate::quadrature::{integrate, FilonPanel};
use crate::resonance_finder::ResonanceSet;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ResonanceSideOptions {
    /// A tail bound above this value is reported as unusable.
    pub max_tail: f64,
    /// Bins over `[r_max/2, r_max]` for the frontier imaginary parts.
    pub bins: usize,
}

impl Default for ResonanceSideOptions {
    fn default() -> Self {
        Self {
            max_tail: 1.0,
            bins: 8,
        }
    }
}

/// Model of the resonances beyond `r_max`: `N(r) <= A r^alpha` and
/// `Im lambda >= B r^beta`, both fitted on `[r_max/2, r_max]`.
///
/// Two bounds are derived. The frontier bound assumes every resonance beyond
/// `r_max` sits at the minimal imaginary part `B r^beta`. The shell bound
/// copies the outermost shell `[r_max/2, r_max]` to the shells
/// `[2^{j-1} r_max, 2^j r_max]`, multiplying counts by `2^{j alpha}` and
/// imaginary parts by `2^{j beta'}` with `beta' = SHELL_MARGIN * beta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonanceTail {
    pub r_max: f64,
    pub alpha: f64,
    pub a: f64,
    pub beta: f64,
    pub b: f64,
    /// `(|lambda|, Im lambda, m)` in the outermost shell.
    shell: Vec<(f64, f64, f64)>,
}

/// Safety factor on the imaginary-part growth used by the shell bound.
pub const SHELL_MARGIN: f64 = 0.85;

impl ResonanceTail {
    pub fn from_set(set: &ResonanceSet, bins: usize) -> Result<Self> {
        let (_, r_max) = set.region.radii();
        let r0 = 0.5 * r_max;
        let alpha = set.counting_exponent(r0, r_max)?;
        // the largest A over the window keeps N(r) <= A r^alpha there
        let a = (0..=32)
            .map(|i| {
                let r = r0 + (r_max - r0) * i as f64 / 32.0;
                set.counting(r) / r.powf(alpha)
            })
            .fold(0.0, f64::max);

        let width = (r_max - r0) / bins as f64;
        let mut rs = Vec::new();
        let mut ims = Vec::new();
        for j in 0..bins {
            let lo = r0 + j as f64 * width;
            let hi = lo + width;
            let m = set
                .entries
                .iter()
                .filter(|e| e.r >= lo && e.r < hi)
                .map(|e| e.project().im)
                .fold(f64::INFINITY, f64::min);
            if m.is_finite() && m > 0.0 {
                rs.push(hi);
                ims.push(m);
            }
        }
        if rs.len() < 2 {
            return Err(Error::Fit(
                "too few resonances near the truncation radius".into(),
            ));
        }
        let (beta, _, _) = power_law(&rs, &ims)?;
        let beta = beta.max(0.0);
        let b = rs
            .iter()
            .zip(&ims)
            .map(|(r, m)| m / r.powf(beta))
            .fold(f64::INFINITY, f64::min);
        let shell = set
            .entries
            .iter()
            .filter(|e| e.r >= r0 && e.r < r_max)
            .map(|e| (e.r, e.project().im, e.total_multiplicity()))
            .collect();
        Ok(Self {
            r_max,
            alpha,
            a,
            beta,
            b,
            shell,
        })
    }

    /// Bound on `sum_{|lambda| > r_max} m |lambda|^k e^{-t Im lambda}` from the shell model.
    pub fn bound(&self, t: f64, k: u32) -> f64 {
        let beta = SHELL_MARGIN * self.beta;
        if !(beta > 0.0) || !(t > 0.0) {
            return f64::INFINITY;
        }
        let mut total = 0.0;
        let mut prev = f64::INFINITY;
        for j in 1..400 {
            let grow = 2f64.powi(j);
            let im_scale = grow.powf(beta);
            let count = grow.powf(self.alpha);
            let term: f64 = self
                .shell
                .iter()
                .map(|(r, im, m)| m * (r * grow).powi(k as i32) * (-t * im * im_scale).exp())
                .sum::<f64>()
                * count;
            total += term;
            if term < 1e-17 * total || (term == 0.0 && j > 1) {
                return total;
            }
            if term > prev && j > 40 {
                break;
            }
            prev = term;
        }
        f64::INFINITY
    }

    /// Bound assuming every resonance beyond `r_max` has the frontier imaginary part.
    pub fn frontier_bound(&self, t: f64, k: u32) -> f64 {
        if !(self.beta > 0.0) || !(self.b > 0.0) || !(t > 0.0) {
            return f64::INFINITY;
        }
        // u = t B r^beta turns the integral into A alpha / beta (tB)^{-s} Gamma(s, u0)
        let s = (k as f64 + self.alpha) / self.beta;
        let tb = t * self.b;
        let u0 = tb * self.r_max.powf(self.beta);
        let peak = u0.max(s - 1.0);
        let shift = (s - 1.0) * peak.ln() - peak;
        let end = peak + 60.0 + 12.0 * s.sqrt();
        let g = integrate(
            |u| Ok(((s - 1.0) * u.ln() - u - shift).exp()),
            u0,
            end,
            0.0,
            1e-10,
            2000,
        );
        let Ok((g, _)) = g else {
            return f64::INFINITY;
        };
        let ln = (self.a * self.alpha / self.beta).ln() - s * tb.ln() + shift + g.ln();
        ln.exp()
    }

    /// Smallest `t` with `bound(t, k) <= max`, by bisection on `[1e-3, 1e4]`.
    pub fn min_valid_t(&self, k: u32, max: f64) -> f64 {
        let (mut lo, mut hi) = (1e-3, 1e4);
        if self.bound(hi, k) > max {
            return f64::INFINITY;
        }
        for _ in 0..100 {
            let mid = (lo * hi).sqrt();
            if self.bound(mid, k) > max {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }
}

/// Prepared resonance side for one resonance set and one cutoff.
pub struct ResonanceSide<'a> {
    pub set: &'a ResonanceSet,
    pub tail: ResonanceTail,
    pub options: ResonanceSideOptions,
    pub zero_multiplicity: f64,
    psi: Option<(&'a CutoffFunction, &'a SpectralDensity)>,
    /// Filon panels of `psi lambda^k sigma'` beyond the flat part, per `k`.
    panels: Vec<Vec<FilonPanel>>,
}

impl<'a> ResonanceSide<'a> {
    /// Without `psi` only the resonance sum and `m(0)` remain.
    pub fn new(
        set: &'a ResonanceSet,
        psi: Option<(&'a CutoffFunction, &'a SpectralDensity)>,
        zero_multiplicity: f64,
        options: ResonanceSideOptions,
    ) -> Result<Self> {
        let tail = ResonanceTail::from_set(set, options.bins)?;
        let mut panels = Vec::new();
        if let Some((psi, density)) = psi {
            let a = density.options.low_edge;
            if psi.flat_radius() < a {
                return Err(Error::InvalidInput(format!(
                    "cutoff {} must equal 1 on [0, {a}]",
                    psi.id()
                )));
            }
            let (_, b) = psi.support();
            for k in 0..=density.options.max_derivative {
                panels.push(density.weighted_panels(|x| psi.eval(x), a, b, k)?);
            }
        }
        Ok(Self {
            set,
            tail,
            options,
            zero_multiplicity,
            psi,
            panels,
        })
    }

    pub fn psi_id(&self) -> String {
        self.psi
            .map(|(p, _)| p.id())
            .unwrap_or_else(|| "none".into())
    }

    /// `sum m (i lambda)^k e^{i lambda t}` over the stored resonances.
    pub fn resonance_sum(&self, t: f64, k: u32) -> f64 {
        let ik = i_pow(k);
        self.set
            .entries
            .iter()
            .map(|e| {
                let z = e.project();
                (ik * z.powu(k) * (Complex64::i() * z * t).exp() * e.total_multiplicity()).re
            })
            .sum()
    }

    /// `k`-th derivative of the resonance side at `t > 0`.
    pub fn evaluate(&self, t: f64, k: u32) -> Result<TraceSample> {
        if !(t > 0.0) {
            return Err(Error::InvalidInput(format!("t = {t}")));
        }
        let bound = self.tail.bound(t, k);
        if !(bound <= self.options.max_tail) {
            return Err(Error::TailBound {
                t_min: self.tail.min_valid_t(k, self.options.max_tail),
            });
        }
        let sum = self.resonance_sum(t, k);
        let (low, low_err) = match self.psi {
            Some((_, density)) => {
                let m = density.low_moment(k, t)?
                    + SpectralDensity::panel_moment(&self.panels[k as usize], t)?;
                (2.0 * (i_pow(k) * m.value).re, 2.0 * m.error)
            }
            None => (0.0, 0.0),
        };
        let m0 = if k == 0 { self.zero_multiplicity } else { 0.0 };
        Ok(TraceSample {
            t,
            derivative: k,
            value: sum + low + m0,
            error: bound + low_err,
            side: Side::ResonanceSum,
            components: Some(Components {
                resonance_sum: sum,
                low_energy: low,
                zero_multiplicity: m0,
                tail_bound: bound,
            }),
        })
    }
}

/// One-shot resonance side at a single `t`.
pub fn wave_trace_resonance_side(
    set: &ResonanceSet,
    t: f64,
    psi: Option<(&CutoffFunction, &SpectralDensity)>,
    zero_multiplicity: f64,
) -> Result<TraceSample> {
    ResonanceSide::new(set, psi, zero_multiplicity, ResonanceSideOptions::default())?.evaluate(t, 0)
}
