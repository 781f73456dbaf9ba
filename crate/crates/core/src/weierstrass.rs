//! Weierstrass products over resonance sets and the holomorphic residual of
//! the scattering determinant.
//!
//! With `P(lambda) = prod E(lambda / zeta, p)^{m(zeta)}`, the residual is
//! `g = log s - log P(-lambda) + log P(lambda)`. It is extended to the left
//! half of the cone as an odd function.

use crate::error::{Error, Result};
use crate::fit::power_law;
use crate::model_ball::BallModel;
use crate::resonance_finder::ResonanceSet;
use crate::special_functions::{to_cut_plane, LogPoint};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

/// `E(z, p) = (1 - z) exp(z + z^2/2 + ... + z^p/p)`.
pub fn elementary_factor(z: Complex64, p: u32) -> Complex64 {
    (Complex64::new(1.0, 0.0) - z) * polynomial_part(z, p).exp()
}

fn polynomial_part(z: Complex64, p: u32) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut zk = Complex64::new(1.0, 0.0);
    for k in 1..=p {
        zk *= z;
        acc += zk / k as f64;
    }
    acc
}

/// A logarithm split into its principal value and a winding number:
/// the represented value is `principal + 2 pi i winding`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WoundLog {
    pub principal: Complex64,
    pub winding: i64,
}

impl WoundLog {
    fn from_value(v: Complex64) -> Self {
        let winding = ((v.im + PI) / TAU).floor() as i64;
        let principal = Complex64::new(v.re, v.im - TAU * winding as f64);
        Self { principal, winding }
    }

    pub fn value(&self) -> Complex64 {
        self.principal + Complex64::new(0.0, TAU * self.winding as f64)
    }
}

/// `log E(z, p)`.
///
/// Inside the unit disc this is the branch continuous from `log E(0, p) = 0`,
/// summed as `-sum_{k > p} z^k / k` when `|z| < 1/2`. Outside it uses the
/// principal `log(1 - z)`.
pub fn log_elementary_factor(z: Complex64, p: u32) -> WoundLog {
    let v = if z.norm() < 0.5 {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut zk = z.powu(p);
        let mut k = p;
        loop {
            k += 1;
            zk *= z;
            let term = zk / k as f64;
            acc -= term;
            if term.norm() <= 1e-18 * acc.norm() || k > p + 200 {
                break;
            }
        }
        acc
    } else {
        (Complex64::new(1.0, 0.0) - z).ln() + polynomial_part(z, p)
    };
    WoundLog::from_value(v)
}

/// `d/dz log E(z, p) = -z^p / (1 - z)`.
fn log_elementary_derivative(z: Complex64, p: u32) -> Complex64 {
    -z.powu(p) / (Complex64::new(1.0, 0.0) - z)
}

/// Value of a product at one point, in log form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductValue {
    /// Sum of the per-factor logarithms; `None` at a zero of the product.
    pub log: Option<Complex64>,
    /// Bound on `|log|` of the omitted factors beyond the truncation radius.
    pub tail_bound: f64,
}

impl ProductValue {
    pub fn value(&self) -> Complex64 {
        self.log.map_or(Complex64::new(0.0, 0.0), |l| l.exp())
    }

    /// The omitted tail may change the value by more than `1e-6` relative.
    pub fn tail_warning(&self) -> bool {
        self.tail_bound > 1e-6
    }
}

/// `prod E(lambda / zeta, p)^{m(zeta)}` over zeros up to a truncation radius.
#[derive(Debug, Clone, PartialEq)]
pub struct WeierstrassProduct {
    pub genus: u32,
    pub truncation_radius: f64,
    /// Zeros as points of the identified plane with multiplicity, sorted by
    /// modulus and then by angle.
    zeros: Vec<(Complex64, f64)>,
    /// `N(r) ~ a r^alpha` beyond the truncation radius.
    counting: Option<(f64, f64)>,
}

impl WeierstrassProduct {
    /// Product over `zeros` with `|zeta| <= truncation_radius` and the default genus `d + 1`.
    pub fn new(zeros: &ResonanceSet, truncation_radius: f64) -> Result<Self> {
        Self::with_genus(zeros, zeros.dimension + 1, truncation_radius)
    }

    pub fn with_genus(zeros: &ResonanceSet, genus: u32, truncation_radius: f64) -> Result<Self> {
        let mut pts = Vec::new();
        for e in zeros.entries.iter().filter(|e| e.r <= truncation_radius) {
            let z = if zeros.region.is_cone() {
                to_cut_plane(e.location()).ok_or_else(|| {
                    Error::Domain(format!("resonance off the identified plane: {e:?}"))
                })?
            } else {
                e.project()
            };
            if z.im.abs() <= 1e-12 * z.norm() {
                return Err(Error::InvalidInput(format!("real zero {z}")));
            }
            pts.push((z, e.total_multiplicity()));
        }
        let (_, r1) = zeros.region.radii();
        let hi = truncation_radius.min(r1);
        let counting = if zeros.counting(0.5 * hi) > 0.0 {
            let rs: Vec<f64> = (0..16)
                .map(|i| 0.5 * hi * 2f64.powf(i as f64 / 15.0))
                .collect();
            let ns: Vec<f64> = rs.iter().map(|r| zeros.counting(*r)).collect();
            power_law(&rs, &ns).ok().map(|(alpha, a, _)| (a, alpha))
        } else {
            None
        };
        Ok(Self::from_points(pts, genus, truncation_radius, counting))
    }

    /// Product over explicit points of the plane.
    pub fn from_points(
        mut zeros: Vec<(Complex64, f64)>,
        genus: u32,
        truncation_radius: f64,
        counting: Option<(f64, f64)>,
    ) -> Self {
        zeros.retain(|(z, _)| z.norm() <= truncation_radius);
        zeros.sort_by(|a, b| {
            a.0.norm()
                .total_cmp(&b.0.norm())
                .then(a.0.arg().total_cmp(&b.0.arg()))
        });
        Self {
            genus,
            truncation_radius,
            zeros,
            counting,
        }
    }

    pub fn zeros(&self) -> &[(Complex64, f64)] {
        &self.zeros
    }

    /// Bound on the omitted part of `log P` at `|lambda|`, from the fitted counting function.
    pub fn tail_bound(&self, lambda_abs: f64) -> f64 {
        let Some((a, alpha)) = self.counting else {
            return 0.0;
        };
        let p1 = self.genus as f64 + 1.0;
        let r = self.truncation_radius;
        if lambda_abs >= 0.5 * r || alpha >= p1 {
            return f64::INFINITY;
        }
        // |log E(z, p)| <= 2 |z|^{p+1} for |z| <= 1/2, integrated against dN
        2.0 * a * alpha * lambda_abs.powf(p1) * r.powf(alpha - p1) / (p1 - alpha)
    }

    /// `log P(lambda)` at a point of the plane.
    pub fn log_value(&self, lambda: Complex64) -> ProductValue {
        let mut acc = Complex64::new(0.0, 0.0);
        for (zeta, m) in &self.zeros {
            if (lambda - zeta).norm() <= 1e-12 * zeta.norm() {
                return ProductValue {
                    log: None,
                    tail_bound: self.tail_bound(lambda.norm()),
                };
            }
            acc += log_elementary_factor(lambda / zeta, self.genus).value() * *m;
        }
        ProductValue {
            log: Some(acc),
            tail_bound: self.tail_bound(lambda.norm()),
        }
    }

    /// `P(lambda)`.
    pub fn value(&self, lambda: Complex64) -> Complex64 {
        self.log_value(lambda).value()
    }

    /// `P'(lambda) / P(lambda)`.
    pub fn log_derivative(&self, lambda: Complex64) -> Complex64 {
        self.zeros
            .iter()
            .map(|(zeta, m)| log_elementary_derivative(lambda / zeta, self.genus) / zeta * *m)
            .sum()
    }
}

/// `P` at a point of the logarithmic plane through the identified plane.
pub fn product_p(prod: &WeierstrassProduct, lambda: LogPoint) -> Result<ProductValue> {
    let z = to_cut_plane(lambda)
        .ok_or_else(|| Error::Domain(format!("{lambda:?} is off the identified plane")))?;
    Ok(prod.log_value(z))
}

/// A scattering determinant seen through its logarithm.
pub trait Determinant: Sync {
    /// Some branch of `log s(lambda)`.
    fn log_s(&self, lambda: LogPoint) -> Result<Complex64>;
    /// `s'(lambda) / s(lambda)`.
    fn log_derivative(&self, lambda: LogPoint) -> Result<Complex64>;
}

/// The truncated mode product of a ball model.
pub struct ModelDeterminant<'a> {
    pub model: &'a BallModel,
    pub tol: f64,
}

impl Determinant for ModelDeterminant<'_> {
    fn log_s(&self, lambda: LogPoint) -> Result<Complex64> {
        self.model.log_determinant(lambda, self.tol)
    }

    fn log_derivative(&self, lambda: LogPoint) -> Result<Complex64> {
        self.model.log_derivative(lambda, self.tol)
    }
}

/// `s = exp(i alpha lambda^q) P(-lambda) / P(lambda)`, whose residual is `i alpha lambda^q`.
#[derive(Debug, Clone)]
pub struct SyntheticDeterminant {
    pub alpha: f64,
    pub q: i32,
    pub prod: WeierstrassProduct,
}

impl Determinant for SyntheticDeterminant {
    fn log_s(&self, lambda: LogPoint) -> Result<Complex64> {
        let l = lambda.project();
        let p = self.prod.genus;
        // products of E_p overflow to subnormals once |lambda / z|^p / p nears 700
        let log_e = |w: Complex64| (Complex64::new(1.0, 0.0) - w).ln() + polynomial_part(w, p);
        let ratio: Complex64 = self
            .prod
            .zeros()
            .iter()
            .map(|(z, m)| (log_e(-l / z) - log_e(l / z)) * *m)
            .sum();
        Ok(Complex64::i() * self.alpha * l.powi(self.q) + ratio)
    }

    fn log_derivative(&self, lambda: LogPoint) -> Result<Complex64> {
        let l = lambda.project();
        Ok(
            Complex64::i() * self.alpha * self.q as f64 * l.powi(self.q - 1)
                - self.prod.log_derivative(-l)
                - self.prod.log_derivative(l),
        )
    }
}

impl SyntheticDeterminant {
    /// Largest deviation of the extracted residual from `i alpha lambda^q` on a
    /// real grid, after removing the `2 pi i` ambiguity of the first sample.
    pub fn round_trip_error(&self, grid: &[LogPoint]) -> Result<f64> {
        let res = extract_residual(self, &self.prod, grid)?;
        let exact = |p: &LogPoint| Complex64::i() * self.alpha * p.project().powi(self.q);
        let shift = res.values[0] - exact(&res.points[0]);
        let branch = Complex64::new(0.0, TAU * (shift.im / TAU).round());
        let mut worst = (shift - branch).norm();
        for ((p, g), dg) in res.points.iter().zip(&res.values).zip(&res.derivatives) {
            worst = worst.max((g - branch - exact(p)).norm());
            let d = Complex64::i() * self.alpha * self.q as f64 * p.project().powi(self.q - 1);
            worst = worst.max((dg - d).norm());
        }
        Ok(worst)
    }
}

/// Samples of `g` and `g'` along a path in the right half of the cone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorizationResidual {
    pub points: Vec<LogPoint>,
    pub values: Vec<Complex64>,
    pub derivatives: Vec<Complex64>,
}

impl FactorizationResidual {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// The samples followed by their odd images `(-lambda, -g(lambda))`.
    /// `g'` is even.
    pub fn extended(&self) -> FactorizationResidual {
        let mut out = self.clone();
        for i in 0..self.len() {
            let p = self.points[i];
            out.points.push(LogPoint::new(p.r, p.theta - PI));
            out.values.push(-self.values[i]);
            out.derivatives.push(self.derivatives[i]);
        }
        out
    }

    /// Fitted `(exponent, constant)` of `|d^k g|` against `|lambda|`, for `k` in `{0, 1}`.
    pub fn symbol_fit(&self, k: u32) -> Result<(f64, f64)> {
        let xs: Vec<f64> = self.points.iter().map(|p| p.r).collect();
        let ys: Vec<f64> = match k {
            0 => self.values.iter().map(|v| v.norm()).collect(),
            1 => self.derivatives.iter().map(|v| v.norm()).collect(),
            _ => return Err(Error::InvalidInput(format!("symbol order {k}"))),
        };
        let (p, a, _) = power_law(&xs, &ys)?;
        Ok((p, a))
    }

    pub fn max_difference(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// `g = log s - log P(-lambda) + log P(lambda)` along `grid`, with the
/// imaginary part made continuous by following `g'`.
pub fn extract_residual<D: Determinant>(
    det: &D,
    prod: &WeierstrassProduct,
    grid: &[LogPoint],
) -> Result<FactorizationResidual> {
    use rayon::prelude::*;
    let raw: Result<Vec<(Complex64, Complex64)>> = grid
        .par_iter()
        .map(|&p| {
            let lam = to_cut_plane(p)
                .ok_or_else(|| Error::Domain(format!("{p:?} is off the identified plane")))?;
            if lam.re <= 0.0 {
                return Err(Error::Domain(format!(
                    "{p:?} is not in the right half-plane"
                )));
            }
            let plus = prod.log_value(lam).log;
            let minus = prod.log_value(-lam).log;
            let (Some(plus), Some(minus)) = (plus, minus) else {
                return Err(Error::Pole(format!(
                    "grid point {lam} is a zero of the product"
                )));
            };
            let g = det.log_s(p)? - minus + plus;
            let dg = det.log_derivative(p)? + prod.log_derivative(-lam) + prod.log_derivative(lam);
            Ok((g, dg))
        })
        .collect();
    let raw = raw?;
    let mut values = Vec::with_capacity(raw.len());
    let derivatives: Vec<Complex64> = raw.iter().map(|r| r.1).collect();
    for (i, (g, _)) in raw.iter().enumerate() {
        if i == 0 {
            values.push(*g);
            continue;
        }
        let prev: Complex64 = values[i - 1];
        let step = grid[i].project() - grid[i - 1].project();
        let predicted = prev + 0.5 * (derivatives[i - 1] + derivatives[i]) * step;
        // the trapezoid prediction is only trusted to half the spread of the endpoint slopes
        let spread = 0.5 * ((derivatives[i] - derivatives[i - 1]) * step).norm();
        let k = ((predicted.im - g.im) / TAU).round();
        let unwrapped = g + Complex64::new(0.0, TAU * k);
        if spread > 0.5 * PI || (unwrapped.im - predicted.im).abs() > 0.5 * PI {
            return Err(Error::Unwrap(grid[i - 1].r, grid[i].r));
        }
        values.push(unwrapped);
    }
    Ok(FactorizationResidual {
        points: grid.to_vec(),
        values,
        derivatives,
    })
}

/// Evenly spaced real grid on `[a, b]`.
pub fn real_grid(a: f64, b: f64, n: usize) -> Vec<LogPoint> {
    (0..n)
        .map(|i| LogPoint::new(a + (b - a) * i as f64 / (n - 1) as f64, 0.0))
        .collect()
}
