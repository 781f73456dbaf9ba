//! Exterior-ball scattering models.
//!
//! For the ball of radius `R` in `R^d` the scattering matrix is diagonal on
//! spherical harmonics. Mode `l` has order `nu = l + (d - 2)/2` and eigenvalue
//!
//! ```text
//! s_l(lambda) = -F^(1)(lambda R) / F^(2)(lambda R)
//! ```
//!
//! with `F = H_nu` for Dirichlet and `F = z H'_nu + (1 - d/2) H_nu` for
//! Neumann. Resonances are the zeros of the outgoing function `F^(2)`, and they
//! lie in `Im lambda > 0`. The normalization gives `s_l -> 1` as `l -> infinity`.

use crate::error::{Error, Result};
use crate::special_functions::{
    bessel_j, bessel_j_with_derivative, hankel_with_derivative, HankelKind, LogPoint, Order,
};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Dirichlet,
    Neumann,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallModel {
    pub dimension: u32,
    pub radius: f64,
    pub boundary: Boundary,
}

/// Threshold on `|F^(2)| / |F^(1)|` below which `s_l` is reported as a pole.
pub const POLE_THRESHOLD: f64 = 1e-14;

/// Number of independent spherical harmonics of degree `ell` on `S^{d-1}`.
pub fn mode_multiplicity(d: u32, ell: u32) -> Result<u64> {
    let l = ell as u64;
    match d {
        2 => Ok(if ell == 0 { 1 } else { 2 }),
        3 => Ok(2 * l + 1),
        4 => Ok((l + 1) * (l + 1)),
        _ => Err(Error::InvalidInput(format!("unsupported dimension {d}"))),
    }
}

impl BallModel {
    pub fn new(dimension: u32, radius: f64, boundary: Boundary) -> Result<Self> {
        if !(2..=4).contains(&dimension) {
            return Err(Error::InvalidInput(format!(
                "unsupported dimension {dimension}"
            )));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidInput(format!("radius {radius}")));
        }
        Ok(Self {
            dimension,
            radius,
            boundary,
        })
    }

    pub fn dirichlet(dimension: u32, radius: f64) -> Result<Self> {
        Self::new(dimension, radius, Boundary::Dirichlet)
    }

    pub fn order(&self, ell: u32) -> Order {
        Order::new(2 * ell + self.dimension - 2)
    }

    pub fn multiplicity(&self, ell: u32) -> u64 {
        mode_multiplicity(self.dimension, ell).expect("dimension checked at construction")
    }

    /// The exterior of a ball carries no eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        Vec::new()
    }

    /// Multiplicity of zero as a resonance.
    pub fn zero_multiplicity(&self) -> u64 {
        0
    }

    fn boundary_shift(&self) -> f64 {
        1.0 - 0.5 * self.dimension as f64
    }

    /// `F(z)` and `F'(z)` at `z = lambda R` for the given Hankel kind.
    pub fn boundary_function(
        &self,
        kind: HankelKind,
        ell: u32,
        z: LogPoint,
    ) -> Result<(Complex64, Complex64)> {
        let nu = self.order(ell);
        let (h, dh) = hankel_with_derivative(kind, nu, z)?;
        match self.boundary {
            Boundary::Dirichlet => Ok((h, dh)),
            Boundary::Neumann => {
                let c = self.boundary_shift();
                let zc = z.project();
                let f = zc * dh + c * h;
                let df = c * dh - (zc - nu.nu() * nu.nu() / zc) * h;
                Ok((f, df))
            }
        }
    }

    /// `F` built from `J` in place of the Hankel function, `(F1 + F2) / 2`.
    fn boundary_function_j(&self, ell: u32, z: LogPoint) -> Result<Complex64> {
        let nu = self.order(ell);
        let (j, dj) = bessel_j_with_derivative(nu, z)?;
        Ok(match self.boundary {
            Boundary::Dirichlet => j,
            Boundary::Neumann => z.project() * dj + self.boundary_shift() * j,
        })
    }

    /// Wronskian factor `K` with `F1' F2 - F1 F2' = 4 i K / (pi z)`.
    fn wronskian_factor(&self, ell: u32, z: Complex64) -> Complex64 {
        match self.boundary {
            Boundary::Dirichlet => Complex64::new(1.0, 0.0),
            Boundary::Neumann => {
                let c = self.boundary_shift();
                let nu = self.order(ell).nu();
                z * z + (c * c - nu * nu)
            }
        }
    }

    /// The outgoing mode function `lambda -> F^(2)(lambda R)` and its `lambda`-derivative.
    pub fn mode_function(&self, ell: u32, lambda: LogPoint) -> Result<(Complex64, Complex64)> {
        let (f, df) = self.boundary_function(HankelKind::Second, ell, lambda.scale(self.radius))?;
        Ok((f, df * self.radius))
    }

    /// Mode eigenvalue `s_l(lambda)` of the scattering matrix.
    pub fn mode_s(&self, ell: u32, lambda: LogPoint) -> Result<Complex64> {
        let z = lambda.scale(self.radius);
        let (f1, _) = self.boundary_function(HankelKind::First, ell, z)?;
        let (f2, _) = self.boundary_function(HankelKind::Second, ell, z)?;
        if f2.norm() <= POLE_THRESHOLD * f1.norm() {
            return Err(Error::Pole(format!(
                "l = {ell}, r = {}, theta = {}",
                lambda.r, lambda.theta
            )));
        }
        Ok(-f1 / f2)
    }

    /// `s_l'/s_l` at a point of the logarithmic plane.
    pub fn mode_log_derivative(&self, ell: u32, lambda: LogPoint) -> Result<Complex64> {
        let z = lambda.scale(self.radius);
        let (f1, _) = self.boundary_function(HankelKind::First, ell, z)?;
        let (f2, _) = self.boundary_function(HankelKind::Second, ell, z)?;
        let zc = z.project();
        let k = self.wronskian_factor(ell, zc);
        Ok(self.radius * 4.0 * Complex64::i() * k / (PI * zc * f1 * f2))
    }

    /// Default cap on the number of modes summed at `|lambda|`.
    pub fn mode_cap(&self, lambda_abs: f64) -> usize {
        (5.0 * lambda_abs * self.radius) as usize + 200
    }

    /// Sum of `mult(l) * term(l)` over modes, truncated once the terms are
    /// below `tol` relative to the running sum and decaying geometrically.
    fn mode_sum<F>(&self, lambda_abs: f64, tol: f64, term: F) -> Result<Complex64>
    where
        F: Fn(u32) -> Result<Complex64>,
    {
        let cap = self.mode_cap(lambda_abs);
        let z = lambda_abs * self.radius;
        let mut sum = Complex64::new(0.0, 0.0);
        let mut prev: Option<f64> = None;
        for ell in 0..=cap as u32 {
            let t = term(ell)? * self.multiplicity(ell) as f64;
            sum += t;
            let mag = t.norm();
            let nu = self.order(ell).nu();
            if nu > z + 2.0 {
                if let Some(p) = prev {
                    let ratio = if p > 0.0 { mag / p } else { 0.0 };
                    // terms decay monotonically once nu > |z|; bound the tail by a geometric series
                    if ratio < 0.5
                        && mag * ratio / (1.0 - ratio) <= tol * sum.norm().max(f64::MIN_POSITIVE)
                    {
                        return Ok(sum);
                    }
                }
            }
            prev = Some(mag);
        }
        Err(Error::Truncation { cap })
    }

    /// `sum_l mult(l) s_l'/s_l` at a point of the logarithmic plane.
    pub fn log_derivative(&self, lambda: LogPoint, tol: f64) -> Result<Complex64> {
        self.mode_sum(lambda.r, tol, |ell| self.mode_log_derivative(ell, lambda))
    }

    /// `sum_l mult(l) log s_l` with principal logarithms per mode.
    pub fn log_determinant(&self, lambda: LogPoint, tol: f64) -> Result<Complex64> {
        self.mode_sum(lambda.r, tol, |ell| {
            let z = lambda.scale(self.radius);
            // s_l = 1 + u; forming s_l first leaves an absolute 1e-16 in log |s_l|
            let (f2, _) = self.boundary_function(HankelKind::Second, ell, z)?;
            let u = -2.0 * self.boundary_function_j(ell, z)? / f2;
            if !u.is_finite() {
                return Err(Error::Overflow(format!(
                    "s_{ell} at r = {}, theta = {}",
                    lambda.r, lambda.theta
                )));
            }
            Ok(Complex64::new(
                0.5 * (u.re * (2.0 + u.re) + u.im * u.im).ln_1p(),
                u.im.atan2(1.0 + u.re),
            ))
        })
    }

    /// Contribution of mode `l` to `sigma'(lambda)` at real `lambda > 0`, without multiplicity.
    pub fn sigma_prime_mode(&self, ell: u32, lambda: f64) -> Result<f64> {
        let z = LogPoint::new(lambda * self.radius, 0.0);
        let (f1, _) = self.boundary_function(HankelKind::First, ell, z)?;
        let k = self.wronskian_factor(ell, z.project()).re;
        Ok(-2.0 * k / (PI * PI * lambda * f1.norm_sqr()))
    }

    /// Derivative of the scattering phase, `(i / 2 pi) s'(lambda) / s(lambda)`, for `lambda > 0`.
    pub fn sigma_prime(&self, lambda: f64, tol: f64) -> Result<f64> {
        if !(lambda > 0.0) || !(tol > 0.0) {
            return Err(Error::InvalidInput(format!(
                "sigma' at lambda = {lambda}, tol = {tol}"
            )));
        }
        let s = self.mode_sum(lambda, tol, |ell| {
            Ok(Complex64::new(self.sigma_prime_mode(ell, lambda)?, 0.0))
        })?;
        Ok(s.re)
    }

    /// Scattering phase `sigma(lambda)` normalised by `sigma(0+) = 0`, for small `lambda > 0`.
    ///
    /// Each mode contributes `-(arg F1(lambda) - arg F1(0+)) / pi`; the
    /// argument is measured from `arg F1(0+) = +-pi/2` and must not wind.
    pub fn phase(&self, lambda: f64, tol: f64) -> Result<f64> {
        if !(lambda > 0.0) {
            return Err(Error::InvalidInput(format!("phase at lambda = {lambda}")));
        }
        let x = lambda * self.radius;
        let z = LogPoint::new(x, 0.0);
        let c = self.boundary_shift();
        let s = self.mode_sum(lambda, tol, |ell| {
            let nu = self.order(ell);
            // real part from J directly; Re H1 loses digits against |Y|
            let j = bessel_j(nu, x.into())?.re;
            let (re, im) = match self.boundary {
                Boundary::Dirichlet => (j, -hankel_with_derivative(HankelKind::First, nu, z)?.0.im),
                Boundary::Neumann => {
                    let j1 = bessel_j(Order::new(nu.twice_nu + 2), x.into())?.re;
                    let (f, _) = self.boundary_function(HankelKind::First, ell, z)?;
                    (-((nu.nu() + c) * j - x * j1), f.im)
                }
            };
            // Y_nu < 0 near 0, and z Y' + c Y has the sign of nu - c >= 0
            let a = re.atan2(im);
            if a.abs() > 0.9 * PI {
                return Err(Error::AccuracyLoss(format!(
                    "phase of mode {ell} winds at lambda = {lambda}"
                )));
            }
            Ok(Complex64::new(-a / PI, 0.0))
        })?;
        Ok(s.re)
    }

    /// `(i / 2 pi) s'/s` from the complex log-derivative, returning the
    /// discarded imaginary part alongside.
    pub fn sigma_prime_complex(&self, lambda: f64, tol: f64) -> Result<(f64, f64)> {
        let ld = self.log_derivative(LogPoint::new(lambda, 0.0), tol)?;
        let v = Complex64::i() / (2.0 * PI) * ld;
        Ok((v.re, v.im))
    }
}
