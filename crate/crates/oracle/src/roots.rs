//! Brute-force zero enumeration.
//!
//! `dense_newton` seeds Newton's method on a uniform grid and deduplicates the
//! converged points. `bessel_polynomial_roots` finds all zeros of the reverse
//! Bessel polynomials in double-double with the Aberth-Ehrlich iteration.

use crate::dd::{Dd, DdComplex};
use num_complex::Complex64;

/// Zeros of `f` inside `[x0, x1] x [y0, y1]` found from an `nx` by `ny` seed grid.
///
/// `f` returns the pair `(f(z), f'(z))`. Seeds that leave the box or fail to
/// converge in 80 steps are dropped.
pub fn dense_newton<F>(
    f: F,
    x: (f64, f64),
    y: (f64, f64),
    nx: usize,
    ny: usize,
    tol: f64,
) -> Vec<Complex64>
where
    F: Fn(Complex64) -> Option<(Complex64, Complex64)>,
{
    let mut roots: Vec<Complex64> = Vec::new();
    let margin = 0.25 * ((x.1 - x.0) / nx as f64).max((y.1 - y.0) / ny as f64);
    for i in 0..nx {
        for j in 0..ny {
            let mut z = Complex64::new(
                x.0 + (i as f64 + 0.5) * (x.1 - x.0) / nx as f64,
                y.0 + (j as f64 + 0.5) * (y.1 - y.0) / ny as f64,
            );
            let mut converged = false;
            for _ in 0..80 {
                let Some((v, d)) = f(z) else { break };
                if d.norm() == 0.0 || !v.is_finite() || !d.is_finite() {
                    break;
                }
                let step = v / d;
                z -= step;
                if z.re < x.0 - margin
                    || z.re > x.1 + margin
                    || z.im < y.0 - margin
                    || z.im > y.1 + margin
                {
                    break;
                }
                if step.norm() < tol * z.norm().max(1.0) {
                    converged = true;
                    break;
                }
            }
            if !converged || z.re < x.0 || z.re > x.1 || z.im < y.0 || z.im > y.1 {
                continue;
            }
            if roots
                .iter()
                .all(|r| (r - z).norm() > 1e3 * tol * z.norm().max(1.0))
            {
                roots.push(z);
            }
        }
    }
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    roots
}

/// Newton polish in double-double arithmetic.
pub fn dd_newton<F>(f: F, seed: DdComplex, iterations: usize) -> DdComplex
where
    F: Fn(DdComplex) -> (DdComplex, DdComplex),
{
    let mut z = seed;
    for _ in 0..iterations {
        let (v, d) = f(z);
        z = z - v / d;
    }
    z
}

fn bessel_poly_coefficients(ell: u32) -> Vec<Dd> {
    // y_l(x) = sum_k (l+k)! / (k! (l-k)!) (x/2)^k
    let mut coef = Vec::with_capacity(ell as usize + 1);
    let mut c = Dd::ONE;
    for k in 0..=ell {
        if k > 0 {
            let num = ((ell + k) as f64) * ((ell - k + 1) as f64);
            c = c.mul_f64(num).div_f64(2.0 * k as f64);
        }
        coef.push(c);
    }
    coef
}

fn horner(coef: &[Dd], x: DdComplex) -> (DdComplex, DdComplex) {
    let mut p = DdComplex::ZERO;
    let mut dp = DdComplex::ZERO;
    for c in coef.iter().rev() {
        dp = dp * x + p;
        p = p * x + DdComplex::from_real(*c);
    }
    (p, dp)
}

/// All zeros of the reverse Bessel polynomial `y_l`.
pub fn bessel_polynomial_roots(ell: u32) -> Vec<DdComplex> {
    let coef = bessel_poly_coefficients(ell);
    let n = ell as usize;
    if n == 0 {
        return Vec::new();
    }
    // Initial guesses on a circle of radius ~ l, offset to break symmetry.
    let mut z: Vec<DdComplex> = (0..n)
        .map(|k| {
            let a = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4;
            let rad = 0.7 * n as f64 + 0.5;
            DdComplex::from_f64(rad * a.cos(), rad * a.sin())
        })
        .collect();
    for _ in 0..500 {
        let mut max_step = 0.0f64;
        for i in 0..n {
            let (p, dp) = horner(&coef, z[i]);
            let ratio = p / dp;
            let mut s = DdComplex::ZERO;
            for j in 0..n {
                if j != i {
                    s = s + DdComplex::ONE / (z[i] - z[j]);
                }
            }
            let step = ratio / (DdComplex::ONE - ratio * s);
            z[i] = z[i] - step;
            max_step = max_step.max(step.abs_f64() / z[i].abs_f64().max(1.0));
        }
        if max_step < 1e-30 {
            break;
        }
    }
    // plain Newton once the roots are isolated
    for zi in z.iter_mut() {
        for _ in 0..8 {
            let (p, dp) = horner(&coef, *zi);
            *zi = *zi - p / dp;
        }
    }
    z
}

/// Zeros of `H^(2)_{l+1/2}` in `Im z > 0`, the complex conjugates of those of `H^(1)_{l+1/2}`.
pub fn spherical_hankel2_zeros(ell: u32) -> Vec<DdComplex> {
    bessel_polynomial_roots(ell)
        .into_iter()
        .map(|x| (DdComplex::I / x).conj())
        .collect()
}
