//! Quadrature rules: adaptive Gauss-Kronrod, Gauss-Legendre nodes, and
//! Filon-type panels for `integral f(x) e^{i omega x} dx` with smooth `f`.

use crate::error::{Error, Result};
use complex_bessel::Scaling;
use num_complex::Complex64;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One 15-point Kronrod panel: `(kronrod, |kronrod - gauss|)`.
fn gk15<F>(f: &F, a: f64, b: f64) -> Result<(Complex64, f64)>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x)? + f(c + x)?;
        k += s * WGK[j];
        if j % 2 == 1 {
            g += s * WG[j / 2];
        }
    }
    let k = k * h;
    let g = g * h;
    Ok((k, (k - g).norm()))
}

struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Panel {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&o.err)
    }
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Integral {
    pub value: Complex64,
    pub error: f64,
    pub evaluations: usize,
}

/// Adaptive Gauss-Kronrod on `[a, b]` for a complex integrand.
///
/// Stops when the summed panel error is below `max(abs_tol, rel_tol |I|)`.
pub fn integrate_complex<F>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_panels: usize,
) -> Result<Integral>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let mut heap = BinaryHeap::new();
    let (v, e) = gk15(&f, a, b)?;
    heap.push(Panel {
        a,
        b,
        value: v,
        err: e,
    });
    let mut total = v;
    let mut err = e;
    let mut evals = 15;
    loop {
        if err <= abs_tol.max(rel_tol * total.norm()) {
            break;
        }
        if heap.len() >= max_panels {
            return Err(Error::Quadrature(format!(
                "no convergence on [{a}, {b}] after {max_panels} panels, error {err:e}"
            )));
        }
        let p = heap.pop().expect("heap is never empty");
        let m = 0.5 * (p.a + p.b);
        let (v1, e1) = gk15(&f, p.a, m)?;
        let (v2, e2) = gk15(&f, m, p.b)?;
        evals += 30;
        total += v1 + v2 - p.value;
        err += e1 + e2 - p.err;
        heap.push(Panel {
            a: p.a,
            b: m,
            value: v1,
            err: e1,
        });
        heap.push(Panel {
            a: m,
            b: p.b,
            value: v2,
            err: e2,
        });
    }
    // recompute from panels to shed accumulated rounding in the running sums
    let value = heap.iter().map(|p| p.value).sum();
    let error = heap.iter().map(|p| p.err).sum();
    Ok(Integral {
        value,
        error,
        evaluations: evals,
    })
}

/// Real-valued wrapper of [`integrate_complex`].
pub fn integrate<F>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_panels: usize,
) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let r = integrate_complex(
        |x| f(x).map(|v| Complex64::new(v, 0.0)),
        a,
        b,
        abs_tol,
        rel_tol,
        max_panels,
    )?;
    Ok((r.value.re, r.error))
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Values `P_0(x), ..., P_{n-1}(x)`.
pub fn legendre_all(n: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 0..n {
        match k {
            0 => out.push(1.0),
            1 => out.push(x),
            _ => {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
                out.push(p2);
            }
        }
    }
    out
}

/// Spherical Bessel functions `j_0(x), ..., j_{n-1}(x)` for real `x >= 0`.
pub fn spherical_bessel_j(n: usize, x: f64) -> Result<Vec<f64>> {
    if x == 0.0 {
        let mut v = vec![0.0; n];
        if n > 0 {
            v[0] = 1.0;
        }
        return Ok(v);
    }
    let res = complex_bessel::besselj_seq(0.5, Complex64::new(x, 0.0), n, Scaling::Unscaled)
        .map_err(|e| Error::Quadrature(format!("spherical Bessel at {x}: {e:?}")))?;
    let pref = (PI / (2.0 * x)).sqrt();
    Ok(res.values.iter().map(|v| pref * v.re).collect())
}

/// A panel `[a, b]` carrying Legendre coefficients of a smooth function.
///
/// `integral_a^b f(x) e^{i t x} dx = h e^{i t c} sum_n a_n 2 i^n j_n(t h)`
/// with `c` the midpoint and `h` the half-width.
#[derive(Debug, Clone)]
pub struct FilonPanel {
    pub a: f64,
    pub b: f64,
    pub coefficients: Vec<f64>,
}

impl FilonPanel {
    /// Build from samples `f(c + h x_k)` at the `n` Gauss-Legendre nodes.
    pub fn from_samples(a: f64, b: f64, nodes: &[f64], weights: &[f64], samples: &[f64]) -> Self {
        let n = nodes.len();
        let mut coefficients = vec![0.0; n];
        for k in 0..n {
            let p = legendre_all(n, nodes[k]);
            for (m, c) in coefficients.iter_mut().enumerate() {
                *c += weights[k] * samples[k] * p[m];
            }
        }
        for (m, c) in coefficients.iter_mut().enumerate() {
            *c *= (2 * m + 1) as f64 / 2.0;
        }
        Self { a, b, coefficients }
    }

    /// Size of the last two coefficients relative to the largest; a measure
    /// of how well the panel resolves `f`.
    pub fn tail_coefficient(&self) -> f64 {
        let n = self.coefficients.len();
        let h = 0.5 * (self.b - self.a);
        h * (self.coefficients[n - 1].abs() + self.coefficients[n - 2].abs()) * 2.0
    }

    /// `integral_a^b f(x) e^{i t x} dx`.
    pub fn fourier(&self, t: f64) -> Result<Complex64> {
        let c = 0.5 * (self.a + self.b);
        let h = 0.5 * (self.b - self.a);
        let n = self.coefficients.len();
        let j = spherical_bessel_j(n, (t * h).abs())?;
        let mut sum = Complex64::new(0.0, 0.0);
        let mut ipow = Complex64::new(1.0, 0.0);
        let sign = if t < 0.0 { -1.0 } else { 1.0 };
        for m in 0..n {
            // j_n is even/odd in its argument with parity n
            let jm = if sign < 0.0 && m % 2 == 1 {
                -j[m]
            } else {
                j[m]
            };
            sum += ipow * (2.0 * self.coefficients[m] * jm);
            ipow *= Complex64::i();
        }
        Ok(Complex64::from_polar(h, t * c) * sum)
    }
}

/// Exponential integral `E_1(z)` for `z` off the negative real axis.
pub fn exp_integral_e1(z: Complex64) -> Complex64 {
    const EULER: f64 = 0.577_215_664_901_532_9;
    if z.norm() <= 2.0 {
        // E1(z) = -gamma - ln z - sum_k (-z)^k / (k k!)
        let mut sum = Complex64::new(0.0, 0.0);
        let mut term = Complex64::new(1.0, 0.0);
        for k in 1..200 {
            term *= -z / k as f64;
            let add = term / k as f64;
            sum += add;
            if add.norm() < 1e-17 * sum.norm().max(1e-300) {
                break;
            }
        }
        -EULER - z.ln() - sum
    } else {
        // continued fraction, modified Lentz
        let tiny = 1e-300;
        let mut b = z + 1.0;
        let mut c = Complex64::new(1.0 / tiny, 0.0);
        let mut d = Complex64::new(1.0, 0.0) / b;
        let mut h = d;
        for i in 1..2000 {
            let a = -((i * i) as f64);
            b += 2.0;
            d = Complex64::new(1.0, 0.0) / (a * d + b);
            c = b + a / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).norm() < 1e-16 {
                break;
            }
        }
        h * (-z).exp()
    }
}
