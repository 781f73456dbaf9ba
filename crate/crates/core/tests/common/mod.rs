#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use respoisson::model_ball::BallModel;
use respoisson::special_functions::*;
use respoisson_oracle::dd::DdComplex;
use respoisson_oracle::{bessel, ode, roots};
use std::f64::consts::{FRAC_PI_2, PI};

/// Dense-enumeration count for d = 2, R = 1, Dirichlet, rho = 1.2, 0.5 < |lambda| < 20.
pub const D2_CONE_COUNT: usize = 238;

/// Zeros of every mode in the two cone sectors by seeded Newton on a fine grid.
pub fn dense_cone_count(m: &BallModel, rho: f64, r0: f64, r1: f64, modes: u32) -> usize {
    (0..=modes)
        .into_par_iter()
        .map(|ell| {
            let mut total = 0;
            // sheet offset 0: lambda = w; offset -pi: lambda = w e^{-i pi}, w in the lower right quadrant
            for offset in [0.0, -PI] {
                let sign = if offset == 0.0 { 1.0 } else { -1.0 };
                let g = |w: Complex64| {
                    let p = LogPoint::new(w.norm(), w.arg() + offset);
                    let (v, d) = m.mode_function(ell, p).ok()?;
                    Some((v, d * sign))
                };
                let (x, y) = if offset == 0.0 {
                    ((0.0, r1), (0.0, r1))
                } else {
                    ((0.0, r1), (-r1, 0.0))
                };
                let found = roots::dense_newton(g, x, y, 120, 120, 1e-12);
                total += found
                    .iter()
                    .filter(|w| {
                        let a = w.arg();
                        let inside = if offset == 0.0 {
                            a > 0.0 && a < rho
                        } else {
                            a > -rho && a < 0.0
                        };
                        inside && w.norm() > r0 && w.norm() < r1
                    })
                    .count();
            }
            total
        })
        .sum()
}

/// Worst observed error of one special-function check against its tolerance.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub worst: f64,
    pub tol: f64,
    pub cases: usize,
}

impl Check {
    pub fn pass(&self) -> bool {
        self.worst <= self.tol
    }
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

fn dd(z: Complex64) -> DdComplex {
    DdComplex::from_f64(z.re, z.im)
}

fn kind_of(k: u8) -> HankelKind {
    if k == 1 {
        HankelKind::First
    } else {
        HankelKind::Second
    }
}

/// Individual reference values.
pub fn fixtures() -> Vec<Check> {
    let mut out = Vec::new();
    let mut push = |name, worst, tol| {
        out.push(Check {
            name,
            worst,
            tol,
            cases: 1,
        })
    };
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let o = |n| Order::new(n);

    push(
        "J_0(0) = 1",
        (bessel_j(o(0), c(0.0, 0.0)).unwrap() - 1.0).norm(),
        0.0,
    );
    let v = bessel_j(o(1), c(FRAC_PI_2, 0.0)).unwrap();
    push("J_1/2(pi/2) = 2/pi", rel(v, c(2.0 / PI, 0.0)), 1e-12);
    let v = bessel_j(o(0), c(2.0, 0.0)).unwrap();
    let want = bessel::bessel_j(0, dd(c(2.0, 0.0))).to_c64();
    push("J_0(2) against the series oracle", rel(v, want), 1e-12);
    push("J_0(2) = 0.2238907791", (v.re - 0.2238907791).abs(), 1e-10);

    let one = LogPoint::new(1.0, 0.0);
    let h = hankel(HankelKind::First, o(1), one).unwrap();
    let want = -Complex64::i() * (2.0 / PI).sqrt() * Complex64::i().exp();
    push("H1_1/2(1) closed form", rel(h, want), 1e-12);

    let start = hankel_with_derivative(HankelKind::First, o(0), one).unwrap();
    let cont = ode::continue_along_circle(0.0, 1.0, 0.0, 2.0 * PI, start.0, start.1, 1e-13);
    let h = hankel(HankelKind::First, o(0), LogPoint::new(1.0, 2.0 * PI)).unwrap();
    push(
        "H1_0 at theta = 2 pi against ODE continuation",
        rel(h, cont.value),
        1e-8,
    );

    let d = hankel_derivative(HankelKind::First, o(0), one).unwrap();
    let h1 = hankel(HankelKind::First, o(2), one).unwrap();
    push("dH1_0/dz = -H1_1", rel(d, -h1), 1e-13);

    let z = c(2.0, 0.5);
    let step = 1e-5;
    let f = |w: Complex64| hankel(HankelKind::First, o(2), LogPoint::principal(w)).unwrap();
    let fd = (f(z + step) - f(z - step)) / (2.0 * step);
    let d = hankel_derivative(HankelKind::First, o(2), LogPoint::principal(z)).unwrap();
    push("dH1_1/dz against central difference", (d - fd).norm(), 1e-7);

    // H2_1/2(z) = i sqrt(2/(pi z)) e^{-iz}
    let i = Complex64::i();
    let d = hankel_derivative(HankelKind::Second, o(1), one).unwrap();
    let want = i * (2.0 / PI).sqrt() * (-i).exp() * (-0.5 - i);
    push("dH2_1/2/dz closed form", rel(d, want), 1e-12);

    let cut = |r, t| to_cut_plane(LogPoint::new(r, t));
    let ok = cut(1.0, 0.0) == Some(c(1.0, 0.0))
        && cut(1.0, FRAC_PI_2).is_none()
        && cut(1.0, 2.0 * PI).is_none();
    push("cut-plane membership", if ok { 0.0 } else { 1.0 }, 0.0);
    out
}

/// Principal-sheet values against the extended-precision series oracle,
/// random `nu <= 20` and `5 <= |z| <= 15`.
pub fn oracle_consistency(samples: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cases: Vec<(u32, Complex64, u8)> = (0..samples)
        .map(|_| {
            let n = rng.random_range(0..=40u32);
            let r = rng.random_range(5.0..15.0);
            let t = rng.random_range(-0.99 * PI..0.99 * PI);
            (n, Complex64::from_polar(r, t), rng.random_range(1..=2u8))
        })
        .collect();
    let worst = cases
        .par_iter()
        .map(|&(n, z, k)| {
            let h = hankel(kind_of(k), Order::new(n), LogPoint::principal(z)).unwrap();
            rel(h, bessel::hankel(k, n, dd(z)).to_c64())
        })
        .reduce(|| 0.0, f64::max);
    Check {
        name: "principal values against the series oracle",
        worst,
        tol: 1e-9,
        cases: samples,
    }
}

/// Connection formulas at `theta = +-2 pi` against ODE continuation along `|z| = r`.
pub fn continuation(samples: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cases: Vec<(u32, f64, f64, u8)> = (0..samples)
        .map(|_| {
            let n = rng.random_range(0..=12u32);
            let r = rng.random_range(0.5..8.0);
            let end = if rng.random_bool(0.5) {
                2.0 * PI
            } else {
                -2.0 * PI
            };
            (n, r, end, rng.random_range(1..=2u8))
        })
        .collect();
    let worst = cases
        .par_iter()
        .map(|&(n, r, end, k)| {
            let nu = Order::new(n);
            let (h0, d0) = hankel_with_derivative(kind_of(k), nu, LogPoint::new(r, 0.0)).unwrap();
            let c = ode::continue_along_circle(nu.nu(), r, 0.0, end, h0, d0, 1e-13);
            let h = hankel(kind_of(k), nu, LogPoint::new(r, end)).unwrap();
            rel(h, c.value)
        })
        .reduce(|| 0.0, f64::max);
    Check {
        name: "connection formulas against ODE continuation",
        worst,
        tol: 1e-8,
        cases: samples,
    }
}

/// `H1 H2' - H1' H2 = -4i / (pi z)`, relative to the size of the products.
pub fn wronskian(samples: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let n = rng.random_range(0..=40u32);
        let z = Complex64::from_polar(
            rng.random_range(0.5..30.0),
            rng.random_range(-0.99 * PI..0.99 * PI),
        );
        let p = LogPoint::principal(z);
        let (h1, d1) = hankel_with_derivative(HankelKind::First, Order::new(n), p).unwrap();
        let (h2, d2) = hankel_with_derivative(HankelKind::Second, Order::new(n), p).unwrap();
        let w = h1 * d2 - d1 * h2;
        let want = -4.0 * Complex64::i() / (PI * z);
        let scale = (h1 * d2).norm().max((d1 * h2).norm()).max(want.norm());
        worst = worst.max((w - want).norm() / scale);
    }
    Check {
        name: "Wronskian",
        worst,
        tol: 1e-10,
        cases: samples,
    }
}

/// `H2_n(x) = conj(H1_n(x))` for real `x > 0` and integer `n`.
pub fn reflection(samples: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let n = Order::integer(rng.random_range(0..=20u32));
        let p = LogPoint::new(rng.random_range(0.05..50.0), 0.0);
        let h1 = hankel(HankelKind::First, n, p).unwrap();
        let h2 = hankel(HankelKind::Second, n, p).unwrap();
        worst = worst.max(rel(h2, h1.conj()));
    }
    Check {
        name: "reflection on the real axis",
        worst,
        tol: 1e-12,
        cases: samples,
    }
}

/// The whole special-function suite.
pub fn special_function_suite() -> Vec<Check> {
    let mut out = fixtures();
    out.push(oracle_consistency(1000, 11));
    out.push(continuation(100, 12));
    out.push(wronskian(1000, 13));
    out.push(reflection(1000, 14));
    out
}
