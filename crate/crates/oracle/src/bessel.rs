//! Ascending-series Bessel and Hankel functions in double-double arithmetic.
//!
//! Orders are passed as `twice_nu` so that integer and half-integer orders
//! share one entry point. Branches are principal (`|arg z| < pi`).

use crate::dd::{Dd, DdComplex};

fn is_integer_order(twice_nu: u32) -> bool {
    twice_nu % 2 == 0
}

fn nu_dd(twice_nu: u32) -> Dd {
    Dd::from_f64(twice_nu as f64 * 0.5)
}

/// `Gamma(x)` for positive integer or half-integer `x = twice_x / 2`.
fn gamma_half(twice_x: i64) -> Dd {
    assert!(twice_x > 0);
    if twice_x % 2 == 0 {
        let n = twice_x / 2;
        let mut acc = Dd::ONE;
        for k in 2..n {
            acc = acc.mul_f64(k as f64);
        }
        acc
    } else {
        let mut acc = Dd::SQRT_PI;
        let mut x = 0.5;
        while ((2.0 * x) as i64) < twice_x {
            acc = acc.mul_f64(x);
            x += 1.0;
        }
        acc
    }
}

/// Principal power `(z/2)^nu` for `nu = twice_nu / 2`.
fn half_z_pow(twice_nu: u32, z: DdComplex) -> DdComplex {
    let half = z.scale_f64(0.5);
    if is_integer_order(twice_nu) {
        half.powi((twice_nu / 2) as i32)
    } else {
        let l = half.ln();
        l.scale(nu_dd(twice_nu)).exp()
    }
}

fn series_sum(first: DdComplex, z: DdComplex, shift: Dd) -> DdComplex {
    // sum_k t_k with t_k = t_{k-1} * (-z^2/4) / (k (shift + k))
    let q = -(z * z).scale_f64(0.25);
    let mut term = first;
    let mut sum = first;
    let mut k = 1u32;
    let zmag = z.abs_f64();
    let mut peak = term.abs_f64();
    loop {
        let denom = Dd::from_f64(k as f64) * (shift + Dd::from_f64(k as f64));
        term = (term * q).scale(denom.recip());
        sum = sum + term;
        let tm = term.abs_f64();
        peak = peak.max(tm);
        if (k as f64) > zmag && tm < 1e-36 * peak.max(sum.abs_f64()) {
            break;
        }
        k += 1;
        if k > 2000 {
            break;
        }
    }
    sum
}

/// `J_nu(z)` for `nu >= 0` by the ascending series.
pub fn bessel_j(twice_nu: u32, z: DdComplex) -> DdComplex {
    let nu = nu_dd(twice_nu);
    let first = DdComplex::from_real(gamma_half(twice_nu as i64 + 2).recip());
    half_z_pow(twice_nu, z) * series_sum(first, z, nu)
}

/// `J_{-nu}(z)` for half-integer `nu > 0`.
fn bessel_j_negative_half(twice_nu: u32, z: DdComplex) -> DdComplex {
    assert!(!is_integer_order(twice_nu));
    let m = (twice_nu / 2) as i64;
    // 1 / Gamma(1/2 - m) = prod_{j=1..m} (1/2 - j) / sqrt(pi)
    let mut g = Dd::SQRT_PI.recip();
    for j in 1..=m {
        g = g.mul_f64(0.5 - j as f64);
    }
    let first = DdComplex::from_real(g);
    let shift = -nu_dd(twice_nu);
    let half = z.scale_f64(0.5);
    let pow = half.ln().scale(shift).exp();
    pow * series_sum(first, z, shift)
}

/// `Y_nu(z)` for integer or half-integer `nu >= 0`.
pub fn bessel_y(twice_nu: u32, z: DdComplex) -> DdComplex {
    if !is_integer_order(twice_nu) {
        let m = twice_nu / 2;
        let jm = bessel_j_negative_half(twice_nu, z);
        return if (m + 1) % 2 == 0 { jm } else { -jm };
    }
    let n = (twice_nu / 2) as i64;
    let half = z.scale_f64(0.5);
    let q = (z * z).scale_f64(0.25);
    let pi = Dd::PI;

    // finite part: -(z/2)^{-n}/pi sum_{k<n} (n-k-1)!/k! (z^2/4)^k
    let mut finite = DdComplex::ZERO;
    if n > 0 {
        let mut qk = DdComplex::ONE;
        for k in 0..n {
            let coef = factorial(n - k - 1) / factorial(k);
            finite = finite + qk.scale(coef);
            qk = qk * q;
        }
        finite = -(finite * half.powi(-(n as i32))).scale(pi.recip());
    }

    let jn = bessel_j(twice_nu, z);
    let log_part = (half.ln() * jn).scale(Dd::from_f64(2.0) / pi);

    // psi(k+1) + psi(n+k+1), psi(m+1) = -gamma + H_m
    let mut harmonic_k = Dd::ZERO;
    let mut harmonic_nk = Dd::ZERO;
    for j in 1..=n {
        harmonic_nk = harmonic_nk + Dd::from_f64(j as f64).recip();
    }
    let neg_q = -q;
    let mut term = DdComplex::from_real(factorial(n).recip());
    let mut sum = DdComplex::ZERO;
    let zmag = z.abs_f64();
    let mut peak = 0.0f64;
    let mut k = 0i64;
    loop {
        let psi_sum = harmonic_k + harmonic_nk - Dd::EULER_GAMMA.mul_f64(2.0);
        let contrib = term.scale(psi_sum);
        sum = sum + contrib;
        let cm = contrib.abs_f64();
        peak = peak.max(cm);
        if (k as f64) > zmag && cm < 1e-36 * peak.max(sum.abs_f64()) {
            break;
        }
        k += 1;
        if k > 2000 {
            break;
        }
        term =
            (term * neg_q).scale((Dd::from_f64(k as f64) * Dd::from_f64((n + k) as f64)).recip());
        harmonic_k = harmonic_k + Dd::from_f64(k as f64).recip();
        harmonic_nk = harmonic_nk + Dd::from_f64((n + k) as f64).recip();
    }
    let series_part = -(sum * half.powi(n as i32)).scale(pi.recip());
    finite + log_part + series_part
}

fn factorial(n: i64) -> Dd {
    let mut acc = Dd::ONE;
    for k in 2..=n {
        acc = acc.mul_f64(k as f64);
    }
    acc
}

/// Hankel function of the given kind (1 or 2) on the principal branch.
pub fn hankel(kind: u8, twice_nu: u32, z: DdComplex) -> DdComplex {
    let j = bessel_j(twice_nu, z);
    let y = bessel_y(twice_nu, z);
    let iy = DdComplex::I * y;
    match kind {
        1 => j + iy,
        2 => j - iy,
        _ => panic!("Hankel kind must be 1 or 2"),
    }
}

/// `d/dz H_nu(z)` via `H'_nu = (nu/z) H_nu - H_{nu+1}`.
pub fn hankel_derivative(kind: u8, twice_nu: u32, z: DdComplex) -> DdComplex {
    let h = hankel(kind, twice_nu, z);
    let h_next = hankel(kind, twice_nu + 2, z);
    (h / z).scale(nu_dd(twice_nu)) - h_next
}
