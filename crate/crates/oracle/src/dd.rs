//! Double-double arithmetic: an unevaluated sum `hi + lo` of two `f64`
//! values, giving roughly 31 significant decimal digits.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let err = b - (s - a);
    (s, err)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let err = a.mul_add(b, -p);
    (p, err)
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };
    pub const PI: Dd = Dd {
        hi: std::f64::consts::PI,
        lo: 1.2246467991473532e-16,
    };
    pub const TAU: Dd = Dd {
        hi: std::f64::consts::TAU,
        lo: 2.4492935982947064e-16,
    };
    pub const HALF_PI: Dd = Dd {
        hi: std::f64::consts::FRAC_PI_2,
        lo: 6.123233995736766e-17,
    };
    pub const LN2: Dd = Dd {
        hi: std::f64::consts::LN_2,
        lo: 2.3190468138462996e-17,
    };
    pub const EULER_GAMMA: Dd = Dd {
        hi: 0.5772156649015329,
        lo: -4.942915152430645e-18,
    };
    pub const SQRT_PI: Dd = Dd {
        hi: 1.772453850905516,
        lo: -7.666586499825799e-17,
    };

    pub const fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn from_i64(n: i64) -> Dd {
        let hi = n as f64;
        let lo = (n - hi as i64) as f64;
        let (hi, lo) = quick_two_sum(hi, lo);
        Dd { hi, lo }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Dd {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn is_zero(self) -> bool {
        self.hi == 0.0
    }

    pub fn mul_f64(self, b: f64) -> Dd {
        let (p, mut e) = two_prod(self.hi, b);
        e += self.lo * b;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    pub fn div_f64(self, b: f64) -> Dd {
        self / Dd::from_f64(b)
    }

    pub fn sqr(self) -> Dd {
        self * self
    }

    pub fn recip(self) -> Dd {
        Dd::ONE / self
    }

    pub fn powi(self, n: i32) -> Dd {
        if n == 0 {
            return Dd::ONE;
        }
        let mut base = self;
        let mut e = n.unsigned_abs();
        let mut acc = Dd::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        if n < 0 {
            acc.recip()
        } else {
            acc
        }
    }

    pub fn sqrt(self) -> Dd {
        if self.hi <= 0.0 {
            return Dd::ZERO;
        }
        let x = Dd::from_f64(self.hi.sqrt());
        x + (self - x.sqr()) / x.mul_f64(2.0)
    }

    pub fn round(self) -> Dd {
        let hi = self.hi.round();
        if hi == self.hi {
            // hi is already integral; the fractional part lives in lo
            let lo = self.lo.round();
            let (hi, lo) = quick_two_sum(hi, lo);
            Dd { hi, lo }
        } else if (hi - self.hi).abs() == 0.5 && self.lo != 0.0 {
            // exact tie in hi, resolved by the sign of lo
            let hi = if self.lo > 0.0 {
                self.hi.ceil()
            } else {
                self.hi.floor()
            };
            Dd { hi, lo: 0.0 }
        } else {
            Dd { hi, lo: 0.0 }
        }
    }

    pub fn exp(self) -> Dd {
        if self.hi > 709.0 {
            return Dd::from_f64(f64::INFINITY);
        }
        if self.hi < -745.0 {
            return Dd::ZERO;
        }
        let k = (self.hi / Dd::LN2.hi).round();
        let r = self - Dd::LN2.mul_f64(k);
        // scale down by 2^5 so the Taylor series converges in a handful of terms
        let r = r.div_f64(32.0);
        let mut term = Dd::ONE;
        let mut sum = Dd::ONE;
        for n in 1..30 {
            term = (term * r).div_f64(n as f64);
            sum = sum + term;
            if term.hi.abs() < 1e-36 {
                break;
            }
        }
        for _ in 0..5 {
            sum = sum.sqr();
        }
        let scale = 2f64.powi(k as i32);
        Dd {
            hi: sum.hi * scale,
            lo: sum.lo * scale,
        }
    }

    pub fn ln(self) -> Dd {
        assert!(self.hi > 0.0, "ln of non-positive double-double");
        let mut y = Dd::from_f64(self.hi.ln());
        for _ in 0..2 {
            y = y + self * (-y).exp() - Dd::ONE;
        }
        y
    }

    /// Sine and cosine evaluated together.
    pub fn sin_cos(self) -> (Dd, Dd) {
        let k = (self / Dd::TAU).round();
        let r = self - Dd::TAU * k;
        let q = (r.hi / Dd::HALF_PI.hi).round();
        let r = r - Dd::HALF_PI.mul_f64(q);
        let r2 = r.sqr();
        // Taylor series on |r| <= pi/4
        let mut s_term = r;
        let mut s = r;
        let mut c_term = Dd::ONE;
        let mut c = Dd::ONE;
        for n in 1..40 {
            let a = (2 * n) as f64;
            s_term = -(s_term * r2).div_f64(a * (a + 1.0));
            c_term = -(c_term * r2).div_f64((a - 1.0) * a);
            s = s + s_term;
            c = c + c_term;
            if s_term.hi.abs() < 1e-36 && c_term.hi.abs() < 1e-36 {
                break;
            }
        }
        match (q as i64).rem_euclid(4) {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        }
    }

    pub fn sin(self) -> Dd {
        self.sin_cos().0
    }

    pub fn cos(self) -> Dd {
        self.sin_cos().1
    }

    /// Four-quadrant arctangent of `y / x`.
    pub fn atan2(y: Dd, x: Dd) -> Dd {
        let mut z = Dd::from_f64(y.hi.atan2(x.hi));
        for _ in 0..2 {
            let (s, c) = z.sin_cos();
            let f = x * s - y * c;
            let fp = x * c + y * s;
            if fp.is_zero() {
                break;
            }
            z = z - f / fp;
        }
        z
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Self {
        Dd::from_f64(x)
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, b: Dd) -> Dd {
        let (s, mut e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        e += t;
        let (s, mut e) = quick_two_sum(s, e);
        e += f;
        let (hi, lo) = quick_two_sum(s, e);
        Dd { hi, lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, b: Dd) -> Dd {
        let (p, mut e) = two_prod(self.hi, b.hi);
        e += self.hi * b.lo + self.lo * b.hi;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo } + Dd::from_f64(q3)
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, other: &Dd) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            ord => ord,
        }
    }
}

impl fmt::Display for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e} + {:e}", self.hi, self.lo)
    }
}

/// Complex number with double-double parts.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DdComplex {
    pub re: Dd,
    pub im: Dd,
}

impl DdComplex {
    pub const ZERO: DdComplex = DdComplex {
        re: Dd::ZERO,
        im: Dd::ZERO,
    };
    pub const ONE: DdComplex = DdComplex {
        re: Dd::ONE,
        im: Dd::ZERO,
    };
    pub const I: DdComplex = DdComplex {
        re: Dd::ZERO,
        im: Dd::ONE,
    };

    pub fn new(re: Dd, im: Dd) -> Self {
        DdComplex { re, im }
    }

    pub fn from_f64(re: f64, im: f64) -> Self {
        DdComplex {
            re: Dd::from_f64(re),
            im: Dd::from_f64(im),
        }
    }

    pub fn from_real(re: Dd) -> Self {
        DdComplex { re, im: Dd::ZERO }
    }

    pub fn to_c64(self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn scale(self, s: Dd) -> Self {
        DdComplex {
            re: self.re * s,
            im: self.im * s,
        }
    }

    pub fn scale_f64(self, s: f64) -> Self {
        DdComplex {
            re: self.re.mul_f64(s),
            im: self.im.mul_f64(s),
        }
    }

    pub fn conj(self) -> Self {
        DdComplex {
            re: self.re,
            im: -self.im,
        }
    }

    pub fn norm_sqr(self) -> Dd {
        self.re.sqr() + self.im.sqr()
    }

    pub fn abs(self) -> Dd {
        self.norm_sqr().sqrt()
    }

    pub fn abs_f64(self) -> f64 {
        self.re.to_f64().hypot(self.im.to_f64())
    }

    pub fn arg(self) -> Dd {
        Dd::atan2(self.im, self.re)
    }

    pub fn exp(self) -> Self {
        let m = self.re.exp();
        let (s, c) = self.im.sin_cos();
        DdComplex {
            re: m * c,
            im: m * s,
        }
    }

    /// Principal logarithm.
    pub fn ln(self) -> Self {
        DdComplex {
            re: self.norm_sqr().ln().mul_f64(0.5),
            im: self.arg(),
        }
    }

    pub fn powi(self, n: i32) -> Self {
        if n == 0 {
            return DdComplex::ONE;
        }
        let mut base = self;
        let mut e = n.unsigned_abs();
        let mut acc = DdComplex::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        if n < 0 {
            DdComplex::ONE / acc
        } else {
            acc
        }
    }
}

impl Neg for DdComplex {
    type Output = DdComplex;
    fn neg(self) -> Self {
        DdComplex {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Add for DdComplex {
    type Output = DdComplex;
    fn add(self, b: Self) -> Self {
        DdComplex {
            re: self.re + b.re,
            im: self.im + b.im,
        }
    }
}

impl Sub for DdComplex {
    type Output = DdComplex;
    fn sub(self, b: Self) -> Self {
        DdComplex {
            re: self.re - b.re,
            im: self.im - b.im,
        }
    }
}

impl Mul for DdComplex {
    type Output = DdComplex;
    fn mul(self, b: Self) -> Self {
        DdComplex {
            re: self.re * b.re - self.im * b.im,
            im: self.re * b.im + self.im * b.re,
        }
    }
}

impl Div for DdComplex {
    type Output = DdComplex;
    fn div(self, b: Self) -> Self {
        let d = b.norm_sqr();
        DdComplex {
            re: (self.re * b.re + self.im * b.im) / d,
            im: (self.im * b.re - self.re * b.im) / d,
        }
    }
}
