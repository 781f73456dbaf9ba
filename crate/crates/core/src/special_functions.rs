//! Bessel and Hankel functions of integer and half-integer order, continued
//! to the logarithmic plane.
//!
//! Principal-sheet values come from the AMOS algorithms (`complex-bessel`).
//! Other sheets are reached through the connection formulas for
//! `z -> z e^{m pi i}`, choosing `m` so that the principal argument `w`
//! satisfies `|arg w| <= pi/2`.

use crate::error::{Error, Result};
use complex_bessel::{Accuracy, Scaling};
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};

/// A point of the logarithmic plane: modulus and unreduced angle.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LogPoint {
    pub r: f64,
    pub theta: f64,
}

impl LogPoint {
    pub fn new(r: f64, theta: f64) -> Self {
        Self { r, theta }
    }

    /// The point over `z` with `theta` in `(-pi, pi]`.
    pub fn principal(z: Complex64) -> Self {
        Self {
            r: z.norm(),
            theta: z.arg(),
        }
    }

    /// Inverse of [`LogPoint::log`].
    pub fn from_log(w: Complex64) -> Self {
        Self {
            r: w.re.exp(),
            theta: w.im,
        }
    }

    /// `ln r + i theta`.
    pub fn log(self) -> Complex64 {
        Complex64::new(self.r.ln(), self.theta)
    }

    pub fn project(self) -> Complex64 {
        Complex64::from_polar(self.r, self.theta)
    }

    /// Multiply by a positive real, staying on the same sheet.
    pub fn scale(self, s: f64) -> Self {
        Self {
            r: self.r * s,
            theta: self.theta,
        }
    }

    /// `-conj(z)` on the identified plane, `theta -> -pi - theta`.
    pub fn mirror(self) -> Self {
        Self {
            r: self.r,
            theta: -PI - self.theta,
        }
    }
}

/// Conic neighbourhood of the real axis on the identified plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeRegion {
    pub rho: f64,
    pub r_min: f64,
    pub r_max: f64,
}

impl ConeRegion {
    pub fn new(rho: f64, r_min: f64, r_max: f64) -> Result<Self> {
        if !(rho > 0.0 && rho < FRAC_PI_2) {
            return Err(Error::InvalidInput(format!(
                "cone aperture {rho} outside (0, pi/2)"
            )));
        }
        if !(r_min > 0.0 && r_max > r_min) {
            return Err(Error::InvalidInput(format!(
                "radii [{r_min}, {r_max}] empty"
            )));
        }
        Ok(Self { rho, r_min, r_max })
    }

    /// The positive axis sits at `theta = 0` and the negative one at `theta = -pi`.
    pub fn contains(&self, z: LogPoint) -> bool {
        z.r >= self.r_min
            && z.r <= self.r_max
            && (z.theta.abs() < self.rho || (z.theta + PI).abs() < self.rho)
    }
}

/// Bessel order `nu = twice_nu / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Order {
    pub twice_nu: u32,
}

impl Order {
    pub fn new(twice_nu: u32) -> Self {
        Self { twice_nu }
    }

    pub fn integer(n: u32) -> Self {
        Self { twice_nu: 2 * n }
    }

    pub fn nu(self) -> f64 {
        0.5 * self.twice_nu as f64
    }

    pub fn is_integer(self) -> bool {
        self.twice_nu % 2 == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HankelKind {
    First,
    Second,
}

fn map_err(e: complex_bessel::Error, what: &str) -> Error {
    match e {
        complex_bessel::Error::Overflow => Error::Overflow(what.to_string()),
        complex_bessel::Error::TotalPrecisionLoss => Error::AccuracyLoss(what.to_string()),
        other => Error::Domain(format!("{what}: {other:?}")),
    }
}

/// `J_nu(z)` for `nu >= 0`.
pub fn bessel_j(nu: Order, z: Complex64) -> Result<Complex64> {
    if z == Complex64::new(0.0, 0.0) {
        if !nu.is_integer() {
            return Err(Error::Domain("half-integer order at z = 0".into()));
        }
        return Ok(if nu.twice_nu == 0 {
            1.0.into()
        } else {
            0.0.into()
        });
    }
    let res = complex_bessel::besselj_seq(nu.nu(), z, 1, Scaling::Unscaled)
        .map_err(|e| map_err(e, "J"))?;
    if res.status == Accuracy::Reduced {
        return Err(Error::AccuracyLoss(format!("J_{} at {z}", nu.nu())));
    }
    Ok(res.values[0])
}

/// `J_nu(z)` and `dJ/dz` at a point of the logarithmic plane, from
/// `J_nu(w e^{m pi i}) = e^{m nu pi i} J_nu(w)`.
pub fn bessel_j_with_derivative(nu: Order, z: LogPoint) -> Result<(Complex64, Complex64)> {
    check_point(z)?;
    let (w, m) = reduce(z);
    let res = complex_bessel::besselj_seq(nu.nu(), w, 2, Scaling::Unscaled)
        .map_err(|e| map_err(e, "J"))?;
    if res.status == Accuracy::Reduced {
        return Err(Error::AccuracyLoss(format!("J_{} at {w}", nu.nu())));
    }
    let (j, dj) = value_and_derivative(nu, w, [res.values[0], res.values[1]]);
    let turn = match (m * nu.twice_nu as i64).rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    };
    let sign = if m.rem_euclid(2) == 1 { -1.0 } else { 1.0 };
    Ok((turn * j, turn * dj * sign))
}

/// `sin(k nu pi) / sin(nu pi)`, with the integer-order limit.
fn sine_ratio(k: i64, nu: Order) -> f64 {
    if nu.is_integer() {
        let n = (nu.twice_nu / 2) as i64;
        let sign = if ((k - 1) * n).rem_euclid(2) == 0 {
            1.0
        } else {
            -1.0
        };
        k as f64 * sign
    } else {
        let quarter = |m: i64| match m.rem_euclid(4) {
            1 => 1.0,
            3 => -1.0,
            _ => 0.0,
        };
        quarter(k * nu.twice_nu as i64) / quarter(nu.twice_nu as i64)
    }
}

/// `e^{i nu pi s}` for `s = +-1`, which is `i^{+-twice_nu}`.
fn phase(nu: Order, s: i64) -> Complex64 {
    match (s * nu.twice_nu as i64).rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Coefficients `(a, b)` with `H^(kind)(w e^{m pi i}) = a H^(1)(w) + b H^(2)(w)`.
fn connection(kind: HankelKind, nu: Order, m: i64) -> (Complex64, Complex64) {
    match kind {
        HankelKind::First => (
            Complex64::new(-sine_ratio(m - 1, nu), 0.0),
            -phase(nu, -1) * sine_ratio(m, nu),
        ),
        HankelKind::Second => (
            phase(nu, 1) * sine_ratio(m, nu),
            Complex64::new(sine_ratio(m + 1, nu), 0.0),
        ),
    }
}

/// Sheet decomposition `z = w e^{m pi i}` with `|arg w| <= pi/2`.
fn reduce(z: LogPoint) -> (Complex64, i64) {
    let m = (z.theta / PI).round();
    let w = Complex64::from_polar(z.r, z.theta - m * PI);
    (w, m as i64)
}

fn check_point(z: LogPoint) -> Result<()> {
    if !(z.r > 0.0) || !z.r.is_finite() || !z.theta.is_finite() {
        return Err(Error::Domain(format!(
            "Hankel argument r = {}, theta = {}",
            z.r, z.theta
        )));
    }
    Ok(())
}

/// `H_nu(w)` and `H_{nu+1}(w)` on the principal sheet.
fn principal_pair(
    kind: HankelKind,
    nu: Order,
    w: Complex64,
    scaling: Scaling,
) -> Result<[Complex64; 2]> {
    let res = match kind {
        HankelKind::First => complex_bessel::hankel1_seq(nu.nu(), w, 2, scaling),
        HankelKind::Second => complex_bessel::hankel2_seq(nu.nu(), w, 2, scaling),
    }
    .map_err(|e| map_err(e, "H"))?;
    if res.status == Accuracy::Reduced {
        return Err(Error::AccuracyLoss(format!("H_{} at {w}", nu.nu())));
    }
    if res.values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Overflow(format!("H_{} at {w}", nu.nu())));
    }
    Ok([res.values[0], res.values[1]])
}

/// Value and `z`-derivative from the principal pair `[H_nu, H_{nu+1}]`.
fn value_and_derivative(nu: Order, w: Complex64, pair: [Complex64; 2]) -> (Complex64, Complex64) {
    (pair[0], pair[0] * (nu.nu() / w) - pair[1])
}

/// `H^(kind)_nu(z)` and `dH/dz` at a point of the logarithmic plane.
pub fn hankel_with_derivative(
    kind: HankelKind,
    nu: Order,
    z: LogPoint,
) -> Result<(Complex64, Complex64)> {
    check_point(z)?;
    let (w, m) = reduce(z);
    let (a, b) = connection(kind, nu, m);
    let mut h = Complex64::new(0.0, 0.0);
    let mut dh = Complex64::new(0.0, 0.0);
    for (coef, k) in [(a, HankelKind::First), (b, HankelKind::Second)] {
        if coef == Complex64::new(0.0, 0.0) {
            continue;
        }
        let (v, d) = value_and_derivative(nu, w, principal_pair(k, nu, w, Scaling::Unscaled)?);
        h += coef * v;
        dh += coef * d;
    }
    // d/dz at z = w e^{m pi i} picks up e^{-m pi i}
    if m.rem_euclid(2) == 1 {
        dh = -dh;
    }
    if !h.is_finite() || !dh.is_finite() {
        return Err(Error::Overflow(format!(
            "H_{} at r = {}, theta = {}",
            nu.nu(),
            z.r,
            z.theta
        )));
    }
    Ok((h, dh))
}

/// Hankel function of the given kind on the logarithmic plane.
pub fn hankel(kind: HankelKind, nu: Order, z: LogPoint) -> Result<Complex64> {
    hankel_with_derivative(kind, nu, z).map(|(h, _)| h)
}

/// `dH^(kind)_nu/dz` from the three-term recurrence.
pub fn hankel_derivative(kind: HankelKind, nu: Order, z: LogPoint) -> Result<Complex64> {
    hankel_with_derivative(kind, nu, z).map(|(_, d)| d)
}

/// A logarithm of `H^(kind)_nu(z)`, usable where the value itself overflows.
///
/// The real part is `ln |H|`. The imaginary part is an argument of `H`, not
/// continuous across sheets.
pub fn log_hankel(kind: HankelKind, nu: Order, z: LogPoint) -> Result<Complex64> {
    check_point(z)?;
    let (w, m) = reduce(z);
    let (a, b) = connection(kind, nu, m);
    let i = Complex64::i();
    // scaled: H1 = e^{iw} S1, H2 = e^{-iw} S2
    let mut terms: Vec<(Complex64, Complex64)> = Vec::with_capacity(2);
    if a != Complex64::new(0.0, 0.0) {
        let s = principal_pair(HankelKind::First, nu, w, Scaling::Exponential)?[0];
        terms.push((i * w, a * s));
    }
    if b != Complex64::new(0.0, 0.0) {
        let s = principal_pair(HankelKind::Second, nu, w, Scaling::Exponential)?[0];
        terms.push((-i * w, b * s));
    }
    let lead = terms
        .iter()
        .map(|(e, _)| *e)
        .max_by(|x, y| x.re.total_cmp(&y.re))
        .ok_or_else(|| Error::Domain("empty connection".into()))?;
    let sum: Complex64 = terms.iter().map(|(e, c)| c * (e - lead).exp()).sum();
    if sum == Complex64::new(0.0, 0.0) {
        return Err(Error::Domain(format!(
            "H_{} vanishes at r = {}, theta = {}",
            nu.nu(),
            z.r,
            z.theta
        )));
    }
    Ok(lead + sum.ln())
}

/// Projection onto the plane cut along the positive imaginary axis,
/// `theta` in `(-3 pi / 2, pi / 2)`.
pub fn to_cut_plane(z: LogPoint) -> Option<Complex64> {
    if z.theta > -1.5 * PI && z.theta < FRAC_PI_2 {
        Some(z.project())
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn j_examples() {
        assert_eq!(
            bessel_j(Order::integer(0), c(0.0, 0.0)).unwrap(),
            c(1.0, 0.0)
        );
        let v = bessel_j(Order::new(1), c(FRAC_PI_2, 0.0)).unwrap();
        assert!((v - c(2.0 / PI, 0.0)).norm() < 1e-15);
        assert!(matches!(
            bessel_j(Order::new(1), c(0.0, 0.0)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn half_order_first_kind() {
        let h = hankel(HankelKind::First, Order::new(1), LogPoint::new(1.0, 0.0)).unwrap();
        let expected = -Complex64::i() * (2.0 / PI).sqrt() * Complex64::i().exp();
        assert!((h - expected).norm() < 1e-15);
    }

    #[test]
    fn derivative_recurrence_order_zero() {
        let z = LogPoint::new(1.0, 0.0);
        let d = hankel_derivative(HankelKind::First, Order::integer(0), z).unwrap();
        let h1 = hankel(HankelKind::First, Order::integer(1), z).unwrap();
        assert!((d + h1).norm() < 1e-15);
    }

    #[test]
    fn derivative_half_order_second_kind() {
        // H^(2)_{1/2}(z) = i sqrt(2/(pi z)) e^{-iz}
        let z = c(1.0, 0.0);
        let f = Complex64::i() * (2.0 / (PI * z)).sqrt() * (-Complex64::i() * z).exp();
        let expected = f * (-Complex64::i() - 0.5 / z);
        let d =
            hankel_derivative(HankelKind::Second, Order::new(1), LogPoint::new(1.0, 0.0)).unwrap();
        assert!((d - expected).norm() < 1e-14);
    }

    #[test]
    fn finite_difference_derivative() {
        let z = c(2.0, 0.5);
        let h = 1e-5;
        for kind in [HankelKind::First, HankelKind::Second] {
            for twice_nu in [0, 1, 4, 7] {
                let nu = Order::new(twice_nu);
                let f = |x: Complex64| hankel(kind, nu, LogPoint::principal(x)).unwrap();
                let fd = (f(z + h) - f(z - h)) / (2.0 * h);
                let an = hankel_derivative(kind, nu, LogPoint::principal(z)).unwrap();
                assert!((an - fd).norm() < 1e-7, "{kind:?} {twice_nu}: {an} vs {fd}");
            }
        }
    }

    #[test]
    fn half_order_sheets_follow_the_square_root() {
        // H^(1)_{1/2}(z) = -i sqrt(2/(pi z)) e^{iz}, continued through sqrt(z) on the cover
        for theta in [-2.7, -1.0, 2.0, 3.5, 5.0, -6.0] {
            let z = LogPoint::new(1.3, theta);
            let sqrt_z = Complex64::from_polar(z.r.sqrt(), 0.5 * theta);
            let zz = z.project();
            let expected =
                -Complex64::i() * (2.0 / PI).sqrt() / sqrt_z * (Complex64::i() * zz).exp();
            let h = hankel(HankelKind::First, Order::new(1), z).unwrap();
            assert!(
                (h - expected).norm() < 1e-13 * expected.norm(),
                "theta {theta}"
            );
        }
    }

    #[test]
    fn integer_order_full_turn() {
        // H^(1)_n(z e^{2 pi i}) = -H^(1)_n(z) - 2 H^(2)_n(z) ... for n = 0: J - iY - 4 i J
        let z0 = LogPoint::new(0.8, 0.3);
        let nu = Order::integer(0);
        let h1 = hankel(HankelKind::First, nu, z0).unwrap();
        let h2 = hankel(HankelKind::Second, nu, z0).unwrap();
        let turned = hankel(HankelKind::First, nu, LogPoint::new(0.8, 0.3 + 2.0 * PI)).unwrap();
        assert!((turned - (-h1 - 2.0 * h2)).norm() < 1e-13 * h1.norm());
    }

    #[test]
    fn j_on_other_sheets() {
        // H1 + H2 = 2 J on every sheet
        for n in [0, 1, 4, 7] {
            for theta in [0.3, 2.0, -2.5, 4.0, -5.0] {
                let z = LogPoint::new(2.5, theta);
                let (h1, d1) = hankel_with_derivative(HankelKind::First, Order::new(n), z).unwrap();
                let (h2, d2) =
                    hankel_with_derivative(HankelKind::Second, Order::new(n), z).unwrap();
                let (j, dj) = bessel_j_with_derivative(Order::new(n), z).unwrap();
                assert!(
                    (h1 + h2 - 2.0 * j).norm() < 1e-12 * h1.norm().max(1.0),
                    "n={n} theta={theta}"
                );
                assert!(
                    (d1 + d2 - 2.0 * dj).norm() < 1e-12 * d1.norm().max(1.0),
                    "n={n} theta={theta}"
                );
            }
        }
    }

    #[test]
    fn wronskian_principal() {
        for (twice_nu, z) in [
            (0, c(0.3, 0.1)),
            (3, c(5.0, -2.0)),
            (20, c(7.0, 3.0)),
            (41, c(12.0, 0.0)),
        ] {
            let nu = Order::new(twice_nu);
            let p = LogPoint::principal(z);
            let (h1, d1) = hankel_with_derivative(HankelKind::First, nu, p).unwrap();
            let (h2, d2) = hankel_with_derivative(HankelKind::Second, nu, p).unwrap();
            let w = h1 * d2 - d1 * h2;
            let expected = -4.0 * Complex64::i() / (PI * z);
            assert!(
                (w - expected).norm() < 1e-10 * expected.norm(),
                "{twice_nu}"
            );
        }
    }

    #[test]
    fn log_hankel_matches_value() {
        for theta in [0.4, -0.4, 2.5, -3.6, 6.5] {
            for kind in [HankelKind::First, HankelKind::Second] {
                let z = LogPoint::new(3.0, theta);
                let nu = Order::new(3);
                let h = hankel(kind, nu, z).unwrap();
                let l = log_hankel(kind, nu, z).unwrap();
                assert!((l.exp() - h).norm() < 1e-12 * h.norm());
            }
        }
        let far = LogPoint::new(900.0, -1.4);
        let l = log_hankel(HankelKind::First, Order::integer(2), far).unwrap();
        assert!(l.re > 700.0);
        assert!(matches!(
            hankel(HankelKind::First, Order::integer(2), far),
            Err(Error::Overflow(_))
        ));
    }

    #[test]
    fn cut_plane() {
        assert_eq!(to_cut_plane(LogPoint::new(1.0, 0.0)), Some(c(1.0, 0.0)));
        assert_eq!(to_cut_plane(LogPoint::new(1.0, FRAC_PI_2)), None);
        assert_eq!(to_cut_plane(LogPoint::new(1.0, 2.0 * PI)), None);
        assert!(to_cut_plane(LogPoint::new(1.0, -1.4 * PI)).is_some());
    }

    #[test]
    fn cone_membership() {
        let cone = ConeRegion::new(1.2, 0.5, 20.0).unwrap();
        assert!(cone.contains(LogPoint::new(1.0, 1.1)));
        assert!(cone.contains(LogPoint::new(1.0, -PI - 1.1)));
        assert!(!cone.contains(LogPoint::new(1.0, 1.3)));
        assert!(!cone.contains(LogPoint::new(30.0, 0.0)));
        assert!(ConeRegion::new(1.6, 0.5, 2.0).is_err());
    }

    #[test]
    fn projection_forgets_full_turns() {
        let a = LogPoint::new(2.0, 0.7);
        let b = LogPoint::new(2.0, 0.7 + 2.0 * PI);
        assert_ne!(a, b);
        assert!((a.project() - b.project()).norm() < 1e-14);
    }
}
