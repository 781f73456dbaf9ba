//! Zeros of analytic functions on patches of the logarithmic plane.
//!
//! Counting uses the argument principle on rectangles, either in the plane
//! or in logarithmic coordinates `(ln r, theta)`. Boxes with more than one
//! zero are split into four, and boxes with exactly one are handed to a
//! damped Newton iteration.

use crate::error::{Error, Result};
use crate::fit::power_law;
use crate::model_ball::BallModel;
use crate::quadrature::integrate_complex;
use crate::special_functions::{to_cut_plane, ConeRegion, LogPoint};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

/// A rectangle in the plane (`z = x + i y`) or in logarithmic coordinates
/// (`lambda = e^{u + i theta}`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rect {
    Cartesian { x0: f64, x1: f64, y0: f64, y1: f64 },
    Log { u0: f64, u1: f64, t0: f64, t1: f64 },
}

impl Rect {
    /// Log rectangle from radii and angles.
    pub fn polar(r0: f64, r1: f64, t0: f64, t1: f64) -> Self {
        Rect::Log {
            u0: r0.ln(),
            u1: r1.ln(),
            t0,
            t1,
        }
    }

    fn bounds(&self) -> (f64, f64, f64, f64) {
        match *self {
            Rect::Cartesian { x0, x1, y0, y1 } => (x0, x1, y0, y1),
            Rect::Log { u0, u1, t0, t1 } => (u0, u1, t0, t1),
        }
    }

    fn with_bounds(&self, a0: f64, a1: f64, b0: f64, b1: f64) -> Self {
        match self {
            Rect::Cartesian { .. } => Rect::Cartesian {
                x0: a0,
                x1: a1,
                y0: b0,
                y1: b1,
            },
            Rect::Log { .. } => Rect::Log {
                u0: a0,
                u1: a1,
                t0: b0,
                t1: b1,
            },
        }
    }

    /// The point with coordinate `zeta` (`x + i y` or `u + i theta`).
    pub fn point(&self, zeta: Complex64) -> LogPoint {
        match self {
            Rect::Cartesian { .. } => LogPoint::principal(zeta),
            Rect::Log { .. } => LogPoint::from_log(zeta),
        }
    }

    /// Coordinate of a point, the inverse of [`Rect::point`].
    pub fn coordinate(&self, p: LogPoint) -> Complex64 {
        match self {
            Rect::Cartesian { .. } => p.project(),
            Rect::Log { .. } => p.log(),
        }
    }

    /// `d lambda / d zeta` at `p`.
    fn jacobian(&self, p: LogPoint) -> Complex64 {
        match self {
            Rect::Cartesian { .. } => Complex64::new(1.0, 0.0),
            Rect::Log { .. } => p.project(),
        }
    }

    pub fn contains(&self, p: LogPoint) -> bool {
        let z = self.coordinate(p);
        let (a0, a1, b0, b1) = self.bounds();
        z.re > a0 && z.re < a1 && z.im > b0 && z.im < b1
    }

    pub fn width(&self) -> f64 {
        let (a0, a1, _, _) = self.bounds();
        a1 - a0
    }

    pub fn height(&self) -> f64 {
        let (_, _, b0, b1) = self.bounds();
        b1 - b0
    }

    fn corners(&self) -> [Complex64; 4] {
        let (a0, a1, b0, b1) = self.bounds();
        [
            Complex64::new(a0, b0),
            Complex64::new(a1, b0),
            Complex64::new(a1, b1),
            Complex64::new(a0, b1),
        ]
    }

    fn center(&self) -> Complex64 {
        let (a0, a1, b0, b1) = self.bounds();
        Complex64::new(0.5 * (a0 + a1), 0.5 * (b0 + b1))
    }

    /// Four children meeting at the point `(fx, fy)` given as fractions of the sides.
    pub fn split(&self, fx: f64, fy: f64) -> [Rect; 4] {
        let (a0, a1, b0, b1) = self.bounds();
        let am = a0 + fx * (a1 - a0);
        let bm = b0 + fy * (b1 - b0);
        [
            self.with_bounds(a0, am, b0, bm),
            self.with_bounds(am, a1, b0, bm),
            self.with_bounds(am, a1, bm, b1),
            self.with_bounds(a0, am, bm, b1),
        ]
    }

    /// Split only along the longer side, at fraction `f`.
    fn halve(&self, f: f64) -> [Rect; 2] {
        let (a0, a1, b0, b1) = self.bounds();
        if a1 - a0 >= b1 - b0 {
            let am = a0 + f * (a1 - a0);
            [
                self.with_bounds(a0, am, b0, b1),
                self.with_bounds(am, a1, b0, b1),
            ]
        } else {
            let bm = b0 + f * (b1 - b0);
            [
                self.with_bounds(a0, a1, b0, bm),
                self.with_bounds(a0, a1, bm, b1),
            ]
        }
    }

    /// Square of half-side `h` centred at coordinate `c`.
    pub fn around(&self, c: Complex64, h: f64) -> Rect {
        self.with_bounds(c.re - h, c.re + h, c.im - h, c.im + h)
    }

    fn jitter(&self, rng: &mut ChaCha8Rng, amount: f64) -> Rect {
        let (a0, a1, b0, b1) = self.bounds();
        let w = a1 - a0;
        let h = b1 - b0;
        let mut d = || amount * (2.0 * rng.random::<f64>() - 1.0);
        self.with_bounds(a0 + d() * w, a1 + d() * w, b0 + d() * h, b1 + d() * h)
    }
}

/// Tolerances for counting and refinement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FinderOptions {
    /// Absolute tolerance on the contour integral of `f'/f`.
    pub quad_tol: f64,
    /// Newton step tolerance in box coordinates.
    pub root_tol: f64,
    /// A zero closer to the contour than this fraction of the shorter side
    /// counts as a boundary zero.
    pub boundary_guard: f64,
    /// Perturbation attempts before a boundary zero is an error.
    pub retries: usize,
    pub seed: u64,
}

impl Default for FinderOptions {
    fn default() -> Self {
        Self {
            quad_tol: 0.02,
            root_tol: 1e-12,
            boundary_guard: 1e-4,
            retries: 5,
            seed: 0x5eed,
        }
    }
}

enum Winding {
    Value(f64),
    NearBoundary,
}

fn winding<F>(f: &F, rect: &Rect, opts: &FinderOptions, panels: usize) -> Result<Winding>
where
    F: Fn(LogPoint) -> Result<(Complex64, Complex64)>,
{
    let c = rect.corners();
    let short = rect.width().min(rect.height());
    let guard = opts.boundary_guard * short;
    let mut total = Complex64::new(0.0, 0.0);
    for k in 0..4 {
        let p = c[k];
        let q = c[(k + 1) % 4];
        let dz = q - p;
        let near = std::cell::Cell::new(false);
        let integrand = |s: f64| -> Result<Complex64> {
            let zeta = p + dz * s;
            let pt = rect.point(zeta);
            let (v, d) = f(pt)?;
            let ld = d * rect.jacobian(pt) / v;
            if !ld.is_finite() || 1.0 / ld.norm() < guard {
                near.set(true);
                return Ok(Complex64::new(0.0, 0.0));
            }
            Ok(ld * dz)
        };
        let r = integrate_complex(integrand, 0.0, 1.0, opts.quad_tol / 8.0, 0.0, panels);
        if near.get() {
            return Ok(Winding::NearBoundary);
        }
        total += r?.value;
    }
    let w = total / Complex64::new(0.0, TAU);
    if (w.re - w.re.round()).abs() >= 0.25 || w.im.abs() >= 0.25 {
        return Err(Error::NonIntegerWinding { value: w.re });
    }
    Ok(Winding::Value(w.re))
}

/// Number of zeros of `f` inside `rect`, by the argument principle.
///
/// `f` maps a point to `(f, df/dlambda)`. A zero near the contour moves the
/// contour by a small seeded random amount, at most `opts.retries` times.
pub fn count_zeros<F>(f: &F, rect: &Rect, opts: &FinderOptions) -> Result<usize>
where
    F: Fn(LogPoint) -> Result<(Complex64, Complex64)>,
{
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut r = *rect;
    for _ in 0..=opts.retries {
        match winding(f, &r, opts, 2000)? {
            Winding::Value(w) => {
                if w.round() < 0.0 {
                    return Err(Error::NonIntegerWinding { value: w });
                }
                return Ok(w.round() as usize);
            }
            Winding::NearBoundary => r = rect.jitter(&mut rng, 0.01),
        }
    }
    Err(Error::BoundaryZero {
        retries: opts.retries,
    })
}

/// Count without perturbation; `None` flags a zero on or near the contour.
fn count_fixed<F>(f: &F, rect: &Rect, opts: &FinderOptions) -> Result<Option<usize>>
where
    F: Fn(LogPoint) -> Result<(Complex64, Complex64)>,
{
    match winding(f, rect, opts, 2000)? {
        Winding::Value(w) if w.round() >= 0.0 => Ok(Some(w.round() as usize)),
        Winding::Value(w) => Err(Error::NonIntegerWinding { value: w }),
        Winding::NearBoundary => Ok(None),
    }
}

/// Damped Newton iteration for `f(z) = 0` in the plane.
pub fn refine_zero<F, D>(f: F, df: D, guess: Complex64, tol: f64) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64,
    D: Fn(Complex64) -> Complex64,
{
    let mut z = guess;
    let mut fz = f(z);
    for _ in 0..60 {
        let d = df(z);
        if d.norm() == 0.0 || !d.is_finite() {
            return Err(Error::Divergence(format!("vanishing derivative at {z}")));
        }
        let mut step = fz / d;
        let mut next = z - step;
        let mut fnext = f(next);
        let mut halvings = 0;
        while !(fnext.norm() <= fz.norm()) && halvings < 12 {
            step *= 0.5;
            next = z - step;
            fnext = f(next);
            halvings += 1;
        }
        z = next;
        fz = fnext;
        if step.norm() < tol * z.norm().max(1.0) && fz.norm() < tol {
            return Ok(z);
        }
    }
    Err(Error::Divergence(format!("no convergence from {guess}")))
}

/// Newton in box coordinates; `None` when the iterate leaves `rect`.
fn newton_in_rect<F>(f: &F, rect: &Rect, start: Complex64, tol: f64) -> Result<Option<LogPoint>>
where
    F: Fn(LogPoint) -> Result<(Complex64, Complex64)>,
{
    let mut zeta = start;
    let (mut v, mut d) = f(rect.point(zeta))?;
    for _ in 0..60 {
        let jac = rect.jacobian(rect.point(zeta));
        let mut step = v / (d * jac);
        if !step.is_finite() {
            return Ok(None);
        }
        let mut halvings = 0;
        loop {
            let cand = zeta - step;
            let (cv, cd) = f(rect.point(cand))?;
            if cv.norm() <= v.norm() || halvings >= 12 {
                zeta = cand;
                v = cv;
                d = cd;
                break;
            }
            step *= 0.5;
            halvings += 1;
        }
        if !rect.contains(rect.point(zeta)) {
            return Ok(None);
        }
        if step.norm() < tol * zeta.norm().max(1.0) {
            return Ok(Some(rect.point(zeta)));
        }
    }
    Ok(None)
}

/// A located zero with the box that isolated it.
#[derive(Debug, Clone, Copy)]
pub struct IsolatedZero {
    pub location: LogPoint,
    pub multiplicity: usize,
    pub leaf: Rect,
}

/// All zeros of `f` in `rect`, each with multiplicity.
///
/// The leaves of the subdivision form a disjoint cover of `rect`; the sum of
/// their counts must equal the number of refined zeros.
pub fn zeros_in_rect<F>(
    f: &F,
    rect: &Rect,
    opts: &FinderOptions,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<IsolatedZero>>
where
    F: Fn(LogPoint) -> Result<(Complex64, Complex64)>,
{
    let total = match count_fixed(f, rect, opts)? {
        Some(n) => n,
        None => return Err(Error::BoundaryZero { retries: 0 }),
    };
    let mut found = Vec::new();
    let mut cover = 0usize;
    let mut stack = vec![(*rect, total, 0u32)];
    while let Some((r, n, depth)) = stack.pop() {
        if n == 0 {
            continue;
        }
        let size = r.width().max(r.height());
        if n == 1 || size < 1e-9 {
            if let Some(p) = newton_in_rect(f, &r, r.center(), opts.root_tol)? {
                cover += n;
                found.push(IsolatedZero {
                    location: p,
                    multiplicity: n,
                    leaf: r,
                });
                continue;
            }
            if size < 1e-9 {
                return Err(Error::Divergence(format!(
                    "Newton failed in a box of size {size:e}"
                )));
            }
        }
        if depth > 60 {
            return Err(Error::Divergence("subdivision depth exceeded".into()));
        }
        let mut done = false;
        for _ in 0..=opts.retries {
            let fx = 0.5 + 0.15 * (2.0 * rng.random::<f64>() - 1.0);
            let fy = 0.5 + 0.15 * (2.0 * rng.random::<f64>() - 1.0);
            let ratio = r.width() / r.height();
            let children: Vec<Rect> = if ratio > 2.5 || ratio < 0.4 {
                r.halve(fx).to_vec()
            } else {
                r.split(fx, fy).to_vec()
            };
            let mut counts = Vec::with_capacity(children.len());
            let mut ok = true;
            for c in &children {
                match count_fixed(f, c, opts)? {
                    Some(k) => counts.push(k),
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                continue;
            }
            let sum: usize = counts.iter().sum();
            if sum != n {
                let tighter = FinderOptions {
                    quad_tol: opts.quad_tol / 16.0,
                    ..*opts
                };
                let recount: Result<Vec<Option<usize>>> = children
                    .iter()
                    .map(|c| count_fixed(f, c, &tighter))
                    .collect();
                let recount: Vec<usize> = recount?.into_iter().flatten().collect();
                if recount.len() != children.len() || recount.iter().sum::<usize>() != n {
                    continue;
                }
                counts = recount;
            }
            for (c, k) in children.into_iter().zip(counts) {
                stack.push((c, k, depth + 1));
            }
            done = true;
            break;
        }
        if !done {
            return Err(Error::BoundaryZero {
                retries: opts.retries,
            });
        }
    }
    // multiplicities from two successive eightfold shrinks
    for z in found.iter_mut() {
        let c = z.leaf.coordinate(z.location);
        let mut h = 0.5 * z.leaf.width().min(z.leaf.height());
        let mut m = z.multiplicity;
        for _ in 0..2 {
            h /= 8.0;
            if let Some(k) = count_fixed(f, &z.leaf.around(c, h), opts)? {
                m = k;
            }
        }
        if m != z.multiplicity {
            return Err(Error::CoverMismatch {
                cover: z.multiplicity,
                refined: m,
            });
        }
    }
    let refined: usize = found.iter().map(|z| z.multiplicity).sum();
    if refined != cover || cover != total {
        return Err(Error::CoverMismatch {
            cover: total,
            refined,
        });
    }
    Ok(found)
}

/// Where resonances are searched.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SearchRegion {
    /// Both halves of a conic neighbourhood of the real axis on the
    /// identified plane: `theta` in `(0, rho)` and `(-pi - rho, -pi)`.
    Cone { rho: f64, r_min: f64, r_max: f64 },
    /// `theta` in `(0, pi)`, the whole resonance half-plane of an odd-dimensional model.
    UpperHalfPlane { r_min: f64, r_max: f64 },
}

impl From<ConeRegion> for SearchRegion {
    fn from(c: ConeRegion) -> Self {
        SearchRegion::Cone {
            rho: c.rho,
            r_min: c.r_min,
            r_max: c.r_max,
        }
    }
}

impl SearchRegion {
    pub fn radii(&self) -> (f64, f64) {
        match *self {
            SearchRegion::Cone { r_min, r_max, .. }
            | SearchRegion::UpperHalfPlane { r_min, r_max } => (r_min, r_max),
        }
    }

    /// Angular intervals making up the region.
    pub fn sectors(&self) -> Vec<(f64, f64)> {
        match *self {
            SearchRegion::Cone { rho, .. } => vec![(0.0, rho), (-PI - rho, -PI)],
            SearchRegion::UpperHalfPlane { .. } => vec![(0.0, PI)],
        }
    }

    pub fn contains(&self, p: LogPoint) -> bool {
        let (r0, r1) = self.radii();
        p.r > r0
            && p.r < r1
            && self
                .sectors()
                .iter()
                .any(|(a, b)| p.theta > *a && p.theta < *b)
    }

    pub fn is_cone(&self) -> bool {
        matches!(self, SearchRegion::Cone { .. })
    }
}

/// One resonance: a zero of the outgoing function of one angular mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Resonance {
    pub r: f64,
    pub theta: f64,
    /// Order of the zero of the mode function.
    pub multiplicity: u32,
    pub mode: u32,
    /// Number of spherical harmonics in the mode.
    pub weight: u64,
}

impl Resonance {
    pub fn location(&self) -> LogPoint {
        LogPoint::new(self.r, self.theta)
    }

    pub fn project(&self) -> Complex64 {
        self.location().project()
    }

    /// `m(lambda)`: zero order times mode weight.
    pub fn total_multiplicity(&self) -> f64 {
        self.multiplicity as f64 * self.weight as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonanceSet {
    pub dimension: u32,
    pub region: SearchRegion,
    pub options: FinderOptions,
    pub entries: Vec<Resonance>,
}

impl ResonanceSet {
    pub fn empty(dimension: u32, region: SearchRegion) -> Self {
        Self {
            dimension,
            region,
            options: FinderOptions::default(),
            entries: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `N(r)`: total multiplicity with `|lambda| <= r`.
    pub fn counting(&self, r: f64) -> f64 {
        self.entries
            .iter()
            .filter(|e| e.r <= r)
            .map(|e| e.total_multiplicity())
            .sum()
    }

    /// Least-squares slope of `ln N` against `ln r` on `[r0, r1]`.
    pub fn counting_exponent(&self, r0: f64, r1: f64) -> Result<f64> {
        let n = 24;
        let rs: Vec<f64> = (0..n)
            .map(|i| r0 * (r1 / r0).powf(i as f64 / (n - 1) as f64))
            .collect();
        let ns: Vec<f64> = rs.iter().map(|r| self.counting(*r)).collect();
        if ns[0] <= 0.0 {
            return Err(Error::Fit(format!("no resonances below r = {r0}")));
        }
        power_law(&rs, &ns).map(|(p, _, _)| p)
    }

    /// Largest distance from an entry's mirror image `-conj(lambda)` to the
    /// nearest entry of the same mode, measured on the identified plane.
    pub fn symmetry_defect(&self) -> f64 {
        let proj = |e: &Resonance| -> Complex64 {
            if self.region.is_cone() {
                to_cut_plane(e.location()).unwrap_or(Complex64::new(f64::NAN, f64::NAN))
            } else {
                e.project()
            }
        };
        let mut worst: f64 = 0.0;
        for e in &self.entries {
            let target = -proj(e).conj();
            let best = self
                .entries
                .iter()
                .filter(|o| o.mode == e.mode)
                .map(|o| (proj(o) - target).norm())
                .fold(f64::INFINITY, f64::min);
            worst = worst.max(best);
        }
        worst
    }

    /// Entries whose mirror image lies inside the region but has no partner.
    pub fn mirror(&self) -> Self {
        let mut out = self.clone();
        for e in out.entries.iter_mut() {
            let p = if self.region.is_cone() {
                e.location().mirror()
            } else {
                LogPoint::new(e.r, PI - e.theta)
            };
            e.theta = p.theta;
        }
        out.sort();
        out
    }

    pub fn sort(&mut self) {
        self.entries.sort_by(|a, b| {
            a.r.total_cmp(&b.r)
                .then(a.theta.total_cmp(&b.theta))
                .then(a.mode.cmp(&b.mode))
        });
    }

    /// Entries with `|lambda| <= r`.
    pub fn truncate(&self, r: f64) -> Self {
        let mut out = self.clone();
        out.entries.retain(|e| e.r <= r);
        out
    }

    /// Smallest imaginary part among entries with `|lambda| >= r`.
    pub fn min_imag_beyond(&self, r: f64) -> Option<f64> {
        self.entries
            .iter()
            .filter(|e| e.r >= r)
            .map(|e| e.project().im)
            .min_by(|a, b| a.total_cmp(b))
    }
}

/// Lower bound on the modulus of zeros of the outgoing function of order `nu`.
///
/// Zeros of `H^(2)_nu(z)` satisfy `|z| > 0.66 nu`; half of `nu` leaves room
/// for the Neumann combination as well.
pub fn zero_free_radius(model: &BallModel, nu: f64) -> f64 {
    let factor = match model.boundary {
        crate::model_ball::Boundary::Dirichlet => 0.5,
        crate::model_ball::Boundary::Neumann => 0.3,
    };
    factor * nu / model.radius
}

/// Every resonance of `model` in `region`, mode by mode.
///
/// Modes whose zero-free disc covers the region are skipped; `per_mode_cap`
/// bounds the angular index.
pub fn find_resonances(
    model: &BallModel,
    region: SearchRegion,
    per_mode_cap: u32,
    opts: &FinderOptions,
) -> Result<ResonanceSet> {
    let (r_min, r_max) = region.radii();
    let modes: Vec<u32> = (0..=per_mode_cap)
        .take_while(|&ell| zero_free_radius(model, model.order(ell).nu()) < r_max)
        .collect();
    let per_mode: Result<Vec<Vec<Resonance>>> = modes
        .par_iter()
        .map(|&ell| {
            let nu = model.order(ell).nu();
            let lo = r_min.max(zero_free_radius(model, nu));
            let mut out = Vec::new();
            for (k, (t0, t1)) in region.sectors().into_iter().enumerate() {
                let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ ((ell as u64) << 8) ^ k as u64);
                let f = |p: LogPoint| model.mode_function(ell, p);
                // search a slightly larger box so that zeros on the region's edge
                // are decided by location, not by the contour
                let mut zeros = Err(Error::BoundaryZero {
                    retries: opts.retries,
                });
                for _ in 0..=opts.retries {
                    let mut pad = || 1e-3 * (1.0 + rng.random::<f64>());
                    let rect = Rect::Log {
                        u0: lo.ln() - pad(),
                        u1: r_max.ln() + pad(),
                        t0: t0 - pad(),
                        t1: t1 + pad(),
                    };
                    zeros = zeros_in_rect(&f, &rect, opts, &mut rng);
                    if !matches!(zeros, Err(Error::BoundaryZero { .. })) {
                        break;
                    }
                }
                for z in zeros?.into_iter().filter(|z| region.contains(z.location)) {
                    out.push(Resonance {
                        r: z.location.r,
                        theta: z.location.theta,
                        multiplicity: z.multiplicity as u32,
                        mode: ell,
                        weight: model.multiplicity(ell),
                    });
                }
            }
            Ok(out)
        })
        .collect();
    let mut set = ResonanceSet {
        dimension: model.dimension,
        region,
        options: *opts,
        entries: per_mode?.into_iter().flatten().collect(),
    };
    set.sort();
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model_ball::Boundary;

    fn opts() -> FinderOptions {
        FinderOptions::default()
    }

    #[test]
    fn counts_simple_functions() {
        let f = |p: LogPoint| Ok((p.project(), Complex64::new(1.0, 0.0)));
        let unit = Rect::Cartesian {
            x0: -0.5,
            x1: 0.5,
            y0: -0.5,
            y1: 0.5,
        };
        assert_eq!(count_zeros(&f, &unit, &opts()).unwrap(), 1);
        let g = |p: LogPoint| {
            let z = p.project();
            Ok((z * z + 1.0, 2.0 * z))
        };
        let big = Rect::Cartesian {
            x0: -2.0,
            x1: 2.0,
            y0: -2.0,
            y1: 2.0,
        };
        assert_eq!(count_zeros(&g, &big, &opts()).unwrap(), 2);
    }

    #[test]
    fn boundary_zero_is_perturbed_away() {
        // zero exactly on the right edge
        let f = |p: LogPoint| Ok((p.project() - 1.0, Complex64::new(1.0, 0.0)));
        let r = Rect::Cartesian {
            x0: 0.0,
            x1: 1.0,
            y0: -0.5,
            y1: 0.5,
        };
        let n = count_zeros(&f, &r, &opts()).unwrap();
        assert!(n <= 1);
    }

    #[test]
    fn newton_examples() {
        let z = refine_zero(
            |z| z * z - 2.0,
            |z| 2.0 * z,
            Complex64::new(1.4, 0.0),
            1e-12,
        )
        .unwrap();
        assert!((z.re - 2f64.sqrt()).abs() < 1e-12);
        let i = Complex64::i();
        let f = |z: Complex64| (i * z).exp() * (z + i) / (z * z);
        let df = |z: Complex64| {
            (i * z).exp() * (i * (z + i) / (z * z) + 1.0 / (z * z) - 2.0 * (z + i) / (z * z * z))
        };
        let z = refine_zero(f, df, Complex64::new(0.0, -0.9), 1e-10).unwrap();
        assert!((z + i).norm() < 1e-10);
    }

    #[test]
    fn newton_divergence_reported() {
        let r = refine_zero(|z| z.exp(), |z| z.exp(), Complex64::new(0.0, 0.0), 1e-12);
        assert!(matches!(r, Err(Error::Divergence(_))));
    }

    #[test]
    fn cover_additivity() {
        let m = BallModel::dirichlet(2, 1.0).unwrap();
        let f = |p: LogPoint| m.mode_function(9, p);
        let rect = Rect::polar(3.0, 14.0, 0.01, 1.5);
        let n = count_zeros(&f, &rect, &opts()).unwrap();
        assert!(n > 0);
        let kids: usize = rect
            .split(0.47, 0.53)
            .iter()
            .map(|c| count_zeros(&f, c, &opts()).unwrap())
            .sum();
        assert_eq!(n, kids);
    }

    #[test]
    fn three_dimensional_p_wave() {
        let m = BallModel::dirichlet(3, 1.0).unwrap();
        let region = SearchRegion::UpperHalfPlane {
            r_min: 0.1,
            r_max: 3.0,
        };
        let set = find_resonances(&m, region, 1, &opts()).unwrap();
        assert_eq!(set.len(), 1);
        let e = set.entries[0];
        assert_eq!((e.mode, e.multiplicity, e.weight), (1, 1, 3));
        assert!((e.project() - Complex64::i()).norm() < 1e-10);
    }

    #[test]
    fn zero_free_discs() {
        for boundary in [Boundary::Dirichlet, Boundary::Neumann] {
            for d in 2..=4 {
                let m = BallModel::new(d, 1.0, boundary).unwrap();
                for ell in [4u32, 10, 25] {
                    let nu = m.order(ell).nu();
                    let f = |p: LogPoint| m.mode_function(ell, p);
                    let rect =
                        Rect::polar(0.05 * nu.max(1.0), zero_free_radius(&m, nu), -PI - 1.4, 1.4);
                    assert_eq!(
                        count_zeros(&f, &rect, &opts()).unwrap(),
                        0,
                        "{boundary:?} d={d} l={ell}"
                    );
                }
            }
        }
    }

    #[test]
    fn no_zeros_on_the_positive_axis() {
        let m = BallModel::dirichlet(2, 1.0).unwrap();
        for ell in [0u32, 3, 12] {
            let f = |p: LogPoint| m.mode_function(ell, p);
            let thin = Rect::polar(0.5, 20.0, -1e-3, 1e-3);
            assert_eq!(count_zeros(&f, &thin, &opts()).unwrap(), 0);
        }
    }

    #[test]
    fn symmetric_two_dimensional_set() {
        let m = BallModel::dirichlet(2, 1.0).unwrap();
        let region = SearchRegion::Cone {
            rho: 1.2,
            r_min: 0.5,
            r_max: 8.0,
        };
        let set = find_resonances(&m, region, 40, &opts()).unwrap();
        assert!(!set.is_empty());
        assert!(set.symmetry_defect() < 1e-8);
        for e in &set.entries {
            assert!(region.contains(e.location()));
            let (v, d) = m.mode_function(e.mode, e.location()).unwrap();
            assert!(v.norm() < 1e-9 * (d * e.project()).norm());
        }
    }

    #[test]
    fn strip_above_the_axis_is_empty() {
        let m = BallModel::dirichlet(2, 1.0).unwrap();
        let region = SearchRegion::Cone {
            rho: 0.02,
            r_min: 1.0,
            r_max: 10.0,
        };
        let set = find_resonances(&m, region, 40, &opts()).unwrap();
        assert!(set.is_empty());
    }
}
