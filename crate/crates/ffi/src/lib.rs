//! C ABI over the respoisson library.
//!
//! Every entry point returns an [`RpStatus`]. On failure the message is
//! available from [`rp_last_error`] on the same thread until the next call.
//! Handles are opaque and must be released with the matching `_free`.

use respoisson::model_ball::{BallModel, Boundary};
use respoisson::resonance_finder::{find_resonances, FinderOptions, ResonanceSet, SearchRegion};
use respoisson::special_functions::LogPoint;
use respoisson::traces::{
    heat_trace, wave_trace_bk, BkOptions, HeatOptions, ModelSource, ResonanceSide,
    ResonanceSideOptions, SpectralDensity,
};
use respoisson::Error;
use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    /// `t` is below the smallest time at which the resonance tail is bounded.
    TailBound = 3,
    /// Quadrature, root finding or mode summation did not reach tolerance.
    Numerical = 4,
    OutOfRange = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RpBoundary {
    Dirichlet = 0,
    Neumann = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RpRegionKind {
    /// Conic neighbourhood of the real axis on the identified plane.
    Cone = 0,
    /// The whole upper half-plane; odd dimensions only.
    UpperHalfPlane = 1,
}

/// One resonance, in polar form on the logarithmic plane and projected.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RpResonance {
    pub r: f64,
    pub theta: f64,
    pub re: f64,
    pub im: f64,
    pub multiplicity: u32,
    pub mode: u32,
    pub weight: u64,
}

/// A trace value with its error bound.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RpTrace {
    pub value: f64,
    pub error: f64,
    /// Set with `RP_STATUS_TAIL_BOUND`: the smallest usable `t`.
    pub t_min: f64,
}

pub struct RpModel(BallModel);
pub struct RpResonanceSet(ResonanceSet);
pub struct RpDensity(SpectralDensity);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let s = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(s).unwrap_or_default());
}

fn status_of(err: &Error) -> RpStatus {
    match err {
        Error::InvalidInput(_) | Error::Domain(_) => RpStatus::InvalidInput,
        Error::TailBound { .. } => RpStatus::TailBound,
        _ => RpStatus::Numerical,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (RpStatus, String)>) -> RpStatus {
    set_error("");
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RpStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(msg);
            RpStatus::Panic
        }
    }
}

fn lib<T>(r: respoisson::Result<T>) -> Result<T, (RpStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn boundary_of(code: u32) -> Result<Boundary, (RpStatus, String)> {
    match code {
        x if x == RpBoundary::Dirichlet as u32 => Ok(Boundary::Dirichlet),
        x if x == RpBoundary::Neumann as u32 => Ok(Boundary::Neumann),
        _ => Err((RpStatus::InvalidInput, format!("boundary code {code}"))),
    }
}

unsafe fn deref<'a, T>(p: *const T, name: &str) -> Result<&'a T, (RpStatus, String)> {
    p.as_ref()
        .ok_or((RpStatus::NullPointer, format!("{name} is null")))
}

unsafe fn out<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, (RpStatus, String)> {
    p.as_mut()
        .ok_or((RpStatus::NullPointer, format!("{name} is null")))
}

/// Message of the last failure on this thread, empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn rp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn rp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// `boundary` is an `RpBoundary` value.
///
/// # Safety
/// `out_model` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rp_model_new(
    dimension: u32,
    radius: f64,
    boundary: u32,
    out_model: *mut *mut RpModel,
) -> RpStatus {
    guard(|| {
        let slot = out(out_model, "out_model")?;
        let m = lib(BallModel::new(dimension, radius, boundary_of(boundary)?))?;
        *slot = Box::into_raw(Box::new(RpModel(m)));
        Ok(())
    })
}

/// # Safety
/// `model` must come from `rp_model_new` and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn rp_model_free(model: *mut RpModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// `sigma'(lambda)` for real `lambda > 0`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn rp_model_sigma_prime(
    model: *const RpModel,
    lambda: f64,
    tol: f64,
    out_value: *mut f64,
) -> RpStatus {
    guard(|| {
        let m = deref(model, "model")?;
        let slot = out(out_value, "out_value")?;
        *slot = lib(m.0.sigma_prime(lambda, tol))?;
        Ok(())
    })
}

/// `s'/s` summed over modes at `r e^{i theta}`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn rp_model_log_derivative(
    model: *const RpModel,
    r: f64,
    theta: f64,
    tol: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> RpStatus {
    guard(|| {
        let m = deref(model, "model")?;
        let re = out(out_re, "out_re")?;
        let im = out(out_im, "out_im")?;
        if !(r > 0.0) || !theta.is_finite() {
            return Err((
                RpStatus::InvalidInput,
                format!("point r = {r}, theta = {theta}"),
            ));
        }
        let v = lib(m.0.log_derivative(LogPoint::new(r, theta), tol))?;
        *re = v.re;
        *im = v.im;
        Ok(())
    })
}

/// Heat trace at time `t > 0`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn rp_heat_trace(
    model: *const RpModel,
    t: f64,
    out_trace: *mut RpTrace,
) -> RpStatus {
    guard(|| {
        let m = deref(model, "model")?;
        let slot = out(out_trace, "out_trace")?;
        let src = ModelSource {
            model: m.0,
            tol: 1e-15,
        };
        let s = lib(heat_trace(&src, t, &HeatOptions::default()))?;
        *slot = RpTrace {
            value: s.value,
            error: s.error,
            t_min: 0.0,
        };
        Ok(())
    })
}

/// Resonances of `model` with `r_min <= |lambda| <= r_max`. `kind` is an
/// `RpRegionKind` value and `rho` is read for cones only. Modes above
/// `per_mode_cap` are not searched.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn rp_find_resonances(
    model: *const RpModel,
    kind: u32,
    rho: f64,
    r_min: f64,
    r_max: f64,
    per_mode_cap: u32,
    out_set: *mut *mut RpResonanceSet,
) -> RpStatus {
    guard(|| {
        let m = deref(model, "model")?;
        let slot = out(out_set, "out_set")?;
        let region = match kind {
            x if x == RpRegionKind::Cone as u32 => SearchRegion::Cone { rho, r_min, r_max },
            x if x == RpRegionKind::UpperHalfPlane as u32 => {
                SearchRegion::UpperHalfPlane { r_min, r_max }
            }
            _ => return Err((RpStatus::InvalidInput, format!("region kind {kind}"))),
        };
        let set = lib(find_resonances(
            &m.0,
            region,
            per_mode_cap,
            &FinderOptions::default(),
        ))?;
        *slot = Box::into_raw(Box::new(RpResonanceSet(set)));
        Ok(())
    })
}

/// # Safety
/// `set` must come from `rp_find_resonances` and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn rp_resonance_set_free(set: *mut RpResonanceSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// Number of distinct resonances; 0 for a null handle.
///
/// # Safety
/// `set` must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn rp_resonance_set_len(set: *const RpResonanceSet) -> usize {
    set.as_ref().map_or(0, |s| s.0.entries.len())
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn rp_resonance_set_get(
    set: *const RpResonanceSet,
    index: usize,
    out_resonance: *mut RpResonance,
) -> RpStatus {
    guard(|| {
        let s = deref(set, "set")?;
        let slot = out(out_resonance, "out_resonance")?;
        let e = s.0.entries.get(index).ok_or((
            RpStatus::OutOfRange,
            format!("index {index} of {}", s.0.entries.len()),
        ))?;
        let p = e.project();
        *slot = RpResonance {
            r: e.r,
            theta: e.theta,
            re: p.re,
            im: p.im,
            multiplicity: e.multiplicity,
            mode: e.mode,
            weight: e.weight,
        };
        Ok(())
    })
}

/// Largest distance from a resonance to the mirror image of its nearest partner.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn rp_resonance_set_symmetry_defect(
    set: *const RpResonanceSet,
    out_value: *mut f64,
) -> RpStatus {
    guard(|| {
        let s = deref(set, "set")?;
        *out(out_value, "out_value")? = s.0.symmetry_defect();
        Ok(())
    })
}

/// `k`-th derivative of the resonance sum at `t`, with the truncation tail bound.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn rp_resonance_trace(
    set: *const RpResonanceSet,
    t: f64,
    k: u32,
    out_trace: *mut RpTrace,
) -> RpStatus {
    guard(|| {
        let s = deref(set, "set")?;
        let slot = out(out_trace, "out_trace")?;
        *slot = RpTrace::default();
        let side = lib(ResonanceSide::new(
            &s.0,
            None,
            0.0,
            ResonanceSideOptions::default(),
        ))?;
        match side.evaluate(t, k) {
            Ok(v) => {
                *slot = RpTrace {
                    value: v.value,
                    error: v.error,
                    t_min: 0.0,
                };
                Ok(())
            }
            Err(Error::TailBound { t_min }) => {
                slot.t_min = t_min;
                Err((RpStatus::TailBound, Error::TailBound { t_min }.to_string()))
            }
            Err(e) => lib(Err(e)),
        }
    })
}

/// Spectral density of `model` prepared for wave-trace moments.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn rp_density_new(
    model: *const RpModel,
    out_density: *mut *mut RpDensity,
) -> RpStatus {
    guard(|| {
        let m = deref(model, "model")?;
        let slot = out(out_density, "out_density")?;
        let d = lib(SpectralDensity::new(&m.0, BkOptions::default()))?;
        *slot = Box::into_raw(Box::new(RpDensity(d)));
        Ok(())
    })
}

/// # Safety
/// `density` must come from `rp_density_new` and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn rp_density_free(density: *mut RpDensity) {
    if !density.is_null() {
        drop(Box::from_raw(density));
    }
}

/// `k`-th derivative of the wave trace at `t` from the scattering phase.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn rp_wave_trace(
    density: *const RpDensity,
    t: f64,
    k: u32,
    out_trace: *mut RpTrace,
) -> RpStatus {
    guard(|| {
        let d = deref(density, "density")?;
        let slot = out(out_trace, "out_trace")?;
        let v = lib(wave_trace_bk(&d.0, t, k))?;
        *slot = RpTrace {
            value: v.value,
            error: v.error,
            t_min: 0.0,
        };
        Ok(())
    })
}
