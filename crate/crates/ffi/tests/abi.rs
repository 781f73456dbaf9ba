use respoisson_ffi::*;
use std::ffi::CStr;
use std::ptr::null_mut;

fn last() -> String {
    unsafe { CStr::from_ptr(rp_last_error()) }
        .to_string_lossy()
        .into_owned()
}

fn model(d: u32) -> *mut RpModel {
    let mut m = null_mut();
    assert_eq!(
        unsafe { rp_model_new(d, 1.0, RpBoundary::Dirichlet as u32, &mut m) },
        RpStatus::Ok
    );
    m
}

#[test]
fn sigma_prime_and_log_derivative_agree() {
    let m = model(2);
    let lambda = 3.7;
    let mut sp = 0.0;
    let (mut re, mut im) = (0.0, 0.0);
    unsafe {
        assert_eq!(
            rp_model_sigma_prime(m, lambda, 1e-14, &mut sp),
            RpStatus::Ok
        );
        assert_eq!(
            rp_model_log_derivative(m, lambda, 0.0, 1e-14, &mut re, &mut im),
            RpStatus::Ok
        );
        rp_model_free(m);
    }
    // sigma' = Re (i / 2 pi) s'/s
    let from_ld = -im / (2.0 * std::f64::consts::PI);
    assert!(
        (sp - from_ld).abs() < 1e-10 * sp.abs().max(1.0),
        "{sp} {from_ld}"
    );
}

#[test]
fn resonance_trace_reports_tail_bound() {
    let m = model(3);
    let mut set = null_mut();
    unsafe {
        assert_eq!(
            rp_find_resonances(
                m,
                RpRegionKind::UpperHalfPlane as u32,
                0.0,
                0.05,
                20.0,
                1000,
                &mut set
            ),
            RpStatus::Ok
        );
        let mut tr = RpTrace::default();
        assert_eq!(
            rp_resonance_trace(set, 0.2, 0, &mut tr),
            RpStatus::TailBound
        );
        assert!(tr.t_min > 0.2, "{tr:?}");
        assert!(last().contains("t must exceed"));
        assert_eq!(
            rp_resonance_trace(set, 1.5 * tr.t_min, 0, &mut tr),
            RpStatus::Ok
        );
        assert!(tr.value.is_finite() && tr.error >= 0.0);
        let mut defect = 1.0;
        assert_eq!(
            rp_resonance_set_symmetry_defect(set, &mut defect),
            RpStatus::Ok
        );
        assert!(defect < 1e-8);
        rp_resonance_set_free(set);
        rp_model_free(m);
    }
}

#[test]
fn wave_trace_matches_resonance_trace_in_three_dimensions() {
    let m = model(3);
    let (mut set, mut dens) = (null_mut(), null_mut());
    unsafe {
        assert_eq!(
            rp_find_resonances(
                m,
                RpRegionKind::UpperHalfPlane as u32,
                0.0,
                0.05,
                40.0,
                3000,
                &mut set
            ),
            RpStatus::Ok
        );
        assert_eq!(rp_density_new(m, &mut dens), RpStatus::Ok);
        for t in [5.0, 8.0] {
            let (mut a, mut b) = (RpTrace::default(), RpTrace::default());
            assert_eq!(rp_wave_trace(dens, t, 0, &mut a), RpStatus::Ok);
            assert_eq!(rp_resonance_trace(set, t, 0, &mut b), RpStatus::Ok);
            assert!(
                (a.value - b.value).abs() <= a.error + b.error,
                "t={t} {a:?} {b:?}"
            );
        }
        rp_density_free(dens);
        rp_resonance_set_free(set);
        rp_model_free(m);
    }
}

#[test]
fn heat_trace_through_the_abi() {
    let m = model(4);
    let mut h = RpTrace::default();
    unsafe {
        assert_eq!(rp_heat_trace(m, 50.0, &mut h), RpStatus::Ok);
        assert_eq!(rp_heat_trace(m, 0.0, &mut h), RpStatus::InvalidInput);
        rp_model_free(m);
    }
}

#[test]
fn null_handles_are_reported() {
    let mut v = 0.0;
    let mut tr = RpTrace::default();
    unsafe {
        assert_eq!(
            rp_model_sigma_prime(std::ptr::null(), 1.0, 1e-14, &mut v),
            RpStatus::NullPointer
        );
        assert_eq!(
            rp_wave_trace(std::ptr::null(), 1.0, 0, &mut tr),
            RpStatus::NullPointer
        );
        assert_eq!(rp_resonance_set_len(std::ptr::null()), 0);
        rp_density_free(null_mut());
        rp_resonance_set_free(null_mut());
    }
    assert!(last().contains("density"));
}

#[test]
fn unknown_region_kind() {
    let m = model(2);
    let mut set = null_mut();
    unsafe {
        assert_eq!(
            rp_find_resonances(m, 7, 1.2, 0.5, 5.0, 10, &mut set),
            RpStatus::InvalidInput
        );
        assert!(set.is_null());
        rp_model_free(m);
    }
}
