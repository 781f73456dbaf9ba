use respoisson::model_ball::BallModel;
use respoisson::resonance_finder::{find_resonances, FinderOptions, ResonanceSet, SearchRegion};
use respoisson::traces::low_energy::fit_low_energy;
use respoisson::traces::theorem4::{leading_coefficient, odd_dimension_control};
use respoisson::traces::*;
use std::sync::{Arc, OnceLock};

fn density(d: u32) -> SpectralDensity {
    let m = BallModel::dirichlet(d, 1.0).unwrap();
    SpectralDensity::new(&m, BkOptions::default()).unwrap()
}

fn set3() -> &'static ResonanceSet {
    static S: OnceLock<ResonanceSet> = OnceLock::new();
    S.get_or_init(|| {
        let m = BallModel::dirichlet(3, 1.0).unwrap();
        let region = SearchRegion::UpperHalfPlane {
            r_min: 0.05,
            r_max: 40.0,
        };
        find_resonances(&m, region, 3000, &FinderOptions::default()).unwrap()
    })
}

fn set2() -> &'static ResonanceSet {
    static S: OnceLock<ResonanceSet> = OnceLock::new();
    S.get_or_init(|| {
        let m = BallModel::dirichlet(2, 1.0).unwrap();
        let region = SearchRegion::Cone {
            rho: 1.2,
            r_min: 1e-3,
            r_max: 30.0,
        };
        find_resonances(&m, region, 3000, &FinderOptions::default()).unwrap()
    })
}

fn lorentzian() -> SpectralDensity {
    // single resonance at i: u(t) = e^{-t}
    let src = FnSource {
        dimension: 3,
        sigma_prime: |x: f64| 1.0 / (std::f64::consts::PI * (1.0 + x * x)),
        phase: |x: f64| x.atan() / std::f64::consts::PI,
    };
    SpectralDensity::from_source(Arc::new(src), BkOptions::default()).unwrap()
}

#[test]
fn lorentzian_density_gives_exponential() {
    let dens = lorentzian();
    for t in [0.5, 1.0, 2.0, 5.0, 10.0] {
        let u = wave_trace_bk(&dens, t, 0).unwrap();
        let du = wave_trace_bk(&dens, t, 1).unwrap();
        assert!((u.value - (-t).exp()).abs() < 1e-9, "t={t} {u:?}");
        assert!((du.value + (-t).exp()).abs() < 1e-9, "t={t} {du:?}");
        assert!(u.error < 1e-8);
    }
}

#[test]
fn even_power_added_to_density_is_invisible() {
    let m = BallModel::dirichlet(3, 1.0).unwrap();
    let src = ModelSource {
        model: m,
        tol: 1e-15,
    };
    let plus = FnSource {
        dimension: 3,
        sigma_prime: move |x: f64| src.sigma_prime(x).unwrap() + 0.3 * x * x,
        phase: move |x: f64| src.phase(x).unwrap() + 0.1 * x * x * x,
    };
    let a = SpectralDensity::new(&m, BkOptions::default()).unwrap();
    let b = SpectralDensity::from_source(Arc::new(plus), BkOptions::default()).unwrap();
    for t in [1.5, 3.0, 7.0] {
        let ua = wave_trace_bk(&a, t, 0).unwrap();
        let ub = wave_trace_bk(&b, t, 0).unwrap();
        assert!(
            (ua.value - ub.value).abs() <= ua.error + ub.error + 1e-10,
            "t={t} {ua:?} {ub:?}"
        );
    }
}

#[test]
fn odd_power_shifts_two_dimensional_trace() {
    // 2 integral_0^inf lambda cos(t lambda) = -2 / t^2 in the Abel sense
    let m = BallModel::dirichlet(2, 1.0).unwrap();
    let src = ModelSource {
        model: m,
        tol: 1e-15,
    };
    let c = 0.25;
    let plus = FnSource {
        dimension: 2,
        sigma_prime: move |x: f64| src.sigma_prime(x).unwrap() + c * x,
        phase: move |x: f64| src.phase(x).unwrap() + 0.5 * c * x * x,
    };
    let a = SpectralDensity::new(&m, BkOptions::default()).unwrap();
    let b = SpectralDensity::from_source(Arc::new(plus), BkOptions::default()).unwrap();
    for t in [2.0, 5.0] {
        let ua = wave_trace_bk(&a, t, 0).unwrap();
        let ub = wave_trace_bk(&b, t, 0).unwrap();
        let shift = -2.0 * c / (t * t);
        assert!(
            (ub.value - ua.value - shift).abs() < 1e-8,
            "t={t} {ua:?} {ub:?}"
        );
    }
}

#[test]
fn node_doubling_stays_within_error() {
    for d in [2, 3, 4] {
        let m = BallModel::dirichlet(d, 1.0).unwrap();
        let a = SpectralDensity::new(&m, BkOptions::default()).unwrap();
        let b = SpectralDensity::new(
            &m,
            BkOptions {
                nodes: 48,
                ..BkOptions::default()
            },
        )
        .unwrap();
        for t in [1.0, 4.0, 9.0] {
            let ua = wave_trace_bk(&a, t, 0).unwrap();
            let ub = wave_trace_bk(&b, t, 0).unwrap();
            assert!(
                (ua.value - ub.value).abs() <= ua.error + ub.error,
                "d={d} t={t} {ua:?} {ub:?}"
            );
        }
    }
}

#[test]
fn three_dimensional_trace_matches_resonance_sum() {
    let dens = density(3);
    let side = ResonanceSide::new(set3(), None, 0.0, ResonanceSideOptions::default()).unwrap();
    for t in [4.0, 5.0, 6.5, 8.0, 10.0] {
        let u = wave_trace_bk(&dens, t, 0).unwrap();
        let r = side.evaluate(t, 0).unwrap();
        assert!(
            (u.value - r.value).abs() <= u.error + r.error,
            "t={t} {u:?} {r:?}"
        );
    }
}

#[test]
fn resonance_side_refuses_unbounded_tail() {
    let side = ResonanceSide::new(set3(), None, 0.0, ResonanceSideOptions::default()).unwrap();
    match side.evaluate(0.5, 0) {
        Err(respoisson::error::Error::TailBound { t_min }) => assert!(t_min > 0.5, "{t_min}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn shrinking_cutoff_recovers_pure_sum() {
    let m = BallModel::dirichlet(3, 1.0).unwrap();
    let dens = SpectralDensity::new(
        &m,
        BkOptions {
            low_edge: 0.02,
            ..BkOptions::default()
        },
    )
    .unwrap();
    let t = 3.0;
    let mut gaps = Vec::new();
    for w in [0.2, 0.1, 0.05] {
        let psi = CutoffFunction::new(CutoffKind::Bump {
            flat: 0.5 * w,
            support: w,
        })
        .unwrap();
        let side = ResonanceSide::new(
            set3(),
            Some((&psi, &dens)),
            0.0,
            ResonanceSideOptions::default(),
        )
        .unwrap();
        let v = side.evaluate(t, 0).unwrap();
        gaps.push((v.value - side.resonance_sum(t, 0)).abs());
    }
    // the gap is 2 integral psi sigma' cos(t lambda), linear in the width
    for w in gaps.windows(2) {
        assert!((w[1] / w[0] - 0.5).abs() < 0.05, "{gaps:?}");
    }
}

#[test]
fn two_dimensional_remainder_decays() {
    let dens = density(2);
    let psi = CutoffFunction::wide_bump();
    let side = ResonanceSide::new(
        set2(),
        Some((&psi, &dens)),
        0.0,
        ResonanceSideOptions::default(),
    )
    .unwrap();
    let gap = |t: f64| {
        let u = wave_trace_bk(&dens, t, 0).unwrap();
        (u.value - side.evaluate(t, 0).unwrap().value).abs()
    };
    let (early, late) = (gap(4.0), gap(12.0));
    assert!(late < 0.2 * early, "{early:e} {late:e}");
}

#[test]
fn heat_trace_long_time_law() {
    let m = BallModel::dirichlet(4, 1.0).unwrap();
    let src = ModelSource {
        model: m,
        tol: 1e-15,
    };
    let fit = fit_low_energy(&m, (0.0, 0.1), 1e-15).unwrap();
    let ts: Vec<f64> = (0..8).map(|i| 10.0 * 20f64.powf(i as f64 / 7.0)).collect();
    let hs: Vec<f64> = ts
        .iter()
        .map(|&t| heat_trace(&src, t, &HeatOptions::default()).unwrap().value)
        .collect();
    let (slope, _, _) = respoisson::fit::power_law(&ts, &hs).unwrap();
    assert!((slope + 1.0).abs() <= 0.05, "{slope}");
    let h = heat_trace(&src, 100.0, &HeatOptions::default())
        .unwrap()
        .value;
    let predicted = 0.5 * fit.f00 / 100.0;
    assert!((h / predicted - 1.0).abs() <= 0.05, "{h} {predicted}");
}

#[test]
fn low_energy_coefficient_is_window_stable() {
    let m = BallModel::dirichlet(4, 1.0).unwrap();
    let wide = fit_low_energy(&m, (0.0, 0.4), 1e-15).unwrap();
    let narrow = fit_low_energy(&m, (0.0, 0.2), 1e-15).unwrap();
    let slack = 3.0 * wide.residual.max(narrow.residual);
    assert!(
        (wide.f00 - narrow.f00).abs() <= slack,
        "{wide:?} {narrow:?}"
    );
    assert!((wide.raw_slope - 1.0).abs() < 0.1);
}

#[test]
fn four_dimensional_decay_after_subtraction() {
    let m = BallModel::dirichlet(4, 1.0).unwrap();
    let set = find_resonances(
        &m,
        SearchRegion::Cone {
            rho: 1.2,
            r_min: 1e-3,
            r_max: 30.0,
        },
        3000,
        &FinderOptions::default(),
    )
    .unwrap();
    let dens = density(4);
    let f00 = fit_low_energy(&m, (0.0, 0.1), 1e-15).unwrap().f00;
    let gamma = 1.0;
    for k in [0, 1] {
        let t_k = 1.2 * (4 + k) as f64 / gamma;
        let grid: Vec<f64> = (0..10)
            .map(|i| 2.0 * t_k * 8f64.powf(i as f64 / 9.0))
            .collect();
        let r = verify_theorem4(&dens, &set, gamma, k, &grid).unwrap();
        assert!(r.pass, "{r:?}");
        let c = leading_coefficient(4, k, f00);
        let last = r.samples.last().unwrap();
        let scaled = last.difference * last.t.powi(2 + k as i32);
        assert!((scaled / c - 1.0).abs() < 0.05, "k={k} {scaled} {c}");
    }
}

#[test]
fn three_dimensional_control_beats_every_power() {
    let gamma = 1.0;
    let grid: Vec<f64> = (0..8).map(|i| 4.0 + i as f64).collect();
    let r = odd_dimension_control(set3(), gamma, 0, &grid, -6.0).unwrap();
    assert!(r.pass, "{r:?}");
}

#[test]
fn smeared_forms_agree_in_three_dimensions() {
    let dens = density(3);
    let phi = CutoffFunction::test(4.0, 8.0).unwrap();
    let grid: Vec<f64> = (0..6).map(|i| 5.0 + 5.0 * i as f64).collect();
    let r = smeared_check(&dens, set3(), &phi, &grid, 24).unwrap();
    for (d, b) in r.discrepancy.iter().zip(&r.bound) {
        assert!(d <= b, "{r:?}");
    }
}

#[test]
fn smeared_discrepancy_decays_in_two_dimensions() {
    let dens = density(2);
    let phi = CutoffFunction::test(2.0, 6.0).unwrap();
    let grid: Vec<f64> = (0..12).map(|i| 4.0 + 2.0 * i as f64).collect();
    let r = smeared_check(&dens, set2(), &phi, &grid, 24).unwrap();
    let p = r.decay_exponent.unwrap();
    assert!(p < -3.0, "{p} {:?}", r.discrepancy);
}
