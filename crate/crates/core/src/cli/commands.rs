use super::{grid, num, write_json, CliError, CliResult, Csv, Outcome, RunConfig};
use crate::model_ball::BallModel;
use crate::resonance_finder::{
    find_resonances, FinderOptions, Resonance, ResonanceSet, SearchRegion,
};
use crate::special_functions::LogPoint;
use crate::traces::low_energy::fit_low_energy;
use crate::traces::theorem4::{leading_coefficient, odd_dimension_control};
use crate::traces::{
    heat_trace, verify_theorem4, wave_trace_bk, BkOptions, CutoffFunction, HeatOptions,
    ModelSource, ResonanceSide, ResonanceSideOptions, SpectralDensity, TraceSample,
};
use crate::weierstrass::{
    extract_residual, real_grid, ModelDeterminant, SyntheticDeterminant, WeierstrassProduct,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Record {
    r: f64,
    theta: f64,
    re: f64,
    im: f64,
    multiplicity: u32,
    mode: u32,
    weight: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ResonanceFile {
    fingerprint: String,
    model: BallModel,
    region: SearchRegion,
    options: FinderOptions,
    records: Vec<Record>,
}

fn out_dir(cfg: &RunConfig) -> CliResult<PathBuf> {
    let d = cfg.output.dir.clone();
    std::fs::create_dir_all(&d)?;
    Ok(d)
}

fn density(cfg: &RunConfig, model: &BallModel) -> CliResult<SpectralDensity> {
    let opts = BkOptions {
        sigma_tol: cfg.tolerances.truncation_tol,
        ..BkOptions::default()
    };
    Ok(SpectralDensity::new(model, opts)?)
}

/// Reads a resonance file written by `resonances`. `r` and `theta` are
/// authoritative; `re` and `im` must agree with them.
pub fn load_resonances(path: &Path, model: &BallModel) -> CliResult<ResonanceSet> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let file: ResonanceFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    if file.model != *model {
        return Err(CliError::Usage(format!(
            "{} holds resonances of {:?}, config asks for {model:?}",
            path.display(),
            file.model
        )));
    }
    let mut set = ResonanceSet::empty(model.dimension, file.region);
    set.options = file.options;
    for (i, rec) in file.records.iter().enumerate() {
        let e = Resonance {
            r: rec.r,
            theta: rec.theta,
            multiplicity: rec.multiplicity,
            mode: rec.mode,
            weight: rec.weight,
        };
        let z = e.project();
        if (z - Complex64::new(rec.re, rec.im)).norm() > 1e-9 * rec.r.max(1.0) {
            return Err(CliError::Usage(format!(
                "record {i}: (re, im) disagrees with (r, theta)"
            )));
        }
        set.entries.push(e);
    }
    Ok(set)
}

/// A stored resonance that is not a zero of its mode function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootDiagnostic {
    pub index: usize,
    pub mode: u32,
    pub re: f64,
    pub im: f64,
    /// `|F / F'|` at the stored point.
    pub newton_step: f64,
}

/// Entries whose Newton step exceeds `1e-6 max(1, |lambda|)`.
pub fn root_diagnostics(model: &BallModel, set: &ResonanceSet) -> CliResult<Vec<RootDiagnostic>> {
    let steps = set
        .entries
        .par_iter()
        .map(|e| {
            let (f, df) = model.mode_function(e.mode, LogPoint::new(e.r, e.theta))?;
            Ok((f / df).norm())
        })
        .collect::<crate::error::Result<Vec<f64>>>()?;
    Ok(set
        .entries
        .iter()
        .zip(steps)
        .enumerate()
        .filter(|(_, (e, s))| !(*s <= 1e-6 * e.r.max(1.0)))
        .map(|(index, (e, s))| {
            let z = e.project();
            RootDiagnostic {
                index,
                mode: e.mode,
                re: z.re,
                im: z.im,
                newton_step: s,
            }
        })
        .collect())
}

fn resonance_set(cfg: &RunConfig, model: &BallModel) -> CliResult<ResonanceSet> {
    match &cfg.verify.resonances_file {
        Some(p) => load_resonances(p, model),
        None => Ok(find_resonances(
            model,
            cfg.search_region(),
            cfg.per_mode_cap,
            &cfg.finder_options(),
        )?),
    }
}

pub fn cmd_resonances(cfg: &RunConfig) -> CliResult<Outcome> {
    let model = cfg.ball()?;
    let set = find_resonances(
        &model,
        cfg.search_region(),
        cfg.per_mode_cap,
        &cfg.finder_options(),
    )?;
    let dir = out_dir(cfg)?;
    let fp = cfg.fingerprint();
    let records: Vec<Record> = set
        .entries
        .iter()
        .map(|e| {
            let z = e.project();
            Record {
                r: e.r,
                theta: e.theta,
                re: z.re,
                im: z.im,
                multiplicity: e.multiplicity,
                mode: e.mode,
                weight: e.weight,
            }
        })
        .collect();
    let mut csv = Csv::new(
        &fp,
        &["r", "theta", "re", "im", "multiplicity", "mode", "weight"],
    );
    for r in &records {
        csv.row(&[
            num(r.r),
            num(r.theta),
            num(r.re),
            num(r.im),
            r.multiplicity.to_string(),
            r.mode.to_string(),
            r.weight.to_string(),
        ]);
    }
    let csv_path = dir.join("resonances.csv");
    csv.write(&csv_path)?;
    let file = ResonanceFile {
        fingerprint: fp,
        model,
        region: set.region,
        options: set.options,
        records,
    };
    let json_path = dir.join("resonances.json");
    write_json(
        &json_path,
        &serde_json::to_value(&file).expect("serializes"),
    )?;

    let r_max = cfg.region.r_max;
    let ceiling = model.dimension as f64 + 0.3;
    let exponent = set.counting_exponent(0.25 * r_max, r_max).ok();
    let pass = exponent.is_some_and(|p| p <= ceiling);
    let summary = json!({
        "metadata": cfg.metadata(),
        "count": set.len(),
        "total_multiplicity": set.counting(f64::INFINITY),
        "fit_window": [0.25 * r_max, r_max],
        "counting_exponent": exponent,
        "ceiling": ceiling,
        "pass": pass,
    });
    let sum_path = dir.join("counting.json");
    write_json(&sum_path, &summary)?;
    Ok(Outcome {
        pass,
        files: vec![csv_path, json_path, sum_path],
        summary: format!(
            "{} resonances, counting exponent {exponent:?} (ceiling {ceiling})",
            set.len()
        ),
    })
}

#[derive(Debug, Clone, Serialize)]
struct VerifyRow {
    psi: String,
    t: f64,
    bk: TraceSample,
    resonance: TraceSample,
    difference: f64,
    bound: f64,
    local_scale: f64,
    within_bounds: bool,
    resolved: bool,
}

fn verify_rows(
    cfg: &RunConfig,
    bk: &[TraceSample],
    side: &ResonanceSide,
    ts: &[f64],
) -> CliResult<Vec<VerifyRow>> {
    let res = ts
        .par_iter()
        .map(|&t| side.evaluate(t, 0))
        .collect::<crate::error::Result<Vec<_>>>()?;
    let mut rows = Vec::with_capacity(ts.len());
    for i in 0..ts.len() {
        let lo = i.saturating_sub(1);
        let hi = (i + 1).min(ts.len() - 1);
        let local_scale = bk[lo..=hi]
            .iter()
            .map(|s| s.value.abs())
            .fold(0.0, f64::max);
        let difference = bk[i].value - res[i].value;
        let bound = bk[i].error + res[i].error;
        rows.push(VerifyRow {
            psi: side.psi_id(),
            t: ts[i],
            bk: bk[i],
            resonance: res[i],
            difference,
            bound,
            local_scale,
            within_bounds: difference.abs() <= bound,
            resolved: bound < cfg.verify.scale_ratio * local_scale,
        });
    }
    Ok(rows)
}

pub fn cmd_verify_poisson(cfg: &RunConfig) -> CliResult<Outcome> {
    let ts = grid(&cfg.verify.t_grid, "verify")?;
    let model = cfg.ball()?;
    let set = resonance_set(cfg, &model)?;
    let diagnostics = root_diagnostics(&model, &set)?;
    let dens = density(cfg, &model)?;
    let bk = ts
        .par_iter()
        .map(|&t| wave_trace_bk(&dens, t, 0))
        .collect::<crate::error::Result<Vec<_>>>()?;
    let side_opts = ResonanceSideOptions {
        max_tail: cfg.verify.max_tail,
        ..ResonanceSideOptions::default()
    };
    let m0 = model.zero_multiplicity() as f64;
    let cutoffs = [
        CutoffFunction::new(cfg.psi)?,
        CutoffFunction::new(cfg.alternate_psi)?,
    ];
    let mut tables = Vec::new();
    if model.dimension % 2 == 1 {
        let side = ResonanceSide::new(&set, None, m0, side_opts)?;
        tables.push(verify_rows(cfg, &bk, &side, &ts)?);
    } else {
        for psi in &cutoffs {
            let side = ResonanceSide::new(&set, Some((psi, &dens)), m0, side_opts)?;
            tables.push(verify_rows(cfg, &bk, &side, &ts)?);
        }
    }
    let invariant: Option<Vec<bool>> = (tables.len() == 2).then(|| {
        tables[0]
            .iter()
            .zip(&tables[1])
            .map(|(a, b)| (a.difference - b.difference).abs() <= a.bound + b.bound)
            .collect()
    });

    let dir = out_dir(cfg)?;
    let fp = cfg.fingerprint();
    let mut csv = Csv::new(
        &fp,
        &[
            "psi",
            "t",
            "bk",
            "bk_error",
            "resonance_side",
            "resonance_error",
            "tail_bound",
            "difference",
            "bound",
            "local_scale",
            "within_bounds",
            "resolved",
        ],
    );
    for row in tables.iter().flatten() {
        let tail = row
            .resonance
            .components
            .map(|c| c.tail_bound)
            .unwrap_or(0.0);
        csv.row(&[
            row.psi.clone(),
            num(row.t),
            num(row.bk.value),
            num(row.bk.error),
            num(row.resonance.value),
            num(row.resonance.error),
            num(tail),
            num(row.difference),
            num(row.bound),
            num(row.local_scale),
            row.within_bounds.to_string(),
            row.resolved.to_string(),
        ]);
    }
    let csv_path = dir.join("verify_poisson.csv");
    csv.write(&csv_path)?;

    let failures: Vec<f64> = tables
        .iter()
        .flatten()
        .filter(|r| !(r.within_bounds && r.resolved))
        .map(|r| r.t)
        .collect();
    let worst = tables
        .iter()
        .flatten()
        .max_by(|a, b| (a.difference.abs() / a.bound).total_cmp(&(b.difference.abs() / b.bound)))
        .map(|r| json!({ "psi": r.psi, "t": r.t, "difference": r.difference, "bound": r.bound }));
    let within = tables.iter().flatten().all(|r| r.within_bounds);
    let resolved = tables.iter().flatten().all(|r| r.resolved);
    let psi_invariant = invariant.as_ref().map(|v| v.iter().all(|b| *b));
    let pass = within && resolved && psi_invariant.unwrap_or(true) && diagnostics.is_empty();
    let psis: Vec<String> = tables
        .iter()
        .filter_map(|t| t.first().map(|r| r.psi.clone()))
        .collect();
    let report = json!({
        "metadata": cfg.metadata(),
        "resonances": set.len(),
        "truncation_radius": set.region.radii().1,
        "psi": if psis.is_empty() { vec!["none".to_string()] } else { psis },
        "within_bounds": within,
        "resolved": resolved,
        "psi_invariant": psi_invariant,
        "failed_t": failures,
        "worst": worst,
        "root_diagnostics": diagnostics,
        "pass": pass,
    });
    let json_path = dir.join("verify_poisson.json");
    write_json(&json_path, &report)?;
    let mut summary = format!(
        "within bounds: {within}, resolved: {resolved}, psi-invariant: {psi_invariant:?}, failing t: {failures:?}"
    );
    for d in &diagnostics {
        summary.push_str(&format!(
            "\nresonance {} (mode {}, {:.6}{:+.6}i) is not a zero: Newton step {:.3e}",
            d.index, d.mode, d.re, d.im, d.newton_step
        ));
    }
    Ok(Outcome {
        pass,
        files: vec![csv_path, json_path],
        summary,
    })
}

fn half_gamma(x: f64) -> f64 {
    // Gamma at positive half-integers
    if (x - x.round()).abs() < 1e-12 {
        (1..x.round() as u32).map(|j| j as f64).product()
    } else {
        let mut g = std::f64::consts::PI.sqrt();
        let mut y = 0.5;
        while y < x - 1e-12 {
            g *= y;
            y += 1.0;
        }
        g
    }
}

pub fn cmd_heat(cfg: &RunConfig) -> CliResult<Outcome> {
    let ts = grid(&cfg.heat.t_grid, "heat")?;
    let model = cfg.ball()?;
    let src = ModelSource {
        model,
        tol: cfg.tolerances.truncation_tol,
    };
    let opts = HeatOptions::default();
    let samples = ts
        .par_iter()
        .map(|&t| heat_trace(&src, t, &opts))
        .collect::<crate::error::Result<Vec<_>>>()?;
    let values: Vec<f64> = samples.iter().map(|s| s.value).collect();
    let slope = if ts.len() >= 2 {
        Some(crate::fit::power_law(&ts, &values)?.0)
    } else {
        None
    };
    let n = model.dimension;
    let [lo, hi] = cfg.heat.low_energy_window;
    let law = if n >= 3 {
        let fit = fit_low_energy(&model, (lo, hi), cfg.tolerances.truncation_tol)?;
        let q = 0.5 * (n as f64 - 2.0);
        Some((fit, q, 0.5 * half_gamma(q)))
    } else {
        None
    };
    let predicted: Vec<Option<f64>> = ts
        .iter()
        .map(|t| law.as_ref().map(|(f, q, c)| c * f.f00 * t.powf(-q)))
        .collect();

    let dir = out_dir(cfg)?;
    let mut csv = Csv::new(&cfg.fingerprint(), &["t", "value", "error", "predicted"]);
    for (s, p) in samples.iter().zip(&predicted) {
        csv.row(&[
            num(s.t),
            num(s.value),
            num(s.error),
            p.map(num).unwrap_or_default(),
        ]);
    }
    let csv_path = dir.join("heat.csv");
    csv.write(&csv_path)?;

    let last = samples.len() - 1;
    let ratio = predicted[last].map(|p| samples[last].value / p);
    let (pass, expected) = match (&law, slope) {
        (Some((_, q, _)), Some(s)) => {
            let ok = (s + q).abs() <= cfg.heat.slope_tol
                && ratio.is_some_and(|r| (r - 1.0).abs() <= cfg.heat.prefactor_tol);
            (ok, Some(-q))
        }
        (Some(_), None) => (false, None),
        (None, _) => (true, None),
    };
    let report = json!({
        "metadata": cfg.metadata(),
        "slope": slope,
        "expected_slope": expected,
        "low_energy": law.as_ref().map(|(f, _, _)| f),
        "prefactor": law.as_ref().map(|(f, _, c)| c * f.f00),
        "ratio_at_largest_t": ratio,
        "pass": pass,
    });
    let json_path = dir.join("heat.json");
    write_json(&json_path, &report)?;
    Ok(Outcome {
        pass,
        files: vec![csv_path, json_path],
        summary: format!("slope {slope:?} (expected {expected:?}), prefactor ratio {ratio:?}"),
    })
}

pub fn cmd_theorem4(cfg: &RunConfig) -> CliResult<Outcome> {
    let ts = grid(&cfg.theorem4.t_grid, "theorem4")?;
    let model = cfg.ball()?;
    let gamma = cfg.theorem4.gamma;
    let ks = &cfg.theorem4.derivatives;
    if ks.is_empty() {
        return Err(CliError::Usage("theorem4.derivatives is empty".into()));
    }
    let set = resonance_set(cfg, &model)?;
    let n = model.dimension;
    let mut reports = Vec::new();
    let mut predicted = Vec::new();
    if n % 2 == 0 {
        let dens = density(cfg, &model)?;
        let [lo, hi] = cfg.heat.low_energy_window;
        let f00 = fit_low_energy(&model, (lo, hi), cfg.tolerances.truncation_tol)?.f00;
        for &k in ks {
            if k > dens.options.max_derivative {
                return Err(CliError::Usage(format!(
                    "derivative order {k} above {}",
                    dens.options.max_derivative
                )));
            }
            reports.push(verify_theorem4(&dens, &set, gamma, k, &ts)?);
            predicted.push(Some(leading_coefficient(n, k, f00)));
        }
    } else {
        for &k in ks {
            reports.push(odd_dimension_control(
                &set,
                gamma,
                k,
                &ts,
                cfg.theorem4.control_power,
            )?);
            predicted.push(None);
        }
    }

    let dir = out_dir(cfg)?;
    let mut csv = Csv::new(&cfg.fingerprint(), &["k", "t", "difference", "error"]);
    for r in &reports {
        for s in &r.samples {
            csv.row(&[r.k.to_string(), num(s.t), num(s.difference), num(s.error)]);
        }
    }
    let csv_path = dir.join("theorem4.csv");
    csv.write(&csv_path)?;
    let pass = reports.iter().all(|r| r.pass);
    let report = json!({
        "metadata": cfg.metadata(),
        "resonances": set.len(),
        "truncation_radius": set.region.radii().1,
        "reports": reports,
        "predicted_coefficients": predicted,
        "pass": pass,
    });
    let json_path = dir.join("theorem4.json");
    write_json(&json_path, &report)?;
    let summary = reports
        .iter()
        .map(|r| {
            format!(
                "k={}: exponent {:.4} (expected {}), pass {}",
                r.k, r.exponent, r.expected_exponent, r.pass
            )
        })
        .collect::<Vec<_>>()
        .join("\n");
    Ok(Outcome {
        pass,
        files: vec![csv_path, json_path],
        summary,
    })
}

/// Symmetric pairs `zeta, -conj(zeta)` drawn from the seed.
fn synthetic_zeros(seed: u64, pairs: usize) -> Vec<(Complex64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(2 * pairs);
    for _ in 0..pairs {
        let z = Complex64::new(rng.random_range(1.0..20.0), rng.random_range(0.5..4.0));
        let m = rng.random_range(1..=2) as f64;
        out.push((z, m));
        out.push((-z.conj(), m));
    }
    out
}

pub fn cmd_factorize(cfg: &RunConfig) -> CliResult<Outcome> {
    let f = &cfg.factorize;
    let genus = cfg.genus.unwrap_or(4);
    let grid_pts = real_grid(f.start, f.stop, f.points);
    let prod = WeierstrassProduct::from_points(
        synthetic_zeros(cfg.seed, f.synthetic_zeros),
        genus,
        f64::INFINITY,
        None,
    );
    let synthetic = SyntheticDeterminant {
        alpha: f.synthetic_alpha,
        q: f.synthetic_q,
        prod,
    };
    let round_trip = synthetic.round_trip_error(&grid_pts)?;

    let model = cfg.ball()?;
    let set = resonance_set(cfg, &model)?;
    let r_max = set.region.radii().1;
    let product = |r: f64| -> crate::error::Result<WeierstrassProduct> {
        match cfg.genus {
            Some(p) => WeierstrassProduct::with_genus(&set, p, r),
            None => WeierstrassProduct::new(&set, r),
        }
    };
    let det = ModelDeterminant {
        model: &model,
        tol: cfg.tolerances.truncation_tol.max(1e-13),
    };
    let full = extract_residual(&det, &product(r_max)?, &grid_pts)?;
    let half = extract_residual(&det, &product(0.5 * r_max)?, &grid_pts)?;
    let (p_full, c_full) = full.symbol_fit(1)?;
    let (p_half, _) = half.symbol_fit(1)?;
    let change = ((p_full - p_half) / p_half).abs();
    let stable = p_full.is_finite() && change < f.stability_tol;
    let pass = round_trip < f.round_trip_tol && stable;

    let dir = out_dir(cfg)?;
    let mut csv = Csv::new(
        &cfg.fingerprint(),
        &["lambda", "g_re", "g_im", "dg_re", "dg_im"],
    );
    for ((p, g), dg) in full.points.iter().zip(&full.values).zip(&full.derivatives) {
        csv.row(&[num(p.r), num(g.re), num(g.im), num(dg.re), num(dg.im)]);
    }
    let csv_path = dir.join("factorize.csv");
    csv.write(&csv_path)?;
    let report = json!({
        "metadata": cfg.metadata(),
        "genus": product(r_max)?.genus,
        "synthetic_round_trip": round_trip,
        "truncation_radii": [0.5 * r_max, r_max],
        "growth_exponent": [p_half, p_full],
        "growth_constant": c_full,
        "relative_change": change,
        "stable": stable,
        "pass": pass,
    });
    let json_path = dir.join("factorize.json");
    write_json(&json_path, &report)?;
    Ok(Outcome {
        pass,
        files: vec![csv_path, json_path],
        summary: format!(
            "synthetic round trip {round_trip:.3e}; |g'| exponent {p_half:.4} -> {p_full:.4} (change {change:.3})"
        ),
    })
}
