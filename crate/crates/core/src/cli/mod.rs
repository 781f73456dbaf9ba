//! Command-line front end: run configuration, output files and exit codes.

mod commands;

pub use commands::{
    cmd_factorize, cmd_heat, cmd_resonances, cmd_theorem4, cmd_verify_poisson, load_resonances,
    root_diagnostics, RootDiagnostic,
};

use crate::error::Error;
use crate::model_ball::{BallModel, Boundary};
use crate::resonance_finder::{FinderOptions, SearchRegion};
use crate::traces::CutoffKind;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub dimension: u32,
    /// Obstacle radius, length units.
    pub radius: f64,
    pub boundary: Boundary,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionConfig {
    /// Radii in inverse length units.
    pub r_min: f64,
    pub r_max: f64,
    /// Cone aperture in radians, used in even dimensions.
    pub rho: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Newton step tolerance of the root refinement.
    pub root_tol: f64,
    /// Absolute tolerance of the argument-principle integrals.
    pub quad_tol: f64,
    /// Relative cut-off of the angular mode sums.
    pub truncation_tol: f64,
}

/// A grid of times: an explicit list, an arithmetic range or a geometric range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TGrid {
    List(Vec<f64>),
    #[serde(rename_all = "snake_case")]
    Range {
        start: f64,
        stop: f64,
        step: f64,
    },
    Geometric {
        start: f64,
        stop: f64,
        count: usize,
    },
}

impl TGrid {
    pub fn points(&self) -> Vec<f64> {
        match *self {
            TGrid::List(ref v) => v.clone(),
            TGrid::Range { start, stop, step } => {
                if !(step > 0.0) || !(stop >= start) {
                    return Vec::new();
                }
                let n = ((stop - start) / step + 1e-9).floor() as usize;
                (0..=n).map(|i| start + i as f64 * step).collect()
            }
            TGrid::Geometric { start, stop, count } => {
                if count == 0 || !(start > 0.0) || !(stop >= start) {
                    return Vec::new();
                }
                if count == 1 {
                    return vec![start];
                }
                (0..count)
                    .map(|i| start * (stop / start).powf(i as f64 / (count - 1) as f64))
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    /// Times, length units.
    pub t_grid: TGrid,
    /// Largest usable bound on the resonances beyond `r_max`.
    pub max_tail: f64,
    /// Required ratio of the combined error bound to the local value scale.
    pub scale_ratio: f64,
    /// Resonances written by `resonances`; searched afresh when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resonances_file: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeatConfig {
    /// Times, squared length units.
    pub t_grid: TGrid,
    /// `[lambda_min, lambda_max]` of the low-energy fit; 0 picks `lambda_max / 100`.
    pub low_energy_window: [f64; 2],
    pub slope_tol: f64,
    pub prefactor_tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Theorem4Config {
    pub gamma: f64,
    pub derivatives: Vec<u32>,
    pub t_grid: TGrid,
    /// Power the odd-dimensional control must decay faster than.
    pub control_power: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorizeConfig {
    /// Real grid `[start, stop]` with `points` samples, inverse length units.
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    /// Synthetic determinant `exp(i alpha lambda^q) P(-lambda) / P(lambda)`.
    pub synthetic_alpha: f64,
    pub synthetic_q: i32,
    pub synthetic_zeros: usize,
    pub round_trip_tol: f64,
    /// Allowed relative change of the growth exponent when `r_max` is halved.
    pub stability_tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    /// Weierstrass genus; chosen from the counting exponent when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub genus: Option<u32>,
    /// Largest angular index searched.
    pub per_mode_cap: u32,
    pub model: ModelConfig,
    pub region: RegionConfig,
    pub tolerances: Tolerances,
    pub psi: CutoffKind,
    /// Second cutoff for the invariance check in even dimensions.
    pub alternate_psi: CutoffKind,
    pub verify: VerifyConfig,
    pub heat: HeatConfig,
    pub theorem4: Theorem4Config,
    pub factorize: FactorizeConfig,
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0x5eed,
            genus: None,
            per_mode_cap: 3000,
            model: ModelConfig {
                dimension: 3,
                radius: 1.0,
                boundary: Boundary::Dirichlet,
            },
            region: RegionConfig {
                r_min: 0.05,
                r_max: 40.0,
                rho: 1.2,
            },
            tolerances: Tolerances {
                root_tol: 1e-12,
                quad_tol: 0.02,
                truncation_tol: 1e-15,
            },
            psi: CutoffKind::Bump {
                flat: 0.5,
                support: 1.0,
            },
            alternate_psi: CutoffKind::Bump {
                flat: 1.0,
                support: 2.0,
            },
            verify: VerifyConfig {
                t_grid: TGrid::Range {
                    start: 4.0,
                    stop: 10.0,
                    step: 0.5,
                },
                max_tail: 1.0,
                scale_ratio: 1e-3,
                resonances_file: None,
            },
            heat: HeatConfig {
                t_grid: TGrid::Geometric {
                    start: 10.0,
                    stop: 200.0,
                    count: 12,
                },
                low_energy_window: [0.0, 0.1],
                slope_tol: 0.05,
                prefactor_tol: 0.05,
            },
            theorem4: Theorem4Config {
                gamma: 1.0,
                derivatives: vec![0, 1],
                t_grid: TGrid::Geometric {
                    start: 8.0,
                    stop: 40.0,
                    count: 12,
                },
                control_power: -6.0,
            },
            factorize: FactorizeConfig {
                start: 1.0,
                stop: 30.0,
                points: 500,
                synthetic_alpha: 1.7,
                synthetic_q: 1,
                synthetic_zeros: 8,
                round_trip_tol: 1e-9,
                stability_tol: 0.2,
            },
            output: OutputConfig {
                dir: PathBuf::from("out"),
            },
        }
    }
}

/// Printed by `print-defaults`; parses to `RunConfig::default()`.
pub const DEFAULT_CONFIG: &str = r#"# respoisson run configuration
# lengths: radius, t in verify/theorem4 (length), heat t (length^2)
# spectral parameters lambda, r_min, r_max, factorize grid: 1/length
# angles: radians

seed = 24301
# genus = 4            # Weierstrass genus, automatic when omitted
per_mode_cap = 3000

[model]
dimension = 3
radius = 1.0
boundary = "dirichlet"  # or "neumann"

[region]
r_min = 0.05
r_max = 40.0
rho = 1.2               # cone aperture, even dimensions only

[tolerances]
root_tol = 1e-12
quad_tol = 0.02
truncation_tol = 1e-15

[psi]
kind = "bump"
flat = 0.5
support = 1.0

[alternate_psi]
kind = "bump"
flat = 1.0
support = 2.0

[verify]
t_grid = { start = 4.0, stop = 10.0, step = 0.5 }
max_tail = 1.0
scale_ratio = 1e-3
# resonances_file = "out/resonances.json"

[heat]
t_grid = { start = 10.0, stop = 200.0, count = 12 }
low_energy_window = [0.0, 0.1]
slope_tol = 0.05
prefactor_tol = 0.05

[theorem4]
gamma = 1.0
derivatives = [0, 1]
t_grid = { start = 8.0, stop = 40.0, count = 12 }
control_power = -6.0

[factorize]
start = 1.0
stop = 30.0
points = 500
synthetic_alpha = 1.7
synthetic_q = 1
synthetic_zeros = 8
round_trip_tol = 1e-9
stability_tol = 0.2

[output]
dir = "out"
"#;

/// Failure of a command, mapped onto an exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(Error),
    Io(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(m) => CliError::Usage(m),
            Error::TailBound { t_min } => CliError::Usage(format!(
                "tail bound unusable on this t-grid; t must exceed {t_min:.4}"
            )),
            other => CliError::Numerical(other),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 3,
        }
    }

    /// One-line JSON error record.
    pub fn record(&self) -> String {
        let (kind, message) = match self {
            CliError::Usage(m) => ("usage", m.clone()),
            CliError::Numerical(e) => ("numerical", e.to_string()),
            CliError::Io(m) => ("io", m.clone()),
        };
        serde_json::json!({ "status": "error", "kind": kind, "exit_code": self.exit_code(), "message": message })
            .to_string()
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Result of a command: pass or a failed numerical criterion.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub pass: bool,
    pub files: Vec<PathBuf>,
    pub summary: String,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.pass {
            0
        } else {
            1
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> CliResult<Self> {
        let cfg: RunConfig =
            toml::from_str(text).map_err(|e| CliError::Usage(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> CliResult<()> {
        let bad = |m: String| Err(CliError::Usage(m));
        self.ball()?;
        let t = &self.tolerances;
        if !(t.root_tol > 0.0 && t.quad_tol > 0.0 && t.truncation_tol > 0.0) {
            return bad(format!("tolerances must be positive: {t:?}"));
        }
        let r = &self.region;
        if !(r.r_min > 0.0 && r.r_max > r.r_min && r.r_max.is_finite()) {
            return bad(format!("empty region {r:?}"));
        }
        if !(r.rho > 0.0 && r.rho < std::f64::consts::PI) {
            return bad(format!("cone aperture {} outside (0, pi)", r.rho));
        }
        for p in [self.psi, self.alternate_psi] {
            if !matches!(p, CutoffKind::Bump { .. }) {
                return bad(format!("psi must be a bump, got {p:?}"));
            }
            crate::traces::CutoffFunction::new(p)?;
        }
        let v = &self.verify;
        if !(v.max_tail > 0.0 && v.scale_ratio > 0.0) {
            return bad("verify.max_tail and verify.scale_ratio must be positive".into());
        }
        let h = &self.heat;
        if !(h.slope_tol > 0.0 && h.prefactor_tol > 0.0) {
            return bad("heat tolerances must be positive".into());
        }
        let f = &self.factorize;
        if !(f.start > 0.0
            && f.stop > f.start
            && f.points >= 3
            && f.round_trip_tol > 0.0
            && f.stability_tol > 0.0)
        {
            return bad(format!("factorize settings {f:?}"));
        }
        if !(self.theorem4.gamma > 0.0) {
            return bad(format!("theorem4.gamma = {}", self.theorem4.gamma));
        }
        Ok(())
    }

    pub fn ball(&self) -> CliResult<BallModel> {
        let m = &self.model;
        Ok(BallModel::new(m.dimension, m.radius, m.boundary)?)
    }

    pub fn search_region(&self) -> SearchRegion {
        let r = &self.region;
        if self.model.dimension % 2 == 1 {
            SearchRegion::UpperHalfPlane {
                r_min: r.r_min,
                r_max: r.r_max,
            }
        } else {
            SearchRegion::Cone {
                rho: r.rho,
                r_min: r.r_min,
                r_max: r.r_max,
            }
        }
    }

    pub fn finder_options(&self) -> FinderOptions {
        FinderOptions {
            quad_tol: self.tolerances.quad_tol,
            root_tol: self.tolerances.root_tol,
            seed: self.seed,
            ..FinderOptions::default()
        }
    }

    /// SHA-256 of the configuration with the output directory blanked.
    pub fn fingerprint(&self) -> String {
        let mut c = self.clone();
        c.output.dir = PathBuf::new();
        hex::encode(Sha256::digest(c.to_toml().as_bytes()))
    }

    /// Metadata block embedded in every JSON output.
    pub fn metadata(&self) -> serde_json::Value {
        serde_json::json!({
            "fingerprint": self.fingerprint(),
            "model": self.model,
            "region": self.search_region(),
            "tolerances": self.tolerances,
            "seed": self.seed,
        })
    }
}

/// `{:.16e}`: 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV with a fingerprint comment line and `\n` line endings.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(fingerprint: &str, columns: &[&str]) -> Self {
        let mut text = format!("# fingerprint: {fingerprint}\n");
        text.push_str(&columns.join(","));
        text.push('\n');
        Self { text }
    }

    pub fn row(&mut self, fields: &[String]) {
        let _ = writeln!(self.text, "{}", fields.join(","));
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        Ok(std::fs::write(path, &self.text)?)
    }
}

pub fn write_json(path: &Path, value: &serde_json::Value) -> CliResult<()> {
    let mut s = serde_json::to_string_pretty(value).expect("json serializes");
    s.push('\n');
    Ok(std::fs::write(path, s)?)
}

pub fn grid(g: &TGrid, name: &str) -> CliResult<Vec<f64>> {
    let pts = g.points();
    if pts.is_empty() {
        return Err(CliError::Usage(format!("{name}.t_grid is empty")));
    }
    if pts.iter().any(|t| !(*t > 0.0) || !t.is_finite()) {
        return Err(CliError::Usage(format!(
            "{name}.t_grid needs positive finite times"
        )));
    }
    Ok(pts)
}
