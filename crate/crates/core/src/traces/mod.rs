//! Wave and heat traces of the ball models, evaluated from the scattering
//! phase and from resonance sums.

pub mod cutoff;
pub mod heat;
pub mod low_energy;
pub mod resonance_side;
pub mod smeared;
pub mod spectral;
pub mod theorem4;

pub use cutoff::{CutoffFunction, CutoffKind};
pub use heat::{heat_trace, HeatOptions};
pub use low_energy::{fit_low_energy, fit_low_energy_samples, LowEnergyFit};
pub use resonance_side::{
    wave_trace_resonance_side, ResonanceSide, ResonanceSideOptions, ResonanceTail,
};
pub use smeared::{smeared_check, SmearedReport};
pub use spectral::{BkOptions, FnSource, ModelSource, Moment, SpectralDensity, SpectralSource};
pub use theorem4::{verify_theorem4, Theorem4Report};

use crate::error::Result;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    BirmanKrein,
    ResonanceSum,
    Heat,
}

/// Breakdown of a resonance-side value.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Components {
    pub resonance_sum: f64,
    /// `2 integral psi sigma' cos(t lambda)` (or its `t`-derivative).
    pub low_energy: f64,
    pub zero_multiplicity: f64,
    /// Bound on the resonances beyond the truncation radius.
    pub tail_bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceSample {
    pub t: f64,
    /// Order of the `t`-derivative.
    pub derivative: u32,
    pub value: f64,
    pub error: f64,
    pub side: Side,
    pub components: Option<Components>,
}

/// `i^k`.
pub(crate) fn i_pow(k: u32) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// `k`-th `t`-derivative of `u(t) = 2 integral_0^inf sigma'(lambda) cos(t lambda) d lambda`, `t > 0`.
pub fn wave_trace_bk(density: &SpectralDensity, t: f64, k: u32) -> Result<TraceSample> {
    let m = density.moment(k, t)?;
    Ok(TraceSample {
        t,
        derivative: k,
        value: 2.0 * (i_pow(k) * m.value).re,
        error: 2.0 * m.error,
        side: Side::BirmanKrein,
        components: None,
    })
}
