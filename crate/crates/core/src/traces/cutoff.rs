//! Smooth cutoffs: the even bump `psi` and compactly supported test functions `phi`.

use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CutoffKind {
    /// Even, equal to 1 on `[-flat, flat]`, vanishing outside `[-support, support]`.
    Bump { flat: f64, support: f64 },
    /// `exp(1 - 1/(1 - s^2))` with `s` the affine image of `(a, b)` on `(-1, 1)`.
    Test { a: f64, b: f64 },
}

/// `e^{-1/x}` for `x > 0`, else 0.
fn flat_exp(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

/// Smooth step from 0 at `x <= 0` to 1 at `x >= 1`.
pub fn smooth_step(x: f64) -> f64 {
    let p = flat_exp(x);
    let q = flat_exp(1.0 - x);
    if p + q == 0.0 {
        0.0
    } else {
        p / (p + q)
    }
}

const PANELS: usize = 48;
const NODES: usize = 16;

#[derive(Debug)]
pub struct CutoffFunction {
    pub kind: CutoffKind,
    cache: Mutex<HashMap<(u64, u64), Complex64>>,
}

impl Clone for CutoffFunction {
    fn clone(&self) -> Self {
        Self::new(self.kind).expect("kind was validated")
    }
}

impl CutoffFunction {
    pub fn new(kind: CutoffKind) -> Result<Self> {
        let ok = match kind {
            CutoffKind::Bump { flat, support } => {
                flat > 0.0 && support > flat && support.is_finite()
            }
            CutoffKind::Test { a, b } => a > 0.0 && b > a && b.is_finite(),
        };
        if !ok {
            return Err(Error::InvalidInput(format!("cutoff {kind:?}")));
        }
        Ok(Self {
            kind,
            cache: Mutex::new(HashMap::new()),
        })
    }

    /// Default bump: 1 on `[-1/2, 1/2]`, support `[-1, 1]`.
    pub fn default_bump() -> Self {
        Self::new(CutoffKind::Bump {
            flat: 0.5,
            support: 1.0,
        })
        .expect("valid")
    }

    /// Wider bump: 1 on `[-1, 1]`, support `[-2, 2]`.
    pub fn wide_bump() -> Self {
        Self::new(CutoffKind::Bump {
            flat: 1.0,
            support: 2.0,
        })
        .expect("valid")
    }

    pub fn test(a: f64, b: f64) -> Result<Self> {
        Self::new(CutoffKind::Test { a, b })
    }

    pub fn id(&self) -> String {
        match self.kind {
            CutoffKind::Bump { flat, support } => format!("bump(flat={flat},support={support})"),
            CutoffKind::Test { a, b } => format!("test({a},{b})"),
        }
    }

    /// Closed interval outside which the function vanishes.
    pub fn support(&self) -> (f64, f64) {
        match self.kind {
            CutoffKind::Bump { support, .. } => (-support, support),
            CutoffKind::Test { a, b } => (a, b),
        }
    }

    /// Largest `x >= 0` with value 1 on `[0, x]`, or 0 for test functions.
    pub fn flat_radius(&self) -> f64 {
        match self.kind {
            CutoffKind::Bump { flat, .. } => flat,
            CutoffKind::Test { .. } => 0.0,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self.kind {
            CutoffKind::Bump { flat, support } => {
                smooth_step((support - x.abs()) / (support - flat))
            }
            CutoffKind::Test { a, b } => {
                let s = (2.0 * x - a - b) / (b - a);
                if s.abs() >= 1.0 {
                    0.0
                } else {
                    (1.0 - 1.0 / (1.0 - s * s)).exp()
                }
            }
        }
    }

    /// `integral f(x) e^{-i w x} dx` by composite Gauss-Legendre with `panels` panels.
    pub fn fourier_with(&self, w: Complex64, panels: usize) -> Complex64 {
        static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
        let (x, wt) = RULE.get_or_init(|| gauss_legendre(NODES));
        let (lo, hi) = self.support();
        let h = (hi - lo) / panels as f64;
        let mut sum = Complex64::new(0.0, 0.0);
        for p in 0..panels {
            let c = lo + (p as f64 + 0.5) * h;
            for (xk, wk) in x.iter().zip(wt) {
                let t = c + 0.5 * h * xk;
                sum += (-Complex64::i() * w * t).exp() * (wk * self.eval(t));
            }
        }
        sum * (0.5 * h)
    }

    /// Cached Fourier transform `integral f(x) e^{-i w x} dx`.
    pub fn fourier(&self, w: Complex64) -> Complex64 {
        let key = (w.re.to_bits(), w.im.to_bits());
        if let Some(v) = self.cache.lock().expect("cache lock").get(&key) {
            return *v;
        }
        let v = self.fourier_with(w, PANELS);
        self.cache.lock().expect("cache lock").insert(key, v);
        v
    }

    /// Largest change of the cached transforms under doubled quadrature.
    pub fn cache_consistency(&self) -> f64 {
        let keys: Vec<(u64, u64)> = self
            .cache
            .lock()
            .expect("cache lock")
            .keys()
            .copied()
            .collect();
        keys.into_iter()
            .map(|(re, im)| {
                let w = Complex64::new(f64::from_bits(re), f64::from_bits(im));
                (self.fourier(w) - self.fourier_with(w, 2 * PANELS)).norm()
            })
            .fold(0.0, f64::max)
    }
}
