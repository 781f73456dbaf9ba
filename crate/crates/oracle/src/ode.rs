//! Continuation of Bessel solutions along circular arcs by direct integration
//! of the Bessel equation.
//!
//! On `z = r e^{i theta}` the equation `w'' + w'/z + (1 - nu^2/z^2) w = 0`
//! becomes a first-order system in `theta`. The system is integrated with an
//! adaptive Cash-Karp pair.

use num_complex::Complex64;

type State = [Complex64; 2];

fn rhs(nu: f64, r: f64, theta: f64, y: &State) -> State {
    let z = Complex64::from_polar(r, theta);
    let dz = Complex64::i() * z;
    let w = y[0];
    let wp = y[1];
    let wpp = -wp / z - (1.0 - nu * nu / (z * z)) * w;
    [dz * wp, dz * wpp]
}

fn axpy(y: &State, terms: &[(f64, &State)], h: f64) -> State {
    let mut out = *y;
    for (c, k) in terms {
        out[0] += k[0] * (c * h);
        out[1] += k[1] * (c * h);
    }
    out
}

/// Result of a continuation run.
#[derive(Debug, Clone, Copy)]
pub struct Continued {
    pub value: Complex64,
    pub derivative: Complex64,
    pub steps: usize,
}

/// Continue `(w, dw/dz)` from `theta0` to `theta1` along `|z| = r`.
pub fn continue_along_circle(
    nu: f64,
    r: f64,
    theta0: f64,
    theta1: f64,
    w0: Complex64,
    wp0: Complex64,
    rtol: f64,
) -> Continued {
    // Cash-Karp tableau
    const A: [[f64; 5]; 5] = [
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0],
        [3.0 / 10.0, -9.0 / 10.0, 6.0 / 5.0, 0.0, 0.0],
        [-11.0 / 54.0, 5.0 / 2.0, -70.0 / 27.0, 35.0 / 27.0, 0.0],
        [
            1631.0 / 55296.0,
            175.0 / 512.0,
            575.0 / 13824.0,
            44275.0 / 110592.0,
            253.0 / 4096.0,
        ],
    ];
    const C: [f64; 5] = [1.0 / 5.0, 3.0 / 10.0, 3.0 / 5.0, 1.0, 7.0 / 8.0];
    const B5: [f64; 6] = [
        37.0 / 378.0,
        0.0,
        250.0 / 621.0,
        125.0 / 594.0,
        0.0,
        512.0 / 1771.0,
    ];
    const B4: [f64; 6] = [
        2825.0 / 27648.0,
        0.0,
        18575.0 / 48384.0,
        13525.0 / 55296.0,
        277.0 / 14336.0,
        1.0 / 4.0,
    ];

    let span = theta1 - theta0;
    let dir = span.signum();
    let mut theta = theta0;
    let mut y: State = [w0, wp0];
    let mut h = dir * (span.abs() / 64.0).min(0.02 / r.max(0.1));
    let mut steps = 0;
    while (theta1 - theta) * dir > 0.0 {
        if (theta + h - theta1) * dir > 0.0 {
            h = theta1 - theta;
        }
        let k1 = rhs(nu, r, theta, &y);
        let y2 = axpy(&y, &[(A[0][0], &k1)], h);
        let k2 = rhs(nu, r, theta + C[0] * h, &y2);
        let y3 = axpy(&y, &[(A[1][0], &k1), (A[1][1], &k2)], h);
        let k3 = rhs(nu, r, theta + C[1] * h, &y3);
        let y4 = axpy(&y, &[(A[2][0], &k1), (A[2][1], &k2), (A[2][2], &k3)], h);
        let k4 = rhs(nu, r, theta + C[2] * h, &y4);
        let y5 = axpy(
            &y,
            &[
                (A[3][0], &k1),
                (A[3][1], &k2),
                (A[3][2], &k3),
                (A[3][3], &k4),
            ],
            h,
        );
        let k5 = rhs(nu, r, theta + C[3] * h, &y5);
        let y6 = axpy(
            &y,
            &[
                (A[4][0], &k1),
                (A[4][1], &k2),
                (A[4][2], &k3),
                (A[4][3], &k4),
                (A[4][4], &k5),
            ],
            h,
        );
        let k6 = rhs(nu, r, theta + C[4] * h, &y6);
        let ks = [&k1, &k2, &k3, &k4, &k5, &k6];
        let hi = axpy(
            &y,
            &[
                (B5[0], ks[0]),
                (B5[2], ks[2]),
                (B5[3], ks[3]),
                (B5[5], ks[5]),
            ],
            h,
        );
        let lo = axpy(
            &y,
            &[
                (B4[0], ks[0]),
                (B4[2], ks[2]),
                (B4[3], ks[3]),
                (B4[4], ks[4]),
                (B4[5], ks[5]),
            ],
            h,
        );
        let scale = y[0].norm().max(y[1].norm() * r).max(1e-300);
        let err = ((hi[0] - lo[0]).norm().max((hi[1] - lo[1]).norm() * r)) / scale;
        if err <= rtol || h.abs() < 1e-12 {
            theta += h;
            y = hi;
            steps += 1;
        }
        let factor = if err == 0.0 {
            4.0
        } else {
            (0.9 * (rtol / err).powf(0.2)).clamp(0.2, 4.0)
        };
        h *= factor;
    }
    Continued {
        value: y[0],
        derivative: y[1],
        steps,
    }
}
