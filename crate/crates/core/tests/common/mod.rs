//! Fixed-step classical RK4 in `(x, z, theta)`, written without any of the
//! library's integrator, series launch or event code.

#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_2, PI};

pub const ORACLE_STEP: f64 = 1e-6;

/// Closing height for `n = 2`, `lambda = 0`, from [`oracle_b0`] at step 1e-6.
pub const B0_N2_LAMBDA0: f64 = 0.278215802428583;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleEvent {
    pub s: f64,
    pub x: f64,
    pub z: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct OracleShot {
    pub s1: Option<OracleEvent>,
    pub sm: Option<OracleEvent>,
    pub s2: Option<OracleEvent>,
    pub z0: Option<OracleEvent>,
    /// `x` where the curve came back down to `z = 0`.
    pub axis_x: Option<f64>,
}

fn f(y: [f64; 3], n: f64, lambda: f64) -> [f64; 3] {
    let (x, z, th) = (y[0], y[1], y[2]);
    let (s, c) = th.sin_cos();
    [c, s, lambda + x * s - (z - (n - 1.0) / z) * c]
}

fn axpy(y: [f64; 3], h: f64, k: [f64; 3]) -> [f64; 3] {
    [y[0] + h * k[0], y[1] + h * k[1], y[2] + h * k[2]]
}

fn rk4(y: [f64; 3], h: f64, n: f64, lambda: f64) -> [f64; 3] {
    let k1 = f(y, n, lambda);
    let k2 = f(axpy(y, h / 2.0, k1), n, lambda);
    let k3 = f(axpy(y, h / 2.0, k2), n, lambda);
    let k4 = f(axpy(y, h, k3), n, lambda);
    let mut out = y;
    for i in 0..3 {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

fn lerp(s0: f64, y0: [f64; 3], y1: [f64; 3], h: f64, t: f64) -> OracleEvent {
    OracleEvent { s: s0 + t * h, x: y0[0] + t * (y1[0] - y0[0]), z: y0[1] + t * (y1[1] - y0[1]) }
}

/// Shoots from `(b, 0)` with step `h`. With `first_only` the run stops at
/// the first vertical tangent.
pub fn rk4_shot(n: u32, lambda: f64, b: f64, h: f64, first_only: bool) -> OracleShot {
    let nf = f64::from(n);
    let k = (b + lambda) / nf;
    let s0 = 1e-5;
    let mut y = [b - k * s0 * s0 / 2.0, s0 - k * k * s0.powi(3) / 6.0, FRAC_PI_2 + k * s0];
    let mut s = s0;
    let mut shot = OracleShot::default();
    let levels = [PI, 1.5 * PI, 2.0 * PI];
    while s < 60.0 {
        let next = rk4(y, h, nf, lambda);
        for (i, &lv) in levels.iter().enumerate() {
            let slot = match i {
                0 => &mut shot.s1,
                1 => &mut shot.sm,
                _ => &mut shot.s2,
            };
            if slot.is_none() && y[2] < lv && next[2] >= lv {
                *slot = Some(lerp(s, y, next, h, (lv - y[2]) / (next[2] - y[2])));
            }
        }
        if shot.s1.is_none() && shot.z0.is_none() && y[0] > 0.0 && next[0] <= 0.0 {
            shot.z0 = Some(lerp(s, y, next, h, y[0] / (y[0] - next[0])));
        }
        if next[1] <= 1e-6 {
            let t = y[1] / (y[1] - next[1]);
            shot.axis_x = Some(y[0] + t * (next[0] - y[0]));
            break;
        }
        y = next;
        s += h;
        if shot.s2.is_some() || (first_only && shot.s1.is_some()) {
            break;
        }
    }
    shot
}

/// Secant iteration on `x(s2)` between two Positive/Negative heights.
pub fn oracle_b0(n: u32, lambda: f64, mut b_a: f64, mut b_b: f64, h: f64) -> f64 {
    let res = |b: f64| rk4_shot(n, lambda, b, h, false).s2.expect("second vertical tangent").x;
    let (mut fa, mut fb) = (res(b_a), res(b_b));
    for _ in 0..30 {
        let b_c = b_b - fb * (b_b - b_a) / (fb - fa);
        let fc = res(b_c);
        (b_a, fa, b_b, fb) = (b_b, fb, b_c, fc);
        if fc.abs() < 1e-13 || (b_b - b_a).abs() < 1e-15 {
            break;
        }
    }
    b_b
}
