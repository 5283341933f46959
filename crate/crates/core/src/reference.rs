//! Independent reference integrators.
//!
//! These do not share code paths with the closed-form propagators and exist
//! to check them: an adaptive Dormand–Prince 5(4) stepper, and a direct
//! integration of the nonlinear width equation
//! `ρ'' + γρ' + ω̃²ρ − β²/ρ³ = 0` built on it.

use crate::classical::OscState;
use crate::error::{Error, Result};
use crate::model::{beta_at, DriveProfile};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
// 5th-order minus embedded 4th-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Adaptive Dormand–Prince 5(4) with local extrapolation.
#[derive(Debug, Clone, Copy)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Dopri5 {
            rtol: 1e-12,
            atol: 1e-14,
            max_steps: 10_000_000,
        }
    }
}

impl Dopri5 {
    pub fn new(rtol: f64, atol: f64) -> Self {
        Dopri5 {
            rtol,
            atol,
            ..Default::default()
        }
    }

    /// Integrates `y' = f(t, y)` from `(t0, y0)` to exactly `t1`.
    pub fn integrate<const N: usize, F>(&self, f: F, t0: f64, y0: [f64; N], t1: f64) -> Result<[f64; N]>
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
    {
        let span = t1 - t0;
        if span == 0.0 {
            return Ok(y0);
        }
        if span < 0.0 {
            return Err(Error::Domain("Dopri5 integrates forward only".into()));
        }
        let mut t = t0;
        let mut y = y0;
        let mut h = (span * 1e-3).min(1e-2);
        let mut k = [[0.0; N]; 7];
        k[0] = f(t, &y);
        for _ in 0..self.max_steps {
            let last = t + h >= t1;
            if last {
                h = t1 - t;
            }
            for s in 1..7 {
                let mut ys = y;
                for (i, yi) in ys.iter_mut().enumerate() {
                    *yi += h * (0..s).map(|j| A[s][j] * k[j][i]).sum::<f64>();
                }
                k[s] = f(t + C[s] * h, &ys);
            }
            let mut y_new = y;
            let mut err = 0.0;
            for i in 0..N {
                y_new[i] += h * (0..7).map(|j| B[j] * k[j][i]).sum::<f64>();
                let e = h * (0..7).map(|j| E[j] * k[j][i]).sum::<f64>();
                let sc = self.atol + self.rtol * y[i].abs().max(y_new[i].abs());
                err += (e / sc) * (e / sc);
            }
            let err = (err / N as f64).sqrt();
            if err <= 1.0 {
                t = if last { t1 } else { t + h };
                y = y_new;
                if last {
                    return Ok(y);
                }
                // first-same-as-last: stage 7 is f at the new point
                k[0] = k[6];
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h *= factor;
            if !(h > 0.0) || t + h == t {
                return Err(Error::Oracle(format!("Dopri5 step size underflow at t = {t}")));
            }
        }
        Err(Error::Oracle(format!("Dopri5 exceeded {} steps", self.max_steps)))
    }
}

/// Direct adaptive integration of the width equation in true time, restarted
/// at every segment boundary so the right-hand side is smooth on each leg.
pub fn ermakov_direct(profile: &DriveProfile, init: OscState, t_samples: &[f64], solver: &Dopri5) -> Result<Vec<OscState>> {
    if !(init.value > 0.0) {
        return Err(Error::Domain(format!("initial width must be > 0, got {}", init.value)));
    }
    let mut out = Vec::with_capacity(t_samples.len());
    let mut t = 0.0;
    let mut y = [init.value, init.derivative];
    for &ts in t_samples {
        if ts < t {
            return Err(Error::Domain("sample times must be non-decreasing".into()));
        }
        for piece in profile.pieces(t, ts) {
            let w = profile.segment_omega_tilde(piece.segment);
            let (w2, g) = (w * w, piece.segment.gamma);
            let b0 = beta_at(profile, piece.start)?;
            let start = piece.start;
            let rhs = |tt: f64, s: &[f64; 2]| {
                let b = b0 * (-g * (tt - start)).exp();
                let r = s[0];
                [s[1], -g * s[1] - w2 * r + b * b / (r * r * r)]
            };
            y = solver.integrate(rhs, start, y, start + piece.duration)?;
        }
        t = ts;
        out.push(OscState::new(y[0], y[1]));
    }
    Ok(out)
}
