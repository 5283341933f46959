//! Closed-form propagation of `x'' + γx' + ω̃²x = 0` across constant segments.

use std::ops::Mul;

use super::{OscState, Trajectory, TrajectoryKind};
use crate::error::{Error, Result};
use crate::model::{frequencies_at, DriveProfile, Segment};

/// Relative tolerance for treating a segment as critically damped.
const CRITICAL_TOL: f64 = 1e-12;

/// 2×2 real matrix acting on `(value, derivative)` column vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[f64; 2]; 2]);

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([[1.0, 0.0], [0.0, 1.0]]);

    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn apply(&self, s: OscState) -> OscState {
        let m = &self.0;
        OscState::new(
            m[0][0] * s.value + m[0][1] * s.derivative,
            m[1][0] * s.value + m[1][1] * s.derivative,
        )
    }
}

impl Mul for Mat2 {
    type Output = Mat2;

    fn mul(self, rhs: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &rhs.0);
        Mat2([
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ])
    }
}

/// Propagator over `dt` for constant `ω̃² = omega_tilde_sq` and rate `gamma`.
///
/// Its determinant is `exp(−γ dt)`.
pub fn segment_propagator(omega_tilde_sq: f64, gamma: f64, dt: f64) -> Mat2 {
    let half_g = 0.5 * gamma;
    let omega_tilde = omega_tilde_sq.sqrt();
    if (gamma - 2.0 * omega_tilde).abs() < CRITICAL_TOL * omega_tilde {
        let e = (-half_g * dt).exp();
        return Mat2([
            [e * (1.0 + half_g * dt), e * dt],
            [-e * omega_tilde_sq * dt, e * (1.0 - half_g * dt)],
        ]);
    }
    let disc = omega_tilde_sq - half_g * half_g;
    if disc > 0.0 {
        let wd = disc.sqrt();
        let e = (-half_g * dt).exp();
        let (s, c) = (wd * dt).sin_cos();
        Mat2([
            [e * (c + half_g / wd * s), e * s / wd],
            [-e * omega_tilde_sq / wd * s, e * (c - half_g / wd * s)],
        ])
    } else {
        // e^{-γdt/2}·cosh and e^{-γdt/2}·sinh, formed without overflow
        let k = (-disc).sqrt();
        let ep = ((k - half_g) * dt).exp();
        let em = (-(k + half_g) * dt).exp();
        let (ch, sh) = (0.5 * (ep + em), 0.5 * (ep - em));
        Mat2([
            [ch + half_g / k * sh, sh / k],
            [-omega_tilde_sq / k * sh, ch - half_g / k * sh],
        ])
    }
}

pub(crate) fn propagator_for(profile: &DriveProfile, seg: &Segment, dt: f64) -> Mat2 {
    let w = profile.segment_omega_tilde(seg);
    segment_propagator(w * w, seg.gamma, dt)
}

/// Transfer matrix from `t0` to `t1 ≥ t0`.
pub fn transfer(profile: &DriveProfile, t0: f64, t1: f64) -> Result<Mat2> {
    frequencies_at(profile, t0)?;
    frequencies_at(profile, t1)?;
    if t1 < t0 {
        return Err(Error::Domain(format!("transfer backwards in time: {t0} -> {t1}")));
    }
    Ok(profile
        .pieces(t0, t1)
        .into_iter()
        .fold(Mat2::IDENTITY, |acc, pc| propagator_for(profile, pc.segment, pc.duration) * acc))
}

pub(crate) fn check_samples(profile: &DriveProfile, t0: f64, t_samples: &[f64]) -> Result<()> {
    let mut prev = t0;
    for (i, &t) in t_samples.iter().enumerate() {
        frequencies_at(profile, t)?;
        let ordered = if i == 0 { t >= prev } else { t > prev };
        if !ordered {
            return Err(Error::Domain(format!(
                "sample times must be strictly increasing and >= {t0}; got {t} after {prev}"
            )));
        }
        prev = t;
    }
    Ok(())
}

/// Propagates a linear solution from `t = 0`.
pub fn propagate_linear(profile: &DriveProfile, init: OscState, t_samples: &[f64]) -> Result<Trajectory> {
    propagate_linear_from(profile, 0.0, init, t_samples)
}

/// Propagates a linear solution that takes the value `init` at `t0`.
pub fn propagate_linear_from(
    profile: &DriveProfile,
    t0: f64,
    init: OscState,
    t_samples: &[f64],
) -> Result<Trajectory> {
    check_samples(profile, t0, t_samples)?;
    let mut samples = Vec::with_capacity(t_samples.len());
    let (mut t_prev, mut state) = (t0, init);
    for &t in t_samples {
        state = transfer(profile, t_prev, t)?.apply(state);
        samples.push((frequencies_at(profile, t)?, state));
        t_prev = t;
    }
    Ok(Trajectory {
        profile: profile.clone(),
        samples,
        kind: TrajectoryKind::LinearQ,
    })
}
