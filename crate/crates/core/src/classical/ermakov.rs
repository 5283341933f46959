//! Ermakov–Pinney width function via superposition of linear solutions.
//!
//! In rescaled time the width obeys `ρ̈ + ω²ρ = ρ⁻³`. If `u` and `v` solve the
//! linear equation with Wronskian `u v̇ − u̇ v = 1`, then `ρ = √(u² + v²)` solves
//! the nonlinear one. The linear equation in true time is the damped
//! `x'' + γx' + ω̃²x = 0`, so `u` and `v` ride on the same closed-form
//! propagators as `α` and `q`.

use super::propagator::{check_samples, transfer};
use super::{OscState, Trajectory, TrajectoryKind};
use crate::error::{Error, Result};
use crate::model::{beta_at, frequencies_at, DriveProfile};

pub fn propagate_ermakov(profile: &DriveProfile, init: OscState, t_samples: &[f64]) -> Result<Trajectory> {
    propagate_ermakov_from(profile, 0.0, init, t_samples)
}

/// Propagates the width function that equals `init` at `t0`.
pub fn propagate_ermakov_from(
    profile: &DriveProfile,
    t0: f64,
    init: OscState,
    t_samples: &[f64],
) -> Result<Trajectory> {
    if !(init.value > 0.0 && init.value.is_finite() && init.derivative.is_finite()) {
        return Err(Error::Domain(format!(
            "Ermakov initial width must be finite and > 0, got {}",
            init.value
        )));
    }
    check_samples(profile, t0, t_samples)?;

    // u carries the initial data; v starts at zero with v̇(T) = 1/ρ₀, so the
    // rescaled-time Wronskian is exactly 1.
    let beta0 = beta_at(profile, t0)?;
    let mut u = init;
    let mut v = OscState::new(0.0, beta0 / init.value);

    let mut samples = Vec::with_capacity(t_samples.len());
    let mut t_prev = t0;
    for &t in t_samples {
        let m = transfer(profile, t_prev, t)?;
        u = m.apply(u);
        v = m.apply(v);
        let rho = u.value.hypot(v.value);
        let rho_dot = (u.value * u.derivative + v.value * v.derivative) / rho;
        samples.push((frequencies_at(profile, t)?, OscState::new(rho, rho_dot)));
        t_prev = t;
    }
    Ok(Trajectory {
        profile: profile.clone(),
        samples,
        kind: TrajectoryKind::ErmakovRho,
    })
}
