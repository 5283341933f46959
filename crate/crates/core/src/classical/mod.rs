//! Classical auxiliary dynamics.
//!
//! The wave-packet centre `α(t)` obeys the damped, modulated linear equation
//! `α'' + γα' + ω̃²α = 0` (the same equation as the classical coordinate
//! `q`). The width `ρ(t)` obeys the Ermakov–Pinney equation
//! `ρ'' + γρ' + ω̃²ρ − β²/ρ³ = 0`. Both are propagated segment-exactly: the
//! linear equation through closed-form 2×2 propagators, the nonlinear one
//! through the Pinney superposition of two linear solutions.
//!
//! Primes are derivatives with respect to true time `t` throughout. The
//! rescaled time `T = ∫β dt` only appears internally.

mod energy;
mod ermakov;
mod monodromy;
mod propagator;

pub use energy::{classical_energy, hamiltonian_energy, lr_invariant};
pub use ermakov::{propagate_ermakov, propagate_ermakov_from};
pub use monodromy::{monodromy, scan_bands, BandPoint, BandScan, MonodromyResult, IN_BAND_TOL};
pub use propagator::{propagate_linear, propagate_linear_from, segment_propagator, transfer, Mat2};

use crate::model::{DriveProfile, TimePoint};

/// A `(value, derivative)` pair at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscState {
    pub value: f64,
    pub derivative: f64,
}

impl OscState {
    pub fn new(value: f64, derivative: f64) -> Self {
        OscState { value, derivative }
    }

    /// Canonical momentum `p = q'/β`.
    pub fn momentum(&self, beta: f64) -> f64 {
        self.derivative / beta
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TrajectoryKind {
    LinearAlpha,
    ErmakovRho,
    LinearQ,
}

impl TrajectoryKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            TrajectoryKind::LinearAlpha => "linear-alpha",
            TrajectoryKind::ErmakovRho => "ermakov-rho",
            TrajectoryKind::LinearQ => "linear-q",
        }
    }
}

/// Sampled solution together with the profile that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub profile: DriveProfile,
    pub samples: Vec<(TimePoint, OscState)>,
    pub kind: TrajectoryKind,
}

impl Trajectory {
    /// Relabels a linear trajectory as the wave-packet centre `α`.
    pub fn into_alpha(mut self) -> Self {
        if self.kind == TrajectoryKind::LinearQ {
            self.kind = TrajectoryKind::LinearAlpha;
        }
        self
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|(tp, _)| tp.t)
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|(_, s)| s.value)
    }

    pub fn last(&self) -> Option<&(TimePoint, OscState)> {
        self.samples.last()
    }
}

/// Evenly spaced samples `k·τ/per_period` for `k = 1..=n_periods·per_period`.
pub fn sample_grid(profile: &DriveProfile, per_period: usize) -> Vec<f64> {
    let n = profile.n_periods() * per_period;
    let step = profile.tau() / per_period as f64;
    (1..=n).map(|k| k as f64 * step).collect()
}

#[cfg(test)]
mod tests;
