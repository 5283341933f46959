//! Number and energy distributions of an evolved eigenstate.
//!
//! An eigenstate `m` of the initial Hamiltonian, carried through the drive,
//! lands on the instantaneous eigenbasis with probabilities `P_m(n)` that
//! depend on a single dimensionless parameter Γ. Two limits are covered:
//!
//! * **Displaced**: the width stays bounded and only the packet centre `α`
//!   grows. Γ is the centre's classical energy in units of the quantum
//!   `β⟨ω̃⟩`, and `P_m(n)` is the Laguerre law of a displaced number state.
//! * **Squeezed**: the centre stays at rest and the width `ρ` grows. Γ ≥ 1
//!   measures the squeezing, and `P_m(n)` vanishes unless `n ≡ m (mod 2)`.
//!
//! Distributions are truncated adaptively to a tail tolerance and then
//! reduced to the mean energy `βω̃ Σ P (n + ½)` and its spread.
//!
//! ```
//! use paramres::spectra::{build_distribution, mean_energy, GammaValue};
//!
//! let gamma = GammaValue::displaced(3.0, 1.0).unwrap();
//! let dist = build_distribution(0, &gamma, 1e-12).unwrap();
//! assert!((mean_energy(&dist) - 3.5).abs() < 1e-10);
//! ```

mod laws;
mod oracle;
pub mod special;

pub use laws::{prob, prob_displaced, prob_squeezed};
pub use oracle::{overlap_matrix, overlap_oracle, overlap_oracle_with, LinearPhase, WaveParams, ORACLE_MAX_INDEX};

use crate::classical::{classical_energy, OscState};
use crate::error::{Error, Result};
use crate::model::TimePoint;

/// Default truncation tolerance for [`build_distribution`].
pub const DEFAULT_TAIL_TOL: f64 = 1e-12;

/// Hard cap on the number of terms in one distribution.
pub const N_MAX_CAP: usize = 1_000_000;

/// Trailing terms that must all be negligible before truncation.
const QUIET_RUN: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    Displaced,
    Squeezed,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Displaced => "displaced",
            Regime::Squeezed => "squeezed",
        }
    }
}

impl std::str::FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "displaced" => Ok(Regime::Displaced),
            "squeezed" => Ok(Regime::Squeezed),
            other => Err(Error::Usage(format!(
                "unknown regime '{other}', expected 'displaced' or 'squeezed'"
            ))),
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The distribution parameter Γ together with the scales it was formed from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaValue {
    pub gamma: f64,
    pub regime: Regime,
    /// Classical energy of the auxiliary function that produced Γ.
    pub e_cl: f64,
    /// Energy quantum `βω̃` (or `β⟨ω̃⟩` in the displaced regime).
    pub beta_omega_tilde: f64,
}

impl GammaValue {
    /// A displaced-regime Γ with the classical energy it implies, `Γ·βω̃`.
    pub fn displaced(gamma: f64, beta_omega_tilde: f64) -> Result<Self> {
        check_quantum(beta_omega_tilde)?;
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(Error::Domain(format!("displaced Γ must be finite and >= 0, got {gamma}")));
        }
        Ok(GammaValue {
            gamma,
            regime: Regime::Displaced,
            e_cl: gamma * beta_omega_tilde,
            beta_omega_tilde,
        })
    }

    /// A squeezed-regime Γ. The classical energy is reported in the
    /// large-width form `2βω̃(Γ − ½)`, which drops the `1/(4ωρ²)` term.
    pub fn squeezed(gamma: f64, beta_omega_tilde: f64) -> Result<Self> {
        check_quantum(beta_omega_tilde)?;
        if !(gamma >= 1.0 && gamma.is_finite()) {
            return Err(Error::Domain(format!("squeezed Γ must be finite and >= 1, got {gamma}")));
        }
        Ok(GammaValue {
            gamma,
            regime: Regime::Squeezed,
            e_cl: 2.0 * beta_omega_tilde * (gamma - 0.5),
            beta_omega_tilde,
        })
    }

    /// The squeezed Γ that a classical width energy `e_cl` maps to once the
    /// packet is wide, `e_cl/(2βω̃) + ½`.
    pub fn squeezed_from_energy(e_cl: f64, beta_omega_tilde: f64) -> Result<Self> {
        check_quantum(beta_omega_tilde)?;
        if !(e_cl >= 0.0 && e_cl.is_finite()) {
            return Err(Error::Domain(format!("classical energy must be finite and >= 0, got {e_cl}")));
        }
        let mut g = GammaValue::squeezed(e_cl / (2.0 * beta_omega_tilde) + 0.5, beta_omega_tilde)?;
        g.e_cl = e_cl;
        Ok(g)
    }
}

fn check_quantum(beta_omega_tilde: f64) -> Result<()> {
    if beta_omega_tilde > 0.0 && beta_omega_tilde.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "energy quantum must be finite and > 0, got {beta_omega_tilde}"
        )))
    }
}

/// Γ of a displaced packet whose centre is at `alpha_state` (true-time value
/// and derivative): `(α'² + ⟨ω̃⟩²α²)/(2β⟨ω̃⟩)`.
pub fn gamma_displaced(alpha_state: OscState, tp: &TimePoint, omega_tilde_avg: f64) -> Result<GammaValue> {
    if !(tp.beta > 0.0 && omega_tilde_avg > 0.0 && omega_tilde_avg.is_finite()) {
        return Err(Error::Domain(format!(
            "displaced Γ needs beta > 0 and <omega_tilde> > 0, got {} and {omega_tilde_avg}",
            tp.beta
        )));
    }
    let averaged = TimePoint::new(tp.t, tp.beta, omega_tilde_avg);
    let e_cl = classical_energy(alpha_state, &averaged);
    let quantum = tp.beta * omega_tilde_avg;
    Ok(GammaValue {
        gamma: e_cl / quantum,
        regime: Regime::Displaced,
        e_cl,
        beta_omega_tilde: quantum,
    })
}

/// Γ of a centred packet of width `rho_state` (true-time value and
/// derivative): `𝓔/(2βω̃) + ½ + 1/(4ωρ²)` with `𝓔 = (ρ'² + ω̃²ρ²)/2`.
pub fn gamma_squeezed(rho_state: OscState, tp: &TimePoint) -> Result<GammaValue> {
    let rho = rho_state.value;
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::Domain(format!("width must be finite and > 0, got {rho}")));
    }
    if !(tp.omega > 0.0 && tp.beta > 0.0) {
        return Err(Error::Domain(format!(
            "squeezed Γ needs omega > 0 and beta > 0, got {} and {}",
            tp.omega, tp.beta
        )));
    }
    let e_cl = classical_energy(rho_state, tp);
    let quantum = tp.beta_omega_tilde();
    let gamma = e_cl / (2.0 * quantum) + 0.5 + 1.0 / (4.0 * tp.omega * rho * rho);
    Ok(GammaValue {
        gamma: gamma.max(1.0),
        regime: Regime::Squeezed,
        e_cl,
        beta_omega_tilde: quantum,
    })
}

/// A truncated distribution `P_m(n)`, `n = 0..=n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyDistribution {
    pub m: usize,
    pub gamma: GammaValue,
    pub probs: Vec<f64>,
    pub n_max: usize,
    /// `1 − Σ probs`; may be a rounding-sized negative number.
    pub tail_mass: f64,
}

impl EnergyDistribution {
    /// Running sums of `probs`.
    pub fn cumulative(&self) -> Vec<f64> {
        self.probs
            .iter()
            .scan(0.0, |acc, p| {
                *acc += p;
                Some(*acc)
            })
            .collect()
    }

    /// `Σ P n` and the centred `Σ P (n − n̄)²`, with the missing tail mass
    /// counted at the mean so the variance equals `Σ P n² − n̄²`.
    fn number_moments(&self) -> (f64, f64) {
        let mean: f64 = self.probs.iter().enumerate().map(|(n, p)| p * n as f64).sum();
        let centred: f64 = self
            .probs
            .iter()
            .enumerate()
            .map(|(n, p)| {
                let d = n as f64 - mean;
                p * d * d
            })
            .sum();
        (mean, centred + self.tail_mass * mean * mean)
    }

    pub fn mean_number(&self) -> f64 {
        self.number_moments().0
    }

    pub fn number_variance(&self) -> f64 {
        self.number_moments().1
    }
}

/// Evaluates `P_m(n)` upward from `n = 0` until the accumulated mass is
/// within `tail_tol` of one and the last ten terms are each below
/// `tail_tol/100`.
pub fn build_distribution(m: usize, gamma: &GammaValue, tail_tol: f64) -> Result<EnergyDistribution> {
    if !(tail_tol > 0.0 && tail_tol <= 1e-6) {
        return Err(Error::Domain(format!("tail_tol must lie in (0, 1e-6], got {tail_tol}")));
    }
    let quiet = tail_tol / 100.0;
    let mut probs = Vec::new();
    let mut total = 0.0;
    let mut quiet_run = 0usize;
    for n in 0..=N_MAX_CAP {
        let p = prob(m, n, gamma)?;
        probs.push(p);
        total += p;
        quiet_run = if p < quiet { quiet_run + 1 } else { 0 };
        if quiet_run >= QUIET_RUN && total >= 1.0 - tail_tol {
            return Ok(EnergyDistribution {
                m,
                gamma: *gamma,
                probs,
                n_max: n,
                tail_mass: 1.0 - total,
            });
        }
    }
    Err(Error::Convergence {
        m,
        gamma: gamma.gamma,
        n_reached: N_MAX_CAP,
        tail_mass: 1.0 - total,
    })
}

/// `βω̃ Σ P_m(n)(n + ½)`.
pub fn mean_energy(dist: &EnergyDistribution) -> f64 {
    let s: f64 = dist.probs.iter().enumerate().map(|(n, p)| p * (n as f64 + 0.5)).sum();
    dist.gamma.beta_omega_tilde * s
}

/// The mean energy together with a bound on what the truncated tail could
/// add, `|tail_mass|·(n_max + 1.5)·βω̃`.
pub fn mean_energy_with_error(dist: &EnergyDistribution) -> (f64, f64) {
    let bar = dist.tail_mass.abs() * (dist.n_max as f64 + 1.5) * dist.gamma.beta_omega_tilde;
    (mean_energy(dist), bar)
}

/// `βω̃ √(Σ P n² − (Σ P n)²)`.
pub fn energy_stddev(dist: &EnergyDistribution) -> f64 {
    dist.gamma.beta_omega_tilde * dist.number_variance().max(0.0).sqrt()
}

/// Large-Γ mean energy and standard deviation.
///
/// Displaced: `(E, √(βω̃(2m+1)E))`. Squeezed: `(𝓔(m + ½), 𝓔√((m+1)² − m)/√2)`.
pub fn asymptotic_moments(m: usize, regime: Regime, e_cl: f64, beta_omega_tilde: f64) -> Result<(f64, f64)> {
    if !(e_cl > 0.0 && e_cl.is_finite()) {
        return Err(Error::Domain(format!("classical energy must be finite and > 0, got {e_cl}")));
    }
    let mf = m as f64;
    Ok(match regime {
        Regime::Displaced => (e_cl, (beta_omega_tilde * (2.0 * mf + 1.0) * e_cl).sqrt()),
        Regime::Squeezed => (
            e_cl * (mf + 0.5),
            e_cl * ((mf + 1.0) * (mf + 1.0) - mf).sqrt() / std::f64::consts::SQRT_2,
        ),
    })
}

#[cfg(test)]
mod tests;
