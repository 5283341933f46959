use super::OscState;
use crate::error::{Error, Result};
use crate::model::TimePoint;

/// `E = (x'² + ω̃²x²)/2`.
pub fn classical_energy(state: OscState, tp: &TimePoint) -> f64 {
    0.5 * (state.derivative * state.derivative + tp.omega_tilde * tp.omega_tilde * state.value * state.value)
}

/// Energy in Hamilton form, `β²(p² + ω²q²)/2` with `p = q'/β` and `ω = ω̃/β`.
///
/// Algebraically identical to [`classical_energy`].
pub fn hamiltonian_energy(state: OscState, tp: &TimePoint) -> f64 {
    let p = state.momentum(tp.beta);
    let b2 = tp.beta * tp.beta;
    0.5 * b2 * (p * p + tp.omega * tp.omega * state.value * state.value)
}

/// Lewis–Riesenfeld invariant `½[(q/ρ)² + (pρ − ρ'q/β)²]`.
pub fn lr_invariant(q_state: OscState, rho_state: OscState, tp: &TimePoint) -> Result<f64> {
    let rho = rho_state.value;
    if !(rho > 0.0) {
        return Err(Error::Domain(format!("rho must be > 0, got {rho}")));
    }
    let q = q_state.value;
    let p = q_state.momentum(tp.beta);
    let a = q / rho;
    let b = p * rho - rho_state.derivative * q / tp.beta;
    Ok(0.5 * (a * a + b * b))
}
