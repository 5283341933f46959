use approx::assert_relative_eq;
use proptest::prelude::*;
use std::f64::consts::PI;

use super::*;
use crate::model::{beta_at, frequencies_at, DriveProfile, Segment};
use crate::reference::{ermakov_direct, Dopri5};

fn in_band() -> DriveProfile {
    DriveProfile::square_wave(1.0, PI, 0.3, 0.0, 60).unwrap()
}

/// Per-period maxima of |x|, sampled on a grid that is periodic in τ.
fn period_maxima(tr: &Trajectory, per_period: usize) -> Vec<f64> {
    tr.samples
        .chunks(per_period)
        .map(|c| c.iter().map(|(_, s)| s.value.abs()).fold(0.0, f64::max))
        .collect()
}

fn log_slope(ys: &[f64], dx: f64) -> f64 {
    let n = ys.len() as f64;
    let xs: Vec<f64> = (0..ys.len()).map(|k| k as f64 * dx).collect();
    let ls: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / n, ls.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ls).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[test]
fn monodromy_of_free_oscillator() {
    let p = DriveProfile::constant(1.0, 2.3, 0.0, 0.0, 1).unwrap();
    let m = monodromy(&p);
    for mu in m.multipliers {
        assert_relative_eq!(mu.norm(), 1.0, max_relative = 1e-14);
    }
    assert!(m.growth_exponent.abs() < 1e-14);
    assert!(!m.is_unstable());
}

#[test]
fn monodromy_of_pure_damping() {
    let g = 0.13;
    let p = DriveProfile::constant(1.0, 2.3, 0.0, g, 1).unwrap();
    let m = monodromy(&p);
    for mu in m.multipliers {
        assert_relative_eq!(mu.norm(), (-g * 2.3 / 2.0).exp(), max_relative = 1e-13);
    }
    assert_relative_eq!(m.growth_exponent, -g / 2.0, max_relative = 1e-12);
}

#[test]
fn monodromy_determinant_is_period_contraction() {
    let p = DriveProfile::new(
        1.0,
        3.0,
        vec![Segment::new(1.0, 0.4, 0.3), Segment::new(0.5, -0.2, 2.5), Segment::new(1.5, 0.1, 0.0)],
        1,
    )
    .unwrap();
    let m = monodromy(&p);
    assert_relative_eq!(m.matrix.det(), beta_at(&p, 3.0).unwrap(), max_relative = 1e-9);
}

#[test]
fn principal_band_near_pi() {
    let template = DriveProfile::square_wave(1.0, PI, 0.3, 0.0, 1).unwrap();
    let inside = monodromy(&template);
    assert!(inside.max_modulus() > 1.0 && inside.is_unstable());
    // well below the first band the multipliers stay on the unit circle
    let outside = monodromy(&template.with_omega0_tau(1.5).unwrap());
    assert_relative_eq!(outside.max_modulus(), 1.0, max_relative = 1e-13);
}

#[test]
fn band_scan_undamped_then_damped() {
    let template = DriveProfile::square_wave(1.0, PI, 0.3, 0.0, 1).unwrap();
    let free = scan_bands(&template, (0.5, 20.0), 2000).unwrap();
    assert!(free.band_count() >= 3, "bands: {}", free.band_count());
    assert!(free.points.iter().filter(|p| p.in_band).all(|p| p.growth_exponent > 0.0));
    assert_eq!(free.edges.len() % 2, 0);

    let damped = scan_bands(&template.with_uniform_gamma(0.05).unwrap(), (0.5, 20.0), 2000).unwrap();
    assert!(damped.band_count() < free.band_count());
    for (a, b) in free.points.iter().zip(&damped.points) {
        assert!(b.growth_exponent <= a.growth_exponent + 1e-15);
    }
    // nothing above the last detected edge
    let last_edge = *damped.edges.last().unwrap();
    assert!(damped.points.iter().filter(|p| p.omega0_tau > last_edge + 1e-6).all(|p| !p.in_band));
}

#[test]
fn band_scan_without_modulation_is_empty() {
    let template = DriveProfile::constant(1.0, 1.0, 0.0, 0.0, 1).unwrap();
    let scan = scan_bands(&template, (0.5, 20.0), 400).unwrap();
    assert_eq!(scan.band_count(), 0);
    assert!(scan.edges.is_empty());
    assert!(scan_bands(&template, (0.5, 20.0), 1).is_err());
}

#[test]
fn linear_envelope_grows_at_floquet_rate() {
    let p = in_band();
    let per = 64;
    let tr = propagate_linear(&p, OscState::new(1e-6, 0.0), &sample_grid(&p, per)).unwrap();
    let maxima = period_maxima(&tr, per);
    let slope = log_slope(&maxima[10..], p.tau());
    let omega = monodromy(&p).growth_exponent;
    assert_relative_eq!(slope, omega, max_relative = 0.01);
}

#[test]
fn composition_of_propagations() {
    let p = DriveProfile::new(
        1.2,
        2.0,
        vec![Segment::new(0.7, 0.25, 0.1), Segment::new(1.3, -0.3, 0.02)],
        10,
    )
    .unwrap();
    let init = OscState::new(0.3, -1.1);
    let whole = propagate_linear(&p, init, &[13.7]).unwrap().samples[0].1;
    let first = propagate_linear(&p, init, &[5.05]).unwrap().samples[0].1;
    let second = propagate_linear_from(&p, 5.05, first, &[13.7]).unwrap().samples[0].1;
    assert!((whole.value - second.value).abs() < 1e-12);
    assert!((whole.derivative - second.derivative).abs() < 1e-12);
}

#[test]
fn ermakov_equilibrium_is_static() {
    let p = DriveProfile::constant(1.0, 1.0, 0.0, 0.0, 30).unwrap();
    let tr = propagate_ermakov(&p, OscState::new(1.0, 0.0), &sample_grid(&p, 7)).unwrap();
    for (_, s) in &tr.samples {
        assert!((s.value - 1.0).abs() < 1e-13 && s.derivative.abs() < 1e-13);
    }
}

#[test]
fn ermakov_free_oscillation_matches_direct_integration() {
    // ρ² = 4cos²t + ¼sin²t: bounds 1/2 and 2, period π
    let p = DriveProfile::constant(1.0, PI, 0.0, 0.0, 10).unwrap();
    let times = sample_grid(&p, 40);
    let tr = propagate_ermakov(&p, OscState::new(2.0, 0.0), &times).unwrap();
    let direct = ermakov_direct(&p, OscState::new(2.0, 0.0), &times, &Dopri5::new(1e-13, 1e-15)).unwrap();
    for ((_, a), b) in tr.samples.iter().zip(&direct) {
        assert_relative_eq!(a.value, b.value, max_relative = 1e-8);
    }
    let max = tr.values().fold(0.0, f64::max);
    let min = tr.values().fold(f64::INFINITY, f64::min);
    assert_relative_eq!(max * min, 1.0, max_relative = 1e-8);
    // periodic with period π
    let first = tr.samples[39].1.value;
    let tenth = tr.samples[399].1.value;
    assert_relative_eq!(first, tenth, max_relative = 1e-10);
}

#[test]
fn ermakov_rejects_nonpositive_width() {
    let p = DriveProfile::constant(1.0, 1.0, 0.0, 0.0, 1).unwrap();
    assert!(propagate_ermakov(&p, OscState::new(0.0, 0.0), &[0.5]).is_err());
    assert!(propagate_ermakov(&p, OscState::new(-1.0, 0.0), &[0.5]).is_err());
}

#[test]
fn ermakov_width_grows_at_floquet_rate() {
    let p = in_band();
    let per = 64;
    let rho0 = 1.0 / (frequencies_at(&p, 0.0).unwrap().omega_tilde.sqrt()) + 1e-6;
    let tr = propagate_ermakov(&p, OscState::new(rho0, 0.0), &sample_grid(&p, per)).unwrap();
    let maxima = period_maxima(&tr, per);
    let slope = log_slope(&maxima[20..], p.tau());
    assert_relative_eq!(slope, monodromy(&p).growth_exponent, max_relative = 0.01);
}

#[test]
fn energy_examples() {
    let tp = TimePoint::new(0.0, 1.0, 2.0);
    assert_eq!(classical_energy(OscState::new(0.0, 0.0), &tp), 0.0);
    assert_eq!(classical_energy(OscState::new(1.0, 0.0), &tp), 2.0);
    let tp1 = TimePoint::new(0.0, 1.0, 1.0);
    assert_relative_eq!(classical_energy(OscState::new(0.3, 0.4), &tp1), 0.125, max_relative = 1e-15);
    assert_eq!(hamiltonian_energy(OscState::new(0.3, 0.4), &tp1), classical_energy(OscState::new(0.3, 0.4), &tp1));
    let half = TimePoint::new(0.0, 0.5, 1.0);
    assert_relative_eq!(hamiltonian_energy(OscState::new(1.0, 0.0), &half), 0.5, max_relative = 1e-15);
}

#[test]
fn invariant_examples() {
    let tp = TimePoint::new(0.0, 1.0, 1.0);
    assert_eq!(lr_invariant(OscState::new(0.0, 0.0), OscState::new(1.3, 0.2), &tp).unwrap(), 0.0);
    assert!(lr_invariant(OscState::new(1.0, 0.0), OscState::new(0.0, 0.0), &tp).is_err());
    for t in [0.0, 0.4, 1.7, 5.0] {
        let q = OscState::new(f64::cos(t), -f64::sin(t));
        let i = lr_invariant(q, OscState::new(1.0, 0.0), &TimePoint::new(t, 1.0, 1.0)).unwrap();
        assert_relative_eq!(i, 0.5, max_relative = 1e-15);
    }
}

fn invariant_drift(p: &DriveProfile, q0: OscState, rho0: OscState) -> f64 {
    let times = sample_grid(p, 16);
    let q = propagate_linear(p, q0, &times).unwrap();
    let rho = propagate_ermakov(p, rho0, &times).unwrap();
    let i0 = lr_invariant(q0, rho0, &frequencies_at(p, 0.0).unwrap()).unwrap();
    q.samples
        .iter()
        .zip(&rho.samples)
        .map(|((tp, qs), (_, rs))| ((lr_invariant(*qs, *rs, tp).unwrap() - i0) / i0).abs())
        .fold(0.0, f64::max)
}

#[test]
fn invariant_conserved_out_of_band_with_damping() {
    let p = DriveProfile::new(
        1.0,
        1.5,
        vec![Segment::new(0.75, 0.3, 0.02), Segment::new(0.75, -0.3, 0.0)],
        100,
    )
    .unwrap();
    assert!(!monodromy(&p.with_uniform_gamma(0.0).unwrap()).is_unstable());
    let drift = invariant_drift(&p, OscState::new(0.7, -0.4), OscState::new(1.2, 0.3));
    assert!(drift < 1e-9, "drift {drift:e}");
}

#[test]
fn invariant_conserved_in_band() {
    // a shallow drive keeps the growth over 100 periods modest, so the
    // cancellation inside the invariant stays far below the tolerance
    let p = DriveProfile::square_wave(1.0, PI, 0.05, 0.002, 100).unwrap();
    let m = monodromy(&p);
    assert!(m.is_unstable());
    let drift = invariant_drift(&p, OscState::new(0.7, -0.4), OscState::new(1.2, 0.3));
    assert!(drift < 1e-9, "drift {drift:e}");
}

proptest! {
    #[test]
    fn hamilton_form_equals_classical_energy(
        q in -10.0f64..10.0, dq in -10.0f64..10.0, beta in 1e-3f64..1.0, w in 0.1f64..5.0
    ) {
        let tp = TimePoint::new(0.0, beta, w);
        let s = OscState::new(q, dq);
        let (h, e) = (hamiltonian_energy(s, &tp), classical_energy(s, &tp));
        prop_assert!((h - e).abs() <= 1e-12 * e.max(1e-300));
    }

    #[test]
    fn ermakov_bounds_coordinate(
        q0 in -2.0f64..2.0, dq0 in -2.0f64..2.0, r0 in 0.3f64..3.0, dr0 in -1.0f64..1.0,
    ) {
        let p = DriveProfile::new(
            1.0, PI,
            vec![Segment::new(PI / 2.0, 0.3, 0.01), Segment::new(PI / 2.0, -0.3, 0.0)],
            20,
        ).unwrap();
        let times = sample_grid(&p, 8);
        let q = propagate_linear(&p, OscState::new(q0, dq0), &times).unwrap();
        let rho = propagate_ermakov(&p, OscState::new(r0, dr0), &times).unwrap();
        let i = lr_invariant(OscState::new(q0, dq0), OscState::new(r0, dr0), &frequencies_at(&p, 0.0).unwrap()).unwrap();
        prop_assume!(i > 1e-6);
        for ((_, qs), (_, rs)) in q.samples.iter().zip(&rho.samples) {
            prop_assert!(rs.value >= qs.value.abs() / (2.0 * i).sqrt() * (1.0 - 1e-9));
        }
    }

    #[test]
    fn propagator_determinant(w2 in 0.1f64..10.0, g in 0.0f64..3.0, dt in 0.0f64..2.0) {
        let m = segment_propagator(w2, g, dt);
        prop_assert!((m.det() / (-g * dt).exp() - 1.0).abs() < 1e-12);
    }
}

use crate::model::TimePoint;
