use approx::assert_relative_eq;
use proptest::prelude::*;

use super::*;
use crate::model::TimePoint;

fn disp(g: f64) -> GammaValue {
    GammaValue::displaced(g, 1.0).unwrap()
}

fn sq(g: f64) -> GammaValue {
    GammaValue::squeezed(g, 1.0).unwrap()
}

#[test]
fn gamma_displaced_examples() {
    let tp = TimePoint::new(0.0, 1.0, 1.0);
    assert_eq!(gamma_displaced(OscState::new(0.0, 0.0), &tp, 1.0).unwrap().gamma, 0.0);
    assert_relative_eq!(gamma_displaced(OscState::new(1.0, 0.0), &tp, 1.0).unwrap().gamma, 0.5);
    let tp = TimePoint::new(0.0, 0.25, 2.0);
    let g = gamma_displaced(OscState::new(0.0, 1.0), &tp, 2.0).unwrap();
    assert_relative_eq!(g.gamma, 1.0, max_relative = 1e-15);
    assert_eq!(g.regime, Regime::Displaced);
    assert_relative_eq!(g.e_cl, 0.5);
    assert_relative_eq!(g.beta_omega_tilde, 0.5);
}

#[test]
fn gamma_squeezed_examples() {
    let w = 2.3;
    let tp = TimePoint::new(0.0, 1.0, w);
    let g = gamma_squeezed(OscState::new(w.powf(-0.5), 0.0), &tp).unwrap();
    assert_relative_eq!(g.gamma, 1.0, max_relative = 1e-15);

    let tp = TimePoint::new(0.0, 1.0, 1.0);
    assert_relative_eq!(gamma_squeezed(OscState::new(2.0, 0.0), &tp).unwrap().gamma, 1.5625);
    assert!(matches!(
        gamma_squeezed(OscState::new(0.0, 1.0), &tp),
        Err(Error::Domain(_))
    ));
}

#[test]
fn gamma_squeezed_rescaled_time_form() {
    // true-time derivative ρ' corresponds to a rescaled-time rate ρ'/β
    let (beta, wt) = (0.4, 1.3);
    let tp = TimePoint::new(0.0, beta, wt);
    let (rho, rho_p) = (1.7, -0.6);
    let w = wt / beta;
    let rd = rho_p / beta;
    let want = (rd * rd + w * w * rho * rho) / (4.0 * w) + 0.5 + 1.0 / (4.0 * w * rho * rho);
    assert_relative_eq!(gamma_squeezed(OscState::new(rho, rho_p), &tp).unwrap().gamma, want, max_relative = 1e-14);
}

#[test]
fn gamma_squeezed_energy_ratio_approaches_one_monotonically() {
    let tp = TimePoint::new(0.0, 0.7, 1.1);
    let mut prev = 0.0;
    for rho in [1.0, 10.0, 1e2, 1e3, 1e4] {
        let g = gamma_squeezed(OscState::new(rho, 0.3 * rho), &tp).unwrap();
        let ratio = g.e_cl / (2.0 * g.beta_omega_tilde * g.gamma);
        assert!(ratio > prev && ratio < 1.0);
        prev = ratio;
    }
    assert!(1.0 - prev < 1e-6);
}

#[test]
fn displaced_examples() {
    assert_eq!(prob_displaced(3, 3, &disp(0.0)).unwrap(), 1.0);
    assert_eq!(prob_displaced(3, 4, &disp(0.0)).unwrap(), 0.0);
    assert_relative_eq!(prob_displaced(0, 2, &disp(1.0)).unwrap(), 0.183_939_720_585_721_2, max_relative = 1e-14);
    assert_relative_eq!(prob_displaced(1, 1, &disp(2.0)).unwrap(), (-2.0f64).exp(), max_relative = 1e-14);
    assert!(matches!(prob_displaced(0, 0, &sq(2.0)), Err(Error::Usage(_))));
}

#[test]
fn squeezed_examples() {
    assert_eq!(prob_squeezed(0, 0, &sq(1.0)).unwrap(), 1.0);
    assert_relative_eq!(prob_squeezed(0, 0, &sq(4.0)).unwrap(), 0.5, max_relative = 1e-15);
    assert_eq!(prob_squeezed(0, 1, &sq(4.0)).unwrap(), 0.0);
    assert_relative_eq!(prob_squeezed(0, 2, &sq(4.0)).unwrap(), 0.1875, max_relative = 1e-14);
    assert!(matches!(prob_squeezed(0, 0, &disp(2.0)), Err(Error::Usage(_))));
    let below = GammaValue {
        gamma: 0.9,
        ..sq(1.0)
    };
    assert!(matches!(prob_squeezed(0, 0, &below), Err(Error::Domain(_))));
}

#[test]
fn squeezed_at_unit_gamma_is_identity() {
    for m in 0..12 {
        for n in 0..12 {
            let want = if m == n { 1.0 } else { 0.0 };
            assert_relative_eq!(prob_squeezed(m, n, &sq(1.0)).unwrap(), want, epsilon = 1e-14);
        }
    }
}

#[test]
fn squeezed_vacuum_column_matches_closed_form() {
    // P_0(2n) = Γ^{-1/2} B(n) t^n
    let g = 7.5f64;
    let t = 1.0 - 1.0 / g;
    for n in 0..40u64 {
        let want = g.powf(-0.5) * special::ln_central_binomial(n).exp() * t.powi(n as i32);
        assert_relative_eq!(prob_squeezed(0, 2 * n as usize, &sq(g)).unwrap(), want, max_relative = 1e-12);
    }
}

#[test]
fn laws_match_oracle_on_small_grid() {
    for &g in &[0.1, 1.0, 5.0] {
        let wf = WaveParams::displaced(g, 1.3, 0.7);
        let oracle = overlap_matrix(8, 8, &wf, LinearPhase::Unsquared).unwrap();
        for (m, row) in oracle.iter().enumerate() {
            for (n, &o) in row.iter().enumerate() {
                let p = prob_displaced(m, n, &disp(wf.displaced_gamma())).unwrap();
                assert!((p - o).abs() < 1e-9, "displaced Γ={g} m={m} n={n}: {p} vs {o}");
            }
        }
    }
    for &g in &[1.01, 2.0, 5.0] {
        let wf = WaveParams {
            rho_dot: 2.0 * (g - 1.0f64).sqrt(),
            ..WaveParams::ground(1.0)
        };
        let oracle = overlap_matrix(8, 8, &wf, LinearPhase::Unsquared).unwrap();
        for (m, row) in oracle.iter().enumerate() {
            for (n, &o) in row.iter().enumerate() {
                let p = prob_squeezed(m, n, &sq(wf.squeezed_gamma())).unwrap();
                assert!((p - o).abs() < 1e-9, "squeezed Γ={g} m={m} n={n}: {p} vs {o}");
            }
        }
    }
}

#[test]
fn squared_linear_phase_breaks_the_displaced_law() {
    let wf = WaveParams::displaced(2.0, 1.0, 1.2);
    let unsq = overlap_oracle_with(0, 1, &wf, LinearPhase::Unsquared).unwrap();
    let sqd = overlap_oracle_with(0, 1, &wf, LinearPhase::Squared).unwrap();
    let law = prob_displaced(0, 1, &disp(2.0)).unwrap();
    assert!((unsq - law).abs() < 1e-10);
    assert!((sqd - law).abs() > 1e-3);
}

#[test]
fn distribution_examples() {
    let d = build_distribution(0, &disp(3.0), 1e-12).unwrap();
    assert!(d.tail_mass <= 1e-12);
    for (n, p) in d.probs.iter().enumerate() {
        let want = special::ln_poisson(n as u64, 3.0).exp();
        assert_relative_eq!(*p, want, max_relative = 1e-13, epsilon = 1e-300);
    }

    let d = build_distribution(0, &sq(1.0), 1e-12).unwrap();
    assert_eq!(d.probs[0], 1.0);
    assert!(d.probs[1..].iter().all(|&p| p == 0.0));

    let d = build_distribution(4, &sq(50.0), 1e-12).unwrap();
    assert!(d.tail_mass.abs() <= 1e-12);
    assert!(d.probs.iter().skip(1).step_by(2).all(|&p| p == 0.0));
    assert_eq!(d.n_max, d.probs.len() - 1);
    assert_relative_eq!(*d.cumulative().last().unwrap(), 1.0 - d.tail_mass, max_relative = 1e-15);
}

#[test]
fn distribution_rejects_bad_tolerance() {
    assert!(matches!(build_distribution(0, &disp(1.0), 0.0), Err(Error::Domain(_))));
    assert!(matches!(build_distribution(0, &disp(1.0), 1e-3), Err(Error::Domain(_))));
}

#[test]
fn displaced_mean_energy_is_poisson_mean() {
    let g = GammaValue::displaced(4.2, 0.3).unwrap();
    let d = build_distribution(0, &g, 1e-12).unwrap();
    assert_relative_eq!(mean_energy(&d), 0.3 * (4.2 + 0.5), max_relative = 1e-12);
    let (_, bar) = mean_energy_with_error(&d);
    assert!(bar < 1e-9);
}

#[test]
fn displaced_number_moments() {
    for m in 0..=5usize {
        for &g in &[0.1, 1.0, 10.0, 100.0] {
            let d = build_distribution(m, &disp(g), 1e-12).unwrap();
            assert_relative_eq!(d.mean_number(), g + m as f64, max_relative = 1e-10);
            let sd = energy_stddev(&d);
            assert_relative_eq!(sd, ((2 * m + 1) as f64 * g).sqrt(), max_relative = 1e-8);
        }
    }
}

#[test]
fn squeezed_low_moments_are_exact() {
    // ⟨n⟩ = (2m+1)(Γ−1) + m for the two lowest states
    for &g in &[1.01, 3.0, 40.0] {
        let d0 = build_distribution(0, &sq(g), 1e-12).unwrap();
        assert_relative_eq!(d0.mean_number(), g - 1.0, max_relative = 1e-9, epsilon = 1e-12);
        assert_relative_eq!(d0.number_variance(), 2.0 * g * (g - 1.0), max_relative = 1e-9, epsilon = 1e-12);
        let d1 = build_distribution(1, &sq(g), 1e-12).unwrap();
        assert_relative_eq!(d1.mean_number(), 3.0 * (g - 1.0) + 1.0, max_relative = 1e-9);
    }
}

#[test]
fn asymptotic_examples() {
    for m in 0..4 {
        let (mean, sd) = asymptotic_moments(m, Regime::Displaced, 100.0, 0.01).unwrap();
        assert_eq!(mean, 100.0);
        assert_relative_eq!(sd, ((2 * m + 1) as f64).sqrt(), max_relative = 1e-15);
    }
    let (mean, sd) = asymptotic_moments(0, Regime::Squeezed, 10.0, 1.0).unwrap();
    assert_eq!(mean, 5.0);
    assert_relative_eq!(sd, 7.071_067_811_865_475, max_relative = 1e-15);
    let (mean, sd) = asymptotic_moments(2, Regime::Squeezed, 1.0, 1.0).unwrap();
    assert_eq!(mean, 2.5);
    assert_relative_eq!(sd, 1.870_828_693_386_970_7, max_relative = 1e-15);
    assert!(asymptotic_moments(0, Regime::Squeezed, 0.0, 1.0).is_err());
}

#[test]
fn squeezed_spread_approaches_asymptote() {
    for (m, want) in [(0usize, 0.5f64.sqrt()), (1, 1.5f64.sqrt())] {
        let g = GammaValue::squeezed_from_energy(1e4, 1.0).unwrap();
        let d = build_distribution(m, &g, 1e-12).unwrap();
        assert_relative_eq!(energy_stddev(&d) / g.e_cl, want, max_relative = 1e-3);
    }
}

#[test]
fn regime_round_trips_through_strings() {
    for r in [Regime::Displaced, Regime::Squeezed] {
        assert_eq!(r.as_str().parse::<Regime>().unwrap(), r);
    }
    assert!("thermal".parse::<Regime>().is_err());
    assert_eq!("squared".parse::<LinearPhase>().unwrap(), LinearPhase::Squared);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn squeezed_gamma_at_least_one(rho in 1e-3f64..1e3, rho_p in -1e2f64..1e2, beta in 1e-3f64..1.0, wt in 1e-2f64..1e2) {
        let tp = TimePoint::new(0.0, beta, wt);
        let g = gamma_squeezed(OscState::new(rho, rho_p), &tp).unwrap();
        prop_assert!(g.gamma >= 1.0);
    }

    #[test]
    fn displaced_symmetry_is_exact(m in 0usize..40, n in 0usize..40, g in 0.0f64..100.0) {
        prop_assert_eq!(prob_displaced(m, n, &disp(g)).unwrap(), prob_displaced(n, m, &disp(g)).unwrap());
    }

    #[test]
    fn squeezed_parity(m in 0usize..30, n in 0usize..30, g in 1.0f64..100.0) {
        let p = prob_squeezed(m, n, &sq(g)).unwrap();
        if (m + n) % 2 == 1 {
            prop_assert_eq!(p, 0.0);
        }
        prop_assert!((0.0..=1.0).contains(&p));
    }

    #[test]
    fn displaced_normalization(m in 0usize..=10, g in 0.0f64..100.0) {
        let d = build_distribution(m, &disp(g), 1e-12).unwrap();
        let total: f64 = d.probs.iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-10, "total {}", total);
    }

    #[test]
    fn squeezed_normalization(m in 0usize..=10, g in 1.0f64..100.0) {
        let d = build_distribution(m, &sq(g), 1e-12).unwrap();
        let total: f64 = d.probs.iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-10, "total {}", total);
        prop_assert!(d.probs.iter().enumerate().all(|(n, &p)| (n + m) % 2 == 0 || p == 0.0));
    }
}
