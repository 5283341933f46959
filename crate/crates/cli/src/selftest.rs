//! Consistency checks between the closed-form laws and independent
//! computations, runnable from the command line.

use paramres::spectra::{
    build_distribution, energy_stddev, overlap_matrix, prob, GammaValue, LinearPhase, Regime, WaveParams,
};
use rayon::prelude::*;

use crate::error::{CliError, Result};

pub const DISPLACED_GAMMAS: [f64; 4] = [0.1, 1.0, 5.0, 30.0];
pub const SQUEEZED_GAMMAS: [f64; 4] = [1.01, 2.0, 5.0, 30.0];

/// Oracle packet settings that carry a given Γ. Displaced packets sit at
/// phase angle `0.7` on a basis of frequency `1.3`. Squeezed packets
/// alternate between a static over-wide width and a unit width with a
/// velocity, so both the amplitude and the chirp of the packet are
/// exercised.
pub fn oracle_settings(regime: Regime, gamma: f64, variant: usize) -> WaveParams {
    match regime {
        Regime::Displaced => WaveParams::displaced(gamma, 1.3, 0.7),
        Regime::Squeezed => {
            let s = (gamma - 1.0).max(0.0).sqrt();
            if variant % 2 == 0 {
                WaveParams {
                    rho: gamma.sqrt() + s,
                    ..WaveParams::ground(1.0)
                }
            } else {
                WaveParams {
                    rho_dot: 2.0 * s,
                    ..WaveParams::ground(1.0)
                }
            }
        }
    }
}

/// Largest `|P_law − P_oracle|` over `m, n ≤ max_index` at one Γ.
pub fn oracle_deviation(regime: Regime, gamma: f64, variant: usize, max_index: usize, phase: LinearPhase) -> Result<f64> {
    let wf = oracle_settings(regime, gamma, variant);
    let oracle = overlap_matrix(max_index, max_index, &wf, phase).map_err(|e| CliError::numerical("overlap oracle", e))?;
    let g = match regime {
        Regime::Displaced => GammaValue::displaced(wf.displaced_gamma(), 1.0),
        Regime::Squeezed => GammaValue::squeezed(wf.squeezed_gamma(), 1.0),
    }
    .map_err(|e| CliError::numerical("oracle Γ", e))?;
    let mut worst = 0.0f64;
    for (m, row) in oracle.iter().enumerate() {
        for (n, &o) in row.iter().enumerate() {
            let p = prob(m, n, &g).map_err(|e| CliError::numerical(format!("P_{m}({n})"), e))?;
            worst = worst.max((p - o).abs());
        }
    }
    Ok(worst)
}

/// Largest `|1 − Σ P|` over `m ≤ m_max` at one Γ.
pub fn normalization_deviation(regime: Regime, gamma: f64, m_max: usize) -> Result<f64> {
    (0..=m_max)
        .map(|m| {
            let g = match regime {
                Regime::Displaced => GammaValue::displaced(gamma, 1.0),
                Regime::Squeezed => GammaValue::squeezed(gamma, 1.0),
            }
            .and_then(|g| build_distribution(m, &g, 1e-12))
            .map_err(|e| CliError::numerical(format!("normalization m = {m}, Γ = {gamma}"), e))?;
            Ok((1.0 - g.probs.iter().sum::<f64>()).abs())
        })
        .try_fold(0.0f64, |acc, d: Result<f64>| Ok(acc.max(d?)))
}

/// Relative deviation of the displaced spread from `√((2m+1)Γ)`.
pub fn variance_identity_deviation(m: usize, gamma: f64) -> Result<f64> {
    let g = GammaValue::displaced(gamma, 1.0).map_err(|e| CliError::numerical("variance identity", e))?;
    let d = build_distribution(m, &g, 1e-12).map_err(|e| CliError::numerical("variance identity", e))?;
    let want = ((2 * m + 1) as f64 * gamma).sqrt();
    Ok((energy_stddev(&d) / want - 1.0).abs())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub limit: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.value <= self.limit
    }

    pub fn line(&self) -> String {
        format!(
            "{} {} (worst {:.3e}, limit {:.1e})",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.value,
            self.limit
        )
    }
}

/// Oracle equivalence on both Γ grids, normalization and the displaced
/// variance identity, at oracle indices up to `max_index`.
pub fn run_selftest(max_index: usize, phase: LinearPhase) -> Result<Vec<Check>> {
    let mut jobs: Vec<(Regime, f64, usize)> = Vec::new();
    for (i, &g) in DISPLACED_GAMMAS.iter().enumerate() {
        jobs.push((Regime::Displaced, g, i));
    }
    for (i, &g) in SQUEEZED_GAMMAS.iter().enumerate() {
        jobs.push((Regime::Squeezed, g, i));
    }
    let oracle = jobs
        .par_iter()
        .map(|&(r, g, v)| {
            Ok(Check {
                name: format!("oracle {r} Γ = {g}, m, n ≤ {max_index}, {} phase", phase.as_str()),
                value: oracle_deviation(r, g, v, max_index, phase)?,
                limit: 1e-9,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut checks = oracle;
    for &(r, g, _) in &jobs {
        checks.push(Check {
            name: format!("normalization {r} Γ = {g}, m ≤ 10"),
            value: normalization_deviation(r, g, 10)?,
            limit: 1e-10,
        });
    }
    for m in 0..=5 {
        let worst = [0.1, 1.0, 10.0, 100.0]
            .iter()
            .map(|&g| variance_identity_deviation(m, g))
            .try_fold(0.0f64, |acc, d: Result<f64>| Ok::<_, CliError>(acc.max(d?)))?;
        checks.push(Check {
            name: format!("displaced variance identity m = {m}"),
            value: worst,
            limit: 1e-8,
        });
    }
    Ok(checks)
}
