use num_complex::Complex64;
use rayon::prelude::*;

use super::propagator::{propagator_for, Mat2};
use crate::error::{Error, Result};
use crate::model::DriveProfile;

/// A point counts as in-band when `ln max|μ| > IN_BAND_TOL`. Off-band,
/// undamped profiles give `|μ| = 1` up to rounding.
pub const IN_BAND_TOL: f64 = 1e-9;

const EDGE_BISECTIONS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonodromyResult {
    /// One-period map of `(q, q')`.
    pub matrix: Mat2,
    pub multipliers: [Complex64; 2],
    /// `ln(max|μ|)/τ`, the amplitude growth rate per unit time.
    pub growth_exponent: f64,
}

impl MonodromyResult {
    pub fn max_modulus(&self) -> f64 {
        self.multipliers[0].norm().max(self.multipliers[1].norm())
    }

    pub fn is_unstable(&self) -> bool {
        self.max_modulus().ln() > IN_BAND_TOL
    }
}

pub fn monodromy(profile: &DriveProfile) -> MonodromyResult {
    let matrix = profile
        .segments()
        .iter()
        .fold(Mat2::IDENTITY, |acc, seg| propagator_for(profile, seg, seg.duration) * acc);
    let (tr, det) = (matrix.trace(), matrix.det());
    let half = 0.5 * tr;
    let disc = half * half - det;
    let (multipliers, max_modulus) = if disc >= 0.0 {
        let root = disc.sqrt();
        // larger root first, smaller from the product to avoid cancellation
        let r1 = if half >= 0.0 { half + root } else { half - root };
        let r2 = if r1 != 0.0 { det / r1 } else { half - root };
        (
            [Complex64::new(r1, 0.0), Complex64::new(r2, 0.0)],
            r1.abs().max(r2.abs()),
        )
    } else {
        let im = (-disc).sqrt();
        // complex pair: both moduli equal √det
        (
            [Complex64::new(half, im), Complex64::new(half, -im)],
            det.sqrt(),
        )
    };
    MonodromyResult {
        matrix,
        multipliers,
        growth_exponent: max_modulus.ln() / profile.tau(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandPoint {
    pub omega0_tau: f64,
    pub growth_exponent: f64,
    pub in_band: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandScan {
    pub points: Vec<BandPoint>,
    /// Refined `ω₀τ` values where band membership changes, ascending.
    pub edges: Vec<f64>,
}

impl BandScan {
    /// Number of maximal runs of in-band grid points.
    pub fn band_count(&self) -> usize {
        let mut count = 0;
        let mut prev = false;
        for p in &self.points {
            if p.in_band && !prev {
                count += 1;
            }
            prev = p.in_band;
        }
        count
    }

    pub fn in_band_points(&self) -> usize {
        self.points.iter().filter(|p| p.in_band).count()
    }
}

/// Evaluates the monodromy of `template` rescaled to each `ω₀τ` on a uniform
/// grid over `range`. `ω₀` and the rates stay fixed; the period and the
/// segment durations stretch.
pub fn scan_bands(template: &DriveProfile, range: (f64, f64), n_points: usize) -> Result<BandScan> {
    let (lo, hi) = range;
    if n_points < 2 {
        return Err(Error::Domain(format!("n_points must be >= 2, got {n_points}")));
    }
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::Domain(format!("invalid omega0*tau range [{lo}, {hi}]")));
    }
    let step = (hi - lo) / (n_points - 1) as f64;
    let points = (0..n_points)
        .into_par_iter()
        .map(|k| {
            let x = if k + 1 == n_points { hi } else { lo + k as f64 * step };
            let m = monodromy(&template.with_omega0_tau(x)?);
            Ok(BandPoint {
                omega0_tau: x,
                growth_exponent: m.growth_exponent,
                in_band: m.is_unstable(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut edges = Vec::new();
    for w in points.windows(2) {
        if w[0].in_band != w[1].in_band {
            let (mut a, mut b) = (w[0].omega0_tau, w[1].omega0_tau);
            for _ in 0..EDGE_BISECTIONS {
                let mid = 0.5 * (a + b);
                if monodromy(&template.with_omega0_tau(mid)?).is_unstable() == w[0].in_band {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            edges.push(0.5 * (a + b));
        }
    }
    Ok(BandScan { points, edges })
}
