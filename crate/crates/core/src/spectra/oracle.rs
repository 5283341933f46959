//! Brute-force overlap integrals between stationary eigenstates and evolved
//! Gaussian-family wave packets.
//!
//! Nothing here shares code with the closed-form laws. The wave packet is
//! built from Hermite functions on the real line and multiplied by the full
//! complex phase, and the overlap is integrated by adaptive Gauss–Kronrod.
//! All quantities are in rescaled time, where the Hamiltonian has unit mass
//! and frequency `ω`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest eigenstate index the oracle accepts.
pub const ORACLE_MAX_INDEX: usize = 60;

const ABS_TOL: f64 = 1e-12;
const MAX_PANELS: usize = 200_000;

/// How the linear term of the phase enters the packet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LinearPhase {
    /// `exp[i(α̇ − (ρ̇/ρ)α) q]`, the form that reproduces the displaced law.
    #[default]
    Unsquared,
    /// `exp[i(α̇ − (ρ̇/ρ)α)² q]`, kept for comparison only.
    Squared,
}

impl LinearPhase {
    pub fn as_str(&self) -> &'static str {
        match self {
            LinearPhase::Unsquared => "unsquared",
            LinearPhase::Squared => "squared",
        }
    }
}

impl std::str::FromStr for LinearPhase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unsquared" => Ok(LinearPhase::Unsquared),
            "squared" => Ok(LinearPhase::Squared),
            other => Err(Error::Usage(format!(
                "unknown linear phase '{other}', expected 'unsquared' or 'squared'"
            ))),
        }
    }
}

/// Rescaled-time packet parameters: width `ρ` and its rate, centre `α` and
/// its rate, and the frequency `ω` of the reference eigenbasis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveParams {
    pub rho: f64,
    pub rho_dot: f64,
    pub alpha: f64,
    pub alpha_dot: f64,
    pub omega: f64,
}

impl WaveParams {
    /// The unperturbed eigenstate of frequency `omega`.
    pub fn ground(omega: f64) -> Self {
        WaveParams {
            rho: omega.powf(-0.5),
            rho_dot: 0.0,
            alpha: 0.0,
            alpha_dot: 0.0,
            omega,
        }
    }

    /// Width pinned at `ω^{−1/2}` and centre placed on the ellipse of
    /// displacement parameter `gamma`, at phase angle `theta`.
    pub fn displaced(gamma: f64, omega: f64, theta: f64) -> Self {
        WaveParams {
            alpha: (2.0 * gamma / omega).sqrt() * theta.cos(),
            alpha_dot: (2.0 * gamma * omega).sqrt() * theta.sin(),
            ..WaveParams::ground(omega)
        }
    }

    /// `(α̇²/ω + ωα²)/2`, the displacement parameter these settings carry
    /// when the width sits at `ω^{−1/2}`.
    pub fn displaced_gamma(&self) -> f64 {
        0.5 * (self.alpha_dot * self.alpha_dot / self.omega + self.omega * self.alpha * self.alpha)
    }

    /// `(ρ̇² + ω²ρ²)/(4ω) + ½ + 1/(4ωρ²)`, the squeezing parameter of a
    /// centred packet.
    pub fn squeezed_gamma(&self) -> f64 {
        let (r, w) = (self.rho, self.omega);
        (self.rho_dot * self.rho_dot + w * w * r * r) / (4.0 * w) + 0.5 + 1.0 / (4.0 * w * r * r)
    }

    fn validate(&self) -> Result<()> {
        let all_finite = [self.rho, self.rho_dot, self.alpha, self.alpha_dot, self.omega]
            .iter()
            .all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::Domain(format!("wave parameters must be finite: {self:?}")));
        }
        if !(self.rho > 0.0 && self.omega > 0.0) {
            return Err(Error::Domain(format!(
                "oracle needs rho > 0 and omega > 0, got rho = {}, omega = {}",
                self.rho, self.omega
            )));
        }
        Ok(())
    }
}

/// Normalized Hermite functions `ψ_0..ψ_{len−1}` at `x`, by the stable
/// three-term recurrence.
fn hermite_functions(x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = std::f64::consts::PI.powf(-0.25) * (-0.5 * x * x).exp();
    if out.len() > 1 {
        out[1] = std::f64::consts::SQRT_2 * x * out[0];
    }
    for k in 1..out.len() - 1 {
        let kf = k as f64;
        out[k + 1] = (2.0 / (kf + 1.0)).sqrt() * x * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
    }
}

/// `|⟨ψ_n(ω)|Ψ_m⟩|²` with the default linear phase.
pub fn overlap_oracle(m: usize, n: usize, wf: &WaveParams) -> Result<f64> {
    overlap_oracle_with(m, n, wf, LinearPhase::Unsquared)
}

pub fn overlap_oracle_with(m: usize, n: usize, wf: &WaveParams, phase: LinearPhase) -> Result<f64> {
    if m > ORACLE_MAX_INDEX || n > ORACLE_MAX_INDEX {
        return Err(Error::Domain(format!(
            "oracle indices must be <= {ORACLE_MAX_INDEX}, got m = {m}, n = {n}"
        )));
    }
    let amps = amplitudes(wf, m, n, phase, |mi, ni| mi == m && ni == n)?;
    Ok(amps[0].norm_sqr())
}

/// All `|⟨ψ_n|Ψ_m⟩|²` for `m ≤ m_max`, `n ≤ n_max`, indexed `[m][n]`, from
/// a single adaptive integration.
pub fn overlap_matrix(m_max: usize, n_max: usize, wf: &WaveParams, phase: LinearPhase) -> Result<Vec<Vec<f64>>> {
    if m_max > ORACLE_MAX_INDEX || n_max > ORACLE_MAX_INDEX {
        return Err(Error::Domain(format!(
            "oracle indices must be <= {ORACLE_MAX_INDEX}, got {m_max} x {n_max}"
        )));
    }
    let amps = amplitudes(wf, m_max, n_max, phase, |_, _| true)?;
    Ok(amps
        .chunks(n_max + 1)
        .map(|row| row.iter().map(|a| a.norm_sqr()).collect())
        .collect())
}

fn amplitudes(
    wf: &WaveParams,
    m_max: usize,
    n_max: usize,
    phase: LinearPhase,
    keep: impl Fn(usize, usize) -> bool,
) -> Result<Vec<Complex64>> {
    wf.validate()?;
    let pairs: Vec<(usize, usize)> = (0..=m_max)
        .flat_map(|mi| (0..=n_max).map(move |ni| (mi, ni)))
        .filter(|&(mi, ni)| keep(mi, ni))
        .collect();

    let sqrt_w = wf.omega.sqrt();
    let eigen_scale = wf.omega.powf(0.25);
    let packet_scale = wf.rho.powf(-0.5);
    let quad = wf.rho_dot / (2.0 * wf.rho);
    let lin = {
        let k = wf.alpha_dot - wf.rho_dot / wf.rho * wf.alpha;
        match phase {
            LinearPhase::Unsquared => k,
            LinearPhase::Squared => k * k,
        }
    };

    let integrand = |q: f64, out: &mut [Complex64]| {
        let mut eig = vec![0.0; n_max + 1];
        let mut pkt = vec![0.0; m_max + 1];
        hermite_functions(q * sqrt_w, &mut eig);
        hermite_functions((q - wf.alpha) / wf.rho, &mut pkt);
        let e = Complex64::from_polar(1.0, (quad * q + lin) * q);
        for (slot, &(mi, ni)) in out.iter_mut().zip(&pairs) {
            *slot = e * (eigen_scale * eig[ni] * packet_scale * pkt[mi]);
        }
    };

    let reach = 12.0 * wf.rho.max(1.0 / sqrt_w);
    let (a, b) = (wf.alpha.min(0.0) - reach, wf.alpha.max(0.0) + reach);
    let finest = 0.5 * wf.rho.min(1.0 / sqrt_w);
    let initial = (((b - a) / finest).ceil() as usize).clamp(64, 4096);
    adaptive_gk15(integrand, a, b, pairs.len(), initial, ABS_TOL)
}

// Kronrod 15-point nodes (non-negative half) and weights; every other node
// from index 1 is a 7-point Gauss node.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

struct Panel {
    kronrod: Vec<Complex64>,
    error: f64,
}

fn gk15<F: Fn(f64, &mut [Complex64])>(f: &F, a: f64, b: f64, dim: usize, buf: &mut [Complex64]) -> Panel {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut kronrod = vec![Complex64::new(0.0, 0.0); dim];
    let mut gauss = vec![Complex64::new(0.0, 0.0); dim];
    let mut add = |x: f64, wk: f64, wg: f64, buf: &mut [Complex64]| {
        f(x, buf);
        for i in 0..dim {
            kronrod[i] += buf[i] * wk;
            if wg != 0.0 {
                gauss[i] += buf[i] * wg;
            }
        }
    };
    for (k, (&x, &wk)) in XGK.iter().zip(&WGK).enumerate() {
        let wg = if k % 2 == 1 { WG[k / 2] } else { 0.0 };
        if x == 0.0 {
            add(c, wk, wg, buf);
        } else {
            add(c - h * x, wk, wg, buf);
            add(c + h * x, wk, wg, buf);
        }
    }
    let mut error = 0.0f64;
    for i in 0..dim {
        kronrod[i] *= h;
        error = error.max((kronrod[i] - gauss[i] * h).norm());
    }
    Panel { kronrod, error }
}

/// Integrates a vector of complex functions over `[a, b]`. A panel is
/// accepted when its Gauss–Kronrod discrepancy is below its length share of
/// `abs_tol`; otherwise it is bisected. Panels are processed depth first in
/// a fixed order, so the result is deterministic.
fn adaptive_gk15<F: Fn(f64, &mut [Complex64])>(
    f: F,
    a: f64,
    b: f64,
    dim: usize,
    initial_panels: usize,
    abs_tol: f64,
) -> Result<Vec<Complex64>> {
    let mut total = vec![Complex64::new(0.0, 0.0); dim];
    let mut buf = vec![Complex64::new(0.0, 0.0); dim];
    let width = (b - a) / initial_panels as f64;
    let mut stack: Vec<(f64, f64)> = (0..initial_panels)
        .rev()
        .map(|k| {
            let lo = a + k as f64 * width;
            let hi = if k + 1 == initial_panels { b } else { lo + width };
            (lo, hi)
        })
        .collect();
    let mut evaluated = 0usize;
    while let Some((lo, hi)) = stack.pop() {
        evaluated += 1;
        if evaluated > MAX_PANELS {
            return Err(Error::Oracle(format!(
                "quadrature exceeded {MAX_PANELS} panels on [{a}, {b}]"
            )));
        }
        let panel = gk15(&f, lo, hi, dim, &mut buf);
        let share = abs_tol * (hi - lo) / (b - a);
        let scale = panel.kronrod.iter().map(|v| v.norm()).fold(0.0, f64::max);
        // the second test accepts panels whose discrepancy is pure rounding
        if panel.error <= share || panel.error <= 64.0 * f64::EPSILON * scale {
            for (t, v) in total.iter_mut().zip(&panel.kronrod) {
                *t += v;
            }
        } else {
            let mid = 0.5 * (lo + hi);
            if !(mid > lo && mid < hi) {
                return Err(Error::Oracle(format!("quadrature panel collapsed near q = {lo}")));
            }
            stack.push((mid, hi));
            stack.push((lo, mid));
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_kronrod_weights_integrate_polynomials() {
        for k in 0..=22u32 {
            let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
            let mut sk = WGK[7] * 0f64.powi(k as i32);
            let mut sg = WG[3] * 0f64.powi(k as i32);
            for i in 0..7 {
                let x = XGK[i];
                let fx = x.powi(k as i32) + (-x).powi(k as i32);
                sk += WGK[i] * fx;
                if i % 2 == 1 {
                    sg += WG[i / 2] * fx;
                }
            }
            assert!((sk - exact).abs() < 1e-14, "kronrod degree {k}");
            if k <= 13 {
                assert!((sg - exact).abs() < 1e-14, "gauss degree {k}");
            }
        }
    }

    #[test]
    fn hermite_functions_are_orthonormal() {
        let n = 12;
        let mut buf = vec![0.0; n];
        let mut gram = vec![vec![0.0; n]; n];
        let h = 0.01;
        for k in -1500..=1500 {
            hermite_functions(k as f64 * h, &mut buf);
            for i in 0..n {
                for j in 0..n {
                    gram[i][j] += h * buf[i] * buf[j];
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((gram[i][j] - want).abs() < 1e-12, "({i},{j}) = {}", gram[i][j]);
            }
        }
    }

    #[test]
    fn adaptive_integrates_oscillatory_gaussian() {
        // ∫ e^{−q²} e^{ikq} dq = √π e^{−k²/4}
        let k = 7.0;
        let got = adaptive_gk15(
            |q, out: &mut [Complex64]| out[0] = Complex64::from_polar((-q * q).exp(), k * q),
            -12.0,
            12.0,
            1,
            64,
            1e-13,
        )
        .unwrap();
        let want = std::f64::consts::PI.sqrt() * (-k * k / 4.0).exp();
        assert!((got[0].re - want).abs() < 1e-13 && got[0].im.abs() < 1e-13);
    }

    #[test]
    fn identity_packet_gives_kronecker_delta() {
        let wf = WaveParams::ground(1.7);
        let p = overlap_matrix(8, 8, &wf, LinearPhase::Unsquared).unwrap();
        for (m, row) in p.iter().enumerate() {
            for (n, &v) in row.iter().enumerate() {
                let want = if m == n { 1.0 } else { 0.0 };
                assert!((v - want).abs() < 1e-11, "P_{m}({n}) = {v}");
            }
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let mut wf = WaveParams::ground(1.0);
        wf.rho = 0.0;
        assert!(matches!(overlap_oracle(0, 0, &wf), Err(Error::Domain(_))));
        assert!(matches!(overlap_oracle(61, 0, &WaveParams::ground(1.0)), Err(Error::Domain(_))));
    }
}
