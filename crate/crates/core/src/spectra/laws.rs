//! Closed-form transition probabilities for the two regimes.

use super::special::{laguerre, ln_central_binomial, ln_factorial, ln_poisson, LogValue, LN_UNDERFLOW};
use super::{GammaValue, Regime};
use crate::error::{Error, Result};

fn finish(ln_p: f64) -> f64 {
    if ln_p < LN_UNDERFLOW {
        0.0
    } else {
        ln_p.exp().min(1.0)
    }
}

fn expect_regime(gamma: &GammaValue, regime: Regime) -> Result<()> {
    if gamma.regime != regime {
        return Err(Error::Usage(format!(
            "a {} Γ cannot be used with the {} law",
            gamma.regime.as_str(),
            regime.as_str()
        )));
    }
    Ok(())
}

/// `P_m(n)` for a displaced eigenstate:
/// `(μ!/ν!) Γ^{ν−μ} e^{−Γ} [L_μ^{ν−μ}(Γ)]²` with `μ = min(m, n)`, `ν = max(m, n)`.
///
/// Evaluated as a Poisson weight in `ν` times `μ! Γ^{−μ} L²`, all in logs,
/// so the result is symmetric in `m` and `n` bit for bit.
pub fn prob_displaced(m: usize, n: usize, gamma: &GammaValue) -> Result<f64> {
    expect_regime(gamma, Regime::Displaced)?;
    let g = gamma.gamma;
    if !(g >= 0.0 && g.is_finite()) {
        return Err(Error::Domain(format!("displaced Γ must be finite and >= 0, got {g}")));
    }
    if g == 0.0 {
        return Ok(if m == n { 1.0 } else { 0.0 });
    }
    let (mu, nu) = (m.min(n) as u64, m.max(n) as u64);
    let lag = laguerre(mu, (nu - mu) as f64, g);
    if lag.sign == 0.0 {
        return Ok(0.0);
    }
    let ln_p = ln_poisson(nu, g) + ln_factorial(mu) - mu as f64 * g.ln() + 2.0 * lag.ln_abs;
    Ok(finish(ln_p))
}

/// `P_m(n)` for a squeezed eigenstate; zero unless `m` and `n` share parity.
///
/// With half-indices `a = ⌊m/2⌋`, `b = ⌊n/2⌋` and `t = 1 − 1/Γ`, the even
/// law is
///
/// ```text
/// Γ^{−1/2} B(a) B(b) [ Σ_j (−1)^j a!/(a−j)! · b!/(b−j)! · 4^j/(2j)! · Γ^{−j} t^{(a+b)/2−j} ]²
/// ```
///
/// where `B(k) = C(2k, k)/4^k`. The odd law replaces `(2j)!` by `(2j+1)!`
/// and the prefactor by `Γ^{−3/2} (2a+1)(2b+1) B(a) B(b)`. Every power of
/// `t` is non-negative, so Γ = 1 needs no special casing beyond `0⁰ = 1`.
pub fn prob_squeezed(m: usize, n: usize, gamma: &GammaValue) -> Result<f64> {
    expect_regime(gamma, Regime::Squeezed)?;
    let g = gamma.gamma;
    if !(g >= 1.0 && g.is_finite()) {
        return Err(Error::Domain(format!("squeezed Γ must be finite and >= 1, got {g}")));
    }
    if (m + n) % 2 == 1 {
        return Ok(0.0);
    }
    let odd = m % 2 == 1;
    let (a, b) = ((m / 2) as u64, (n / 2) as u64);
    let ln_g = g.ln();
    let ln_t = if g == 1.0 {
        f64::NEG_INFINITY
    } else if g < 2.0 {
        (g - 1.0).ln() - ln_g
    } else {
        (-1.0 / g).ln_1p()
    };
    let half_sum = (a + b) as f64 / 2.0;
    let ln4 = 4f64.ln();

    let j_max = a.min(b);
    let mut terms = Vec::with_capacity(j_max as usize + 1);
    let mut ln_falling = 0.0;
    for j in 0..=j_max {
        if j > 0 {
            ln_falling += ((a - j + 1) as f64).ln() + ((b - j + 1) as f64).ln();
        }
        let power = half_sum - j as f64;
        let ln_tpow = if power == 0.0 {
            0.0
        } else if ln_t == f64::NEG_INFINITY {
            continue;
        } else {
            power * ln_t
        };
        let fact = if odd { ln_factorial(2 * j + 1) } else { ln_factorial(2 * j) };
        terms.push(LogValue {
            sign: if j % 2 == 0 { 1.0 } else { -1.0 },
            ln_abs: ln_falling + j as f64 * (ln4 - ln_g) - fact + ln_tpow,
        });
    }
    let s = LogValue::sum(&terms);
    if s.sign == 0.0 {
        return Ok(0.0);
    }
    let mut ln_pref = ln_central_binomial(a) + ln_central_binomial(b);
    if odd {
        ln_pref += ((2 * a + 1) as f64).ln() + ((2 * b + 1) as f64).ln() - 1.5 * ln_g;
    } else {
        ln_pref -= 0.5 * ln_g;
    }
    Ok(finish(ln_pref + 2.0 * s.ln_abs))
}

/// Dispatches on the regime carried by `gamma`.
pub fn prob(m: usize, n: usize, gamma: &GammaValue) -> Result<f64> {
    match gamma.regime {
        Regime::Displaced => prob_displaced(m, n, gamma),
        Regime::Squeezed => prob_squeezed(m, n, gamma),
    }
}
