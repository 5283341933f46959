//! Log-domain special functions.
//!
//! Factorial ratios in the number distributions grow past `f64` range long
//! before the probabilities themselves become negligible, and naive
//! `ln n! − ln k!` differences lose digits proportional to their magnitude.
//! Everything here is arranged so that large logarithms never cancel:
//! Poisson weights use the saddle-point form (Stirling remainder plus the
//! deviance `bd0`), and the central binomial ratio has its own asymptotic
//! series.

use std::f64::consts::PI;
use std::sync::OnceLock;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Probabilities whose logarithm is below this are reported as zero.
pub const LN_UNDERFLOW: f64 = -700.0;

const TABLE_LEN: usize = 171;

fn ln_factorial_table() -> &'static [f64; TABLE_LEN] {
    static TABLE: OnceLock<[f64; TABLE_LEN]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [0.0; TABLE_LEN];
        let mut f = 1.0f64;
        for (k, slot) in t.iter_mut().enumerate().skip(1) {
            f *= k as f64;
            *slot = f.ln();
        }
        t
    })
}

/// Stirling remainder `ln n! − [(n + ½)ln n − n + ½ln 2π]`, for `n ≥ 1`.
pub fn stirlerr(n: u64) -> f64 {
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    assert!(n >= 1, "stirlerr is defined for n >= 1");
    let x = n as f64;
    if n <= 15 {
        return ln_factorial_table()[n as usize] - (x + 0.5) * x.ln() + x - LN_SQRT_2PI;
    }
    let nn = x * x;
    (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / x
}

/// `ln n!`.
pub fn ln_factorial(n: u64) -> f64 {
    if (n as usize) < TABLE_LEN {
        return ln_factorial_table()[n as usize];
    }
    let x = n as f64;
    (x + 0.5) * x.ln() - x + LN_SQRT_2PI + stirlerr(n)
}

/// Deviance term `x ln(x/m) + m − x`, accurate when `x ≈ m`.
pub fn bd0(x: f64, m: f64) -> f64 {
    if (x - m).abs() < 0.1 * (x + m) {
        let v = (x - m) / (x + m);
        let mut s = (x - m) * v;
        let mut ej = 2.0 * x * v;
        let v2 = v * v;
        for j in 1..1000 {
            ej *= v2;
            let s1 = s + ej / (2 * j + 1) as f64;
            if s1 == s {
                return s1;
            }
            s = s1;
        }
        s
    } else {
        x * (x / m).ln() + m - x
    }
}

/// `ln(λᵏ e^{−λ}/k!)`.
pub fn ln_poisson(k: u64, lambda: f64) -> f64 {
    if lambda == 0.0 {
        return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if k == 0 {
        return -lambda;
    }
    let x = k as f64;
    -stirlerr(k) - bd0(x, lambda) - 0.5 * (2.0 * PI * x).ln()
}

const CENTRAL_TABLE_LEN: usize = 129;

/// `ln[C(2n, n)/4ⁿ]`, the squared-width weight of the squeezed distributions.
pub fn ln_central_binomial(n: u64) -> f64 {
    static TABLE: OnceLock<[f64; CENTRAL_TABLE_LEN]> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut t = [0.0; CENTRAL_TABLE_LEN];
        let mut b = 1.0f64;
        for (k, slot) in t.iter_mut().enumerate().skip(1) {
            b *= (2 * k - 1) as f64 / (2 * k) as f64;
            *slot = b.ln();
        }
        t
    });
    if (n as usize) < CENTRAL_TABLE_LEN {
        return table[n as usize];
    }
    // lnΓ(n + ½) − lnΓ(n + 1) − ½ln π, expanded in 1/n
    let x = n as f64;
    let r = 1.0 / x;
    let r2 = r * r;
    -0.5 * (PI * x).ln() + r * (-1.0 / 8.0 + r2 * (1.0 / 192.0 + r2 * (-1.0 / 640.0 + r2 * (17.0 / 14336.0))))
}

/// `ln[n!/(n − j)!]`, the log of a falling factorial, summed term by term.
pub fn ln_falling(n: u64, j: u64) -> f64 {
    debug_assert!(j <= n);
    (0..j).map(|i| ((n - i) as f64).ln()).sum()
}

/// A real number stored as `sign · exp(ln_abs)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogValue {
    pub sign: f64,
    pub ln_abs: f64,
}

impl LogValue {
    pub const ZERO: LogValue = LogValue {
        sign: 0.0,
        ln_abs: f64::NEG_INFINITY,
    };

    pub fn value(&self) -> f64 {
        if self.sign == 0.0 {
            0.0
        } else {
            self.sign * self.ln_abs.exp()
        }
    }

    /// Sums signed terms without leaving log space for the magnitudes.
    pub fn sum(terms: &[LogValue]) -> LogValue {
        let max = terms
            .iter()
            .filter(|t| t.sign != 0.0)
            .map(|t| t.ln_abs)
            .fold(f64::NEG_INFINITY, f64::max);
        if max == f64::NEG_INFINITY {
            return LogValue::ZERO;
        }
        let s: f64 = terms
            .iter()
            .filter(|t| t.sign != 0.0)
            .map(|t| t.sign * (t.ln_abs - max).exp())
            .sum();
        if s == 0.0 {
            LogValue::ZERO
        } else {
            LogValue {
                sign: s.signum(),
                ln_abs: s.abs().ln() + max,
            }
        }
    }
}

/// Generalized Laguerre polynomial `Lₙᵃ(x)` by upward three-term recurrence,
/// rescaled whenever the running values exceed `1e150`.
pub fn laguerre(n: u64, a: f64, x: f64) -> LogValue {
    const BIG: f64 = 1e150;
    let to_log = |v: f64, scale: f64| {
        if v == 0.0 {
            LogValue::ZERO
        } else {
            LogValue {
                sign: v.signum(),
                ln_abs: v.abs().ln() + scale,
            }
        }
    };
    if n == 0 {
        return to_log(1.0, 0.0);
    }
    let (mut prev, mut cur) = (1.0f64, 1.0 + a - x);
    let mut scale = 0.0f64;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + a - x) * cur - (kf + a) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
        if cur.abs() > BIG {
            prev /= BIG;
            cur /= BIG;
            scale += BIG.ln();
        }
    }
    to_log(cur, scale)
}
