//! Modified Bessel function of the first kind, order zero, in the log domain.
//!
//! `ln I₀(x)` is evaluated with the ascending power series for small
//! arguments and with the Hankel asymptotic expansion of the scaled function
//! `e^{-x} I₀(x)` for large ones, so nothing overflows up to `x = 1e6` and
//! beyond.

use crate::error::{Error, Result};

/// Arguments at or below this use the power series.
pub const SERIES_LIMIT: f64 = 20.0;

const MAX_TERMS: usize = 400;

/// Natural log of `I₀(x)` for `x ≥ 0`.
pub fn log_i0(x: f64) -> Result<f64> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::Domain(format!(
            "log_i0 requires a finite nonnegative argument, got {x}"
        )));
    }
    Ok(if x <= SERIES_LIMIT {
        log_i0_series(x)
    } else {
        log_i0_asymptotic(x)
    })
}

/// `ln I₀(x)` from `Σ (x²/4)^k / (k!)²`.
///
/// The `k = 0` term is split off and `ln_1p` is applied to the remainder,
/// which keeps full relative precision for tiny `x` where `ln I₀(x) ≈ x²/4`.
pub(crate) fn log_i0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut tail = 0.0;
    for k in 1..MAX_TERMS {
        let kf = k as f64;
        term *= q / (kf * kf);
        tail += term;
        if term <= tail * f64::EPSILON * 0.25 {
            break;
        }
    }
    tail.ln_1p()
}

/// `ln I₀(x) = x − ½ ln(2πx) + ln Σ_k a_k x^{-k}` with
/// `a_k = ((2k−1)!!)² / (k! 8^k)`.
///
/// The series is divergent, so summation stops at the smallest term. For
/// `x > 20` that term is far below double precision.
pub(crate) fn log_i0_asymptotic(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..MAX_TERMS {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        let next = term * odd * odd / (8.0 * kf * x);
        if next >= term {
            break;
        }
        term = next;
        sum += term;
        if term < sum * f64::EPSILON * 0.25 {
            break;
        }
    }
    x - 0.5 * (2.0 * std::f64::consts::PI * x).ln() + sum.ln()
}
