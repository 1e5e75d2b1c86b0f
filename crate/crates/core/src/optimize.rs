//! Bounded one-dimensional maximization.

use crate::error::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarMax {
    pub x: f64,
    pub value: f64,
    pub evaluations: usize,
}

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`.
///
/// Stops when the bracket is narrower than `tol` or after `max_eval`
/// function evaluations. Returns the best point seen, which includes the
/// bracket ends, so monotone objectives land on the boundary.
pub fn golden_section_max<F>(mut f: F, lo: f64, hi: f64, tol: f64, max_eval: usize) -> Result<ScalarMax>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(Error::Argument(format!("invalid search interval [{lo}, {hi}]")));
    }
    if tol.is_nan() || tol <= 0.0 || max_eval < 2 {
        return Err(Error::Argument(
            "golden-section search needs tol > 0 and max_eval ≥ 2".into(),
        ));
    }

    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    let mut evals = 2;
    while (b - a) > tol && evals < max_eval {
        if fc < fd {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        } else {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        }
        evals += 1;
    }

    let mut best = if fc >= fd { (c, fc) } else { (d, fd) };
    for x in [a, b] {
        if evals >= max_eval {
            break;
        }
        let v = f(x)?;
        evals += 1;
        if v > best.1 {
            best = (x, v);
        }
    }
    Ok(ScalarMax {
        x: best.0,
        value: best.1,
        evaluations: evals,
    })
}
