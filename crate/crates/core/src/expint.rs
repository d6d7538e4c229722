//! Exponential integrals E1 and E2, used as the independent reference for
//! everything the quadrature path produces.
//!
//! The production integrator never calls into this module; conversely this
//! module never integrates anything. E1 uses the alternating series below
//! x = 1 and a modified-Lentz continued fraction above, following the
//! classical recipes.

use crate::error::{CoreError, Result};
use crate::real::Real;

/// Euler–Mascheroni constant at the scalar's precision.
fn euler_gamma<R: Real>() -> R {
    R::from_f64(0.577_215_664_901_532_9) + R::from_f64(-4.942_915_152_430_645e-18)
}

/// E1(x) for x > 0.
pub fn e1<R: Real>(x: R) -> Result<R> {
    if x <= R::zero() {
        return Err(CoreError::Domain(format!("E1 domain: x = {x} <= 0")));
    }
    if x.to_f64() <= 1.0 {
        // -gamma - ln x + sum (-1)^{k+1} x^k / (k k!)
        let mut sum = R::zero();
        let mut term = R::one(); // x^k / k! running factor
        for k in 1..200 {
            let kf = R::from_f64(k as f64);
            term = term * x / kf;
            let contrib = term / kf;
            sum = if k % 2 == 1 {
                sum + contrib
            } else {
                sum - contrib
            };
            if contrib.abs().to_f64() < R::epsilon() * sum.abs().to_f64().max(1e-300) {
                break;
            }
        }
        Ok(sum - euler_gamma::<R>() - x.ln())
    } else {
        Ok(en_continued_fraction(1, x)?.0)
    }
}

/// E2(x) for x > 0 in linear form; prefer [`ln_e2`] for large x.
pub fn e2<R: Real>(x: R) -> Result<R> {
    if x <= R::zero() {
        return Err(CoreError::Domain(format!("E2 domain: x = {x} <= 0")));
    }
    if x.to_f64() <= 1.0 {
        // E2 = e^{-x} - x E1(x)
        Ok((-x).exp() - x * e1(x)?)
    } else {
        Ok(en_continued_fraction(2, x)?.0)
    }
}

/// ln E2(x) for x > 0, stable for arbitrarily large x (where E2 underflows).
pub fn ln_e2<R: Real>(x: R) -> Result<R> {
    if x.to_f64() <= 1.0 {
        return Ok(e2(x)?.ln());
    }
    let (_, ln_val) = en_continued_fraction(2, x)?;
    Ok(ln_val)
}

/// Modified Lentz evaluation of the continued fraction for E_n(x), x > 1.
/// Returns (E_n(x) possibly underflowed, ln E_n(x)).
fn en_continued_fraction<R: Real>(n: u32, x: R) -> Result<(R, R)> {
    let tiny = R::from_f64(1e-290);
    let nf = R::from_f64(n as f64);
    let mut b = x + nf;
    let mut c = tiny.recip();
    let mut d = b.recip();
    let mut h = d;
    for i in 1..400 {
        let a = R::from_f64(-(i as f64) * (n as f64 - 1.0 + i as f64));
        b = b + R::from_f64(2.0);
        d = (a * d + b).recip();
        c = b + a / c;
        let del = c * d;
        h = h * del;
        if (del - R::one()).abs().to_f64() < R::epsilon() {
            let ln_val = h.ln() - x;
            return Ok((h * (-x).exp(), ln_val));
        }
    }
    Err(CoreError::QuadratureNonConvergence(format!(
        "E{n} continued fraction did not converge at x = {x}"
    )))
}
