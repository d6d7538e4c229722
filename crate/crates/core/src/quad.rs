//! Adaptive Gauss–Legendre quadrature, generic over the scalar type.
//!
//! Nodes and weights are generated at the scalar's own precision by
//! Newton refinement of the Legendre roots from f64 seeds, so the same
//! code provides a cheap f64 rule and a full double-double rule.

use crate::dd::Dd;
use crate::error::{CoreError, Result};
use crate::real::Real;
use std::sync::OnceLock;

/// A symmetric Gauss–Legendre rule on [-1, 1].
#[derive(Debug)]
pub struct GlRule<R: Real> {
    pairs: Vec<(R, R)>, // (node, weight)
}

fn legendre_with_deriv<R: Real>(n: usize, x: R) -> (R, R) {
    let mut p_prev = R::one();
    let mut p = x;
    for k in 2..=n {
        let kf = R::from_f64(k as f64);
        let a = R::from_f64((2 * k - 1) as f64);
        let b = R::from_f64((k - 1) as f64);
        let p_next = (a * x * p - b * p_prev) / kf;
        p_prev = p;
        p = p_next;
    }
    let nf = R::from_f64(n as f64);
    let deriv = nf * (x * p - p_prev) / (x * x - R::one());
    (p, deriv)
}

impl<R: Real> GlRule<R> {
    pub fn generate(n: usize) -> Self {
        assert!(n >= 2);
        let mut pairs = Vec::with_capacity(n);
        let half = n / 2;
        for i in 1..=half {
            let seed =
                (std::f64::consts::PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
            let mut x = R::from_f64(seed);
            for _ in 0..4 {
                let (p, dp) = legendre_with_deriv(n, x);
                x = x - p / dp;
            }
            let (_, dp) = legendre_with_deriv(n, x);
            let w = R::from_f64(2.0) / ((R::one() - x * x) * dp * dp);
            pairs.push((x, w));
            pairs.push((-x, w));
        }
        if n % 2 == 1 {
            let x = R::zero();
            let (_, dp) = legendre_with_deriv(n, x);
            let w = R::from_f64(2.0) / (dp * dp);
            pairs.push((x, w));
        }
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        GlRule { pairs }
    }

    pub fn apply<F: Fn(R) -> R>(&self, f: &F, a: R, b: R) -> R {
        let half = (b - a) * R::from_f64(0.5);
        let mid = (a + b) * R::from_f64(0.5);
        let mut acc = R::zero();
        for &(x, w) in &self.pairs {
            acc = acc + w * f(mid + half * x);
        }
        acc * half
    }
}

/// Access to per-scalar cached rule pairs (16- and 32-point).
pub trait QuadScalar: Real {
    fn rules() -> (&'static GlRule<Self>, &'static GlRule<Self>);
}

impl QuadScalar for f64 {
    fn rules() -> (&'static GlRule<f64>, &'static GlRule<f64>) {
        static LO: OnceLock<GlRule<f64>> = OnceLock::new();
        static HI: OnceLock<GlRule<f64>> = OnceLock::new();
        (
            LO.get_or_init(|| GlRule::generate(16)),
            HI.get_or_init(|| GlRule::generate(32)),
        )
    }
}

impl QuadScalar for Dd {
    fn rules() -> (&'static GlRule<Dd>, &'static GlRule<Dd>) {
        static LO: OnceLock<GlRule<Dd>> = OnceLock::new();
        static HI: OnceLock<GlRule<Dd>> = OnceLock::new();
        (
            LO.get_or_init(|| GlRule::generate(16)),
            HI.get_or_init(|| GlRule::generate(32)),
        )
    }
}

/// Integrates a nonnegative smooth integrand over [a, b] to the requested
/// relative tolerance. Segment errors are controlled relative to the
/// segment value, which for one-signed integrands bounds the total
/// relative error by `rel_tol`.
pub fn integrate_positive<R: QuadScalar, F: Fn(R) -> R>(
    f: &F,
    a: R,
    b: R,
    rel_tol: f64,
) -> Result<R> {
    let (rule_lo, rule_hi) = R::rules();
    let tol = rel_tol.max(64.0 * R::epsilon());
    let mut total = R::zero();
    let mut stack = vec![(a, b, 0u32)];
    while let Some((lo, hi, depth)) = stack.pop() {
        let coarse = rule_lo.apply(f, lo, hi);
        let fine = rule_hi.apply(f, lo, hi);
        let err = (fine - coarse).abs();
        if err.to_f64() <= tol * fine.abs().to_f64() || fine.is_zero() {
            total = total + fine;
            continue;
        }
        if depth >= 48 {
            return Err(CoreError::QuadratureNonConvergence(format!(
                "segment [{lo}, {hi}] still at rel err {:.3e} after depth {depth}",
                err.to_f64() / fine.abs().to_f64().max(f64::MIN_POSITIVE)
            )));
        }
        let mid = (lo + hi) * R::from_f64(0.5);
        stack.push((lo, mid, depth + 1));
        stack.push((mid, hi, depth + 1));
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact_f64() {
        let v = integrate_positive(&|x: f64| x * x, 0.0, 1.0, 1e-14).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn polynomial_exact_dd() {
        let v = integrate_positive(
            &|x: Dd| x * x,
            Dd::from_f64(0.0),
            Dd::from_f64(1.0),
            1e-25,
        )
        .unwrap();
        let third = Dd::from_f64(1.0) / Dd::from_f64(3.0);
        assert!((v - third).abs().to_f64() < 1e-28);
    }

    #[test]
    fn decaying_integrand_dd_vs_f64() {
        // same integral at both precisions must agree to f64 accuracy
        let g_dd = integrate_positive(
            &|v: Dd| (-v).exp() * (Dd::from_f64(1.0) + v).recip().sqr(),
            Dd::from_f64(0.0),
            Dd::from_f64(50.0),
            1e-22,
        )
        .unwrap();
        let g_f64 = integrate_positive(
            &|v: f64| (-v).exp() / ((1.0 + v) * (1.0 + v)),
            0.0,
            50.0,
            1e-13,
        )
        .unwrap();
        assert!((g_dd.to_f64() - g_f64).abs() / g_f64 < 1e-12);
    }
}
