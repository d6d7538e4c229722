//! Scalar abstraction for the numerical kernels.
//!
//! Quadrature, log-domain accumulation and the exponential-integral
//! reference evaluator are written once against [`Real`] and instantiated
//! at two precisions: plain `f64` for cheap work (sampling probabilities,
//! cross-checks) and [`Dd`] for everything feeding certified results.

use crate::dd::{Dd, DD_EPSILON, DD_LN2, DD_ONE, DD_ZERO};
use num_traits::{One, Zero};
use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

pub trait Real:
    Copy
    + PartialEq
    + PartialOrd
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn abs(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn ln_1p(self) -> Self;
    fn recip(self) -> Self;
    fn max(self, other: Self) -> Self;
    fn min(self, other: Self) -> Self;
    /// Unit roundoff of the format.
    fn epsilon() -> f64;
    fn ln_2() -> Self;
}

impl Real for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn ln_1p(self) -> Self {
        f64::ln_1p(self)
    }
    fn recip(self) -> Self {
        f64::recip(self)
    }
    fn max(self, other: Self) -> Self {
        f64::max(self, other)
    }
    fn min(self, other: Self) -> Self {
        f64::min(self, other)
    }
    fn epsilon() -> f64 {
        f64::EPSILON
    }
    fn ln_2() -> Self {
        std::f64::consts::LN_2
    }
}

impl Zero for Dd {
    fn zero() -> Self {
        DD_ZERO
    }
    fn is_zero(&self) -> bool {
        Dd::is_zero(*self)
    }
}

impl One for Dd {
    fn one() -> Self {
        DD_ONE
    }
}

impl Real for Dd {
    fn from_f64(x: f64) -> Self {
        Dd::from_f64(x)
    }
    fn to_f64(self) -> f64 {
        Dd::to_f64(self)
    }
    fn abs(self) -> Self {
        Dd::abs(self)
    }
    fn exp(self) -> Self {
        Dd::exp(self)
    }
    fn ln(self) -> Self {
        Dd::ln(self)
    }
    fn ln_1p(self) -> Self {
        Dd::ln_1p(self)
    }
    fn recip(self) -> Self {
        Dd::recip(self)
    }
    fn max(self, other: Self) -> Self {
        Dd::max(self, other)
    }
    fn min(self, other: Self) -> Self {
        Dd::min(self, other)
    }
    fn epsilon() -> f64 {
        DD_EPSILON
    }
    fn ln_2() -> Self {
        DD_LN2
    }
}
