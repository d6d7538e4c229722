//! Double-double arithmetic: an unevaluated sum of two `f64`s giving
//! roughly 106 bits of significand.
//!
//! Mass logarithms in this crate reach magnitudes of order 2^25 while
//! differences of order 1e-12 between them still carry meaning, which is
//! far beyond what a single `f64` significand can resolve. All log-domain
//! values are therefore carried as [`Dd`].
//!
//! The algorithms are the classical error-free transformations
//! (Dekker/Knuth two-sum and split products) plus the exp/ln evaluation
//! scheme of the QD library (Hida, Li, Bailey).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

/// Unit roundoff of the double-double format, 2^-104.
pub const DD_EPSILON: f64 = 4.93038065763132e-32;

const SPLITTER: f64 = 134_217_729.0; // 2^27 + 1

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

/// Requires |a| >= |b| (or a == 0).
#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let err = b - (s - a);
    (s, err)
}

#[inline]
fn split(a: f64) -> (f64, f64) {
    let t = SPLITTER * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ahi, alo) = split(a);
    let (bhi, blo) = split(b);
    let err = ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo;
    (p, err)
}

/// A double-double value `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Clone, Copy, Default, PartialEq)]
pub struct Dd {
    hi: f64,
    lo: f64,
}

pub const DD_ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
pub const DD_ONE: Dd = Dd { hi: 1.0, lo: 0.0 };
pub const DD_LN2: Dd = Dd {
    hi: 0.693_147_180_559_945_3,
    lo: 2.319_046_813_846_299_6e-17,
};

impl Dd {
    #[inline]
    pub fn new(hi: f64, lo: f64) -> Self {
        let (s, e) = quick_two_sum(hi, lo);
        Dd { hi: s, lo: e }
    }

    #[inline]
    pub fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn hi(self) -> f64 {
        self.hi
    }

    #[inline]
    pub fn lo(self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.hi == 0.0
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    #[inline]
    pub fn abs(self) -> Self {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    /// Exact scaling by a power of two.
    #[inline]
    pub fn mul_pwr2(self, p: f64) -> Self {
        Dd {
            hi: self.hi * p,
            lo: self.lo * p,
        }
    }

    /// Exact scaling by 2^n.
    pub fn ldexp(self, n: i32) -> Self {
        Dd {
            hi: libm_ldexp(self.hi, n),
            lo: libm_ldexp(self.lo, n),
        }
    }

    #[inline]
    pub fn sqr(self) -> Self {
        let (p1, mut p2) = two_prod(self.hi, self.hi);
        p2 += 2.0 * self.hi * self.lo;
        p2 += self.lo * self.lo;
        let (s, e) = quick_two_sum(p1, p2);
        Dd { hi: s, lo: e }
    }

    pub fn recip(self) -> Self {
        DD_ONE / self
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// exp(self), saturating to 0 / +inf outside the f64 exponent range.
    pub fn exp(self) -> Self {
        // Reduce: exp(x) = 2^m exp(r)^512 with r = (x - m ln2)/512, then a
        // short Taylor series for exp(r) - 1 and nine squarings.
        const K_INV: f64 = 1.0 / 512.0;
        if self.hi <= -746.0 {
            return DD_ZERO;
        }
        if self.hi >= 710.0 {
            return Dd::from_f64(f64::INFINITY);
        }
        if self.is_zero() {
            return DD_ONE;
        }
        let m = (self.hi / DD_LN2.hi + 0.5).floor();
        let r = (self - DD_LN2 * Dd::from_f64(m)).mul_pwr2(K_INV);

        let inv_fact = inv_factorials();
        let mut p = r.sqr();
        let mut s = r + p.mul_pwr2(0.5);
        p = p * r;
        let mut t = p * inv_fact[0];
        let mut i = 0usize;
        loop {
            s = s + t;
            p = p * r;
            i += 1;
            t = p * inv_fact[i];
            if t.hi.abs() <= K_INV * DD_EPSILON || i >= 8 {
                break;
            }
        }
        s = s + t;

        for _ in 0..9 {
            s = s.mul_pwr2(2.0) + s.sqr();
        }
        s = s + DD_ONE;
        s.ldexp(m as i32)
    }

    /// Natural logarithm; `self` must be positive and finite.
    pub fn ln(self) -> Self {
        debug_assert!(self.hi > 0.0, "Dd::ln of non-positive value {self:?}");
        if self == DD_ONE {
            return DD_ZERO;
        }
        // Newton iteration on f(y) = exp(y) - x from the f64 seed.
        let mut y = Dd::from_f64(self.hi.ln());
        for _ in 0..2 {
            y = y + self * (-y).exp() - DD_ONE;
        }
        y
    }

    /// ln(1 + self) for self >= 0 (the only case the log-domain sum needs).
    pub fn ln_1p(self) -> Self {
        debug_assert!(self.hi >= 0.0);
        if self.is_zero() {
            return DD_ZERO;
        }
        (DD_ONE + self).ln()
    }

    pub fn floor(self) -> Self {
        let fhi = self.hi.floor();
        if fhi == self.hi {
            let flo = self.lo.floor();
            let (s, e) = quick_two_sum(fhi, flo);
            Dd { hi: s, lo: e }
        } else {
            Dd { hi: fhi, lo: 0.0 }
        }
    }
}

pub(crate) fn libm_ldexp(x: f64, n: i32) -> f64 {
    // Avoids pulling in a libm dependency; exact for the ranges used here.
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let mut n = n;
    let mut x = x;
    while n > 1000 {
        x *= f64::powi(2.0, 1000);
        n -= 1000;
    }
    while n < -1000 {
        x *= f64::powi(2.0, -1000);
        n += 1000;
    }
    x * f64::powi(2.0, n)
}

/// 1/3!, 1/4!, ... 1/12! as double-doubles (exact divisions of exact factorials).
fn inv_factorials() -> &'static [Dd; 10] {
    use std::sync::OnceLock;
    static TABLE: OnceLock<[Dd; 10]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut out = [DD_ZERO; 10];
        let mut fact = 2.0f64;
        for (k, slot) in out.iter_mut().enumerate() {
            fact *= (k + 3) as f64; // 3!, 4!, ..., 12! are exact in f64
            *slot = DD_ONE / Dd::from_f64(fact);
        }
        out
    })
}

impl Add for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, rhs: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, rhs.hi);
        let (t1, t2) = two_sum(self.lo, rhs.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (s1, s2) = quick_two_sum(s1, s2 + t2);
        Dd { hi: s1, lo: s2 }
    }
}

impl Sub for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, rhs: Dd) -> Dd {
        self + (-rhs)
    }
}

impl Neg for Dd {
    type Output = Dd;
    #[inline]
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Mul for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, rhs: Dd) -> Dd {
        let (p1, mut p2) = two_prod(self.hi, rhs.hi);
        p2 += self.hi * rhs.lo + self.lo * rhs.hi;
        let (s, e) = quick_two_sum(p1, p2);
        Dd { hi: s, lo: e }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, rhs: Dd) -> Dd {
        let q1 = self.hi / rhs.hi;
        let r = self - rhs * Dd::from_f64(q1);
        let q2 = r.hi / rhs.hi;
        let r = r - rhs * Dd::from_f64(q2);
        let q3 = r.hi / rhs.hi;
        let (s, e) = quick_two_sum(q1, q2);
        Dd { hi: s, lo: e } + Dd::from_f64(q3)
    }
}

impl AddAssign for Dd {
    fn add_assign(&mut self, rhs: Dd) {
        *self = *self + rhs;
    }
}

impl SubAssign for Dd {
    fn sub_assign(&mut self, rhs: Dd) {
        *self = *self - rhs;
    }
}

impl PartialOrd for Dd {
    #[inline]
    fn partial_cmp(&self, other: &Dd) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            ord => ord,
        }
    }
}

impl fmt::Debug for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dd({:e} + {:e})", self.hi, self.lo)
    }
}

impl fmt::Display for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.17e}{:+.17e}", self.hi, self.lo)
    }
}
