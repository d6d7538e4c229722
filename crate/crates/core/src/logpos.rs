//! Nonnegative reals stored by their natural logarithm.
//!
//! The boundary masses of the construction decay like exp(-2^k), so no
//! fixed-width linear representation survives past a handful of
//! generations. Everything multiplicative lives here instead: products
//! become log additions, and sums go through max-factored log-sum-exp.
//!
//! The log itself is generic over [`Real`]; the crate-level alias
//! [`crate::LogPositive`] fixes it to double-double precision.

use crate::dd::Dd;
use crate::real::Real;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;

/// A value in [0, +inf) represented as its natural log, with exact zero
/// tracked separately.
#[derive(Clone, Copy, PartialEq)]
pub struct LogPos<R: Real = Dd> {
    ln: R,
    zero: bool,
}

impl<R: Real> LogPos<R> {
    pub fn zero() -> Self {
        LogPos {
            ln: R::zero(),
            zero: true,
        }
    }

    pub fn one() -> Self {
        LogPos {
            ln: R::zero(),
            zero: false,
        }
    }

    pub fn from_ln(ln: R) -> Self {
        LogPos { ln, zero: false }
    }

    pub fn from_ln_f64(ln: f64) -> Self {
        LogPos {
            ln: R::from_f64(ln),
            zero: false,
        }
    }

    /// Encode a nonnegative linear value.
    pub fn from_linear(v: f64) -> Self {
        assert!(v >= 0.0, "LogPos::from_linear({v})");
        if v == 0.0 {
            Self::zero()
        } else {
            Self::from_ln(R::from_f64(v).ln())
        }
    }

    pub fn is_zero(&self) -> bool {
        self.zero
    }

    /// The stored logarithm. Meaningless for exact zero (checked).
    pub fn ln(&self) -> R {
        debug_assert!(!self.zero, "ln of exact zero");
        self.ln
    }

    pub fn ln_f64(&self) -> f64 {
        if self.zero {
            f64::NEG_INFINITY
        } else {
            self.ln.to_f64()
        }
    }

    /// Linear value when representable in f64 (0 on exact zero; may
    /// under/overflow to 0/inf outside the f64 range).
    pub fn to_linear_f64(&self) -> f64 {
        if self.zero {
            0.0
        } else {
            self.ln.exp().to_f64()
        }
    }

    /// Multiplication: addition of logs.
    pub fn mul(&self, rhs: &Self) -> Self {
        if self.zero || rhs.zero {
            return Self::zero();
        }
        Self::from_ln(self.ln + rhs.ln)
    }

    /// Division: subtraction of logs. Division by exact zero is a bug.
    pub fn div(&self, rhs: &Self) -> Self {
        assert!(!rhs.zero, "division by exact zero");
        if self.zero {
            return Self::zero();
        }
        Self::from_ln(self.ln - rhs.ln)
    }

    /// ln(self/rhs), the quantity every ratio check works with.
    pub fn ln_ratio(&self, rhs: &Self) -> R {
        assert!(!self.zero && !rhs.zero, "ln_ratio with exact zero");
        self.ln - rhs.ln
    }

    /// Addition via max-factored log-sum-exp.
    pub fn add(&self, rhs: &Self) -> Self {
        if self.zero {
            return *rhs;
        }
        if rhs.zero {
            return *self;
        }
        let (hi, lo) = if self.ln >= rhs.ln {
            (self.ln, rhs.ln)
        } else {
            (rhs.ln, self.ln)
        };
        Self::from_ln(hi + (lo - hi).exp().ln_1p())
    }
}

impl<R: Real> PartialOrd for LogPos<R> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self.zero, other.zero) {
            (true, true) => Some(Ordering::Equal),
            (true, false) => Some(Ordering::Less),
            (false, true) => Some(Ordering::Greater),
            (false, false) => self.ln.partial_cmp(&other.ln),
        }
    }
}

impl<R: Real> fmt::Debug for LogPos<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.zero {
            write!(f, "LogPos(0)")
        } else {
            write!(f, "LogPos(ln={})", self.ln)
        }
    }
}

impl<R: Real> fmt::Display for LogPos<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.zero {
            write!(f, "0")
        } else {
            write!(f, "exp({:.17e})", self.ln.to_f64())
        }
    }
}

impl Serialize for LogPos<Dd> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        if self.zero {
            let mut st = serializer.serialize_struct("LogPos", 1)?;
            st.serialize_field("zero", &true)?;
            st.end()
        } else {
            let mut st = serializer.serialize_struct("LogPos", 1)?;
            st.serialize_field("ln", &self.ln.to_f64())?;
            st.end()
        }
    }
}

impl<'de> Deserialize<'de> for LogPos<Dd> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Wire {
            ln: Option<f64>,
            zero: Option<bool>,
        }
        let w = Wire::deserialize(deserializer)?;
        if w.zero == Some(true) {
            Ok(LogPos::zero())
        } else if let Some(ln) = w.ln {
            Ok(LogPos::from_ln_f64(ln))
        } else {
            Err(serde::de::Error::custom("expected {ln} or {zero:true}"))
        }
    }
}

/// Order-independent sum of a sequence: sort ascending, then fold with
/// max-factored pairwise additions. The sort makes the result a pure
/// function of the multiset, bit for bit.
pub fn log_sum<R: Real>(xs: &[LogPos<R>]) -> LogPos<R> {
    let mut nonzero: Vec<R> = xs.iter().filter(|x| !x.zero).map(|x| x.ln).collect();
    if nonzero.is_empty() {
        return LogPos::zero();
    }
    nonzero.sort_by(|a, b| a.partial_cmp(b).expect("NaN in log_sum"));
    let mut acc = LogPos::from_ln(nonzero[0]);
    for &ln in &nonzero[1..] {
        acc = acc.add(&LogPos::from_ln(ln));
    }
    acc
}
