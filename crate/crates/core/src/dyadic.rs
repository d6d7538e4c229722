//! Exact dyadic rationals (`m * 2^e` with arbitrary-precision `m`) and
//! half-open dyadic intervals.
//!
//! Every geometric quantity in the construction — interval endpoints,
//! lengths, ball radii, distances to boundaries — is a dyadic rational,
//! so all geometry in this crate is computed without rounding.

use crate::dd::Dd;
use crate::error::{CoreError, Result};
use num_bigint::{BigInt, Sign};
use num_traits::{Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

/// A signed dyadic rational `mantissa * 2^exponent` in canonical form:
/// the mantissa is odd or zero, and zero carries exponent 0.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DyadicRational {
    mantissa: BigInt,
    exponent: i64,
}

impl DyadicRational {
    pub fn new(mantissa: BigInt, exponent: i64) -> Self {
        let mut d = DyadicRational { mantissa, exponent };
        d.canonicalize();
        d
    }

    pub fn zero() -> Self {
        DyadicRational {
            mantissa: BigInt::zero(),
            exponent: 0,
        }
    }

    pub fn one() -> Self {
        DyadicRational::from_int(1)
    }

    pub fn from_int(v: i64) -> Self {
        DyadicRational::new(BigInt::from(v), 0)
    }

    /// 2^e.
    pub fn pow2(e: i64) -> Self {
        DyadicRational {
            mantissa: BigInt::from(1),
            exponent: e,
        }
    }

    /// Exact conversion of a finite `f64`.
    pub fn from_f64_exact(x: f64) -> Result<Self> {
        if !x.is_finite() {
            return Err(CoreError::Domain(format!("non-finite value {x}")));
        }
        if x == 0.0 {
            return Ok(Self::zero());
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
        let exp_bits = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant, exp) = if exp_bits == 0 {
            (frac, -1074i64)
        } else {
            (frac | (1u64 << 52), exp_bits - 1075)
        };
        Ok(DyadicRational::new(BigInt::from(sign * mant as i64), exp))
    }

    fn canonicalize(&mut self) {
        if self.mantissa.is_zero() {
            self.exponent = 0;
            return;
        }
        if let Some(tz) = self.mantissa.trailing_zeros() {
            if tz > 0 {
                self.mantissa >>= tz;
                self.exponent += tz as i64;
            }
        }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.mantissa.is_positive()
    }

    /// Exact scaling by 2^k.
    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        DyadicRational {
            mantissa: self.mantissa.clone(),
            exponent: self.exponent + k,
        }
    }

    pub fn abs(&self) -> Self {
        DyadicRational {
            mantissa: self.mantissa.abs(),
            exponent: self.exponent,
        }
    }

    /// floor(self / 2^k) as a big integer (exact).
    pub fn floor_shr(&self, k: i64) -> BigInt {
        let shift = self.exponent - k;
        if shift >= 0 {
            &self.mantissa << shift as u64
        } else {
            // BigInt shr rounds toward negative infinity, i.e. floor
            &self.mantissa >> (-shift) as u64
        }
    }

    /// Nearest-f64 approximation (monotone, used for reporting only).
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.mantissa.bits() as i64;
        // keep 64 mantissa bits, track the shift
        let shift = (bits - 64).max(0);
        let top = (&self.mantissa >> shift as u64).to_f64().unwrap_or(0.0);
        let e = self.exponent + shift;
        if e > 3000 {
            return if top > 0.0 {
                f64::INFINITY
            } else {
                f64::NEG_INFINITY
            };
        }
        if e < -3000 {
            return 0.0;
        }
        crate::dd::libm_ldexp(top, e as i32)
    }

    /// Double-double approximation, correctly capturing ~106 mantissa bits.
    pub fn to_dd(&self) -> Dd {
        if self.is_zero() {
            return Dd::from_f64(0.0);
        }
        let bits = self.mantissa.bits() as i64;
        let shift = (bits - 110).max(0);
        let top = &self.mantissa >> shift as u64;
        let x1 = top.to_f64().unwrap();
        let r = &top - BigInt::from(x1 as i128);
        let x2 = r.to_f64().unwrap();
        let e = (self.exponent + shift) as i32;
        (Dd::from_f64(x1) + Dd::from_f64(x2)).ldexp(e)
    }

    /// ln(self) for positive values, computed from the mantissa/exponent
    /// split so that extreme exponents never leave the f64 range.
    pub fn ln_dd(&self) -> Result<Dd> {
        if !self.is_positive() {
            return Err(CoreError::Domain(format!("ln of non-positive {self}")));
        }
        let bits = self.mantissa.bits() as i64;
        let shift = (bits - 110).max(0);
        let top = &self.mantissa >> shift as u64;
        let x1 = top.to_f64().unwrap();
        let r = &top - BigInt::from(x1 as i128);
        let x2 = r.to_f64().unwrap();
        let m = Dd::from_f64(x1) + Dd::from_f64(x2);
        let e = self.exponent + shift;
        Ok(m.ln() + crate::dd::DD_LN2 * Dd::from_f64(e as f64))
    }

    /// log2(self) for reporting (f64).
    pub fn log2_f64(&self) -> f64 {
        if !self.is_positive() {
            return f64::NAN;
        }
        let bits = self.mantissa.bits() as i64;
        let shift = (bits - 64).max(0);
        let top = (&self.mantissa >> shift as u64).to_f64().unwrap();
        top.log2() + (self.exponent + shift) as f64
    }

    /// Exact ratio self/other as f64 (used for reporting scale ratios).
    pub fn ratio_f64(&self, other: &DyadicRational) -> f64 {
        (self.to_dd() / other.to_dd()).to_f64()
    }
}

impl Add for &DyadicRational {
    type Output = DyadicRational;
    fn add(self, rhs: &DyadicRational) -> DyadicRational {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let e = self.exponent.min(rhs.exponent);
        let a = &self.mantissa << (self.exponent - e) as u64;
        let b = &rhs.mantissa << (rhs.exponent - e) as u64;
        DyadicRational::new(a + b, e)
    }
}

impl Sub for &DyadicRational {
    type Output = DyadicRational;
    fn sub(self, rhs: &DyadicRational) -> DyadicRational {
        self + &(-rhs)
    }
}

impl Neg for &DyadicRational {
    type Output = DyadicRational;
    fn neg(self) -> DyadicRational {
        DyadicRational {
            mantissa: -&self.mantissa,
            exponent: self.exponent,
        }
    }
}

impl Mul for &DyadicRational {
    type Output = DyadicRational;
    fn mul(self, rhs: &DyadicRational) -> DyadicRational {
        if self.is_zero() || rhs.is_zero() {
            return DyadicRational::zero();
        }
        // product of canonical (odd) mantissas is odd: already canonical
        DyadicRational {
            mantissa: &self.mantissa * &rhs.mantissa,
            exponent: self.exponent + rhs.exponent,
        }
    }
}

impl PartialOrd for DyadicRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DyadicRational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.mantissa.sign(), other.mantissa.sign()) {
            (Sign::Minus, Sign::NoSign | Sign::Plus) => return Ordering::Less,
            (Sign::NoSign, Sign::Plus) => return Ordering::Less,
            (Sign::Plus, Sign::NoSign | Sign::Minus) => return Ordering::Greater,
            (Sign::NoSign, Sign::Minus) => return Ordering::Greater,
            (Sign::NoSign, Sign::NoSign) => return Ordering::Equal,
            _ => {}
        }
        let e = self.exponent.min(other.exponent);
        let a = &self.mantissa << (self.exponent - e) as u64;
        let b = &other.mantissa << (other.exponent - e) as u64;
        a.cmp(&b)
    }
}

impl fmt::Display for DyadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent == 0 {
            write!(f, "{}", self.mantissa)
        } else {
            write!(f, "{}*2^{}", self.mantissa, self.exponent)
        }
    }
}

impl fmt::Debug for DyadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Parses the command-line dyadic literal syntax: `m*2^e`, `2^e`, or a
/// plain integer. Decimal fractions are rejected deliberately.
impl FromStr for DyadicRational {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || CoreError::Parse(format!("invalid dyadic literal '{s}' (use m*2^e, 2^e or an integer)"));
        if s.contains('.') {
            return Err(CoreError::Parse(format!(
                "decimal literal '{s}' rejected: points and radii must be exact dyadics (m*2^e or 2^e)"
            )));
        }
        if let Some((m_str, e_str)) = s.split_once("*2^") {
            let m = BigInt::from_str(m_str.trim()).map_err(|_| bad())?;
            let e = i64::from_str(e_str.trim()).map_err(|_| bad())?;
            return Ok(DyadicRational::new(m, e));
        }
        if let Some(rest) = s.strip_prefix("-2^") {
            let e = i64::from_str(rest.trim()).map_err(|_| bad())?;
            return Ok(DyadicRational::new(BigInt::from(-1), e));
        }
        if let Some(rest) = s.strip_prefix("2^") {
            let e = i64::from_str(rest.trim()).map_err(|_| bad())?;
            return Ok(DyadicRational::pow2(e));
        }
        let m = BigInt::from_str(s).map_err(|_| bad())?;
        Ok(DyadicRational::new(m, 0))
    }
}

#[derive(Serialize, Deserialize)]
struct DyadicWire {
    m: String,
    e: i64,
}

impl Serialize for DyadicRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        DyadicWire {
            m: self.mantissa.to_string(),
            e: self.exponent,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DyadicRational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = DyadicWire::deserialize(deserializer)?;
        let m = BigInt::from_str(&wire.m)
            .map_err(|e| D::Error::custom(format!("bad mantissa: {e}")))?;
        Ok(DyadicRational::new(m, wire.e))
    }
}

/// A half-open interval `[left, right)` with exact dyadic endpoints.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntervalD {
    left: DyadicRational,
    right: DyadicRational,
}

impl IntervalD {
    pub fn new(left: DyadicRational, right: DyadicRational) -> Result<Self> {
        if left >= right {
            return Err(CoreError::Domain(format!(
                "degenerate interval [{left}, {right})"
            )));
        }
        Ok(IntervalD { left, right })
    }

    /// The support of the measure, `[-1, 1)`.
    pub fn support() -> Self {
        IntervalD {
            left: DyadicRational::from_int(-1),
            right: DyadicRational::one(),
        }
    }

    /// The closed ball `B(x, r)` materialized as the half-open `[x-r, x+r)`;
    /// the measure is atomless so the missing endpoint carries no mass.
    pub fn ball(center: &DyadicRational, radius: &DyadicRational) -> Result<Self> {
        if !radius.is_positive() {
            return Err(CoreError::Domain(format!("ball radius {radius} <= 0")));
        }
        Ok(IntervalD {
            left: center - radius,
            right: center + radius,
        })
    }

    pub fn left(&self) -> &DyadicRational {
        &self.left
    }

    pub fn right(&self) -> &DyadicRational {
        &self.right
    }

    pub fn length(&self) -> DyadicRational {
        &self.right - &self.left
    }

    pub fn midpoint(&self) -> DyadicRational {
        (&self.left + &self.right).mul_pow2(-1)
    }

    pub fn contains_point(&self, x: &DyadicRational) -> bool {
        *x >= self.left && *x < self.right
    }

    pub fn contains(&self, other: &IntervalD) -> bool {
        self.left <= other.left && other.right <= self.right
    }

    pub fn intersects(&self, other: &IntervalD) -> bool {
        self.left < other.right && other.left < self.right
    }

    pub fn intersect(&self, other: &IntervalD) -> Option<IntervalD> {
        let l = self.left.clone().max(other.left.clone());
        let r = self.right.clone().min(other.right.clone());
        if l < r {
            Some(IntervalD { left: l, right: r })
        } else {
            None
        }
    }

    pub fn translate(&self, shift: &DyadicRational) -> IntervalD {
        IntervalD {
            left: &self.left + shift,
            right: &self.right + shift,
        }
    }

    /// Reflection through 0: `[a,b) -> [-b,-a)`. Measure-equal to the true
    /// image `(-b,-a]` since the measure is atomless.
    pub fn reflect(&self) -> IntervalD {
        IntervalD {
            left: -&self.right,
            right: -&self.left,
        }
    }

    /// Distance from a point inside to the two-point boundary {left, right}.
    pub fn distance_to_boundary(&self, x: &DyadicRational) -> DyadicRational {
        let dl = x - &self.left;
        let dr = &self.right - x;
        dl.abs().min(dr.abs())
    }

    /// Distance between this interval and another disjoint one (0 if they touch).
    pub fn gap_to(&self, other: &IntervalD) -> DyadicRational {
        if self.intersects(other) {
            return DyadicRational::zero();
        }
        if self.right <= other.left {
            &other.left - &self.right
        } else {
            &self.left - &other.right
        }
    }
}

impl fmt::Display for IntervalD {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {})", self.left, self.right)
    }
}

impl fmt::Debug for IntervalD {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
