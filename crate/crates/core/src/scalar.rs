//! Floating-point types the fast path can run in.
//!
//! The Legendre recurrence subtracts nearly equal quantities at high order, so
//! the same pipeline is instantiated for plain `f64` and for double-double
//! ([`DoubleDouble`], about 106 significant bits).

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use twofloat::TwoFloat;

pub trait Real:
    Copy
    + Debug
    + Send
    + Sync
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + 'static
{
    fn zero() -> Self;
    fn from_f64(v: f64) -> Self;
    fn to_f64(self) -> f64;

    fn from_i64(v: i64) -> Self;

    /// Nearest representable value of a big integer.
    fn from_bigint(v: &BigInt) -> Self;
}

impl Real for f64 {
    #[inline]
    fn zero() -> Self {
        0.0
    }
    #[inline]
    fn from_f64(v: f64) -> Self {
        v
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self
    }
    #[inline]
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_bigint(v: &BigInt) -> Self {
        v.to_f64().unwrap_or(f64::NAN)
    }
}

/// Double-double number.
///
/// Addition and multiplication come from [`TwoFloat`]. Division is done here by
/// long division, since `TwoFloat / TwoFloat` in twofloat 0.8 rounds its
/// correction term `1 − b·(1/b)` to zero and is only double accurate.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct DoubleDouble(pub TwoFloat);

impl DoubleDouble {
    pub fn hi(self) -> f64 {
        self.0.hi()
    }

    pub fn lo(self) -> f64 {
        self.0.lo()
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        DoubleDouble(self.0 + rhs.0)
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        DoubleDouble(self.0 - rhs.0)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        DoubleDouble(self.0 * rhs.0)
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let (a, b) = (self.0, rhs.0);
        let q1 = a.hi() / b.hi();
        let r = a - b * q1;
        let q2 = r.hi() / b.hi();
        let r = r - b * q2;
        let q3 = r.hi() / b.hi();
        DoubleDouble(TwoFloat::new_add(q1, q2) + q3)
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        DoubleDouble(-self.0)
    }
}

impl AddAssign for DoubleDouble {
    #[inline]
    fn add_assign(&mut self, rhs: Self) {
        self.0 += rhs.0;
    }
}

impl AddAssign<&DoubleDouble> for DoubleDouble {
    #[inline]
    fn add_assign(&mut self, rhs: &Self) {
        self.0 += rhs.0;
    }
}

impl SubAssign for DoubleDouble {
    #[inline]
    fn sub_assign(&mut self, rhs: Self) {
        self.0 -= rhs.0;
    }
}

impl Real for DoubleDouble {
    #[inline]
    fn zero() -> Self {
        DoubleDouble(TwoFloat::from(0.0))
    }
    #[inline]
    fn from_f64(v: f64) -> Self {
        DoubleDouble(TwoFloat::from(v))
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self.hi() + self.lo()
    }
    fn from_i64(v: i64) -> Self {
        let hi = v as f64;
        let lo = (v as i128 - hi as i128) as f64;
        DoubleDouble(TwoFloat::new_add(hi, lo))
    }
    fn from_bigint(v: &BigInt) -> Self {
        let hi = v.to_f64().unwrap_or(f64::NAN);
        if !hi.is_finite() {
            return DoubleDouble(TwoFloat::from(hi));
        }
        let rest = v - float_to_bigint(hi);
        let lo = rest.to_f64().unwrap_or(0.0);
        DoubleDouble(TwoFloat::new_add(hi, lo))
    }
}

fn float_to_bigint(v: f64) -> BigInt {
    num_traits::FromPrimitive::from_f64(v.trunc()).unwrap_or_default()
}

/// Arithmetic precision of the fast path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Precision {
    #[default]
    Double,
    /// Double-double arithmetic.
    Extended,
}
