//! Configurable-precision real numbers.
//!
//! [`Real`] wraps an MPFR float. Every value carries its own mantissa width;
//! binary operations produce a result at the precision of the left operand,
//! and `f64` operands are converted exactly before the operation. In practice
//! all values taking part in one computation share one precision.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

use crate::error::{Error, Result};

/// Smallest precision accepted anywhere in the crate (IEEE double).
pub const MIN_PRECISION: u32 = 53;

#[derive(Clone, PartialEq)]
pub struct Real(Float);

impl Real {
    pub fn from_f64(prec: u32, v: f64) -> Real {
        Real(Float::with_val(prec, v))
    }

    pub fn from_i64(prec: u32, v: i64) -> Real {
        Real(Float::with_val(prec, v))
    }

    /// `num/den`, rounded once at `prec`.
    pub fn ratio(prec: u32, num: i64, den: i64) -> Real {
        let n = Float::with_val(prec, num);
        Real(Float::with_val(prec, n / den))
    }

    pub fn zero(prec: u32) -> Real {
        Real::from_i64(prec, 0)
    }

    pub fn one(prec: u32) -> Real {
        Real::from_i64(prec, 1)
    }

    pub fn pi(prec: u32) -> Real {
        Real(Float::with_val(prec, Constant::Pi))
    }

    /// Parses a decimal literal directly at `prec` bits, without an `f64` detour.
    pub fn parse(prec: u32, s: &str) -> Result<Real> {
        let parsed = Float::parse(s.trim())
            .map_err(|e| Error::Config(format!("cannot parse {s:?} as a real: {e}")))?;
        Ok(Real(Float::with_val(prec, parsed)))
    }

    /// `2^k` at the given precision.
    pub fn exp2i(prec: u32, k: i32) -> Real {
        let mut f = Float::with_val(prec, 1);
        f <<= k;
        Real(f)
    }

    pub fn prec(&self) -> u32 {
        self.0.prec()
    }

    /// Same value, rounded to a new precision.
    pub fn with_prec(&self, prec: u32) -> Real {
        Real(Float::with_val(prec, &self.0))
    }

    /// A constant at this value's precision.
    pub fn lit(&self, v: f64) -> Real {
        Real::from_f64(self.prec(), v)
    }

    pub fn zero_like(&self) -> Real {
        Real::zero(self.prec())
    }

    pub fn as_float(&self) -> &Float {
        &self.0
    }

    pub fn into_float(self) -> Float {
        self.0
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    pub fn is_finite(&self) -> bool {
        self.0.is_finite()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_sign_negative(&self) -> bool {
        self.0.is_sign_negative()
    }

    pub fn abs(&self) -> Real {
        Real(self.0.clone().abs())
    }

    pub fn sqrt(&self) -> Real {
        Real(Float::with_val(self.prec(), self.0.sqrt_ref()))
    }

    pub fn ln(&self) -> Real {
        Real(Float::with_val(self.prec(), self.0.ln_ref()))
    }

    pub fn exp(&self) -> Real {
        Real(Float::with_val(self.prec(), self.0.exp_ref()))
    }

    pub fn powi(&self, n: i32) -> Real {
        Real(Float::with_val(self.prec(), (&self.0).pow(n)))
    }

    pub fn powf(&self, e: &Real) -> Real {
        Real(Float::with_val(self.prec(), (&self.0).pow(&e.0)))
    }

    /// Multiplies by `2^k` exactly.
    pub fn mul_exp2(&self, k: i32) -> Real {
        let mut f = self.0.clone();
        f <<= k;
        Real(f)
    }

    /// Binary exponent `e` with `self = m·2^e`, `0.5 ≤ |m| < 1`; `None` for zero/non-finite.
    pub fn exponent(&self) -> Option<i32> {
        self.0.get_exp()
    }

    pub fn max(&self, other: &Real) -> Real {
        if self >= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    pub fn min(&self, other: &Real) -> Real {
        if self <= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    /// Nearest integer, ties away from zero.
    pub fn round(&self) -> Real {
        Real(self.0.clone().round())
    }

    /// Decimal string with `digits` significant digits, readable by any float parser.
    pub fn to_string_digits(&self, digits: usize) -> String {
        if self.0.is_zero() {
            return "0".to_string();
        }
        self.0.to_string_radix(10, Some(digits.max(1)))
    }

    /// Decimal string with `prec/3` significant digits (a little under full precision).
    pub fn to_decimal(&self) -> String {
        self.to_string_digits((self.prec() / 3) as usize)
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(p) => f.write_str(&self.to_string_digits(p)),
            None => f.write_str(&self.to_string_digits(17)),
        }
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Real({})", self.to_string_digits(20))
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Real) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

impl PartialEq<f64> for Real {
    fn eq(&self, other: &f64) -> bool {
        self.0 == *other
    }
}

impl PartialOrd<f64> for Real {
    fn partial_cmp(&self, other: &f64) -> Option<Ordering> {
        self.0.partial_cmp(other)
    }
}

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(-self.0)
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(Float::with_val(self.prec(), -&self.0))
    }
}

macro_rules! real_binop {
    ($tr:ident, $m:ident, $atr:ident, $am:ident, $op:tt) => {
        impl $tr<&Real> for &Real {
            type Output = Real;
            fn $m(self, rhs: &Real) -> Real {
                Real(Float::with_val(self.prec(), &self.0 $op &rhs.0))
            }
        }
        impl $tr<Real> for &Real {
            type Output = Real;
            fn $m(self, rhs: Real) -> Real {
                self $op &rhs
            }
        }
        impl $tr<&Real> for Real {
            type Output = Real;
            fn $m(mut self, rhs: &Real) -> Real {
                self.0 = Float::with_val(self.0.prec(), &self.0 $op &rhs.0);
                self
            }
        }
        impl $tr<Real> for Real {
            type Output = Real;
            fn $m(self, rhs: Real) -> Real {
                self $op &rhs
            }
        }
        impl $tr<f64> for &Real {
            type Output = Real;
            fn $m(self, rhs: f64) -> Real {
                self $op &self.lit(rhs)
            }
        }
        impl $tr<f64> for Real {
            type Output = Real;
            fn $m(self, rhs: f64) -> Real {
                let r = self.lit(rhs);
                self $op &r
            }
        }
        impl $tr<&Real> for f64 {
            type Output = Real;
            fn $m(self, rhs: &Real) -> Real {
                &rhs.lit(self) $op rhs
            }
        }
        impl $tr<Real> for f64 {
            type Output = Real;
            fn $m(self, rhs: Real) -> Real {
                &rhs.lit(self) $op &rhs
            }
        }
        impl $atr<&Real> for Real {
            fn $am(&mut self, rhs: &Real) {
                self.0 = Float::with_val(self.0.prec(), &self.0 $op &rhs.0);
            }
        }
        impl $atr<Real> for Real {
            fn $am(&mut self, rhs: Real) {
                *self = std::mem::replace(self, Real(Float::new(MIN_PRECISION))) $op &rhs;
            }
        }
        impl $atr<f64> for Real {
            fn $am(&mut self, rhs: f64) {
                let r = self.lit(rhs);
                *self = std::mem::replace(self, Real(Float::new(MIN_PRECISION))) $op &r;
            }
        }
    };
}

real_binop!(Add, add, AddAssign, add_assign, +);
real_binop!(Sub, sub, SubAssign, sub_assign, -);
real_binop!(Mul, mul, MulAssign, mul_assign, *);
real_binop!(Div, div, DivAssign, div_assign, /);

impl std::iter::Sum for Real {
    /// Panics on an empty iterator: there is no precision to give the zero.
    fn sum<I: Iterator<Item = Real>>(mut iter: I) -> Real {
        let first = iter.next().expect("sum of an empty sequence of reals");
        iter.fold(first, |acc, x| acc + &x)
    }
}
