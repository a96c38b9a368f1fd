//! Exact scalar coefficients: the field Q(√2).
//!
//! Every scalar is `a + b·√2` with `a`, `b` exact rationals. The field is
//! closed under the four arithmetic operations (√2·√2 = 2, and the inverse of
//! a nonzero element exists because √2 is irrational, so a² − 2b² ≠ 0 for
//! rational a, b not both zero).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// An exact element `a + b·√2` of Q(√2).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct Rt2 {
    /// Rational part.
    pub a: BigRational,
    /// Coefficient of √2.
    pub b: BigRational,
}

impl Rt2 {
    pub fn zero() -> Self {
        Rt2 {
            a: BigRational::zero(),
            b: BigRational::zero(),
        }
    }

    pub fn one() -> Self {
        Rt2 {
            a: BigRational::one(),
            b: BigRational::zero(),
        }
    }

    pub fn sqrt2() -> Self {
        Rt2 {
            a: BigRational::zero(),
            b: BigRational::one(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Rt2 {
            a: BigRational::from_integer(BigInt::from(n)),
            b: BigRational::zero(),
        }
    }

    pub fn from_ratio(p: i64, q: i64) -> Self {
        assert!(q != 0, "zero denominator in rational constant");
        Rt2 {
            a: BigRational::new(BigInt::from(p), BigInt::from(q)),
            b: BigRational::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.a.is_one() && self.b.is_zero()
    }

    /// The purely rational value, if the √2 part vanishes.
    pub fn as_rational(&self) -> Option<&BigRational> {
        if self.b.is_zero() {
            Some(&self.a)
        } else {
            None
        }
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inverse(&self) -> Rt2 {
        assert!(!self.is_zero(), "inverse of zero coefficient");
        // 1/(a + b√2) = (a − b√2)/(a² − 2b²)
        let two = BigRational::from_integer(BigInt::from(2));
        let norm = &self.a * &self.a - two * &self.b * &self.b;
        debug_assert!(!norm.is_zero());
        Rt2 {
            a: &self.a / &norm,
            b: -(&self.b / &norm),
        }
    }

    pub fn to_f64(&self) -> f64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        a + b * std::f64::consts::SQRT_2
    }

    /// True when the value is negative (used only to pick display signs; the
    /// ordering of mixed elements follows the numeric value).
    pub fn is_negative_value(&self) -> bool {
        self.to_f64() < 0.0
    }
}

impl Add for &Rt2 {
    type Output = Rt2;
    fn add(self, rhs: &Rt2) -> Rt2 {
        Rt2 {
            a: &self.a + &rhs.a,
            b: &self.b + &rhs.b,
        }
    }
}

impl Sub for &Rt2 {
    type Output = Rt2;
    fn sub(self, rhs: &Rt2) -> Rt2 {
        Rt2 {
            a: &self.a - &rhs.a,
            b: &self.b - &rhs.b,
        }
    }
}

impl Mul for &Rt2 {
    type Output = Rt2;
    fn mul(self, rhs: &Rt2) -> Rt2 {
        // (a + b√2)(c + d√2) = ac + 2bd + (ad + bc)√2
        let two = BigRational::from_integer(BigInt::from(2));
        Rt2 {
            a: &self.a * &rhs.a + two * &self.b * &rhs.b,
            b: &self.a * &rhs.b + &self.b * &rhs.a,
        }
    }
}

impl Div for &Rt2 {
    type Output = Rt2;
    fn div(self, rhs: &Rt2) -> Rt2 {
        self * &rhs.inverse()
    }
}

impl Neg for &Rt2 {
    type Output = Rt2;
    fn neg(self) -> Rt2 {
        Rt2 {
            a: -&self.a,
            b: -&self.b,
        }
    }
}

fn fmt_rational(r: &BigRational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if r.denom().is_one() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

/// Renders `b·√2` with `b` positive.
fn fmt_sqrt2_part(b: &BigRational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if b.numer().is_one() && b.denom().is_one() {
        write!(f, "sqrt(2)")
    } else if b.numer().is_one() {
        write!(f, "sqrt(2)/{}", b.denom())
    } else if b.denom().is_one() {
        write!(f, "{}*sqrt(2)", b.numer())
    } else {
        write!(f, "{}*sqrt(2)/{}", b.numer(), b.denom())
    }
}

impl fmt::Display for Rt2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a.is_zero(), self.b.is_zero()) {
            (true, true) => write!(f, "0"),
            (false, true) => fmt_rational(&self.a, f),
            (true, false) => {
                if self.b.is_negative() {
                    write!(f, "-")?;
                    fmt_sqrt2_part(&-&self.b, f)
                } else {
                    fmt_sqrt2_part(&self.b, f)
                }
            }
            (false, false) => {
                write!(f, "(")?;
                fmt_rational(&self.a, f)?;
                if self.b.is_negative() {
                    write!(f, " - ")?;
                    fmt_sqrt2_part(&-&self.b, f)?;
                } else {
                    write!(f, " + ")?;
                    fmt_sqrt2_part(&self.b, f)?;
                }
                write!(f, ")")
            }
        }
    }
}
