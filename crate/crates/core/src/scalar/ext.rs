//! Exact arithmetic in the quadratic field Q(√5).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// `a + b·√5` with rational `a`, `b`.
///
/// Both coordinates are kept reduced with a positive denominator, so the
/// derived `Eq` and `Hash` agree with equality of the real values.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct ExtScalar {
    a: BigRational,
    b: BigRational,
}

/// Sign of `x + y` given the signs of `x` and `y` and a comparison of
/// `|x|` against `|y|` that is only evaluated when the signs disagree.
pub(crate) fn sign_of_sum(sx: i8, sy: i8, magnitude: impl FnOnce() -> Ordering) -> i8 {
    if sy == 0 || sx == sy {
        return sx;
    }
    if sx == 0 {
        return sy;
    }
    match magnitude() {
        Ordering::Greater => sx,
        Ordering::Less => sy,
        Ordering::Equal => 0,
    }
}

pub(crate) fn rat_sign(r: &BigRational) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

pub(crate) fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub(crate) fn fmt_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub(crate) fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

impl ExtScalar {
    pub fn new(a: BigRational, b: BigRational) -> Self {
        ExtScalar { a, b }
    }

    pub fn from_rational(a: BigRational) -> Self {
        ExtScalar {
            a,
            b: BigRational::zero(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(n.into()))
    }

    /// `n/d + (sn/sd)·√5`
    pub fn from_parts(n: i64, d: i64, sn: i64, sd: i64) -> Self {
        ExtScalar {
            a: rat(n, d),
            b: rat(sn, sd),
        }
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Self::from_rational(rat(n, d))
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn sqrt5() -> Self {
        ExtScalar {
            a: BigRational::zero(),
            b: BigRational::one(),
        }
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    pub fn sqrt5_part(&self) -> &BigRational {
        &self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// Exact sign: -1, 0 or 1.
    pub fn signum(&self) -> i8 {
        sign_of_sum(rat_sign(&self.a), rat_sign(&self.b), || {
            (&self.a * &self.a).cmp(&(&self.b * &self.b * BigRational::from_integer(5.into())))
        })
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    /// Galois conjugate `a − b·√5`.
    pub fn conjugate(&self) -> Self {
        ExtScalar {
            a: self.a.clone(),
            b: -&self.b,
        }
    }

    /// Field norm `a² − 5b²`.
    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - &self.b * &self.b * BigRational::from_integer(5.into())
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        ExtScalar {
            a: &self.a * r,
            b: &self.b * r,
        }
    }

    pub fn square(&self) -> Self {
        self * self
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.norm();
        Ok(ExtScalar {
            a: &self.a / &n,
            b: -(&self.b / &n),
        })
    }

    pub fn checked_div(&self, rhs: &ExtScalar) -> Result<Self> {
        Ok(self * &rhs.recip()?)
    }

    pub fn to_f64(&self) -> f64 {
        self.a.to_f64().unwrap_or(f64::NAN) + self.b.to_f64().unwrap_or(f64::NAN) * 5f64.sqrt()
    }
}

impl Ord for ExtScalar {
    fn cmp(&self, other: &Self) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        (self - other).signum().cmp(&0)
    }
}

impl PartialOrd for ExtScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<'a> Add<&'a ExtScalar> for &'a ExtScalar {
    type Output = ExtScalar;
    fn add(self, rhs: &ExtScalar) -> ExtScalar {
        ExtScalar {
            a: &self.a + &rhs.a,
            b: &self.b + &rhs.b,
        }
    }
}

impl<'a> Sub<&'a ExtScalar> for &'a ExtScalar {
    type Output = ExtScalar;
    fn sub(self, rhs: &ExtScalar) -> ExtScalar {
        ExtScalar {
            a: &self.a - &rhs.a,
            b: &self.b - &rhs.b,
        }
    }
}

impl<'a> Mul<&'a ExtScalar> for &'a ExtScalar {
    type Output = ExtScalar;
    fn mul(self, rhs: &ExtScalar) -> ExtScalar {
        if self.b.is_zero() && rhs.b.is_zero() {
            return ExtScalar::from_rational(&self.a * &rhs.a);
        }
        let five = BigRational::from_integer(5.into());
        ExtScalar {
            a: &self.a * &rhs.a + &self.b * &rhs.b * five,
            b: &self.a * &rhs.b + &self.b * &rhs.a,
        }
    }
}

impl Neg for &ExtScalar {
    type Output = ExtScalar;
    fn neg(self) -> ExtScalar {
        ExtScalar {
            a: -&self.a,
            b: -&self.b,
        }
    }
}

impl Neg for ExtScalar {
    type Output = ExtScalar;
    fn neg(self) -> ExtScalar {
        -&self
    }
}

macro_rules! forward_owned {
    ($ty:ty, $($tr:ident $m:ident),*) => {$(
        impl $tr<$ty> for $ty {
            type Output = $ty;
            fn $m(self, rhs: $ty) -> $ty { (&self).$m(&rhs) }
        }
        impl<'a> $tr<&'a $ty> for $ty {
            type Output = $ty;
            fn $m(self, rhs: &$ty) -> $ty { (&self).$m(rhs) }
        }
        impl<'a> $tr<$ty> for &'a $ty {
            type Output = $ty;
            fn $m(self, rhs: $ty) -> $ty { self.$m(&rhs) }
        }
    )*};
}
pub(crate) use forward_owned;

forward_owned!(ExtScalar, Add add, Sub sub, Mul mul);

impl From<BigRational> for ExtScalar {
    fn from(a: BigRational) -> Self {
        ExtScalar::from_rational(a)
    }
}

impl From<i64> for ExtScalar {
    fn from(n: i64) -> Self {
        ExtScalar::from_int(n)
    }
}

/// Canonical text form: `a`, `a/b`, `c/d*sqrt5`, `a/b+c/d*sqrt5`.
impl fmt::Display for ExtScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return f.write_str(&fmt_rational(&self.a));
        }
        let coef = self.b.abs();
        let surd = if coef.is_one() {
            "sqrt5".to_string()
        } else {
            format!("{}*sqrt5", fmt_rational(&coef))
        };
        if self.a.is_zero() {
            if self.b.is_negative() {
                write!(f, "-{surd}")
            } else {
                f.write_str(&surd)
            }
        } else {
            let op = if self.b.is_negative() { '-' } else { '+' };
            write!(f, "{}{op}{surd}", fmt_rational(&self.a))
        }
    }
}

impl FromStr for ExtScalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let Some(head) = s.strip_suffix("sqrt5") else {
            return Ok(ExtScalar::from_rational(parse_rational(&s)?));
        };
        let head = head.strip_suffix('*').unwrap_or(head);
        // The surd coefficient starts at the last sign that is not leading.
        let split = head
            .char_indices()
            .filter(|&(i, c)| i > 0 && (c == '+' || c == '-'))
            .map(|(i, _)| i)
            .next_back();
        let (a, b) = match split {
            Some(i) => (parse_rational(&head[..i])?, &head[i..]),
            None => (BigRational::zero(), head),
        };
        let b = match b {
            "" | "+" => BigRational::one(),
            "-" => -BigRational::one(),
            other => parse_rational(other.strip_prefix('+').unwrap_or(other))?,
        };
        Ok(ExtScalar { a, b })
    }
}
