//! The real field Q(cos π/10) = Q(√5)(ω) with ω = √(10 + 2√5) = 4·cos 18°.
//!
//! Every cosine and sine of a multiple of 1/20 turn lives here, which is
//! what lets regular pentagons and squares share a circle under a rational
//! rotation without leaving exact arithmetic.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;

use super::ext::{forward_owned, sign_of_sum, ExtScalar};
use crate::error::{Error, Result};

/// `x + y·ω`, `x, y ∈ Q(√5)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Cyclo20 {
    x: ExtScalar,
    y: ExtScalar,
}

/// ω² = 10 + 2√5.
fn omega_sq() -> ExtScalar {
    ExtScalar::from_parts(10, 1, 2, 1)
}

impl Cyclo20 {
    pub fn new(x: ExtScalar, y: ExtScalar) -> Self {
        Cyclo20 { x, y }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        ExtScalar::one().into()
    }

    pub fn omega() -> Self {
        Cyclo20 {
            x: ExtScalar::zero(),
            y: ExtScalar::one(),
        }
    }

    pub fn base(&self) -> &ExtScalar {
        &self.x
    }

    pub fn omega_part(&self) -> &ExtScalar {
        &self.y
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    /// `Some` when the value already lies in Q(√5).
    pub fn as_ext(&self) -> Option<&ExtScalar> {
        self.y.is_zero().then_some(&self.x)
    }

    pub fn signum(&self) -> i8 {
        sign_of_sum(self.x.signum(), self.y.signum(), || {
            self.x.square().cmp(&(self.y.square() * omega_sq()))
        })
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Cyclo20 {
            x: self.x.scale(r),
            y: self.y.scale(r),
        }
    }

    pub fn scale_ext(&self, e: &ExtScalar) -> Self {
        Cyclo20 {
            x: &self.x * e,
            y: &self.y * e,
        }
    }

    pub fn square(&self) -> Self {
        self * self
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        // (x + yω)(x − yω) = x² − y²ω² ∈ Q(√5), nonzero since ω ∉ Q(√5).
        let n = (self.x.square() - self.y.square() * omega_sq()).recip()?;
        Ok(Cyclo20 {
            x: &self.x * &n,
            y: -(&self.y * &n),
        })
    }

    pub fn to_f64(&self) -> f64 {
        let omega = (10.0 + 2.0 * 5f64.sqrt()).sqrt();
        self.x.to_f64() + self.y.to_f64() * omega
    }

    /// Rational coordinates in the basis 1, √5, ω, √5·ω.
    pub fn coordinates(&self) -> [&BigRational; 4] {
        [
            self.x.rational_part(),
            self.x.sqrt5_part(),
            self.y.rational_part(),
            self.y.sqrt5_part(),
        ]
    }
}

impl From<ExtScalar> for Cyclo20 {
    fn from(x: ExtScalar) -> Self {
        Cyclo20 {
            x,
            y: ExtScalar::zero(),
        }
    }
}

impl From<BigRational> for Cyclo20 {
    fn from(r: BigRational) -> Self {
        ExtScalar::from_rational(r).into()
    }
}

impl Ord for Cyclo20 {
    fn cmp(&self, other: &Self) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        (self - other).signum().cmp(&0)
    }
}

impl PartialOrd for Cyclo20 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<'a> Add<&'a Cyclo20> for &'a Cyclo20 {
    type Output = Cyclo20;
    fn add(self, rhs: &Cyclo20) -> Cyclo20 {
        Cyclo20 {
            x: &self.x + &rhs.x,
            y: &self.y + &rhs.y,
        }
    }
}

impl<'a> Sub<&'a Cyclo20> for &'a Cyclo20 {
    type Output = Cyclo20;
    fn sub(self, rhs: &Cyclo20) -> Cyclo20 {
        Cyclo20 {
            x: &self.x - &rhs.x,
            y: &self.y - &rhs.y,
        }
    }
}

impl<'a> Mul<&'a Cyclo20> for &'a Cyclo20 {
    type Output = Cyclo20;
    fn mul(self, rhs: &Cyclo20) -> Cyclo20 {
        if self.y.is_zero() {
            return rhs.scale_ext(&self.x);
        }
        if rhs.y.is_zero() {
            return self.scale_ext(&rhs.x);
        }
        Cyclo20 {
            x: &self.x * &rhs.x + &self.y * &rhs.y * omega_sq(),
            y: &self.x * &rhs.y + &self.y * &rhs.x,
        }
    }
}

impl Neg for &Cyclo20 {
    type Output = Cyclo20;
    fn neg(self) -> Cyclo20 {
        Cyclo20 {
            x: -&self.x,
            y: -&self.y,
        }
    }
}

impl Neg for Cyclo20 {
    type Output = Cyclo20;
    fn neg(self) -> Cyclo20 {
        -&self
    }
}

forward_owned!(Cyclo20, Add add, Sub sub, Mul mul);

impl fmt::Display for Cyclo20 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.y.is_zero() {
            return write!(f, "{}", self.x);
        }
        if self.x.is_zero() {
            write!(f, "({})*w", self.y)
        } else {
            write!(f, "{}+({})*w", self.x, self.y)
        }
    }
}
