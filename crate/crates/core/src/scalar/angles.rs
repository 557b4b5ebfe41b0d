//! Exact trigonometry for the angles the constructions use.
//!
//! An angular position on a circle is `2π·turns + φ` where `φ` is a
//! rotation with rational cosine and sine (a [`Phase`]). The cosine of the
//! separation of two positions is exact whenever the turn difference is a
//! multiple of 1/20, or a multiple of 1/6 with equal phases.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::cyclo::Cyclo20;
use super::ext::{fmt_rational, rat, ExtScalar};
use crate::error::{Error, Result};

/// Reduces a turn count into `[0, 1)`.
pub fn reduce_turns(t: &BigRational) -> BigRational {
    let f = t - t.floor();
    if f.is_negative() {
        f + BigRational::one()
    } else {
        f
    }
}

fn unsupported(turns: &BigRational) -> Error {
    Error::UnsupportedExactAngle {
        turns: fmt_rational(turns),
    }
}

/// Exact `cos(2π·Δ)` for turn counts with denominator in
/// {1, 2, 3, 4, 5, 6, 10}, the turns whose cosine lies in Q(√5).
pub fn cos_turns(delta: &BigRational) -> Result<ExtScalar> {
    let t = reduce_turns(delta);
    let den = t.denom().clone();
    let Some(den) = num_traits::ToPrimitive::to_u64(&den) else {
        return Err(unsupported(delta));
    };
    let num = num_traits::ToPrimitive::to_u64(t.numer()).unwrap_or(0);
    // Fold into [0, 1/2] by symmetry.
    let k = num.min(den - num);
    let value = match (k, den) {
        (0, 1) => ExtScalar::one(),
        (1, 2) => ExtScalar::from_int(-1),
        (1, 3) => ExtScalar::ratio(-1, 2),
        (1, 4) => ExtScalar::zero(),
        (1, 6) => ExtScalar::ratio(1, 2),
        (1, 5) => ExtScalar::from_parts(-1, 4, 1, 4),
        (2, 5) => ExtScalar::from_parts(-1, 4, -1, 4),
        (1, 10) => ExtScalar::from_parts(1, 4, 1, 4),
        (3, 10) => ExtScalar::from_parts(1, 4, -1, 4),
        _ => return Err(unsupported(delta)),
    };
    Ok(value)
}

/// Exact squared chord `2ρ(1 − cos 2πΔ)` on a circle of squared radius `ρ`.
pub fn chord_sq(rho_sq: &ExtScalar, delta: &BigRational) -> Result<ExtScalar> {
    let c = cos_turns(delta)?;
    Ok((rho_sq * &(ExtScalar::one() - c)).scale(&rat(2, 1)))
}

/// `(cos, sin)` of `2πk/20` for `k = 0..20`, built from powers of the
/// 1/20-turn rotation.
fn twentieths() -> &'static [(Cyclo20, Cyclo20)] {
    static TABLE: OnceLock<Vec<(Cyclo20, Cyclo20)>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let c18 = Cyclo20::new(ExtScalar::zero(), ExtScalar::ratio(1, 4));
        let s18 = Cyclo20::from(ExtScalar::from_parts(-1, 4, 1, 4));
        let mut out = Vec::with_capacity(20);
        let (mut c, mut s) = (Cyclo20::one(), Cyclo20::zero());
        for _ in 0..20 {
            out.push((c.clone(), s.clone()));
            let nc = &c * &c18 - &s * &s18;
            let ns = &s * &c18 + &c * &s18;
            c = nc;
            s = ns;
        }
        out
    })
}

/// Exact `(cos, sin)` of `2π·t` when `20·t` is an integer.
pub fn cis_twentieth(t: &BigRational) -> Option<(Cyclo20, Cyclo20)> {
    let scaled = reduce_turns(t) * BigRational::from_integer(20.into());
    if !scaled.is_integer() {
        return None;
    }
    let k: usize = num_traits::ToPrimitive::to_usize(&scaled.to_integer())?;
    Some(twentieths()[k % 20].clone())
}

/// A rotation with rational cosine and sine.
///
/// Canonical phases lie in the quarter-open first quadrant (`c > 0`,
/// `s ≥ 0`); quarter turns are carried by the turn count instead.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Phase {
    c: BigRational,
    s: BigRational,
}

impl Default for Phase {
    fn default() -> Self {
        Phase::identity()
    }
}

impl Phase {
    pub fn identity() -> Self {
        Phase {
            c: BigRational::one(),
            s: BigRational::zero(),
        }
    }

    /// Checked constructor; requires `c² + s² = 1`.
    pub fn new(c: BigRational, s: BigRational) -> Result<Self> {
        if &c * &c + &s * &s != BigRational::one() {
            return Err(Error::Domain(format!(
                "phase ({}, {}) is not on the unit circle",
                fmt_rational(&c),
                fmt_rational(&s)
            )));
        }
        Ok(Phase { c, s })
    }

    /// The rotation by `2·atan(t)`: `((1 − t²)/(1 + t²), 2t/(1 + t²))`.
    pub fn from_half_tangent(t: &BigRational) -> Self {
        let t2 = t * t;
        let den = BigRational::one() + &t2;
        Phase {
            c: (BigRational::one() - t2) / &den,
            s: (t * BigRational::from_integer(2.into())) / den,
        }
    }

    pub fn cos(&self) -> &BigRational {
        &self.c
    }

    pub fn sin(&self) -> &BigRational {
        &self.s
    }

    pub fn is_identity(&self) -> bool {
        self.s.is_zero() && self.c.is_positive()
    }

    /// Rotation by `self − other`.
    pub fn minus(&self, other: &Phase) -> Phase {
        Phase {
            c: &self.c * &other.c + &self.s * &other.s,
            s: &self.s * &other.c - &self.c * &other.s,
        }
    }

    /// Splits into a canonical phase and the number of quarter turns
    /// removed from it.
    pub fn canonical(&self) -> (Phase, u8) {
        let mut p = self.clone();
        let mut quarters = 0u8;
        while !(p.c.is_positive() && !p.s.is_negative()) {
            // rotate by −90°
            p = Phase {
                c: p.s.clone(),
                s: -p.c,
            };
            quarters += 1;
        }
        (p, quarters % 4)
    }

    pub fn to_f64(&self) -> (f64, f64) {
        use num_traits::ToPrimitive;
        (
            self.c.to_f64().unwrap_or(f64::NAN),
            self.s.to_f64().unwrap_or(f64::NAN),
        )
    }

    /// Least common denominator of cosine and sine.
    pub fn denominator(&self) -> BigInt {
        self.c.denom().lcm(self.s.denom())
    }
}

/// Exact cosine of the angle between positions `2π·dt + φ` and `0`.
pub fn cos_separation(dt: &BigRational, phase: &Phase) -> Result<Cyclo20> {
    if phase.s.is_zero() {
        let dt = if phase.c.is_negative() {
            dt + rat(1, 2)
        } else {
            dt.clone()
        };
        if let Some((c, _)) = cis_twentieth(&dt) {
            return Ok(c);
        }
        return cos_turns(&dt).map(Cyclo20::from);
    }
    let (c, s) = cis_twentieth(dt).ok_or_else(|| unsupported(dt))?;
    Ok(c.scale(&phase.c) - s.scale(&phase.s))
}
