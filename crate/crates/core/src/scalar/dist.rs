//! Exact squared distances.
//!
//! Squared distances between points of a Lenz configuration are either in
//! Q(cos π/10) (circle chords, cross-part distances) or, for two points on
//! a 2-sphere given by rational directions, of the form `P + Q·√a` with a
//! squarefree integer `a`. [`ExactDist`] covers both and has a decidable
//! total order.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use num_bigint::BigInt;
use num_rational::BigRational;

use super::cyclo::Cyclo20;
use super::ext::{sign_of_sum, ExtScalar};

/// `base + surd·√radicand` with `radicand` squarefree, coprime to 5, and
/// `radicand == 1` exactly when `surd == 0`. Under these rules the
/// representation of a value is unique.
#[derive(Clone, Debug)]
pub struct ExactDist {
    base: Cyclo20,
    surd: Cyclo20,
    radicand: u64,
    // value and absolute error bound of a float evaluation, to settle most
    // comparisons without exact arithmetic
    approx: f64,
    err: f64,
}

// Float value of `c` with a bound on the error: every coordinate and basis
// element is off by a few ulps, so 1e-14 of the sum of magnitudes covers it.
fn float_enclosure(c: &Cyclo20, scale: f64) -> (f64, f64) {
    use num_traits::ToPrimitive;
    let s5 = 5f64.sqrt();
    let omega = (10.0 + 2.0 * s5).sqrt();
    let weights = [1.0, s5, omega, s5 * omega];
    let mut value = 0.0;
    let mut mag = 0.0;
    for (x, w) in c.coordinates().into_iter().zip(weights) {
        let x = x.to_f64().unwrap_or(f64::NAN) * w * scale;
        value += x;
        mag += x.abs();
    }
    if value.is_finite() && mag.is_finite() {
        (value, mag * 1e-14 + 1e-300)
    } else {
        (0.0, f64::INFINITY)
    }
}

/// Splits `n = root² · core` with `core` squarefree.
pub fn squarefree_split(n: u64) -> (u64, u64) {
    assert!(n > 0, "squarefree_split of zero");
    let mut root = 1u64;
    let mut core = 1u64;
    let mut m = n;
    let bound = (n as f64).cbrt() as u64 + 2;
    let mut p = 2u64;
    while p <= bound && p * p <= m {
        if m.is_multiple_of(p) {
            let mut e = 0;
            while m.is_multiple_of(p) {
                m /= p;
                e += 1;
            }
            root *= p.pow(e / 2);
            if e % 2 == 1 {
                core *= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    // Whatever is left has at most two prime factors, both above the bound.
    let r = m.isqrt();
    if r * r == m {
        root *= r;
    } else {
        core *= m;
    }
    (root, core)
}

/// Sign of `p + q·√a`.
fn sign2(p: &Cyclo20, q: &Cyclo20, a: u64) -> i8 {
    sign_of_sum(p.signum(), q.signum(), || {
        p.square()
            .cmp(&q.square().scale(&BigRational::from_integer(a.into())))
    })
}

/// Sign of `p + q·√a + r·√b`.
fn sign3(p: &Cyclo20, q: &Cyclo20, a: u64, r: &Cyclo20, b: u64) -> i8 {
    let sx = sign2(p, q, a);
    sign_of_sum(sx, r.signum(), || {
        // |p + q√a|² − |r√b|² = (p² + q²a − r²b) + 2pq·√a
        let ra = BigRational::from_integer(a.into());
        let rb = BigRational::from_integer(b.into());
        let lead = p.square() + q.square().scale(&ra) - r.square().scale(&rb);
        let cross = (p * q).scale(&BigRational::from_integer(2.into()));
        sign2(&lead, &cross, a).cmp(&0)
    })
}

impl ExactDist {
    pub fn new(base: Cyclo20) -> Self {
        Self::from_parts(base, Cyclo20::zero(), 1)
    }

    fn from_parts(base: Cyclo20, surd: Cyclo20, radicand: u64) -> Self {
        let (v, e) = float_enclosure(&base, 1.0);
        let (approx, err) = if radicand == 1 {
            (v, e)
        } else {
            let (w, f) = float_enclosure(&surd, (radicand as f64).sqrt());
            (v + w, e + f + (v.abs() + w.abs()) * 1e-15)
        };
        ExactDist {
            base,
            surd,
            radicand,
            approx,
            err,
        }
    }

    /// `base + surd·√radicand`, normalized.
    pub fn with_surd(base: Cyclo20, surd: Cyclo20, radicand: u64) -> Self {
        if surd.is_zero() || radicand == 0 {
            return Self::new(base);
        }
        let (root, mut core) = squarefree_split(radicand);
        let mut surd = surd.scale(&BigRational::from_integer(BigInt::from(root)));
        if core % 5 == 0 {
            surd = surd.scale_ext(&ExtScalar::sqrt5());
            core /= 5;
        }
        if core == 1 {
            return Self::new(&base + &surd);
        }
        Self::from_parts(base, surd, core)
    }

    /// Like [`ExactDist::with_surd`] for a radicand already known to be
    /// squarefree, skipping the factorization.
    pub(crate) fn with_squarefree_surd(base: Cyclo20, surd: Cyclo20, radicand: u64) -> Self {
        debug_assert!(radicand > 0);
        let (surd, core) = if radicand.is_multiple_of(5) {
            (surd.scale_ext(&ExtScalar::sqrt5()), radicand / 5)
        } else {
            (surd, radicand)
        };
        if surd.is_zero() {
            Self::new(base)
        } else if core == 1 {
            Self::new(&base + &surd)
        } else {
            Self::from_parts(base, surd, core)
        }
    }

    pub fn base(&self) -> &Cyclo20 {
        &self.base
    }

    pub fn surd(&self) -> &Cyclo20 {
        &self.surd
    }

    pub fn radicand(&self) -> u64 {
        self.radicand
    }

    /// `Some` when the value lies in Q(√5).
    pub fn as_ext(&self) -> Option<&ExtScalar> {
        if self.radicand == 1 {
            self.base.as_ext()
        } else {
            None
        }
    }

    pub fn signum(&self) -> i8 {
        sign2(&self.base, &self.surd, self.radicand)
    }

    pub fn to_f64(&self) -> f64 {
        self.base.to_f64() + self.surd.to_f64() * (self.radicand as f64).sqrt()
    }

    /// Multiplies by a positive or negative element of Q(√5).
    pub fn scale_ext(&self, e: &ExtScalar) -> Self {
        Self::from_parts(
            self.base.scale_ext(e),
            self.surd.scale_ext(e),
            self.radicand,
        )
        .renormalized()
    }

    fn renormalized(self) -> Self {
        if self.surd.is_zero() {
            Self::new(self.base)
        } else {
            self
        }
    }
}

impl PartialEq for ExactDist {
    fn eq(&self, other: &Self) -> bool {
        self.radicand == other.radicand && self.base == other.base && self.surd == other.surd
    }
}

impl Eq for ExactDist {}

impl Hash for ExactDist {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.base.hash(state);
        self.surd.hash(state);
        self.radicand.hash(state);
    }
}

impl Ord for ExactDist {
    fn cmp(&self, other: &Self) -> Ordering {
        let gap = self.approx - other.approx;
        if gap.abs() > self.err + other.err {
            return if gap > 0.0 {
                Ordering::Greater
            } else {
                Ordering::Less
            };
        }
        if self == other {
            return Ordering::Equal;
        }
        let p = &self.base - &other.base;
        let s = if self.radicand == other.radicand {
            sign2(&p, &(&self.surd - &other.surd), self.radicand)
        } else {
            sign3(&p, &self.surd, self.radicand, &-&other.surd, other.radicand)
        };
        s.cmp(&0)
    }
}

impl PartialOrd for ExactDist {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<ExtScalar> for ExactDist {
    fn from(e: ExtScalar) -> Self {
        ExactDist::new(e.into())
    }
}

impl From<Cyclo20> for ExactDist {
    fn from(c: Cyclo20) -> Self {
        ExactDist::new(c)
    }
}

impl fmt::Display for ExactDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.radicand == 1 {
            write!(f, "{}", self.base)
        } else {
            write!(f, "{}+({})*sqrt{}", self.base, self.surd, self.radicand)
        }
    }
}
