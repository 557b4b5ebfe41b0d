use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::scalar::{reduce_turns, squarefree_split, ExtScalar, Phase};

/// Largest absolute direction entry accepted for sphere points; keeps every
/// product of two squared norms inside `u64`.
pub const MAX_DIR_ENTRY: i64 = 1 << 15;

/// A point on circle `part` at angular position `2π·turns + phase`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CirclePoint {
    part: usize,
    turns: BigRational,
    phase: Phase,
}

impl CirclePoint {
    pub fn new(part: usize, turns: BigRational, phase: Phase) -> Self {
        let (phase, quarters) = phase.canonical();
        let turns = reduce_turns(&(turns + crate::scalar::rat(quarters as i64, 4)));
        CirclePoint { part, turns, phase }
    }

    pub fn at_turns(part: usize, turns: BigRational) -> Self {
        Self::new(part, turns, Phase::identity())
    }

    pub fn part(&self) -> usize {
        self.part
    }

    pub fn turns(&self) -> &BigRational {
        &self.turns
    }

    pub fn phase(&self) -> &Phase {
        &self.phase
    }
}

/// A point of the 2-sphere part: the sphere point on the ray through `dir`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SpherePoint {
    part: usize,
    dir: [i64; 3],
    // |dir|² = norm_root² · norm_core with norm_core squarefree
    norm_root: u64,
    norm_core: u64,
}

impl SpherePoint {
    /// Canonicalizes `dir` to coprime integers on the same ray.
    pub fn new(part: usize, dir: [i64; 3]) -> Result<Self> {
        let g = dir.iter().fold(0i64, |g, &x| g.gcd(&x));
        if g == 0 {
            return Err(Error::Domain("sphere direction must be nonzero".into()));
        }
        let dir = dir.map(|x| x / g);
        if dir.iter().any(|x| x.abs() > MAX_DIR_ENTRY) {
            return Err(Error::Domain(format!(
                "sphere direction entries must not exceed {MAX_DIR_ENTRY} after reduction"
            )));
        }
        let norm: u64 = dir.iter().map(|&x| (x * x) as u64).sum();
        let (norm_root, norm_core) = squarefree_split(norm);
        Ok(SpherePoint {
            part,
            dir,
            norm_root,
            norm_core,
        })
    }

    /// Builds a direction from rational coordinates by clearing denominators.
    pub fn from_rational_dir(part: usize, dir: [BigRational; 3]) -> Result<Self> {
        let lcm = dir.iter().fold(BigInt::from(1), |l, x| l.lcm(x.denom()));
        let ints: Vec<BigInt> = dir.iter().map(|x| (x * &lcm).to_integer()).collect();
        let g = ints.iter().fold(BigInt::from(0), |g, x| g.gcd(x));
        if g == BigInt::from(0) {
            return Err(Error::Domain("sphere direction must be nonzero".into()));
        }
        let mut out = [0i64; 3];
        for (o, x) in out.iter_mut().zip(&ints) {
            *o = num_traits::ToPrimitive::to_i64(&(x / &g))
                .ok_or_else(|| Error::Domain("sphere direction entries out of range".into()))?;
        }
        Self::new(part, out)
    }

    pub fn part(&self) -> usize {
        self.part
    }

    pub fn dir(&self) -> [i64; 3] {
        self.dir
    }

    pub fn norm_sq(&self) -> u64 {
        self.norm_root * self.norm_root * self.norm_core
    }

    pub(crate) fn norm_split(&self) -> (u64, u64) {
        (self.norm_root, self.norm_core)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Point {
    Cartesian(Vec<ExtScalar>),
    Circle(CirclePoint),
    Sphere(SpherePoint),
}

impl Point {
    /// Part index for symbolic points.
    pub fn part(&self) -> Option<usize> {
        match self {
            Point::Cartesian(_) => None,
            Point::Circle(c) => Some(c.part),
            Point::Sphere(s) => Some(s.part),
        }
    }

    pub fn is_symbolic(&self) -> bool {
        !matches!(self, Point::Cartesian(_))
    }

    pub fn origin(dim: usize) -> Self {
        Point::Cartesian(vec![ExtScalar::zero(); dim])
    }
}

impl From<CirclePoint> for Point {
    fn from(c: CirclePoint) -> Self {
        Point::Circle(c)
    }
}

impl From<SpherePoint> for Point {
    fn from(s: SpherePoint) -> Self {
        Point::Sphere(s)
    }
}
