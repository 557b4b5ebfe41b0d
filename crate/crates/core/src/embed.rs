//! Numeric embeddings of exact point sets.
//!
//! Part `i` of the attached Lenz system is placed on its coordinate axes
//! (see [`LenzSystem::axes`]) around the origin.

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_bigint::BigInt;
use num_rational::BigRational;

use crate::geometry::{CirclePoint, LenzSystem, Point, PointSet, SpherePoint};
use crate::scalar::{Cyclo20, ExactDist, ExtScalar};

const RM: RoundingMode = RoundingMode::ToEven;

/// Big-float evaluator for exact values at a fixed binary precision.
pub struct BigEval {
    p: usize,
    cc: Consts,
}

impl BigEval {
    pub fn new(bits: usize) -> Self {
        BigEval {
            p: bits,
            cc: Consts::new().expect("constant cache"),
        }
    }

    pub fn precision(&self) -> usize {
        self.p
    }

    pub fn int(&mut self, n: &BigInt) -> BigFloat {
        BigFloat::parse(&n.to_string(), Radix::Dec, self.p, RM, &mut self.cc)
    }

    pub fn rational(&mut self, r: &BigRational) -> BigFloat {
        let n = self.int(r.numer());
        let d = self.int(r.denom());
        n.div(&d, self.p, RM)
    }

    pub fn sqrt(&self, x: &BigFloat) -> BigFloat {
        x.sqrt(self.p, RM)
    }

    pub fn sqrt5(&mut self) -> BigFloat {
        self.sqrt(&BigFloat::from_u64(5, self.p))
    }

    pub fn ext(&mut self, x: &ExtScalar) -> BigFloat {
        let a = self.rational(x.rational_part());
        let b = self.rational(x.sqrt5_part());
        let s5 = self.sqrt5();
        a.add(&b.mul(&s5, self.p, RM), self.p, RM)
    }

    /// `x + y·ω` with `ω = √(10 + 2√5)`.
    pub fn cyclo(&mut self, x: &Cyclo20) -> BigFloat {
        let base = self.ext(x.base());
        let w = self.ext(x.omega_part());
        let s5 = self.sqrt5();
        let ten = BigFloat::from_u64(10, self.p);
        let omega = self.sqrt(&ten.add(&s5.add(&s5, self.p, RM), self.p, RM));
        base.add(&w.mul(&omega, self.p, RM), self.p, RM)
    }

    pub fn dist(&mut self, d: &ExactDist) -> BigFloat {
        let base = self.cyclo(d.base());
        let surd = self.cyclo(d.surd());
        let root = self.sqrt(&BigFloat::from_u64(d.radicand(), self.p));
        base.add(&surd.mul(&root, self.p, RM), self.p, RM)
    }

    /// `(cos 2πt, sin 2πt)`.
    pub fn cis_turns(&mut self, t: &BigRational) -> (BigFloat, BigFloat) {
        let pi = self.cc.pi(self.p, RM);
        let two_pi = pi.add(&pi, self.p, RM);
        let t = self.rational(t);
        let theta = two_pi.mul(&t, self.p, RM);
        (
            theta.cos(self.p, RM, &mut self.cc),
            theta.sin(self.p, RM, &mut self.cc),
        )
    }

    pub fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, self.p, RM)
    }

    pub fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, self.p, RM)
    }

    pub fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, self.p, RM)
    }

    pub fn to_f64(&mut self, x: &BigFloat) -> f64 {
        big_to_f64(x, &mut self.cc)
    }
}

pub(crate) fn big_to_f64(x: &BigFloat, cc: &mut Consts) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    x.format(Radix::Dec, RM, cc)
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(f64::NAN)
}

/// Points in R^d with `f64` coordinates.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct NumericPointSet {
    pub dim: usize,
    pub coords: Vec<Vec<f64>>,
}

impl NumericPointSet {
    pub fn new(dim: usize, coords: Vec<Vec<f64>>) -> Self {
        debug_assert!(coords.iter().all(|c| c.len() == dim));
        NumericPointSet { dim, coords }
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn dist_sq(&self, i: usize, j: usize) -> f64 {
        self.coords[i]
            .iter()
            .zip(&self.coords[j])
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }
}

/// Points in R^d with big-float coordinates at a common precision.
#[derive(Clone, Debug)]
pub struct BigPointSet {
    pub dim: usize,
    pub precision: usize,
    pub coords: Vec<Vec<BigFloat>>,
}

impl BigPointSet {
    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn dist_sq(&self, i: usize, j: usize) -> BigFloat {
        let p = self.precision;
        let mut acc = BigFloat::from_u64(0, p);
        for (a, b) in self.coords[i].iter().zip(&self.coords[j]) {
            let d = a.sub(b, p, RM);
            acc = acc.add(&d.mul(&d, p, RM), p, RM);
        }
        acc
    }
}

fn system_of(s: &PointSet) -> &LenzSystem {
    s.system().expect("symbolic point without a system")
}

/// Embeds `s` with big-float coordinates of `bits` binary digits.
pub fn embed_numeric(s: &PointSet, bits: usize) -> BigPointSet {
    let mut ev = BigEval::new(bits + 16);
    let zero = BigFloat::from_u64(0, bits);
    let coords = s
        .points()
        .iter()
        .map(|pt| match pt {
            Point::Cartesian(c) => c.iter().map(|x| ev.ext(x)).collect(),
            Point::Circle(cp) => {
                let sys = system_of(s);
                let mut v = vec![zero.clone(); s.dim()];
                let (x, y) = big_circle(&mut ev, sys, cp);
                let ax = sys.axes(cp.part()).start;
                v[ax] = x;
                v[ax + 1] = y;
                v
            }
            Point::Sphere(sp) => {
                let sys = system_of(s);
                let mut v = vec![zero.clone(); s.dim()];
                let r = ev.ext(sys.radius_sq(sp.part()));
                let r = ev.sqrt(&r);
                let norm = ev.sqrt(&BigFloat::from_u64(sp.norm_sq(), ev.p));
                let scale = r.div(&norm, ev.p, RM);
                for (k, ax) in sys.axes(sp.part()).enumerate() {
                    v[ax] = ev.mul(&BigFloat::from_i64(sp.dir()[k], ev.p), &scale);
                }
                v
            }
        })
        .map(|v: Vec<BigFloat>| {
            v.into_iter()
                .map(|mut x| {
                    x.set_precision(bits, RM).ok();
                    x
                })
                .collect()
        })
        .collect();
    BigPointSet {
        dim: s.dim(),
        precision: bits,
        coords,
    }
}

fn big_circle(ev: &mut BigEval, sys: &LenzSystem, cp: &CirclePoint) -> (BigFloat, BigFloat) {
    let r = ev.ext(sys.radius_sq(cp.part()));
    let r = ev.sqrt(&r);
    let (ct, st) = ev.cis_turns(cp.turns());
    let pc = ev.rational(cp.phase().cos());
    let ps = ev.rational(cp.phase().sin());
    let c = ev.sub(&ev.mul(&ct, &pc), &ev.mul(&st, &ps));
    let s = ev.add(&ev.mul(&st, &pc), &ev.mul(&ct, &ps));
    (ev.mul(&r, &c), ev.mul(&r, &s))
}

/// Embeds `s` with `f64` coordinates.
pub fn embed_f64(s: &PointSet) -> NumericPointSet {
    let coords = s
        .points()
        .iter()
        .map(|pt| {
            let mut v = vec![0.0; s.dim()];
            match pt {
                Point::Cartesian(c) => {
                    for (o, x) in v.iter_mut().zip(c) {
                        *o = x.to_f64();
                    }
                }
                Point::Circle(cp) => {
                    let sys = system_of(s);
                    let (x, y) = f64_circle(sys, cp);
                    let ax = sys.axes(cp.part()).start;
                    v[ax] = x;
                    v[ax + 1] = y;
                }
                Point::Sphere(sp) => {
                    let sys = system_of(s);
                    f64_sphere(sys, sp, &mut v);
                }
            }
            v
        })
        .collect();
    NumericPointSet::new(s.dim(), coords)
}

fn f64_circle(sys: &LenzSystem, cp: &CirclePoint) -> (f64, f64) {
    use num_traits::ToPrimitive;
    let r = sys.radius_sq(cp.part()).to_f64().sqrt();
    let t = cp.turns().to_f64().unwrap_or(0.0);
    let (pc, ps) = cp.phase().to_f64();
    let theta = std::f64::consts::TAU * t + ps.atan2(pc);
    (r * theta.cos(), r * theta.sin())
}

fn f64_sphere(sys: &LenzSystem, sp: &SpherePoint, v: &mut [f64]) {
    let r = sys.radius_sq(sp.part()).to_f64().sqrt();
    let scale = r / (sp.norm_sq() as f64).sqrt();
    for (k, ax) in sys.axes(sp.part()).enumerate() {
        v[ax] = sp.dir()[k] as f64 * scale;
    }
}
