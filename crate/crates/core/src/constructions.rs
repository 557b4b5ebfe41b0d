//! Lenz configurations: balanced squares, pentagons, the exceptional
//! centre-point family, arcs, and the growth augmentation.
//!
//! Positions inside a circle come from a fixed slot sequence. Slot `s` is
//! corner `s mod 4` of square `s / 4`; square `q` is rotated by the rational
//! phase `2·atan(t_q)` where `t_0 = 0` and `t_1, t_2, …` run through the
//! reduced fractions of `(0, 1)` by denominator. Two distinct phases differ
//! by less than a quarter turn and by an angle with rational cosine, so no
//! two slots of different squares are a quarter or a fifth of a turn apart.

use std::collections::HashSet;
use std::ops::RangeInclusive;

use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use rand::Rng;

use crate::closed_forms::{CheckRow, Family, GrowthReport};
use crate::digraph::DistanceAssignment;
use crate::embed::BigEval;
use crate::error::{Error, Result};
use crate::geometry::{sphere_chord, CirclePoint, LenzSystem, Point, PointSet, SpherePoint};
use crate::metric::Metric;
use crate::scalar::{rat, ExactDist, ExtScalar, Phase};

/// Points on the parts of a Lenz system, listed part by part.
#[derive(Clone, Debug, PartialEq)]
pub struct LenzConfiguration {
    system: LenzSystem,
    parts: Vec<Vec<Point>>,
}

impl LenzConfiguration {
    pub fn new(system: LenzSystem, parts: Vec<Vec<Point>>) -> Result<Self> {
        if parts.len() != system.parts() {
            return Err(Error::InvalidPointSet(format!(
                "{} point lists for {} parts",
                parts.len(),
                system.parts()
            )));
        }
        for (i, list) in parts.iter().enumerate() {
            for pt in list {
                let ok =
                    pt.part() == Some(i) && matches!(pt, Point::Sphere(_)) == system.is_sphere(i);
                if !ok {
                    return Err(Error::InvalidPointSet(format!(
                        "point {pt:?} does not belong to part {i}"
                    )));
                }
            }
        }
        let cfg = LenzConfiguration { system, parts };
        // duplicate check
        PointSet::new(cfg.system.dim(), Some(cfg.system.clone()), cfg.points())?;
        Ok(cfg)
    }

    pub fn system(&self) -> &LenzSystem {
        &self.system
    }

    pub fn parts(&self) -> &[Vec<Point>] {
        &self.parts
    }

    pub fn part_sizes(&self) -> Vec<usize> {
        self.parts.iter().map(Vec::len).collect()
    }

    pub fn len(&self) -> usize {
        self.parts.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn points(&self) -> Vec<Point> {
        self.parts.iter().flatten().cloned().collect()
    }

    pub fn point_set(&self) -> PointSet {
        PointSet::new(self.system.dim(), Some(self.system.clone()), self.points())
            .expect("validated on construction")
    }

    /// Indices (into [`LenzConfiguration::point_set`]) of the nonempty parts.
    pub fn associated_partition(&self) -> Vec<Vec<usize>> {
        let mut start = 0;
        let mut out = Vec::new();
        for list in &self.parts {
            if !list.is_empty() {
                out.push((start..start + list.len()).collect());
            }
            start += list.len();
        }
        out
    }
}

pub fn lenz_system(d: usize, lambda_sq: ExtScalar, radii_sq: Vec<ExtScalar>) -> Result<LenzSystem> {
    LenzSystem::new(d, lambda_sq, radii_sq)
}

/// `q`-th reduced fraction of `(0, 1)` ordered by denominator, then
/// numerator; `None` for `q = 0`.
fn farey(q: usize) -> Option<BigRational> {
    if q == 0 {
        return None;
    }
    let mut left = q;
    for b in 2i64.. {
        for a in 1..b {
            if a.gcd(&b) == 1 {
                left -= 1;
                if left == 0 {
                    return Some(rat(a, b));
                }
            }
        }
    }
    unreachable!()
}

/// Rotation of square (or pentagon) number `q` in the slot sequence.
pub fn block_phase(q: usize) -> Phase {
    farey(q).map_or_else(Phase::identity, |t| Phase::from_half_tangent(&t))
}

/// Slot `s` of a circle part.
pub fn circle_slot(part: usize, s: usize) -> CirclePoint {
    CirclePoint::new(part, rat((s % 4) as i64, 4), block_phase(s / 4))
}

/// Slot `s` of the sphere part: the circle slot on the great circle of the
/// first two sphere axes.
pub fn sphere_slot(part: usize, s: usize) -> Result<SpherePoint> {
    let ph = block_phase(s / 4);
    let (c, sn) = (ph.cos().clone(), ph.sin().clone());
    let (x, y) = match s % 4 {
        0 => (c, sn),
        1 => (-sn, c),
        2 => (-c, -sn),
        _ => (sn, -c),
    };
    SpherePoint::from_rational_dir(part, [x, y, rat(0, 1)])
        .map_err(|_| Error::PlacementExhausted(format!("sphere slot {s} is out of range")))
}

fn slot_point(sys: &LenzSystem, part: usize, s: usize) -> Result<Point> {
    if sys.is_sphere(part) {
        sphere_slot(part, s).map(Point::from)
    } else {
        Ok(circle_slot(part, s).into())
    }
}

fn balanced_sizes(n: usize, p: usize) -> Vec<usize> {
    (0..p).map(|i| n / p + usize::from(i < n % p)).collect()
}

/// Inscribed unit squares on equal circles of squared radius 1/2 (the
/// sphere uses a great circle), parts as equal as possible.
pub fn balanced_squares_config(d: usize, n: usize) -> Result<LenzConfiguration> {
    let sys = LenzSystem::equal_radii(d, ExtScalar::one())?;
    let p = sys.parts();
    if n < p {
        return Err(Error::Domain(format!("need at least {p} points, got {n}")));
    }
    let parts = balanced_sizes(n, p)
        .into_iter()
        .enumerate()
        .map(|(i, m)| (0..m).map(|s| slot_point(&sys, i, s)).collect())
        .collect::<Result<_>>()?;
    LenzConfiguration::new(sys, parts)
}

/// Regular pentagons on a circle of squared radius `(5+√5)/10` and
/// pentagrams on one of squared radius `(5−√5)/10`, `n/10` of each.
pub fn pentagon_config(n: usize) -> Result<LenzConfiguration> {
    if n == 0 || !n.is_multiple_of(10) {
        return Err(Error::Domain(format!(
            "n must be a positive multiple of 10, got {n}"
        )));
    }
    let sys = LenzSystem::new(
        4,
        ExtScalar::one(),
        vec![
            ExtScalar::from_parts(1, 2, 1, 10),
            ExtScalar::from_parts(1, 2, -1, 10),
        ],
    )?;
    let parts = (0..2)
        .map(|part| {
            (0..n / 2)
                .map(|s| CirclePoint::new(part, rat((s % 5) as i64, 5), block_phase(s / 5)).into())
                .collect()
        })
        .collect();
    LenzConfiguration::new(sys, parts)
}

/// The d = 4 family with `8 | n−1`: unit squares on two circles of squared
/// radius 1/2 plus their common centre, with `r ≡ 1` except `r(centre)² = 1/2`.
#[derive(Clone, Debug)]
pub struct ExceptionalConfig {
    pub config: LenzConfiguration,
    /// The Lenz points followed by the centre.
    pub points: PointSet,
    pub centre: usize,
    pub assignment: DistanceAssignment<ExactDist>,
}

pub fn exceptional_config(n: usize) -> Result<ExceptionalConfig> {
    if n < 9 || !(n - 1).is_multiple_of(8) {
        return Err(Error::Domain(format!(
            "n-1 must be divisible by 8 and n >= 9, got n = {n}"
        )));
    }
    let config = balanced_squares_config(4, n - 1)?;
    let mut pts = config.points();
    pts.push(Point::origin(4));
    let points = PointSet::new(4, Some(config.system().clone()), pts)?;
    let one: ExactDist = ExtScalar::one().into();
    let mut values = vec![one; n];
    values[n - 1] = ExtScalar::ratio(1, 2).into();
    Ok(ExceptionalConfig {
        config,
        points,
        centre: n - 1,
        assignment: DistanceAssignment::exact(values)?,
    })
}

/// Balanced parts confined to arcs (a cap on the sphere) of angular width at
/// most `spread` turns, so that the diameter is the cross-part distance.
pub fn arc_config(d: usize, n: usize, spread: &BigRational) -> Result<LenzConfiguration> {
    let sys = LenzSystem::equal_radii(d, ExtScalar::one())?;
    let p = sys.parts();
    if n < p {
        return Err(Error::Domain(format!("need at least {p} points, got {n}")));
    }
    check_spread(&sys, spread)?;
    let s = num_traits::ToPrimitive::to_f64(spread).unwrap_or(0.0);
    let tan = (std::f64::consts::PI * s).tan();
    let parts = balanced_sizes(n, p)
        .into_iter()
        .enumerate()
        .map(|(i, m)| {
            if sys.is_sphere(i) {
                cap_points(i, m, tan)
            } else {
                Ok(arc_points(i, m, tan))
            }
        })
        .collect::<Result<_>>()?;
    LenzConfiguration::new(sys, parts)
}

// 4·max rᵢ²·sin²(π·spread) + 2⁻⁶⁰ < λ², at 128 bits.
fn check_spread(sys: &LenzSystem, spread: &BigRational) -> Result<()> {
    use num_traits::Signed;
    if !spread.is_positive() || spread >= &rat(1, 2) {
        return Err(Error::SpreadTooLarge);
    }
    let mut ev = BigEval::new(128);
    let (c, _) = ev.cis_turns(spread);
    // sin²(πs) = (1 − cos 2πs)/2
    let one = ev.rational(&rat(1, 1));
    let two = ev.rational(&rat(2, 1));
    let rmax = sys.radii_sq().iter().max().expect("at least two parts");
    let rmax = ev.ext(rmax);
    // 4ρ·(1 − cos 2πs)/2
    let lhs = ev.mul(&ev.mul(&two, &rmax), &ev.sub(&one, &c));
    let slack = ev.rational(&BigRational::new(
        1.into(),
        num_bigint::BigInt::from(1u64) << 60,
    ));
    let lam = ev.ext(sys.lambda_sq());
    if ev.add(&lhs, &slack).cmp(&lam).is_some_and(|o| o < 0) {
        Ok(())
    } else {
        Err(Error::SpreadTooLarge)
    }
}

// Phases 2·atan(j/M), j < m; the widest is 2·atan((m−1)/M) ≤ 2π·spread.
fn arc_points(part: usize, m: usize, tan: f64) -> Vec<Point> {
    let big_m = (((m.max(2) - 1) as f64 / tan) * (1.0 + 1e-9)).ceil() as i64 + 1;
    (0..m)
        .map(|j| {
            CirclePoint::new(
                part,
                rat(0, 1),
                Phase::from_half_tangent(&rat(j as i64, big_m)),
            )
            .into()
        })
        .collect()
}

// Directions (N, a, b) over a grid of side 2A+1; any two are at most
// 2·atan(A√2/N) apart.
fn cap_points(part: usize, m: usize, tan: f64) -> Result<Vec<Point>> {
    let mut grid: Vec<(i64, i64)> = Vec::new();
    let mut a = 0i64;
    while grid.len() < m {
        let ring: Vec<(i64, i64)> = (-a..=a)
            .flat_map(|x| (-a..=a).map(move |y| (x, y)))
            .filter(|&(x, y)| x.abs().max(y.abs()) == a)
            .collect();
        grid.extend(ring);
        a += 1;
    }
    grid.truncate(m);
    let reach = grid
        .iter()
        .map(|&(x, y)| x.abs().max(y.abs()))
        .max()
        .unwrap_or(0);
    let n0 = ((reach as f64 * 2f64.sqrt() / tan) * (1.0 + 1e-9)).ceil() as i64 + 1;
    grid.into_iter()
        .map(|(x, y)| {
            SpherePoint::new(part, [n0, x, y])
                .map(Point::from)
                .map_err(|_| Error::PlacementExhausted("cap directions out of range".into()))
        })
        .collect()
}

/// Upper limit on the slots scanned for fresh positions.
pub const SLOT_CAPACITY: usize = 4096;

fn fresh_slots(
    sys: &LenzSystem,
    part: usize,
    taken: &mut HashSet<Point>,
    count: usize,
) -> Result<Vec<Point>> {
    let mut out = Vec::with_capacity(count);
    for s in 0..SLOT_CAPACITY {
        if out.len() == count {
            break;
        }
        let pt = slot_point(sys, part, s)?;
        if taken.insert(pt.clone()) {
            out.push(pt);
        }
    }
    if out.len() < count {
        return Err(Error::PlacementExhausted(format!(
            "part {part} has no {count} fresh slots within {SLOT_CAPACITY}"
        )));
    }
    Ok(out)
}

fn is_cross_distance(sys: &LenzSystem, u: &SpherePoint, v: &SpherePoint) -> bool {
    sphere_chord(sys.radius_sq(u.part()), u, v) == ExactDist::from(sys.lambda_sq().clone())
}

// A fresh sphere point at distance λ from some point of `old`, preferring
// slot positions; falls back to any fresh slot when none is found.
fn sphere_neighbour(
    sys: &LenzSystem,
    part: usize,
    old: &[SpherePoint],
    taken: &mut HashSet<Point>,
) -> Result<Point> {
    let orthogonal = sys.radius_sq(part).scale(&rat(2, 1)) == *sys.lambda_sq();
    let hits = |y: &SpherePoint| {
        old.iter().any(|x| {
            if orthogonal {
                (0..3).map(|k| x.dir()[k] * y.dir()[k]).sum::<i64>() == 0
            } else {
                is_cross_distance(sys, x, y)
            }
        })
    };
    let mut scanned = 0;
    for s in 0..SLOT_CAPACITY {
        let Ok(pt) = sphere_slot(part, s) else { break };
        let cand = Point::from(pt.clone());
        if taken.contains(&cand) {
            continue;
        }
        if hits(&pt) {
            taken.insert(cand.clone());
            return Ok(cand);
        }
        scanned += 1;
        if scanned >= 16 {
            break;
        }
    }
    for b in 1..=8i64 {
        for x in -b..=b {
            for y in -b..=b {
                for z in -b..=b {
                    if x.abs().max(y.abs()).max(z.abs()) != b {
                        continue;
                    }
                    let Ok(pt) = SpherePoint::new(part, [x, y, z]) else {
                        continue;
                    };
                    let cand = Point::from(pt.clone());
                    if !taken.contains(&cand) && hits(&pt) {
                        taken.insert(cand.clone());
                        return Ok(cand);
                    }
                }
            }
        }
    }
    fresh_slots(sys, part, taken, 1).map(|mut v| v.remove(0))
}

/// Adds `k` points as in the growth argument and returns the new
/// configuration.
///
/// For d ≠ 5 all points go to the smallest part at fresh slots. For d = 5
/// they are split between the sphere and the circle, each new sphere point
/// placed at distance λ from an old sphere point when possible; for odd
/// `k` both splits are built and the one with more new λ-pairs is kept.
pub fn augment(config: &LenzConfiguration, k: usize) -> Result<LenzConfiguration> {
    augment_with_gain(config, k).map(|(c, _)| c)
}

/// [`augment`] together with the number of new pairs at distance λ.
pub fn augment_with_gain(config: &LenzConfiguration, k: usize) -> Result<(LenzConfiguration, u64)> {
    if k == 0 {
        return Ok((config.clone(), 0));
    }
    let sys = config.system();
    if sys.dim() != 5 {
        let part = (0..sys.parts())
            .min_by_key(|&i| config.parts()[i].len())
            .expect("at least two parts");
        return place(config, &[(part, k)]);
    }
    let (half, rest) = (k / 2, k - k / 2);
    if k.is_multiple_of(2) {
        return place(config, &[(0, half), (1, half)]);
    }
    let sphere_heavy = place(config, &[(0, rest), (1, half)])?;
    let circle_heavy = place(config, &[(0, half), (1, rest)])?;
    Ok(if circle_heavy.1 > sphere_heavy.1 {
        circle_heavy
    } else {
        sphere_heavy
    })
}

fn place(config: &LenzConfiguration, plan: &[(usize, usize)]) -> Result<(LenzConfiguration, u64)> {
    let sys = config.system();
    let mut taken: HashSet<Point> = config.points().into_iter().collect();
    let mut parts = config.parts().to_vec();
    let mut added = Vec::new();
    for &(part, count) in plan {
        let new = if sys.is_sphere(part) {
            let old: Vec<SpherePoint> = parts[part]
                .iter()
                .filter_map(|p| match p {
                    Point::Sphere(s) => Some(s.clone()),
                    _ => None,
                })
                .collect();
            (0..count)
                .map(|_| sphere_neighbour(sys, part, &old, &mut taken))
                .collect::<Result<Vec<_>>>()?
        } else {
            fresh_slots(sys, part, &mut taken, count)?
        };
        parts[part].extend(new.iter().cloned());
        added.extend(new);
    }
    let old = config.points();
    let n_old = old.len();
    let all = PointSet::new(
        sys.dim(),
        Some(sys.clone()),
        old.into_iter().chain(added).collect(),
    )?;
    let lam = ExactDist::from(sys.lambda_sq().clone());
    let mut gain = 0u64;
    for j in n_old..all.len() {
        for i in 0..j {
            if all.dist_sq(i, j)? == lam {
                gain += 1;
            }
        }
    }
    Ok((LenzConfiguration::new(sys.clone(), parts)?, gain))
}

/// Checks `u₅(n) − u₅(n−k) ≥ ½k(n−k) + (k²+2k−1)/4` on the construction:
/// balanced squares on `n − k` points augmented by `k`.
pub fn u5_growth_check(ns: RangeInclusive<u64>, big_n: u64) -> Result<GrowthReport> {
    let mut rep = GrowthReport::default();
    for n in ns {
        let mut worst: Option<(i128, CheckRow)> = None;
        for k in 1..n.saturating_sub(big_n) + 1 {
            if n - k < big_n.max(2) {
                continue;
            }
            let base = balanced_squares_config(5, (n - k) as usize)?;
            let (_, gain) = augment_with_gain(&base, k as usize)?;
            let (ki, m) = (k as i128, (n - k) as i128);
            let lhs = 4 * gain as i128;
            let rhs = 2 * ki * m + ki * ki + 2 * ki - 1;
            rep.checked += 1;
            if worst.as_ref().is_none_or(|(s, _)| lhs - rhs < *s) {
                let row = CheckRow {
                    family: Family::U5Constructive,
                    d: 5,
                    n,
                    k,
                    lhs: Ratio::new(lhs, 4),
                    rhs: Ratio::new(rhs, 4),
                    pass: lhs >= rhs,
                };
                worst = Some((lhs - rhs, row));
            }
        }
        rep.rows.extend(worst.map(|(_, r)| r));
    }
    rep.notes.push(
        "u5 has no closed form; its growth is checked on the augmentation construction only".into(),
    );
    Ok(rep)
}

/// Unit pairs of [`balanced_squares_config`]`(4, n)`, counted from the
/// slot layout: all cross pairs plus the square sides present.
pub fn squares_unit_pairs(n: u64) -> u64 {
    let sides = |m: u64| 4 * (m / 4) + (m % 4).saturating_sub(1);
    let (a, b) = (n.div_ceil(2), n / 2);
    a * b + sides(a) + sides(b)
}

/// Unit pairs of [`pentagon_config`]`(n)` for `10 | n`: cross pairs plus
/// five per pentagon.
pub fn pentagon_unit_pairs(n: u64) -> Option<u64> {
    n.is_multiple_of(10).then(|| (n / 2) * (n / 2) + n)
}

/// Compares the constructions with `u₄(n)` for `n ≥ 5` in `ns`.
pub fn u4_construction_check(ns: RangeInclusive<u64>) -> GrowthReport {
    let lo = (*ns.start()).max(5);
    let rows: Vec<CheckRow> = (lo..=*ns.end())
        .map(|n| {
            let built = squares_unit_pairs(n).max(pentagon_unit_pairs(n).unwrap_or(0));
            let u = crate::closed_forms::u4_exact(n).expect("n >= 5");
            let tight = n % 8 == 0 || n % 10 == 0;
            CheckRow {
                family: Family::U4Construct,
                d: 4,
                n,
                k: 0,
                lhs: Ratio::from_integer(built as i128),
                rhs: Ratio::from_integer(u as i128),
                pass: built <= u && (!tight || built == u),
            }
        })
        .collect();
    GrowthReport {
        checked: rows.len() as u64,
        rows,
        notes: Vec::new(),
    }
}

/// A random exact Lenz configuration on `n` points in R^d.
///
/// Circle points sit on the 1/20-turn grid rotated by one of the first
/// eight block phases; sphere points are small integer directions. In
/// dimensions 4 and 5 the radii are sometimes unequal.
pub fn random_lenz_config<R: Rng + ?Sized>(
    rng: &mut R,
    d: usize,
    n: usize,
) -> Result<LenzConfiguration> {
    let p = d / 2;
    let radii = if d <= 5 {
        match rng.gen_range(0..3) {
            0 if d == 4 => vec![
                ExtScalar::from_parts(1, 2, 1, 10),
                ExtScalar::from_parts(1, 2, -1, 10),
            ],
            1 => {
                let a = rng.gen_range(3..=7);
                vec![ExtScalar::ratio(a, 10), ExtScalar::ratio(10 - a, 10)]
            }
            _ => vec![ExtScalar::ratio(1, 2); p],
        }
    } else {
        vec![ExtScalar::ratio(1, 2); p]
    };
    let sys = LenzSystem::new(d, ExtScalar::one(), radii)?;
    let mut taken = HashSet::new();
    let mut parts = vec![Vec::new(); p];
    let mut placed = 0;
    while placed < n {
        let part = rng.gen_range(0..p);
        let pt: Point = if sys.is_sphere(part) {
            let dir = [
                rng.gen_range(-4..=4),
                rng.gen_range(-4..=4),
                rng.gen_range(-4..=4),
            ];
            match SpherePoint::new(part, dir) {
                Ok(s) => s.into(),
                Err(_) => continue,
            }
        } else {
            let turns = rat(rng.gen_range(0..20), 20);
            CirclePoint::new(part, turns, block_phase(rng.gen_range(0..8))).into()
        };
        if taken.insert(pt.clone()) {
            parts[part].push(pt);
            placed += 1;
        }
    }
    LenzConfiguration::new(sys, parts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_forms::{turan, u4_exact};
    use crate::digraph::count_pairs_at;
    use crate::metric::Distances;

    fn unit_pairs(c: &LenzConfiguration) -> usize {
        let s = c.point_set();
        let t = Distances::build(&s).unwrap();
        count_pairs_at(&t, &ExtScalar::one().into())
    }

    #[test]
    fn slot_counts_match_exact_counting() {
        for n in 5..=60u64 {
            let sq = balanced_squares_config(4, n as usize).unwrap();
            assert_eq!(unit_pairs(&sq) as u64, squares_unit_pairs(n), "n={n}");
            if let Some(c) = pentagon_unit_pairs(n) {
                assert_eq!(unit_pairs(&pentagon_config(n as usize).unwrap()) as u64, c);
            }
        }
        assert!(u4_construction_check(5..=2000).passed());
    }

    #[test]
    fn block_phases_are_distinct_first_quadrant_rotations() {
        let mut seen = HashSet::new();
        for q in 0..60 {
            let ph = block_phase(q);
            assert!(seen.insert(ph.clone()));
            assert_eq!(ph.canonical().1, 0);
        }
        assert_eq!(farey(1), Some(rat(1, 2)));
        assert_eq!(farey(3), Some(rat(2, 3)));
    }

    #[test]
    fn squares_examples() {
        let c = balanced_squares_config(4, 16).unwrap();
        assert_eq!(c.part_sizes(), vec![8, 8]);
        assert_eq!(unit_pairs(&c), 80);
        assert_eq!(unit_pairs(&balanced_squares_config(6, 12).unwrap()), 60);
        assert_eq!(unit_pairs(&balanced_squares_config(5, 8).unwrap()), 24);
    }

    #[test]
    fn pentagon_examples() {
        assert_eq!(unit_pairs(&pentagon_config(10).unwrap()), 35);
        assert_eq!(unit_pairs(&pentagon_config(20).unwrap()), 120);
        assert!(pentagon_config(15).is_err());
    }

    #[test]
    fn exceptional_rejects_bad_n() {
        assert!(exceptional_config(10).is_err());
        let e = exceptional_config(9).unwrap();
        assert_eq!(e.points.len(), 9);
        assert_eq!(e.centre, 8);
    }

    #[test]
    fn arc_spread() {
        assert_eq!(arc_config(4, 10, &rat(1, 2)), Err(Error::SpreadTooLarge));
        let c = arc_config(6, 12, &rat(1, 40)).unwrap();
        let s = c.point_set();
        let t = Distances::build(&s).unwrap();
        let (diam, m) = crate::digraph::diameter_pairs(&t).unwrap();
        assert_eq!(diam, ExtScalar::one().into());
        assert_eq!(m as u64, turan(3, 12));
    }

    #[test]
    fn augment_examples() {
        let c = balanced_squares_config(5, 20).unwrap();
        let (a, gain) = augment_with_gain(&c, 2).unwrap();
        assert!(gain >= 22, "{gain}");
        assert_eq!(unit_pairs(&a) - unit_pairs(&c), gain as usize);
        let c = balanced_squares_config(6, 12).unwrap();
        let (a, gain) = augment_with_gain(&c, 1).unwrap();
        assert!(gain >= 8);
        assert_eq!(a.len(), 13);
        assert_eq!(augment(&c, 0).unwrap(), c);
    }

    #[test]
    fn sphere_neighbour_when_squares_are_full() {
        let c = balanced_squares_config(5, 16).unwrap();
        let (_, gain) = augment_with_gain(&c, 2).unwrap();
        // 16 cross pairs, one new-new pair, at least one sphere neighbour
        assert!(gain >= 18, "{gain}");
    }

    #[test]
    fn random_configs_are_valid() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for d in 4..=9 {
            let c = random_lenz_config(&mut rng, d, 30).unwrap();
            assert_eq!(c.len(), 30);
            let s = c.point_set();
            Distances::build(&s).unwrap();
        }
    }

    #[test]
    fn u4_witnesses() {
        for n in [8, 24, 40] {
            assert_eq!(
                unit_pairs(&balanced_squares_config(4, n).unwrap()) as u64,
                u4_exact(n as u64).unwrap()
            );
        }
    }
}
