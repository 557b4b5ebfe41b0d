use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;

use super::point::{CirclePoint, Point, SpherePoint};
use super::system::LenzSystem;
use crate::error::{Error, Result};
use crate::scalar::{cos_separation, rat, Cyclo20, ExactDist, ExtScalar};

/// A finite point set in R^d with exact coordinates.
///
/// Symbolic points (circle or sphere positions) refer to the parts of the
/// attached [`LenzSystem`], placed at the origin.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet {
    dim: usize,
    system: Option<LenzSystem>,
    points: Vec<Point>,
}

impl PointSet {
    pub fn new(dim: usize, system: Option<LenzSystem>, points: Vec<Point>) -> Result<Self> {
        if dim < 4 {
            return Err(Error::Dimension(dim));
        }
        if let Some(sys) = &system {
            if sys.dim() != dim {
                return Err(Error::InvalidPointSet(format!(
                    "system dimension {} differs from point set dimension {dim}",
                    sys.dim()
                )));
            }
        }
        let mut seen = HashSet::with_capacity(points.len());
        for (i, p) in points.iter().enumerate() {
            match p {
                Point::Cartesian(c) if c.len() != dim => {
                    return Err(Error::InvalidPointSet(format!(
                        "point {i} has {} coordinates, expected {dim}",
                        c.len()
                    )));
                }
                Point::Cartesian(_) => {}
                Point::Circle(_) | Point::Sphere(_) => {
                    let part = p.part().unwrap_or_default();
                    let Some(sys) = &system else {
                        return Err(Error::InvalidPointSet(format!(
                            "point {i} is symbolic but no Lenz system is attached"
                        )));
                    };
                    if part >= sys.parts() {
                        return Err(Error::InvalidPointSet(format!(
                            "point {i} refers to part {part}, system has {}",
                            sys.parts()
                        )));
                    }
                    if sys.is_sphere(part) != matches!(p, Point::Sphere(_)) {
                        return Err(Error::InvalidPointSet(format!(
                            "point {i} has the wrong kind for part {part}"
                        )));
                    }
                }
            }
            if !seen.insert(p) {
                return Err(Error::InvalidPointSet(format!("point {i} is a duplicate")));
            }
        }
        Ok(PointSet {
            dim,
            system,
            points,
        })
    }

    pub fn cartesian(dim: usize, coords: Vec<Vec<ExtScalar>>) -> Result<Self> {
        Self::new(
            dim,
            None,
            coords.into_iter().map(Point::Cartesian).collect(),
        )
    }

    /// Convenience for integer coordinates.
    pub fn from_integer_coords(dim: usize, coords: &[Vec<i64>]) -> Result<Self> {
        Self::cartesian(
            dim,
            coords
                .iter()
                .map(|c| c.iter().map(|&x| ExtScalar::from_int(x)).collect())
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn system(&self) -> Option<&LenzSystem> {
        self.system.as_ref()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &Point {
        &self.points[i]
    }

    /// Indices of the symbolic points of each part, nonempty parts only;
    /// Cartesian points are left out.
    pub fn associated_partition(&self) -> Vec<Vec<usize>> {
        let Some(sys) = &self.system else {
            return Vec::new();
        };
        let mut parts = vec![Vec::new(); sys.parts()];
        for (i, p) in self.points.iter().enumerate() {
            if let Some(q) = p.part() {
                parts[q].push(i);
            }
        }
        parts.retain(|p| !p.is_empty());
        parts
    }

    /// Exact squared distance between points `i` and `j`.
    pub fn pair_distance_sq(&self, i: usize, j: usize) -> Result<ExactDist> {
        if i == j {
            return Err(Error::Domain(format!("distance of point {i} to itself")));
        }
        self.distance_between(&self.points[i], &self.points[j])
            .map_err(|e| e.at_pair(i, j))
    }

    fn system_ref(&self) -> Result<&LenzSystem> {
        self.system
            .as_ref()
            .ok_or_else(|| Error::InvalidPointSet("no Lenz system attached".into()))
    }

    fn distance_between(&self, a: &Point, b: &Point) -> Result<ExactDist> {
        match (a, b) {
            (Point::Cartesian(x), Point::Cartesian(y)) => {
                let s = x
                    .iter()
                    .zip(y)
                    .fold(ExtScalar::zero(), |acc, (u, v)| acc + (u - v).square());
                Ok(s.into())
            }
            (Point::Cartesian(c), p) | (p, Point::Cartesian(c)) => self.mixed(c, p),
            _ => {
                let sys = self.system_ref()?;
                let (pa, pb) = (a.part().unwrap_or(0), b.part().unwrap_or(0));
                if pa != pb {
                    return Ok(sys.lambda_sq().clone().into());
                }
                let rho = sys.radius_sq(pa);
                match (a, b) {
                    (Point::Circle(u), Point::Circle(v)) => circle_chord(rho, u, v),
                    (Point::Sphere(u), Point::Sphere(v)) => Ok(sphere_chord(rho, u, v)),
                    _ => Err(Error::InvalidPointSet(
                        "circle and sphere points share a part".into(),
                    )),
                }
            }
        }
    }

    // A Cartesian point with no component in the plane of the symbolic
    // point's part sees it at |c|² + ρ; anything else needs nested radicals.
    fn mixed(&self, c: &[ExtScalar], p: &Point) -> Result<ExactDist> {
        let sys = self.system_ref()?;
        let part = p.part().unwrap_or(0);
        if sys.axes(part).any(|ax| !c[ax].is_zero()) {
            return Err(Error::MixedRepresentation { i: 0, j: 0 });
        }
        let norm = c.iter().fold(ExtScalar::zero(), |acc, x| acc + x.square());
        Ok((norm + sys.radius_sq(part)).into())
    }
}

fn circle_chord(rho: &ExtScalar, u: &CirclePoint, v: &CirclePoint) -> Result<ExactDist> {
    let dt = u.turns() - v.turns();
    let rel = u.phase().minus(v.phase());
    let cos = cos_separation(&dt, &rel)?;
    let chord = (Cyclo20::one() - cos).scale_ext(rho).scale(&rat(2, 1));
    Ok(chord.into())
}

/// `2ρ(1 − u·v/(|u||v|))`; the cosine is a rational multiple of a square
/// root of a squarefree integer.
pub(crate) fn sphere_chord(rho: &ExtScalar, u: &SpherePoint, v: &SpherePoint) -> ExactDist {
    let (du, dv) = (u.dir(), v.dir());
    let dot: i128 = (0..3).map(|k| du[k] as i128 * dv[k] as i128).sum();
    let (ru, cu) = u.norm_split();
    let (rv, cv) = v.norm_split();
    let g = cu.gcd(&cv);
    let m = (cu / g) * (cv / g);
    // |u||v| = ru·rv·g·√m, so cos = dot/(ru·rv·g·m) · √m
    let den = BigInt::from(ru) * BigInt::from(rv) * BigInt::from(g) * BigInt::from(m);
    let coef = BigRational::new(BigInt::from(dot), den);
    let two_rho = rho.scale(&rat(2, 1));
    ExactDist::with_squarefree_surd(
        two_rho.clone().into(),
        Cyclo20::from(-two_rho.scale(&coef)),
        m,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Phase;

    fn square_system() -> LenzSystem {
        LenzSystem::equal_radii(4, ExtScalar::one()).unwrap()
    }

    #[test]
    fn circle_points_a_quarter_apart_are_at_unit_distance() {
        let pts = vec![
            CirclePoint::at_turns(0, rat(0, 1)).into(),
            CirclePoint::at_turns(0, rat(1, 4)).into(),
        ];
        let s = PointSet::new(4, Some(square_system()), pts).unwrap();
        assert_eq!(s.pair_distance_sq(0, 1).unwrap(), ExtScalar::one().into());
    }

    #[test]
    fn different_parts_are_at_lambda() {
        let pts = vec![
            CirclePoint::at_turns(0, rat(0, 1)).into(),
            CirclePoint::at_turns(1, rat(0, 1)).into(),
        ];
        let s = PointSet::new(4, Some(square_system()), pts).unwrap();
        assert_eq!(s.pair_distance_sq(0, 1).unwrap(), ExtScalar::one().into());
    }

    #[test]
    fn orthogonal_sphere_directions() {
        let sys = LenzSystem::equal_radii(5, ExtScalar::one()).unwrap();
        let pts = vec![
            SpherePoint::new(0, [1, 0, 0]).unwrap().into(),
            SpherePoint::new(0, [0, 1, 0]).unwrap().into(),
            SpherePoint::new(0, [1, 1, 0]).unwrap().into(),
            SpherePoint::new(0, [1, 1, 1]).unwrap().into(),
        ];
        let s = PointSet::new(5, Some(sys), pts).unwrap();
        assert_eq!(s.pair_distance_sq(0, 1).unwrap(), ExtScalar::one().into());
        // cos 45°: 1 − 1/√2
        let d = s.pair_distance_sq(0, 2).unwrap();
        assert!((d.to_f64() - (1.0 - 0.5f64.sqrt())).abs() < 1e-14);
        assert_eq!(d.radicand(), 2);
        // cos = 2/√6
        let d = s.pair_distance_sq(2, 3).unwrap();
        assert!((d.to_f64() - (1.0 - 2.0 / 6f64.sqrt())).abs() < 1e-14);
        assert_eq!(d, s.pair_distance_sq(3, 2).unwrap());
    }

    #[test]
    fn mixed_representation_rules() {
        let pts = vec![
            Point::origin(4),
            CirclePoint::at_turns(0, rat(0, 1)).into(),
            Point::Cartesian(vec![ExtScalar::one(), 0.into(), 0.into(), 0.into()]),
            Point::Cartesian(vec![0.into(), 0.into(), ExtScalar::one(), 0.into()]),
        ];
        let s = PointSet::new(4, Some(square_system()), pts).unwrap();
        assert_eq!(
            s.pair_distance_sq(0, 1).unwrap(),
            ExtScalar::ratio(1, 2).into()
        );
        assert_eq!(
            s.pair_distance_sq(2, 1),
            Err(Error::MixedRepresentation { i: 2, j: 1 })
        );
        assert_eq!(
            s.pair_distance_sq(3, 1).unwrap(),
            ExtScalar::ratio(3, 2).into()
        );
    }

    #[test]
    fn unsupported_separation_reports_the_pair() {
        let pts = vec![
            CirclePoint::at_turns(0, rat(0, 1)).into(),
            CirclePoint::new(0, rat(1, 6), Phase::from_half_tangent(&rat(1, 2))).into(),
        ];
        let s = PointSet::new(4, Some(square_system()), pts).unwrap();
        let err = s.pair_distance_sq(0, 1).unwrap_err();
        assert_eq!(err.point_index(), Some(0));
    }

    #[test]
    fn validation() {
        let sys = square_system();
        let dup = vec![
            CirclePoint::at_turns(0, rat(1, 4)).into(),
            CirclePoint::at_turns(0, rat(5, 4)).into(),
        ];
        assert!(PointSet::new(4, Some(sys.clone()), dup).is_err());
        let wrong_part = vec![CirclePoint::at_turns(2, rat(0, 1)).into()];
        assert!(PointSet::new(4, Some(sys.clone()), wrong_part).is_err());
        let sphere_in_even = vec![SpherePoint::new(0, [1, 0, 0]).unwrap().into()];
        assert!(PointSet::new(4, Some(sys), sphere_in_even).is_err());
        let no_system = vec![CirclePoint::at_turns(0, rat(0, 1)).into()];
        assert!(PointSet::new(4, None, no_system).is_err());
        assert_eq!(PointSet::new(3, None, vec![]), Err(Error::Dimension(3)));
    }
}
