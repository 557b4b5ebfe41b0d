//! Squared-distance oracles over exact and numeric point sets.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt::Debug;

use astro_float::{BigFloat, RoundingMode};
use rayon::prelude::*;

use crate::embed::{BigPointSet, NumericPointSet};
use crate::error::Result;
use crate::geometry::PointSet;
use crate::scalar::ExactDist;

/// A finite point set with squared distances and an equality rule on them.
pub trait Metric: Sync {
    type Dist: Clone + Debug + Send + Sync;

    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Squared distance of points `i != j`.
    fn dist_sq(&self, i: usize, j: usize) -> Result<Self::Dist>;

    /// Equality of squared distances under the metric's rule.
    fn same(&self, a: &Self::Dist, b: &Self::Dist) -> bool;

    fn compare(&self, a: &Self::Dist, b: &Self::Dist) -> Ordering;

    /// Groups values into classes of equal distances, in increasing order,
    /// each with its representative (smallest member) and size.
    fn classes(&self, values: &[Self::Dist]) -> Vec<(Self::Dist, usize)> {
        let mut sorted = values.to_vec();
        sorted.sort_by(|a, b| self.compare(a, b));
        let mut out: Vec<(Self::Dist, usize)> = Vec::new();
        for v in sorted {
            match out.last_mut() {
                Some((rep, k)) if self.same(rep, &v) => *k += 1,
                _ => out.push((v, 1)),
            }
        }
        out
    }
}

impl Metric for PointSet {
    type Dist = ExactDist;

    fn len(&self) -> usize {
        PointSet::len(self)
    }

    fn dist_sq(&self, i: usize, j: usize) -> Result<ExactDist> {
        self.pair_distance_sq(i, j)
    }

    fn same(&self, a: &ExactDist, b: &ExactDist) -> bool {
        a == b
    }

    fn compare(&self, a: &ExactDist, b: &ExactDist) -> Ordering {
        a.cmp(b)
    }

    // Exact equality is structural, so hash first and only order the
    // distinct values.
    fn classes(&self, values: &[ExactDist]) -> Vec<(ExactDist, usize)> {
        let mut counts: HashMap<&ExactDist, usize> = HashMap::new();
        for v in values {
            *counts.entry(v).or_default() += 1;
        }
        let mut out: Vec<(ExactDist, usize)> =
            counts.into_iter().map(|(k, c)| (k.clone(), c)).collect();
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out
    }
}

/// `f64` coordinates with absolute tolerance on squared distances.
#[derive(Clone, Debug)]
pub struct FloatMetric<'a> {
    pub points: &'a NumericPointSet,
    pub tol: f64,
}

pub const DEFAULT_TOL: f64 = 1e-9;

impl<'a> FloatMetric<'a> {
    pub fn new(points: &'a NumericPointSet, tol: f64) -> Self {
        FloatMetric { points, tol }
    }
}

impl Metric for FloatMetric<'_> {
    type Dist = f64;

    fn len(&self) -> usize {
        self.points.len()
    }

    fn dist_sq(&self, i: usize, j: usize) -> Result<f64> {
        Ok(self.points.dist_sq(i, j))
    }

    fn same(&self, a: &f64, b: &f64) -> bool {
        (a - b).abs() <= self.tol
    }

    fn compare(&self, a: &f64, b: &f64) -> Ordering {
        a.total_cmp(b)
    }
}

/// Big-float coordinates with absolute tolerance on squared distances.
#[derive(Clone, Debug)]
pub struct BigMetric<'a> {
    pub points: &'a BigPointSet,
    pub tol: BigFloat,
}

impl<'a> BigMetric<'a> {
    /// Tolerance `2^-tol_bits`.
    pub fn new(points: &'a BigPointSet, tol_bits: i64) -> Self {
        let p = points.precision;
        let two = BigFloat::from_u64(2, p);
        let tol = BigFloat::from_u64(1, p).div(
            &two.powi(tol_bits as usize, p, RoundingMode::ToEven),
            p,
            RoundingMode::ToEven,
        );
        BigMetric { points, tol }
    }
}

impl Metric for BigMetric<'_> {
    type Dist = BigFloat;

    fn len(&self) -> usize {
        self.points.len()
    }

    fn dist_sq(&self, i: usize, j: usize) -> Result<BigFloat> {
        Ok(self.points.dist_sq(i, j))
    }

    fn same(&self, a: &BigFloat, b: &BigFloat) -> bool {
        let d = a.sub(b, self.points.precision, RoundingMode::ToEven).abs();
        d.cmp(&self.tol).is_some_and(|c| c <= 0)
    }

    fn compare(&self, a: &BigFloat, b: &BigFloat) -> Ordering {
        a.cmp(b).map_or(Ordering::Equal, |c| c.cmp(&0))
    }
}

/// All pairwise squared distances of a metric, computed once.
pub struct Distances<'m, M: Metric + ?Sized> {
    metric: &'m M,
    n: usize,
    // strict upper triangle, row-major
    upper: Vec<M::Dist>,
}

impl<'m, M: Metric + ?Sized> Distances<'m, M> {
    /// Computes the table in parallel over rows; the first failing pair in
    /// row order is reported.
    pub fn build(metric: &'m M) -> Result<Self> {
        let n = metric.len();
        let rows: Vec<Vec<M::Dist>> = (0..n)
            .into_par_iter()
            .map(|i| (i + 1..n).map(|j| metric.dist_sq(i, j)).collect())
            .collect::<Result<_>>()?;
        Ok(Distances {
            metric,
            n,
            upper: rows.into_iter().flatten().collect(),
        })
    }

    pub fn metric(&self) -> &'m M {
        self.metric
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    fn index(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        i * (2 * self.n - i - 1) / 2 + (j - i - 1)
    }

    /// Squared distance of `i != j`.
    pub fn get(&self, i: usize, j: usize) -> &M::Dist {
        assert_ne!(i, j, "distance of a point to itself");
        &self.upper[self.index(i, j)]
    }

    /// Squared distances from `i` to every other point, in index order.
    pub fn row(&self, i: usize) -> Vec<M::Dist> {
        (0..self.n)
            .filter(|&j| j != i)
            .map(|j| self.get(i, j).clone())
            .collect()
    }

    /// Unordered pairs `(i, j)`, `i < j`, with their distances.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, &M::Dist)> + '_ {
        let n = self.n;
        (0..n)
            .flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
            .zip(&self.upper)
            .map(|((i, j), d)| (i, j, d))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_indexing_matches_direct_evaluation() {
        let pts = NumericPointSet::new(
            4,
            (0..7)
                .map(|i| vec![i as f64, (i * i) as f64, 0.0, 1.0])
                .collect(),
        );
        let m = FloatMetric::new(&pts, DEFAULT_TOL);
        let t = Distances::build(&m).unwrap();
        for i in 0..7 {
            for j in 0..7 {
                if i != j {
                    assert_eq!(*t.get(i, j), pts.dist_sq(i, j));
                }
            }
        }
        assert_eq!(t.pairs().count(), 21);
    }

    #[test]
    fn tolerance_classes() {
        let pts = NumericPointSet::new(4, vec![]);
        let m = FloatMetric::new(&pts, 1e-6);
        let c = m.classes(&[1.0, 2.0, 1.0 + 1e-9, 0.5, 2.0 - 1e-8]);
        assert_eq!(c.len(), 3);
        assert_eq!(c[0].1, 1);
        assert_eq!(c[1], (1.0, 2));
        assert_eq!(c[2].1, 2);
    }
}
