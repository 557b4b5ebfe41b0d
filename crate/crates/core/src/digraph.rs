//! Favourite-distance digraphs, their single/double edge decomposition and
//! pair counts.

use num_rational::Ratio;
use petgraph::unionfind::UnionFind;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::metric::{Distances, Metric};
use crate::scalar::ExactDist;

/// Squared favourite distance `r(x)²` of every point.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceAssignment<D> {
    values: Vec<D>,
}

impl<D: Clone> DistanceAssignment<D> {
    pub fn new(values: Vec<D>) -> Self {
        DistanceAssignment { values }
    }

    pub fn constant(n: usize, value: D) -> Self {
        DistanceAssignment {
            values: vec![value; n],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, i: usize) -> &D {
        &self.values[i]
    }

    pub fn values(&self) -> &[D] {
        &self.values
    }
}

impl DistanceAssignment<ExactDist> {
    /// Checked constructor: every value must be positive.
    pub fn exact(values: Vec<ExactDist>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| v.signum() <= 0) {
            return Err(Error::Domain(format!("r({i})² must be positive")));
        }
        Ok(DistanceAssignment { values })
    }
}

impl DistanceAssignment<f64> {
    pub fn numeric(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| {
            v.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) || !v.is_finite()
        }) {
            return Err(Error::Domain(format!("r({i})² must be positive")));
        }
        Ok(DistanceAssignment { values })
    }
}

/// Directed graph with edge `(i, j)` iff `|xᵢxⱼ|² = r(xᵢ)²`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FavouriteDigraph {
    n: usize,
    // sorted
    edges: Vec<(usize, usize)>,
}

impl FavouriteDigraph {
    pub fn from_edges(n: usize, mut edges: Vec<(usize, usize)>) -> Self {
        edges.sort_unstable();
        edges.dedup();
        FavouriteDigraph { n, edges }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// `e_r(S)`.
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edges.binary_search(&(i, j)).is_ok()
    }

    pub fn out_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(i, _) in &self.edges {
            deg[i] += 1;
        }
        deg
    }
}

pub fn favourite_digraph<M: Metric + ?Sized>(
    t: &Distances<'_, M>,
    r: &DistanceAssignment<M::Dist>,
) -> Result<FavouriteDigraph> {
    let n = t.len();
    if r.len() != n {
        return Err(Error::Domain(format!(
            "assignment has {} values for {n} points",
            r.len()
        )));
    }
    let m = t.metric();
    let edges: Vec<(usize, usize)> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            (0..n)
                .filter(move |&j| j != i && m.same(t.get(i, j), r.get(i)))
                .map(move |j| (i, j))
        })
        .collect();
    Ok(FavouriteDigraph { n, edges })
}

/// `D(x)²`, the largest squared distance from each point.
pub fn furthest_assignment<M: Metric + ?Sized>(
    t: &Distances<'_, M>,
) -> Result<DistanceAssignment<M::Dist>> {
    let n = t.len();
    if n < 2 {
        return Err(Error::Domain("furthest neighbours need two points".into()));
    }
    let m = t.metric();
    let values = (0..n)
        .into_par_iter()
        .map(|i| {
            let row = t.row(i);
            let classes = m.classes(&row);
            let top = &classes.last().expect("nonempty row").0;
            row.iter()
                .filter(|d| m.same(d, top))
                .max_by(|a, b| m.compare(a, b))
                .cloned()
                .unwrap_or_else(|| top.clone())
        })
        .collect();
    Ok(DistanceAssignment { values })
}

/// Single/double edge split and the components of the double-edge graph.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    /// Edges present in one direction only, as `(from, to)`.
    pub singles: Vec<(usize, usize)>,
    /// Edges present in both directions, as `(i, j)` with `i < j`.
    pub doubles: Vec<(usize, usize)>,
    /// Components of the double-edge graph, ordered by smallest member;
    /// isolated points are singletons.
    pub parts: Vec<Vec<usize>>,
    pub part_sizes: Vec<usize>,
    /// `cross[i][j] = e_r(Sᵢ, Sⱼ)`; the diagonal is `e_r(Sᵢ)`.
    pub cross: Vec<Vec<usize>>,
    /// `e_r(Sᵢ, Sⱼ)/(nᵢnⱼ)` off the diagonal, `e_r(Sᵢ)/(nᵢ(nᵢ−1))` on it
    /// (zero for singletons).
    pub densities: Vec<Vec<Ratio<u64>>>,
}

impl Decomposition {
    /// Which part each point belongs to.
    pub fn part_of(&self) -> Vec<usize> {
        let n = self.part_sizes.iter().sum();
        let mut out = vec![0; n];
        for (k, part) in self.parts.iter().enumerate() {
            for &i in part {
                out[i] = k;
            }
        }
        out
    }
}

pub fn decompose(g: &FavouriteDigraph) -> Decomposition {
    let mut singles = Vec::new();
    let mut doubles = Vec::new();
    for &(i, j) in g.edges() {
        if g.has_edge(j, i) {
            if i < j {
                doubles.push((i, j));
            }
        } else {
            singles.push((i, j));
        }
    }
    let mut uf = UnionFind::<usize>::new(g.n());
    for &(i, j) in &doubles {
        uf.union(i, j);
    }
    let labels = uf.into_labeling();
    let mut parts: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; g.n()];
    for (i, &root) in labels.iter().enumerate() {
        if slot[root] == usize::MAX {
            slot[root] = parts.len();
            parts.push(Vec::new());
        }
        parts[slot[root]].push(i);
    }
    let part_sizes: Vec<usize> = parts.iter().map(Vec::len).collect();
    let cross = cross_counts(g, &parts).expect("components partition the points");
    let densities = cross
        .iter()
        .enumerate()
        .map(|(a, row)| {
            row.iter()
                .enumerate()
                .map(|(b, &e)| {
                    let (na, nb) = (part_sizes[a] as u64, part_sizes[b] as u64);
                    let den = if a == b { na * (na - 1) } else { na * nb };
                    if den == 0 {
                        Ratio::from_integer(0)
                    } else {
                        Ratio::new(e as u64, den)
                    }
                })
                .collect()
        })
        .collect();
    Decomposition {
        singles,
        doubles,
        parts,
        part_sizes,
        cross,
        densities,
    }
}

/// `e_r(A, B)` for every ordered pair of blocks of `partition`.
pub fn cross_counts(g: &FavouriteDigraph, partition: &[Vec<usize>]) -> Result<Vec<Vec<usize>>> {
    let mut block = vec![usize::MAX; g.n()];
    for (k, part) in partition.iter().enumerate() {
        for &i in part {
            if i >= g.n() || block[i] != usize::MAX {
                return Err(Error::Domain(format!(
                    "point {i} is out of range or in two blocks"
                )));
            }
            block[i] = k;
        }
    }
    if let Some(i) = block.iter().position(|&b| b == usize::MAX) {
        return Err(Error::Domain(format!("point {i} is in no block")));
    }
    let k = partition.len();
    let mut out = vec![vec![0; k]; k];
    for &(i, j) in g.edges() {
        out[block[i]][block[j]] += 1;
    }
    Ok(out)
}

/// Number of unordered pairs at squared distance `q`.
pub fn count_pairs_at<M: Metric + ?Sized>(t: &Distances<'_, M>, q: &M::Dist) -> usize {
    let m = t.metric();
    t.pairs().filter(|(_, _, d)| m.same(d, q)).count()
}

/// Largest squared distance.
pub fn diameter_sq<M: Metric + ?Sized>(t: &Distances<'_, M>) -> Result<M::Dist> {
    diameter_pairs(t).map(|(d, _)| d)
}

/// Largest squared distance and the number of pairs attaining it, `M(S)`.
pub fn diameter_pairs<M: Metric + ?Sized>(t: &Distances<'_, M>) -> Result<(M::Dist, usize)> {
    if t.len() < 2 {
        return Err(Error::Domain("diameter needs two points".into()));
    }
    let m = t.metric();
    let all: Vec<M::Dist> = t.pairs().map(|(_, _, d)| d.clone()).collect();
    let top = m.classes(&all).pop().expect("at least one pair").0;
    let diam = all
        .iter()
        .filter(|d| m.same(d, &top))
        .max_by(|a, b| m.compare(a, b))
        .cloned()
        .unwrap_or(top);
    Ok((diam.clone(), count_pairs_at(t, &diam)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::PointSet;
    use crate::scalar::ExtScalar;

    fn d(n: i64) -> ExactDist {
        ExtScalar::from_int(n).into()
    }

    fn square() -> PointSet {
        PointSet::from_integer_coords(
            4,
            &[
                vec![0, 0, 0, 0],
                vec![1, 0, 0, 0],
                vec![1, 1, 0, 0],
                vec![0, 1, 0, 0],
            ],
        )
        .unwrap()
    }

    #[test]
    fn unit_square() {
        let s = square();
        let t = Distances::build(&s).unwrap();
        let g = favourite_digraph(&t, &DistanceAssignment::constant(4, d(1))).unwrap();
        assert_eq!(g.edge_count(), 8);
        let dec = decompose(&g);
        assert_eq!((dec.singles.len(), dec.doubles.len()), (0, 4));
        assert_eq!(dec.parts, vec![vec![0, 1, 2, 3]]);
        assert_eq!(count_pairs_at(&t, &d(2)), 2);
        assert_eq!(count_pairs_at(&t, &d(3)), 0);
        assert_eq!(diameter_pairs(&t).unwrap(), (d(2), 2));
        let cc = cross_counts(&g, &[vec![0, 2], vec![1, 3]]).unwrap();
        assert_eq!(cc, vec![vec![0, 4], vec![4, 0]]);
    }

    #[test]
    fn one_directed_edge() {
        let s = PointSet::from_integer_coords(4, &[vec![0, 0, 0, 0], vec![1, 0, 0, 0]]).unwrap();
        let t = Distances::build(&s).unwrap();
        let r = DistanceAssignment::exact(vec![d(1), d(4)]).unwrap();
        let g = favourite_digraph(&t, &r).unwrap();
        assert_eq!(g.edges(), &[(0, 1)]);
        let dec = decompose(&g);
        assert_eq!(dec.singles, vec![(0, 1)]);
        assert_eq!(dec.parts, vec![vec![0], vec![1]]);
    }

    #[test]
    fn collinear_furthest() {
        let s = PointSet::from_integer_coords(
            4,
            &[vec![0, 0, 0, 0], vec![1, 0, 0, 0], vec![3, 0, 0, 0]],
        )
        .unwrap();
        let t = Distances::build(&s).unwrap();
        let r = furthest_assignment(&t).unwrap();
        assert_eq!(r.values(), &[d(9), d(4), d(9)]);
        assert_eq!(favourite_digraph(&t, &r).unwrap().edge_count(), 3);
    }

    #[test]
    fn partition_must_cover() {
        let g = FavouriteDigraph::from_edges(3, vec![(0, 1)]);
        assert!(cross_counts(&g, &[vec![0, 1]]).is_err());
        assert!(cross_counts(&g, &[vec![0, 1], vec![1, 2]]).is_err());
        assert_eq!(cross_counts(&g, &[vec![0, 1, 2]]).unwrap(), vec![vec![1]]);
    }
}
