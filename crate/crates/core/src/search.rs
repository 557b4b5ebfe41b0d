//! Optimal favourite assignments, local search over numeric configurations
//! and the Lenz-structure fit.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use petgraph::unionfind::UnionFind;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::Serialize;

use crate::digraph::{favourite_digraph, DistanceAssignment};
use crate::embed::{embed_f64, NumericPointSet};
use crate::error::{Error, Result};
use crate::geometry::{LenzSystem, PointSet};
use crate::metric::{Distances, FloatMetric, Metric, DEFAULT_TOL};

/// For each point the squared distance of largest multiplicity (smallest
/// on ties), with the resulting `e_r`, the maximum over all assignments.
pub fn optimal_assignment<M: Metric + ?Sized>(
    t: &Distances<'_, M>,
) -> Result<(DistanceAssignment<M::Dist>, usize)> {
    let n = t.len();
    if n < 2 {
        return Err(Error::Domain("optimal assignment needs two points".into()));
    }
    let m = t.metric();
    let values: Vec<M::Dist> = (0..n)
        .into_par_iter()
        .map(|i| {
            let classes = m.classes(&t.row(i));
            let best = classes.iter().map(|c| c.1).max().expect("nonempty row");
            classes
                .into_iter()
                .find(|c| c.1 == best)
                .expect("a class attains the maximum")
                .0
        })
        .collect();
    let r = DistanceAssignment::new(values);
    let e = favourite_digraph(t, &r)?.edge_count();
    Ok((r, e))
}

// Sequential optimal `e_r`; search configurations are small, so a thread
// pool per evaluation costs more than it saves.
fn score(points: &NumericPointSet, tol: f64) -> usize {
    let n = points.len();
    let m = FloatMetric::new(points, tol);
    let mut row = Vec::with_capacity(n);
    let mut total = 0;
    for i in 0..n {
        row.clear();
        row.extend((0..n).filter(|&j| j != i).map(|j| points.dist_sq(i, j)));
        let Some(best) = m
            .classes(&row)
            .into_iter()
            .max_by(|a, b| a.1.cmp(&b.1).then(b.0.total_cmp(&a.0)))
        else {
            continue;
        };
        total += row.iter().filter(|d| m.same(d, &best.0)).count();
    }
    total
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchOptions {
    pub seed: u64,
    pub iterations: usize,
    /// Initial standard deviation of single-point moves.
    pub step: f64,
    /// Standard deviation reached at the last iteration.
    pub final_step: f64,
    /// Initial annealing temperature, in units of `e_r`; cools linearly.
    pub temperature: f64,
    /// Iterations 1, 1 + `snap_period`, ... snap to the fitted Lenz
    /// structure instead of perturbing a point; 0 disables snapping.
    pub snap_period: usize,
    pub tol: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            seed: 0,
            iterations: 10_000,
            step: 0.05,
            final_step: 1e-4,
            temperature: 2.0,
            snap_period: 50,
            tol: DEFAULT_TOL,
        }
    }
}

impl SearchOptions {
    pub fn validate(&self) -> Result<()> {
        if self.tol.is_nan()
            || self.tol <= 0.0
            || self.step.is_nan()
            || self.step < 0.0
            || self.temperature.is_nan()
            || self.temperature < 0.0
        {
            return Err(Error::Domain(
                "tolerance must be positive, step and temperature nonnegative".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TracePoint {
    pub iteration: usize,
    pub current: usize,
    pub best: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchResult {
    pub best: NumericPointSet,
    pub best_score: usize,
    pub initial_score: usize,
    /// One entry per iteration, starting with the initialization.
    pub trace: Vec<TracePoint>,
}

/// Uniform random points in `[-1, 1]^d`.
pub fn random_points<R: Rng + ?Sized>(rng: &mut R, d: usize, n: usize) -> NumericPointSet {
    NumericPointSet::new(
        d,
        (0..n)
            .map(|_| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect(),
    )
}

/// Adds independent `N(0, sigma²)` noise to every coordinate.
pub fn perturb<R: Rng + ?Sized>(
    rng: &mut R,
    points: &NumericPointSet,
    sigma: f64,
) -> NumericPointSet {
    let normal = Normal::new(0.0, sigma).expect("finite sigma");
    NumericPointSet::new(
        points.dim,
        points
            .coords
            .iter()
            .map(|c| c.iter().map(|x| x + normal.sample(rng)).collect())
            .collect(),
    )
}

/// Simulated annealing on `e_r` of the optimal assignment. Starts from
/// `init`, or from uniform random points when `None`; the best
/// configuration seen (never worse than the start) is returned.
pub fn local_search(
    d: usize,
    n: usize,
    init: Option<NumericPointSet>,
    opts: &SearchOptions,
) -> Result<SearchResult> {
    opts.validate()?;
    if d < 4 {
        return Err(Error::Dimension(d));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let start = match init {
        Some(p) if p.dim != d || p.len() != n => {
            return Err(Error::Domain(format!(
                "initial configuration has {} points in R^{}, expected {n} in R^{d}",
                p.len(),
                p.dim
            )))
        }
        Some(p) => p,
        None => random_points(&mut rng, d, n),
    };
    let initial_score = score(&start, opts.tol);
    let mut current = start.clone();
    let mut cur_score = initial_score;
    let mut best = start;
    let mut best_score = initial_score;
    let mut trace = vec![TracePoint {
        iteration: 0,
        current: cur_score,
        best: best_score,
    }];
    let total = opts.iterations.max(1) as f64;
    for it in 1..=opts.iterations {
        let frac = (it - 1) as f64 / total;
        let candidate = if opts.snap_period > 0 && (it - 1) % opts.snap_period == 0 {
            snap(&current, d / 2, d % 2 == 1)
        } else if n > 0 {
            let sigma = opts.step * (1.0 - frac) + opts.final_step * frac;
            let normal = Normal::new(0.0, sigma.max(f64::MIN_POSITIVE)).expect("finite sigma");
            let mut c = current.clone();
            let i = rng.gen_range(0..n);
            for x in c.coords[i].iter_mut() {
                *x += normal.sample(&mut rng);
            }
            c
        } else {
            current.clone()
        };
        let s = score(&candidate, opts.tol);
        let temp = opts.temperature * (1.0 - frac);
        let accept = s >= cur_score
            || (temp > 0.0 && rng.gen::<f64>() < ((s as f64 - cur_score as f64) / temp).exp());
        if accept {
            current = candidate;
            cur_score = s;
            if s > best_score {
                best_score = s;
                best = current.clone();
            }
        }
        trace.push(TracePoint {
            iteration: it,
            current: cur_score,
            best: best_score,
        });
    }
    Ok(SearchResult {
        best,
        best_score,
        initial_score,
        trace,
    })
}

fn mean(points: &[&[f64]], d: usize) -> DVector<f64> {
    let mut m = DVector::zeros(d);
    for p in points {
        m += DVector::from_column_slice(p);
    }
    if !points.is_empty() {
        m /= points.len() as f64;
    }
    m
}

/// Eigenpairs of `Σ vvᵀ`, largest first.
fn principal_axes(vectors: &[DVector<f64>], d: usize) -> Vec<(f64, DVector<f64>)> {
    let mut cov = DMatrix::zeros(d, d);
    for v in vectors {
        cov += v * v.transpose();
    }
    let eig = SymmetricEigen::new(cov);
    let mut pairs: Vec<(f64, DVector<f64>)> = eig
        .eigenvalues
        .iter()
        .zip(eig.eigenvectors.column_iter())
        .map(|(&l, v)| (l, v.into_owned()))
        .collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    pairs
}

fn orthonormalize(bases: &mut [Vec<DVector<f64>>], order: &[usize]) {
    let mut done: Vec<DVector<f64>> = Vec::new();
    for &k in order {
        for v in bases[k].iter_mut() {
            for u in &done {
                let c = u.dot(v);
                *v -= u * c;
            }
            let norm = v.norm();
            if norm > 1e-12 {
                *v /= norm;
            }
            done.push(v.clone());
        }
    }
}

// Merges blocks (by smallest member) until at most `p` remain, joining the
// pair with the largest normalized inner product between members.
fn merge_blocks(mut blocks: Vec<Vec<usize>>, vecs: &[DVector<f64>], p: usize) -> Vec<Vec<usize>> {
    while blocks.len() > p {
        let mut best = (0, 1, f64::NEG_INFINITY);
        for a in 0..blocks.len() {
            for b in a + 1..blocks.len() {
                let mut m: f64 = 0.0;
                for &i in &blocks[a] {
                    for &j in &blocks[b] {
                        let den = vecs[i].norm() * vecs[j].norm();
                        if den > 0.0 {
                            m = m.max((vecs[i].dot(&vecs[j]) / den).abs());
                        }
                    }
                }
                if m > best.2 {
                    best = (a, b, m);
                }
            }
        }
        let moved = blocks.remove(best.1);
        blocks[best.0].extend(moved);
        blocks[best.0].sort_unstable();
    }
    blocks
}

/// Projects the configuration onto a nearby Lenz configuration with equal
/// radii: points are split into `p` mutually orthogonal groups about the
/// centroid, each group is projected onto its principal plane (3-space for
/// the sphere), and angles within a circle that agree modulo a quarter
/// turn to within 0.02 rad are made to agree exactly.
pub fn snap(points: &NumericPointSet, p: usize, odd: bool) -> NumericPointSet {
    let d = points.dim;
    let n = points.len();
    if n == 0 || p == 0 {
        return points.clone();
    }
    let rows: Vec<&[f64]> = points.coords.iter().map(Vec::as_slice).collect();
    let o = mean(&rows, d);
    let vecs: Vec<DVector<f64>> = rows
        .iter()
        .map(|r| DVector::from_column_slice(r) - &o)
        .collect();
    let scale = vecs.iter().map(|v| v.norm_squared()).sum::<f64>() / n as f64;
    let mut uf = UnionFind::<usize>::new(n);
    for i in 0..n {
        for j in i + 1..n {
            if vecs[i].dot(&vecs[j]).abs() > 0.1 * scale {
                uf.union(i, j);
            }
        }
    }
    let blocks = components(uf.into_labeling());
    let (groups, standard) = if blocks.len() >= p {
        (merge_blocks(blocks, &vecs, p), false)
    } else {
        // No usable structure: balanced parts on the standard axis layout,
        // filled greedily by energy in each part's axes.
        let cap = n.div_ceil(p);
        let mut offers: Vec<(f64, usize, usize)> = vecs
            .iter()
            .enumerate()
            .flat_map(|(i, v)| {
                (0..p).map(move |k| {
                    let e = crate::geometry::part_axes(d, k).map(|a| v[a] * v[a]).sum();
                    (e, i, k)
                })
            })
            .collect();
        offers.sort_by(|a, b| b.0.total_cmp(&a.0));
        let mut g = vec![Vec::new(); p];
        let mut placed = vec![false; n];
        for (_, i, k) in offers {
            if !placed[i] && g[k].len() < cap {
                placed[i] = true;
                g[k].push(i);
            }
        }
        (g, true)
    };
    let sphere = if !odd {
        None
    } else if standard {
        Some(0)
    } else {
        (0..groups.len()).max_by(|&a, &b| {
            let third = |k: usize| {
                let gv: Vec<DVector<f64>> = groups[k].iter().map(|&i| vecs[i].clone()).collect();
                principal_axes(&gv, d).get(2).map_or(0.0, |e| e.0)
            };
            third(a).total_cmp(&third(b))
        })
    };
    let mut bases: Vec<Vec<DVector<f64>>> = groups
        .iter()
        .enumerate()
        .map(|(k, g)| {
            let dims = if Some(k) == sphere { 3 } else { 2 };
            if standard {
                crate::geometry::part_axes(d, k)
                    .map(|a| {
                        let mut e = DVector::zeros(d);
                        e[a] = 1.0;
                        e
                    })
                    .collect()
            } else {
                let gv: Vec<DVector<f64>> = g.iter().map(|&i| vecs[i].clone()).collect();
                principal_axes(&gv, d)
                    .into_iter()
                    .take(dims)
                    .map(|e| e.1)
                    .collect()
            }
        })
        .collect();
    let mut order: Vec<usize> = (0..groups.len()).collect();
    order.sort_by_key(|&k| std::cmp::Reverse(groups[k].len()));
    orthonormalize(&mut bases, &order);
    // local coordinates of every point in its own flat
    let mut local: Vec<Vec<f64>> = vec![Vec::new(); n];
    for (k, g) in groups.iter().enumerate() {
        for &i in g {
            local[i] = bases[k].iter().map(|b| b.dot(&vecs[i])).collect();
        }
    }
    let r2 = local
        .iter()
        .map(|c| c.iter().map(|x| x * x).sum::<f64>())
        .sum::<f64>()
        / n as f64;
    let r = r2.sqrt();
    for (k, g) in groups.iter().enumerate() {
        if Some(k) == sphere {
            for &i in g {
                let norm = local[i].iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm > 0.0 {
                    local[i].iter_mut().for_each(|x| *x *= r / norm);
                }
            }
        } else {
            let angles: Vec<f64> = g.iter().map(|&i| local[i][1].atan2(local[i][0])).collect();
            let snapped = snap_angles(&angles, 4, 0.02);
            for (&i, th) in g.iter().zip(snapped) {
                local[i] = vec![r * th.cos(), r * th.sin()];
            }
        }
    }
    let coords = (0..n)
        .map(|i| {
            let k = groups
                .iter()
                .position(|g| g.contains(&i))
                .expect("every point grouped");
            let mut x = o.clone();
            for (b, c) in bases[k].iter().zip(&local[i]) {
                x += b * *c;
            }
            x.iter().copied().collect()
        })
        .collect();
    NumericPointSet::new(d, coords)
}

fn components(labels: Vec<usize>) -> Vec<Vec<usize>> {
    let mut slot = vec![usize::MAX; labels.len()];
    let mut out: Vec<Vec<usize>> = Vec::new();
    for (i, &root) in labels.iter().enumerate() {
        if slot[root] == usize::MAX {
            slot[root] = out.len();
            out.push(Vec::new());
        }
        out[slot[root]].push(i);
    }
    out
}

// Clusters angles on the circle of `m·θ` (gaps below `eps·m`) and moves
// each angle the least amount that puts `m·θ` at its cluster mean.
fn snap_angles(angles: &[f64], m: usize, eps: f64) -> Vec<f64> {
    use std::f64::consts::{PI, TAU};
    let mf = m as f64;
    let wrap = |x: f64| (x + PI).rem_euclid(TAU) - PI;
    let mut idx: Vec<usize> = (0..angles.len()).collect();
    let folded: Vec<f64> = angles.iter().map(|a| (a * mf).rem_euclid(TAU)).collect();
    idx.sort_by(|&a, &b| folded[a].total_cmp(&folded[b]));
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for &i in &idx {
        match clusters.last_mut() {
            Some(c) if folded[i] - folded[*c.last().unwrap()] < eps * mf => c.push(i),
            _ => clusters.push(vec![i]),
        }
    }
    if clusters.len() > 1 {
        let first = folded[clusters[0][0]];
        let last = folded[*clusters.last().unwrap().last().unwrap()];
        if first + TAU - last < eps * mf {
            let tail = clusters.pop().unwrap();
            clusters[0].extend(tail);
        }
    }
    let mut out = angles.to_vec();
    for c in clusters {
        let (s, co) = c.iter().fold((0.0, 0.0), |(s, co), &i| {
            (s + folded[i].sin(), co + folded[i].cos())
        });
        let mu = s.atan2(co);
        for i in c {
            out[i] = angles[i] + wrap(mu - folded[i]) / mf;
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FitTolerances {
    /// Equality of squared distances, after scaling to `c = 1`.
    pub distance: f64,
    /// Distance of a point to its fitted circle or sphere.
    pub residual: f64,
    /// Orthogonality of flats, concentricity and `rᵢ² + rⱼ² = 1`.
    pub orthogonality: f64,
}

impl Default for FitTolerances {
    fn default() -> Self {
        FitTolerances {
            distance: 1e-9,
            residual: 1e-6,
            orthogonality: 1e-6,
        }
    }
}

/// Outcome of [`lenz_fit`]; `ok == false` means no Lenz structure was found
/// and `failure` says why.
#[derive(Clone, Debug, Serialize)]
pub struct FitReport {
    pub ok: bool,
    pub failure: Option<String>,
    /// Modal favourite distance `c` before scaling.
    pub c: f64,
    /// Points left out of the fitted parts, in increasing order.
    pub exceptional: Vec<usize>,
    /// Fitted parts, sphere first in odd dimension.
    pub parts: Vec<Vec<usize>>,
    /// Squared radii after scaling to `c = 1`.
    pub radii_sq: Vec<f64>,
    /// Scaled distance of each point to the carrier of its part, or to the
    /// nearest carrier for points outside all parts.
    pub residuals: Vec<f64>,
    /// `|Sᵢ|/n` per part.
    pub balance: Vec<f64>,
}

impl FitReport {
    fn failed(c: f64, n: usize, reason: String) -> Self {
        FitReport {
            ok: false,
            failure: Some(reason),
            c,
            exceptional: (0..n).collect(),
            parts: Vec::new(),
            radii_sq: Vec::new(),
            residuals: vec![f64::INFINITY; n],
            balance: Vec::new(),
        }
    }
}

struct Carrier {
    centre: DVector<f64>,
    basis: Vec<DVector<f64>>,
    radius: f64,
}

impl Carrier {
    fn residual(&self, x: &DVector<f64>) -> f64 {
        let v = x - &self.centre;
        let coords: Vec<f64> = self.basis.iter().map(|b| b.dot(&v)).collect();
        let in_flat_sq: f64 = coords.iter().map(|c| c * c).sum();
        let off_sq = (v.norm_squared() - in_flat_sq).max(0.0);
        let radial = in_flat_sq.sqrt() - self.radius;
        (off_sq + radial * radial).sqrt()
    }
}

// Flat through the centroid by principal axes; centre by the algebraic
// (Kåsa) fit in flat coordinates; radius as the mean distance to it.
fn fit_carrier(xs: &[DVector<f64>], dims: usize) -> Option<Carrier> {
    let d = xs.first()?.len();
    let m = xs.iter().fold(DVector::zeros(d), |acc, x| acc + x) / xs.len() as f64;
    let centred: Vec<DVector<f64>> = xs.iter().map(|x| x - &m).collect();
    let basis: Vec<DVector<f64>> = principal_axes(&centred, d)
        .into_iter()
        .take(dims)
        .map(|e| e.1)
        .collect();
    let local: Vec<Vec<f64>> = centred
        .iter()
        .map(|v| basis.iter().map(|b| b.dot(v)).collect())
        .collect();
    // |y|² = 2a·y + k, least squares in (a, k)
    let rows = local.len();
    let mut a = DMatrix::zeros(rows, dims + 1);
    let mut rhs = DVector::zeros(rows);
    for (r, y) in local.iter().enumerate() {
        for k in 0..dims {
            a[(r, k)] = 2.0 * y[k];
        }
        a[(r, dims)] = 1.0;
        rhs[r] = y.iter().map(|v| v * v).sum();
    }
    let sol = a.svd(true, true).solve(&rhs, 1e-14).ok()?;
    let mut centre = m;
    for k in 0..dims {
        centre += &basis[k] * sol[k];
    }
    let radius = xs
        .iter()
        .map(|x| {
            let v = x - &centre;
            basis.iter().map(|b| b.dot(&v).powi(2)).sum::<f64>().sqrt()
        })
        .sum::<f64>()
        / xs.len() as f64;
    Some(Carrier {
        centre,
        basis,
        radius,
    })
}

/// Fits a Lenz configuration to `(S, r)` in R^d; see [`FitReport`].
///
/// The modal value of `r` is scaled to 1; double edges at that distance
/// select the structured points, the pairs not at that distance split them
/// into candidate parts, and each part is fitted with a circle (a sphere
/// for the part of largest third principal value when `d` is odd).
pub fn lenz_fit(
    points: &NumericPointSet,
    r: &DistanceAssignment<f64>,
    tol: &FitTolerances,
) -> Result<FitReport> {
    let n = points.len();
    let d = points.dim;
    if d < 4 {
        return Err(Error::Dimension(d));
    }
    if r.len() != n {
        return Err(Error::Domain(format!(
            "assignment has {} values for {n} points",
            r.len()
        )));
    }
    let p = d / 2;
    if n < 4 * p {
        return Err(Error::Domain(format!(
            "fit needs at least {} points, got {n}",
            4 * p
        )));
    }
    // (1) modal r
    let m = FloatMetric::new(points, tol.distance);
    let modal = m
        .classes(r.values())
        .into_iter()
        .max_by(|a, b| a.1.cmp(&b.1).then(b.0.total_cmp(&a.0)))
        .map(|c| c.0)
        .expect("n > 0");
    let c = modal.sqrt();
    let scaled = NumericPointSet::new(
        d,
        points
            .coords
            .iter()
            .map(|x| x.iter().map(|v| v / c).collect())
            .collect(),
    );
    let sm = FloatMetric::new(&scaled, tol.distance);
    let t = Distances::build(&sm)?;
    let on_c: Vec<bool> = r
        .values()
        .iter()
        .map(|v| (v / modal - 1.0).abs() <= tol.distance)
        .collect();
    // (2) double edges at distance 1 among points with r = c
    let unit = |i: usize, j: usize| (t.get(i, j) - 1.0).abs() <= tol.distance;
    let mut uf = UnionFind::<usize>::new(n);
    for (i, j, _) in t.pairs() {
        if on_c[i] && on_c[j] && unit(i, j) {
            uf.union(i, j);
        }
    }
    let core: Vec<usize> = components(uf.into_labeling())
        .into_iter()
        .filter(|comp| comp.len() >= 4)
        .flatten()
        .collect();
    // (3) blocks of the "not at distance 1" graph, merged down to p parts
    let mut pos = vec![usize::MAX; n];
    for (k, &i) in core.iter().enumerate() {
        pos[i] = k;
    }
    let mut uf = UnionFind::<usize>::new(core.len());
    for a in 0..core.len() {
        for b in a + 1..core.len() {
            if !unit(core[a], core[b]) {
                uf.union(a, b);
            }
        }
    }
    let xs: Vec<DVector<f64>> = scaled
        .coords
        .iter()
        .map(|x| DVector::from_column_slice(x))
        .collect();
    let centroid = xs.iter().fold(DVector::zeros(d), |acc, x| acc + x) / n as f64;
    let rel: Vec<DVector<f64>> = core.iter().map(|&i| &xs[i] - &centroid).collect();
    let blocks = merge_blocks(components(uf.into_labeling()), &rel, p);
    let mut parts: Vec<Vec<usize>> = blocks
        .into_iter()
        .map(|b| b.into_iter().map(|k| core[k]).collect())
        .filter(|b: &Vec<usize>| b.len() >= 4)
        .collect();
    if parts.len() < p {
        return Ok(FitReport::failed(
            c,
            n,
            format!("found {} parts of size >= 4, need {p}", parts.len()),
        ));
    }
    // (4) carriers
    let sphere = if d % 2 == 1 {
        (0..p).max_by(|&a, &b| {
            let third = |k: usize| {
                let g: Vec<DVector<f64>> = parts[k].iter().map(|&i| &xs[i] - &centroid).collect();
                let gm = g.iter().fold(DVector::zeros(d), |acc, x| acc + x) / g.len() as f64;
                let gc: Vec<DVector<f64>> = g.iter().map(|x| x - &gm).collect();
                principal_axes(&gc, d).get(2).map_or(0.0, |e| e.0)
            };
            third(a).total_cmp(&third(b))
        })
    } else {
        None
    };
    if let Some(s) = sphere {
        parts.swap(0, s);
    }
    let odd = d % 2 == 1;
    let carriers: Vec<Carrier> = match parts
        .iter()
        .enumerate()
        .map(|(k, part)| {
            let pts: Vec<DVector<f64>> = part.iter().map(|&i| xs[i].clone()).collect();
            fit_carrier(&pts, if odd && k == 0 { 3 } else { 2 })
        })
        .collect::<Option<Vec<_>>>()
    {
        Some(c) => c,
        None => return Ok(FitReport::failed(c, n, "carrier fit failed".into())),
    };
    // Sphere points on a great circle leave the third axis undetermined;
    // take it orthogonal to every other flat.
    let mut carriers = carriers;
    if odd {
        let flat_extent = parts[0]
            .iter()
            .map(|&i| {
                carriers[0].basis[2]
                    .dot(&(&xs[i] - &carriers[0].centre))
                    .abs()
            })
            .fold(0.0, f64::max);
        if flat_extent <= tol.residual {
            let mut taken: Vec<DVector<f64>> = carriers[0].basis[..2].to_vec();
            taken.extend(carriers[1..].iter().flat_map(|c| c.basis.iter().cloned()));
            let best = (0..d)
                .map(|a| {
                    let mut e = DVector::zeros(d);
                    e[a] = 1.0;
                    for u in &taken {
                        let c = u.dot(&e);
                        e -= u * c;
                    }
                    e
                })
                .max_by(|a, b| a.norm().total_cmp(&b.norm()))
                .expect("d > 0");
            carriers[0].basis[2] = best.normalize();
        }
    }
    // (5) exceptional set
    let mut member = vec![None; n];
    for (k, part) in parts.iter().enumerate() {
        for &i in part {
            member[i] = Some(k);
        }
    }
    let residuals: Vec<f64> = (0..n)
        .map(|i| match member[i] {
            Some(k) => carriers[k].residual(&xs[i]),
            None => carriers
                .iter()
                .map(|c| c.residual(&xs[i]))
                .fold(f64::INFINITY, f64::min),
        })
        .collect();
    let mut exceptional = Vec::new();
    for i in 0..n {
        let keep = member[i].is_some() && on_c[i] && residuals[i] <= tol.residual;
        if !keep {
            exceptional.push(i);
            member[i] = None;
        }
    }
    let parts: Vec<Vec<usize>> = parts
        .iter()
        .map(|part| {
            part.iter()
                .copied()
                .filter(|&i| member[i].is_some())
                .collect()
        })
        .collect();
    // (6) Lenz conditions
    let radii_sq: Vec<f64> = carriers.iter().map(|c| c.radius * c.radius).collect();
    let mut failure = None;
    'check: for a in 0..p {
        for b in a + 1..p {
            if (radii_sq[a] + radii_sq[b] - 1.0).abs() > tol.orthogonality {
                failure = Some(format!(
                    "r{}² + r{}² = {} differs from 1",
                    a + 1,
                    b + 1,
                    radii_sq[a] + radii_sq[b]
                ));
                break 'check;
            }
            if (&carriers[a].centre - &carriers[b].centre).norm() > tol.orthogonality {
                failure = Some(format!("parts {} and {} are not concentric", a + 1, b + 1));
                break 'check;
            }
            for u in &carriers[a].basis {
                for v in &carriers[b].basis {
                    if u.dot(v).abs() > tol.orthogonality {
                        failure = Some(format!("flats {} and {} are not orthogonal", a + 1, b + 1));
                        break 'check;
                    }
                }
            }
        }
    }
    let balance = parts
        .iter()
        .map(|part| part.len() as f64 / n as f64)
        .collect();
    Ok(FitReport {
        ok: failure.is_none(),
        failure,
        c,
        exceptional,
        parts,
        radii_sq,
        residuals,
        balance,
    })
}

/// [`lenz_fit`] for an exact point set, embedded in `f64` first.
pub fn lenz_fit_exact(
    s: &PointSet,
    r: &DistanceAssignment<crate::scalar::ExactDist>,
    tol: &FitTolerances,
) -> Result<FitReport> {
    let r = DistanceAssignment::new(r.values().iter().map(|v| v.to_f64()).collect());
    lenz_fit(&embed_f64(s), &r, tol)
}

/// The Lenz system of a successful fit, with radii rounded to the nearest
/// rational of denominator at most 10⁶.
pub fn fitted_system(d: usize, report: &FitReport) -> Option<LenzSystem> {
    use num_rational::BigRational;
    if !report.ok {
        return None;
    }
    let radii = report
        .radii_sq
        .iter()
        .map(|&x| {
            let r = BigRational::from_float(x)?;
            let den = num_bigint::BigInt::from(1_000_000);
            Some(BigRational::new((r * &den).round().to_integer(), den).into())
        })
        .collect::<Option<Vec<crate::scalar::ExtScalar>>>()?;
    let lam = &radii[0] + &radii[1];
    LenzSystem::new(d, lam, radii).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{balanced_squares_config, exceptional_config};
    use crate::scalar::{ExactDist, ExtScalar};

    #[test]
    fn optimal_on_unit_square() {
        let s = PointSet::from_integer_coords(
            4,
            &[
                vec![0, 0, 0, 0],
                vec![1, 0, 0, 0],
                vec![1, 1, 0, 0],
                vec![0, 1, 0, 0],
            ],
        )
        .unwrap();
        let t = Distances::build(&s).unwrap();
        let (r, e) = optimal_assignment(&t).unwrap();
        assert_eq!(e, 8);
        assert!(r.values().iter().all(|v| *v == ExtScalar::one().into()));
    }

    #[test]
    fn optimal_on_exceptional() {
        let ex = exceptional_config(9).unwrap();
        let t = Distances::build(&ex.points).unwrap();
        let (r, e) = optimal_assignment(&t).unwrap();
        assert_eq!(e, 56);
        assert_eq!(r, ex.assignment);
    }

    #[test]
    fn sequential_score_matches_optimal_assignment() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let clean = embed_f64(&balanced_squares_config(5, 30).unwrap().point_set());
        for pts in [
            clean.clone(),
            perturb(&mut rng, &clean, 1e-12),
            random_points(&mut rng, 4, 20),
        ] {
            let m = FloatMetric::new(&pts, 1e-9);
            let t = Distances::build(&m).unwrap();
            assert_eq!(score(&pts, 1e-9), optimal_assignment(&t).unwrap().1);
        }
    }

    #[test]
    fn snap_angles_merges_near_quarter_turns() {
        use std::f64::consts::FRAC_PI_2;
        let a = [0.001, FRAC_PI_2 - 0.002, 1.0, -0.001 + 2.0 * FRAC_PI_2];
        let s = snap_angles(&a, 4, 0.02);
        assert!((s[0] - 0.0).abs() < 1e-3 && ((s[1] - FRAC_PI_2) - s[0]).abs() < 1e-12);
        assert!(((s[3] - 2.0 * FRAC_PI_2) - s[0]).abs() < 1e-12);
        assert_eq!(s[2], 1.0);
    }

    #[test]
    fn search_recovers_perturbed_squares() {
        let clean = embed_f64(&balanced_squares_config(4, 16).unwrap().point_set());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let init = perturb(&mut rng, &clean, 1e-3);
        let opts = SearchOptions {
            iterations: 200,
            ..SearchOptions::default()
        };
        let res = local_search(4, 16, Some(init.clone()), &opts).unwrap();
        assert!(res.best_score >= 160, "{}", res.best_score);
        let none = local_search(
            4,
            16,
            Some(init.clone()),
            &SearchOptions {
                iterations: 0,
                ..opts
            },
        )
        .unwrap();
        assert_eq!(none.best, init);
        assert!(res.trace.windows(2).all(|w| w[0].best <= w[1].best));
    }

    #[test]
    fn fit_recovers_clean_squares() {
        let cfg = balanced_squares_config(4, 200).unwrap();
        let r = DistanceAssignment::constant(200, ExactDist::from(ExtScalar::one()));
        let rep = lenz_fit_exact(&cfg.point_set(), &r, &FitTolerances::default()).unwrap();
        assert!(rep.ok, "{:?}", rep.failure);
        assert!(rep.exceptional.is_empty());
        for r in &rep.radii_sq {
            assert!((r - 0.5).abs() < 1e-9);
        }
        assert_eq!(rep.balance, vec![0.5, 0.5]);
    }

    #[test]
    fn fit_rejects_random_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let pts = random_points(&mut rng, 4, 50);
        let m = FloatMetric::new(&pts, DEFAULT_TOL);
        let t = Distances::build(&m).unwrap();
        let (r, _) = optimal_assignment(&t).unwrap();
        let rep = lenz_fit(&pts, &r, &FitTolerances::default()).unwrap();
        assert!(!rep.ok);
    }
}
