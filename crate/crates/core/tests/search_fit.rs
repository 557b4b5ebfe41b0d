use lenzlab::constructions::{balanced_squares_config, exceptional_config};
use lenzlab::digraph::DistanceAssignment;
use lenzlab::embed::{embed_f64, NumericPointSet};
use lenzlab::metric::{Distances, FloatMetric};
use lenzlab::search::{lenz_fit, local_search, optimal_assignment, FitTolerances, SearchOptions};

fn scaled(p: &NumericPointSet, c: f64) -> NumericPointSet {
    NumericPointSet::new(
        p.dim,
        p.coords
            .iter()
            .map(|x| x.iter().map(|v| v * c).collect())
            .collect(),
    )
}

#[test]
fn fit_is_scale_invariant() {
    let pts = embed_f64(&balanced_squares_config(4, 40).unwrap().point_set());
    let mut moved = pts.clone();
    moved.coords[3] = vec![0.3, 0.1, -0.2, 0.05];
    for c in [1.0, 3.5, 0.01] {
        let r = DistanceAssignment::constant(40, c * c);
        let rep = lenz_fit(&scaled(&moved, c), &r, &FitTolerances::default()).unwrap();
        assert!(rep.ok, "{:?}", rep.failure);
        assert_eq!(rep.exceptional, vec![3]);
        assert!((rep.c - c).abs() < 1e-12 * c);
    }
}

#[test]
fn fit_finds_the_sphere_in_odd_dimension() {
    let cfg = balanced_squares_config(5, 60).unwrap();
    let pts = embed_f64(&cfg.point_set());
    let r = DistanceAssignment::constant(60, 1.0);
    let rep = lenz_fit(&pts, &r, &FitTolerances::default()).unwrap();
    assert!(rep.ok, "{:?}", rep.failure);
    assert!(rep.exceptional.is_empty());
    let mut got = rep.parts.clone();
    got.sort();
    let mut want = cfg.associated_partition();
    want.sort();
    assert_eq!(got, want);
}

#[test]
fn fit_puts_the_exceptional_centre_in_t() {
    let ex = exceptional_config(33).unwrap();
    let pts = embed_f64(&ex.points);
    let m = FloatMetric::new(&pts, 1e-9);
    let (r, e) = optimal_assignment(&Distances::build(&m).unwrap()).unwrap();
    assert_eq!(e as u64, 2 * lenzlab::closed_forms::u4_exact(33).unwrap());
    let rep = lenz_fit(&pts, &r, &FitTolerances::default()).unwrap();
    assert!(rep.ok);
    assert_eq!(rep.exceptional, vec![ex.centre]);
}

#[test]
fn search_trace_is_monotone_and_seeded() {
    let opts = SearchOptions {
        seed: 7,
        iterations: 3000,
        ..SearchOptions::default()
    };
    let a = local_search(4, 12, None, &opts).unwrap();
    let b = local_search(4, 12, None, &opts).unwrap();
    assert_eq!(a.best, b.best);
    assert!(a.best_score >= a.initial_score);
    assert!(a.trace.windows(2).all(|w| w[0].best <= w[1].best));
    assert_eq!(a.trace.len(), 3001);
    // a snap from random points already gives the cross-part pairs
    assert!(a.best_score >= 72, "{}", a.best_score);
}

#[test]
fn random_starts_reach_the_cross_pair_count() {
    // 2·t₂(12) = 72
    for seed in 0..10 {
        let opts = SearchOptions {
            seed,
            iterations: 2000,
            ..SearchOptions::default()
        };
        let res = local_search(4, 12, None, &opts).unwrap();
        assert!(res.best_score >= 72, "seed {seed}: {}", res.best_score);
    }
}
