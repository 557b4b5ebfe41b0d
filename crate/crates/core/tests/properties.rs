use std::cmp::Ordering;

use astro_float::{BigFloat, RoundingMode};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use lenzlab::constructions::{block_phase, random_lenz_config};
use lenzlab::digraph::{decompose, favourite_digraph, furthest_assignment};
use lenzlab::embed::BigEval;
use lenzlab::geometry::{CirclePoint, LenzSystem, Point, PointSet, SpherePoint};
use lenzlab::io::{emit_pointset, parse_pointset, PointSetFile};
use lenzlab::metric::Distances;
use lenzlab::scalar::{Cyclo20, ExactDist, ExtScalar};

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn ext() -> impl Strategy<Value = ExtScalar> {
    (-20i64..=20, 1i64..=12, -20i64..=20, 1i64..=12)
        .prop_map(|(a, b, c, d)| ExtScalar::new(q(a, b), q(c, d)))
}

fn dist() -> impl Strategy<Value = ExactDist> {
    (
        ext(),
        ext(),
        ext(),
        ext(),
        prop::sample::select(vec![1u64, 2, 3, 6, 7, 10, 12, 13, 45]),
    )
        .prop_map(|(a, b, c, d, r)| ExactDist::with_surd(Cyclo20::new(a, b), Cyclo20::new(c, d), r))
}

fn big_cmp(ev: &mut BigEval, a: &ExactDist, b: &ExactDist) -> Option<Ordering> {
    let p = ev.precision();
    let diff = ev.dist(a).sub(&ev.dist(b), p, RoundingMode::ToEven);
    let tiny = BigFloat::from_f64(1e-60, p);
    if diff.abs().cmp(&tiny).is_some_and(|c| c <= 0) {
        None
    } else {
        Some(if diff.is_positive() {
            Ordering::Greater
        } else {
            Ordering::Less
        })
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn exact_order_agrees_with_256_bits(a in dist(), b in dist()) {
        let mut ev = BigEval::new(256);
        match big_cmp(&mut ev, &a, &b) {
            Some(o) => prop_assert_eq!(a.cmp(&b), o),
            None => prop_assert_eq!(a.cmp(&b), Ordering::Equal),
        }
        prop_assert_eq!(a.cmp(&b), b.cmp(&a).reverse());
        prop_assert_eq!(a == b, a.cmp(&b) == Ordering::Equal);
    }

    #[test]
    fn circle_chords_match_float_geometry(k in 0i64..20, m in 0i64..20, qa in 0usize..8, qb in 0usize..8, two in any::<bool>()) {
        let sys = LenzSystem::equal_radii(4, ExtScalar::one()).unwrap();
        let part = usize::from(two);
        let a = CirclePoint::new(part, q(k, 20), block_phase(qa));
        let b = CirclePoint::new(part, q(m, 20), block_phase(qb));
        prop_assume!(a != b);
        let s = PointSet::new(4, Some(sys), vec![a.clone().into(), b.clone().into()]).unwrap();
        let exact = s.pair_distance_sq(0, 1).unwrap().to_f64();
        let angle = |t: i64, qq: usize| {
            let (c, s) = block_phase(qq).to_f64();
            std::f64::consts::TAU * t as f64 / 20.0 + s.atan2(c)
        };
        let (x, y) = (angle(k, qa), angle(m, qb));
        let float = 0.5 * ((x.cos() - y.cos()).powi(2) + (x.sin() - y.sin()).powi(2));
        prop_assert!((exact - float).abs() < 1e-12, "{} vs {}", exact, float);
    }

    #[test]
    fn sphere_chords_match_float_geometry(u in prop::array::uniform3(-6i64..=6), v in prop::array::uniform3(-6i64..=6)) {
        prop_assume!(u != [0, 0, 0] && v != [0, 0, 0]);
        let (su, sv) = (SpherePoint::new(0, u).unwrap(), SpherePoint::new(0, v).unwrap());
        prop_assume!(su != sv);
        let sys = LenzSystem::equal_radii(5, ExtScalar::one()).unwrap();
        let s = PointSet::new(5, Some(sys), vec![Point::Sphere(su), Point::Sphere(sv)]).unwrap();
        let exact = s.pair_distance_sq(0, 1).unwrap().to_f64();
        let unit = |w: [i64; 3]| {
            let n = (w.iter().map(|x| (x * x) as f64).sum::<f64>()).sqrt();
            w.map(|x| x as f64 / n)
        };
        let (a, b) = (unit(u), unit(v));
        let float = 0.5 * a.iter().zip(&b).map(|(x, y)| (x - y).powi(2)).sum::<f64>();
        prop_assert!((exact - float).abs() < 1e-12);
    }

    #[test]
    fn pointset_files_round_trip(seed in any::<u64>(), d in 4usize..=8, n in 8usize..40) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_lenz_config(&mut rng, d, n.max(4 * (d / 2))).unwrap().point_set();
        let text = emit_pointset(&PointSetFile::Exact(s.clone()));
        let back = parse_pointset(&text).unwrap();
        prop_assert_eq!(&back, &PointSetFile::Exact(s));
        prop_assert_eq!(emit_pointset(&back), text);
    }

    #[test]
    fn furthest_digraph_invariants(seed in any::<u64>(), d in 4usize..=7, n in 8usize..30) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_lenz_config(&mut rng, d, n.max(4 * (d / 2))).unwrap().point_set();
        let t = Distances::build(&s).unwrap();
        let g = favourite_digraph(&t, &furthest_assignment(&t).unwrap()).unwrap();
        prop_assert!(g.out_degrees().iter().all(|&k| k >= 1));
        let dec = decompose(&g);
        prop_assert_eq!(g.edge_count(), dec.singles.len() + 2 * dec.doubles.len());
        prop_assert_eq!(dec.part_sizes.iter().sum::<usize>(), s.len());
    }
}

#[test]
fn near_ties_fall_back_to_exact_arithmetic() {
    // convergents of √2 on either side, within the float filter's band
    let root2 = ExactDist::with_surd(Cyclo20::zero(), Cyclo20::one(), 2);
    let below: ExactDist = ExtScalar::from_rational(q(54608393, 38613965)).into();
    let above: ExactDist = ExtScalar::from_rational(q(22619537, 15994428)).into();
    assert!((root2.to_f64() - below.to_f64()).abs() < 1e-15);
    assert_eq!(root2.cmp(&below), Ordering::Greater);
    assert_eq!(root2.cmp(&above), Ordering::Less);
}
