//! Acceptance suite: one line per criterion, all must pass.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lenzlab::closed_forms::{
    erdos_even_sandwich, growth_check, step_criterion_check, turan, u4_exact, BoundParams,
};
use lenzlab::constructions::{
    arc_config, balanced_squares_config, exceptional_config, pentagon_config, random_lenz_config,
};
use lenzlab::digraph::{
    count_pairs_at, cross_counts, decompose, diameter_pairs, favourite_digraph,
    furthest_assignment, DistanceAssignment,
};
use lenzlab::embed::{embed_f64, embed_numeric, BigEval};
use lenzlab::geometry::PointSet;
use lenzlab::metric::{BigMetric, Distances};
use lenzlab::scalar::{ExactDist, ExtScalar};
use lenzlab::search::{
    lenz_fit, local_search, optimal_assignment, perturb, FitTolerances, SearchOptions,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn one() -> ExactDist {
    ExtScalar::one().into()
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, start: Instant) -> Result<(), String> {
    check(start.elapsed() < limit, || {
        format!("took {:.1?}, limit {limit:?}", start.elapsed())
    })
}

fn unit_pairs(s: &PointSet) -> u64 {
    count_pairs_at(&Distances::build(s).unwrap(), &one()) as u64
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut cases = 0;
    for n in (8..=400).step_by(8) {
        let got = unit_pairs(&balanced_squares_config(4, n).unwrap().point_set());
        let want = u4_exact(n as u64).unwrap();
        check(got == want, || format!("squares n={n}: {got} != {want}"))?;
        cases += 1;
    }
    for n in (10..=400).step_by(10) {
        let got = unit_pairs(&pentagon_config(n).unwrap().point_set());
        let want = u4_exact(n as u64).unwrap();
        check(got == want, || format!("pentagon n={n}: {got} != {want}"))?;
        cases += 1;
    }
    within(Duration::from_secs(60), start)?;
    Ok(format!(
        "{cases} constructions attain u4 in {:.1?}",
        start.elapsed()
    ))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let half: ExactDist = ExtScalar::ratio(1, 2).into();
    let mut cases = 0;
    for n in (9..=401).step_by(8) {
        let ex = exceptional_config(n).unwrap();
        let t = Distances::build(&ex.points).unwrap();
        let e = favourite_digraph(&t, &ex.assignment).unwrap().edge_count() as u64;
        let want = 2 * u4_exact(n as u64).unwrap();
        check(e == want, || format!("n={n}: e_r = {e}, expected {want}"))?;
        let (r, e_opt) = optimal_assignment(&t).unwrap();
        for (i, v) in r.values().iter().enumerate() {
            let expect = if i == ex.centre { &half } else { &one() };
            check(v == expect, || format!("n={n}: optimal r at {i} is {v}"))?;
        }
        check(e_opt as u64 == want, || {
            format!("n={n}: optimal e_r = {e_opt}")
        })?;
        cases += 1;
    }
    within(Duration::from_secs(60), start)?;
    Ok(format!(
        "{cases} exceptional configurations, e_r = 2·u4 and r recovered, {:.1?}",
        start.elapsed()
    ))
}

fn criterion_3() -> Outcome {
    let mut cases = 0;
    for d in 4..=9 {
        for n in [24, 60, 120] {
            let s = balanced_squares_config(d, n).unwrap().point_set();
            let t = Distances::build(&s).unwrap();
            let lam: ExactDist = s.system().unwrap().lambda_sq().clone().into();
            let (r, e) = optimal_assignment(&t).unwrap();
            check(r.values().iter().all(|v| *v == lam), || {
                format!("d={d} n={n}: r is not constant λ")
            })?;
            let pairs = count_pairs_at(&t, &lam);
            check(e == 2 * pairs, || {
                format!("d={d} n={n}: e_r = {e}, pairs = {pairs}")
            })?;
            cases += 1;
        }
    }
    Ok(format!(
        "{cases} balanced configurations with r ≡ λ and e_r = 2u"
    ))
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let spread = BigRational::new(BigInt::from(1), BigInt::from(40));
    let mut cases = 0;
    for d in 4..=7usize {
        let p = (d / 2) as u64;
        for n in (d / 2).max(2)..=200 {
            let s = arc_config(d, n, &spread).unwrap().point_set();
            let t = Distances::build(&s).unwrap();
            let g = favourite_digraph(&t, &furthest_assignment(&t).unwrap()).unwrap();
            let tp = turan(p, n as u64);
            check(g.edge_count() as u64 == 2 * tp, || {
                format!("d={d} n={n}: e_D = {}", g.edge_count())
            })?;
            let (_, m) = diameter_pairs(&t).unwrap();
            check(m as u64 == tp, || {
                format!("d={d} n={n}: M = {m}, t_p = {tp}")
            })?;
            cases += 1;
        }
    }
    Ok(format!(
        "{cases} arc configurations with e_D = 2t_p and M = t_p, {:.1?}",
        start.elapsed()
    ))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let params = BoundParams::default();
    let mut checked = 0;
    for d in 4..=9 {
        let rep = growth_check(d, 1..=5000, &params).unwrap();
        if let Some(v) = rep.violations().next() {
            return Err(format!(
                "{} d={} n={} k={}: {} < {}",
                v.family, v.d, v.n, v.k, v.lhs, v.rhs
            ));
        }
        checked += rep.checked;
    }
    let step = step_criterion_check(6..=100_000);
    check(step.passed(), || "step criterion violated".into())?;
    checked += step.checked;
    within(Duration::from_secs(300), start)?;
    Ok(format!(
        "{checked} (n, k) instances, zero violations, {:.1?}",
        start.elapsed()
    ))
}

// Squared distance of integer points, computed directly.
fn int_dist(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for inst in 0..1000 {
        let d = rng.gen_range(4..=6);
        let n = rng.gen_range(2..=60);
        let mut pts: Vec<Vec<i64>> = Vec::new();
        while pts.len() < n {
            let p: Vec<i64> = (0..d).map(|_| rng.gen_range(-3..=3)).collect();
            if !pts.contains(&p) {
                pts.push(p);
            }
        }
        let r_int: Vec<i64> = (0..n)
            .map(|i| {
                if rng.gen_bool(0.15) {
                    rng.gen_range(1..=40)
                } else {
                    let j = (i + rng.gen_range(1..n)) % n;
                    int_dist(&pts[i], &pts[j])
                }
            })
            .collect();
        let s = PointSet::from_integer_coords(d, &pts).unwrap();
        let t = Distances::build(&s).unwrap();
        let r = DistanceAssignment::exact(
            r_int
                .iter()
                .map(|&v| ExtScalar::from_int(v).into())
                .collect(),
        )
        .unwrap();
        let g = favourite_digraph(&t, &r).unwrap();
        let oracle: BTreeSet<(usize, usize)> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| i != j && int_dist(&pts[i], &pts[j]) == r_int[i])
            .collect();
        let edges: BTreeSet<(usize, usize)> = g.edges().iter().copied().collect();
        check(edges == oracle, || {
            format!("instance {inst}: edge set differs from direct count")
        })?;
        let dec = decompose(&g);
        check(
            g.edge_count() == dec.singles.len() + 2 * dec.doubles.len(),
            || format!("instance {inst}: |E| != |E1| + 2|E2|"),
        )?;
        let comp = dec.part_of();
        check(dec.doubles.iter().all(|&(i, j)| comp[i] == comp[j]), || {
            format!("instance {inst}: double edge across components")
        })?;
        // the identity on the component partition and on a random one
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let cuts = rng.gen_range(1..=n.min(5));
        let random_parts: Vec<Vec<usize>> = (0..cuts)
            .map(|c| order.iter().copied().skip(c).step_by(cuts).collect())
            .collect();
        for parts in [dec.parts.clone(), random_parts] {
            let cross = cross_counts(&g, &parts).unwrap();
            let sum: usize = cross.iter().flatten().sum();
            check(sum == g.edge_count(), || {
                format!("instance {inst}: counting identity fails")
            })?;
            for (a, pa) in parts.iter().enumerate() {
                for (b, pb) in parts.iter().enumerate() {
                    let direct = oracle
                        .iter()
                        .filter(|(i, j)| pa.contains(i) && pb.contains(j))
                        .count();
                    check(cross[a][b] == direct, || {
                        format!("instance {inst}: e_r(S{a}, S{b}) mismatch")
                    })?;
                }
            }
        }
    }
    Ok("1000 instances: counting identity, |E| = |E1| + 2|E2|, doubles within components".into())
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut pairs = 0usize;
    for inst in 0..200 {
        let d = rng.gen_range(4..=9);
        let n = rng.gen_range(4 * (d / 2)..=100);
        let s = random_lenz_config(&mut rng, d, n).unwrap().point_set();
        let t = Distances::build(&s).unwrap();
        let (r, _) = optimal_assignment(&t).unwrap();
        let exact = favourite_digraph(&t, &r).unwrap();
        let big = embed_numeric(&s, 256);
        let m = BigMetric::new(&big, 100);
        let bt = Distances::build(&m).unwrap();
        let mut ev = BigEval::new(256 + 16);
        let br = DistanceAssignment::new(r.values().iter().map(|v| ev.dist(v)).collect());
        let numeric = favourite_digraph(&bt, &br).unwrap();
        check(exact.edges() == numeric.edges(), || {
            format!("instance {inst} (d={d}, n={n}): exact and 256-bit digraphs differ")
        })?;
        let ge = favourite_digraph(&t, &furthest_assignment(&t).unwrap()).unwrap();
        let gb = favourite_digraph(&bt, &furthest_assignment(&bt).unwrap()).unwrap();
        check(ge.edges() == gb.edges(), || {
            format!("instance {inst}: furthest digraphs differ")
        })?;
        pairs += n * (n - 1);
    }
    Ok(format!(
        "200 configurations, {pairs} ordered pairs, zero discrepancies"
    ))
}

fn criterion_8() -> Outcome {
    let base = balanced_squares_config(4, 200).unwrap();
    let clean = embed_f64(&base.point_set());
    let truth: Vec<Vec<usize>> = base.associated_partition();
    let r = DistanceAssignment::constant(200, 1.0);
    let tol = FitTolerances::default();
    let clean_rep = lenz_fit(&clean, &r, &tol).unwrap();
    check(clean_rep.ok && clean_rep.exceptional.is_empty(), || {
        "clean instance: T is not empty".into()
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut exact = 0;
    for inst in 0..100 {
        let m = rng.gen_range(0..=10);
        let mut idx: Vec<usize> = (0..200).collect();
        idx.shuffle(&mut rng);
        let mut moved: Vec<usize> = idx[..m].to_vec();
        moved.sort_unstable();
        let mut pts = clean.clone();
        for &i in &moved {
            pts.coords[i] = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
        }
        let rep = lenz_fit(&pts, &r, &tol).unwrap();
        let want: BTreeSet<Vec<usize>> = truth
            .iter()
            .map(|p| p.iter().copied().filter(|i| !moved.contains(i)).collect())
            .collect();
        let got: BTreeSet<Vec<usize>> = rep.parts.iter().cloned().collect();
        let ok = rep.ok && rep.exceptional == moved && got == want;
        if m == 0 {
            check(ok, || format!("clean instance {inst} not recovered"))?;
        }
        exact += usize::from(ok);
    }
    check(exact >= 95, || format!("only {exact}/100 exact recoveries"))?;
    Ok(format!("{exact}/100 planted instances recovered exactly"))
}

fn criterion_9() -> Outcome {
    for n in 5..=100_000u64 {
        let (lo, hi) = erdos_even_sandwich(4, n).unwrap();
        let u = Ratio::from_integer(u4_exact(n).unwrap() as i128);
        check(lo <= u && u <= hi, || {
            format!("n={n}: {u} outside [{lo}, {hi}]")
        })?;
    }
    Ok("u4(n) within the even-dimension sandwich for 5 ≤ n ≤ 100000".into())
}

fn criterion_10() -> Outcome {
    let start = Instant::now();
    let clean = embed_f64(&balanced_squares_config(4, 16).unwrap().point_set());
    let mut scores = Vec::new();
    for seed in 0..10 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let init = perturb(&mut rng, &clean, 1e-3);
        let opts = SearchOptions {
            seed,
            iterations: 10_000,
            ..SearchOptions::default()
        };
        let res = local_search(4, 16, Some(init), &opts).unwrap();
        check(res.best_score >= res.initial_score, || {
            format!("seed {seed}: worse than start")
        })?;
        scores.push(res.best_score);
    }
    check(scores.iter().all(|&s| s >= 160), || {
        format!("scores {scores:?}")
    })?;
    within(Duration::from_secs(60), start)?;
    Ok(format!(
        "10/10 seeds reach e_r ≥ 160 (scores {scores:?}), {:.1?}",
        start.elapsed()
    ))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 10] = [
        ("u4 attained by squares and pentagons, n ≤ 400", criterion_1),
        ("exceptional configurations, n ≤ 401", criterion_2),
        ("balanced configurations: r ≡ λ, e_r = 2u", criterion_3),
        ("furthest-neighbour doubling on arcs", criterion_4),
        (
            "growth inequalities, n ≤ 5000, step criterion n ≤ 100000",
            criterion_5,
        ),
        ("counting identity on random instances", criterion_6),
        ("exact vs 256-bit favourite digraphs", criterion_7),
        ("Lenz fit recovers planted structure", criterion_8),
        ("u4 within the even-dimension sandwich", criterion_9),
        ("search from perturbed squares", criterion_10),
    ];
    let mut failed = Vec::new();
    for (k, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", k + 1),
            Err(why) => {
                println!("FAIL {:>2} {name}: {why}", k + 1);
                failed.push(k + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
