//! Turán numbers, exact extremal values and the bound formulas, with
//! exhaustive checks of the growth inequalities.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::RangeInclusive;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// Edge count of the balanced complete `p`-partite graph on `n` vertices.
pub fn turan(p: u64, n: u64) -> u64 {
    assert!(p >= 1, "turan needs at least one class");
    let (q, r) = (n / p, n % p);
    (n * n - (r * (q + 1) * (q + 1) + (p - r) * q * q)) / 2
}

/// Maximum number of unit distances among `n ≥ 5` points in R⁴.
pub fn u4_exact(n: u64) -> Result<u64> {
    if n < 5 {
        return Err(Error::Domain(format!("u4 needs n >= 5, got {n}")));
    }
    let t = turan(2, n);
    Ok(if n.is_multiple_of(8) || n.is_multiple_of(10) {
        t + n
    } else {
        t + n - 1
    })
}

/// Value of the diameter-pair formula; `extrapolated` marks `n` below the
/// validity floor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MdValue {
    pub value: u64,
    pub extrapolated: bool,
}

/// Default validity floor `2d²` of the diameter formulas.
pub fn md_floor(d: u64) -> u64 {
    2 * d * d
}

/// Maximum number of diameter pairs among `n` points in R^d for large `n`.
pub fn md_exact(d: u64, n: u64) -> Result<MdValue> {
    md_exact_with_floor(d, n, md_floor(d))
}

pub fn md_exact_with_floor(d: u64, n: u64, floor: u64) -> Result<MdValue> {
    if d < 4 {
        return Err(Error::Dimension(d as usize));
    }
    Ok(MdValue {
        value: md_value(d, n),
        extrapolated: n < floor,
    })
}

fn md_value(d: u64, n: u64) -> u64 {
    let p = d / 2;
    match d {
        4 => turan(2, n) + n.div_ceil(2) + u64::from(n % 4 != 3),
        5 => turan(2, n) + n,
        _ if d.is_multiple_of(2) => turan(p, n) + p,
        _ => turan(p, n) + n.div_ceil(p) + p - 1,
    }
}

/// The unspecified constants of the upper bounds, supplied by the user.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundParams {
    pub c1: f64,
    pub c2: f64,
    /// Per-dimension start of the growth inequalities; missing entries use
    /// `default_n`.
    pub n_d: BTreeMap<u64, u64>,
    pub default_n: u64,
    /// Largest `n` for which the d = 5 unit-distance growth is checked
    /// against the augmentation construction.
    pub u5_n_max: u64,
}

impl Default for BoundParams {
    fn default() -> Self {
        BoundParams {
            c1: 1.0,
            c2: 1.0,
            n_d: BTreeMap::new(),
            default_n: 20,
            u5_n_max: 40,
        }
    }
}

impl BoundParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.c1 > 0.0 && self.c2 > 0.0) {
            return Err(Error::Domain("c1 and c2 must be positive".into()));
        }
        if self.default_n == 0 || self.n_d.values().any(|&v| v == 0) {
            return Err(Error::Domain("N_d must be at least 1".into()));
        }
        Ok(())
    }

    pub fn n_for(&self, d: u64) -> u64 {
        self.n_d.get(&d).copied().unwrap_or(self.default_n)
    }
}

/// `(u_upper, f_upper)`: the unit-distance upper bound and twice its
/// additive term for favourite distances.
pub fn bounds(d: u64, n: u64, params: &BoundParams) -> Result<(f64, f64)> {
    if d < 4 {
        return Err(Error::Dimension(d as usize));
    }
    params.validate()?;
    let p = (d / 2) as f64;
    let nf = n as f64;
    let main = (1.0 - 1.0 / p) * nf * nf;
    let extra = if d.is_multiple_of(2) {
        params.c1 * nf
    } else {
        params.c2 * (nf / d as f64).powf(4.0 / 3.0)
    };
    Ok((main / 2.0 + extra, main + 2.0 * extra))
}

/// Erdős's bounds `½(1−2/d)n² + n − d/2 ≤ u_d(n) ≤ ½(1−2/d)n² + n` for
/// even `d`.
pub fn erdos_even_sandwich(d: u64, n: u64) -> Result<(Ratio<i128>, Ratio<i128>)> {
    if d < 4 {
        return Err(Error::Dimension(d as usize));
    }
    if d % 2 == 1 {
        return Err(Error::Domain(format!("the sandwich needs even d, got {d}")));
    }
    let (d, n) = (d as i128, n as i128);
    let upper = Ratio::new((d - 2) * n * n, 2 * d) + n;
    Ok((upper - Ratio::new(d, 2), upper))
}

/// Checks `Σ nᵢ^α ≤ (Σ nᵢ)^α` for `α = num/den ≥ 1`; exact for integer `α`,
/// 256-bit otherwise.
pub fn power_sum_holds(ns: &[u64], num: u32, den: u32) -> bool {
    assert!(den > 0 && num >= den, "exponent must be at least 1");
    if num.is_multiple_of(den) {
        let a = num / den;
        let lhs: num_bigint::BigUint = ns
            .iter()
            .map(|&x| num_bigint::BigUint::from(x).pow(a))
            .sum();
        let total: u64 = ns.iter().sum();
        return lhs <= num_bigint::BigUint::from(total).pow(a);
    }
    use astro_float::{BigFloat, Consts, RoundingMode};
    let (p, rm) = (256, RoundingMode::ToEven);
    let mut cc = Consts::new().expect("constant cache");
    let alpha = BigFloat::from_u32(num, p).div(&BigFloat::from_u32(den, p), p, rm);
    let pow = |x: u64, cc: &mut Consts| BigFloat::from_u64(x, p).pow(&alpha, p, rm, cc);
    let mut lhs = BigFloat::from_u64(0, p);
    for &x in ns {
        if x > 0 {
            lhs = lhs.add(&pow(x, &mut cc), p, rm);
        }
    }
    let total: u64 = ns.iter().sum();
    if total == 0 {
        return true;
    }
    let rhs = pow(total, &mut cc);
    // allow for rounding in the last few bits
    let slack = rhs.mul(&BigFloat::from_f64(1e-60, p), p, rm);
    lhs.cmp(&rhs.add(&slack, p, rm)).is_some_and(|c| c <= 0)
}

/// One inequality family of the growth check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Family {
    /// `t_p(n) − t_p(n−k) ≥ (1−1/p)k(n−k)`
    Turan,
    /// `u₄(n) − u₄(n−k) ≥ ½k(n−k)`
    U4,
    /// `M_d(n) − M_d(n−k) ≥ (1−1/p)k(n−k)`
    Md,
    /// `M₅(n) − M₅(n−k) ≥ ½k(n−k) + (k²+4k−1)/4`
    M5,
    /// `u₅(n) − u₅(n−k) ≥ ½k(n−k) + (k²+2k−1)/4`, measured on the
    /// augmentation construction.
    U5Constructive,
    /// `u₄(n) − u₄(n−1) = (n−1)/2` only if `8 | n−1` or `10 | n−1`.
    U4Step,
    /// Unit pairs of the square (or, for `10 | n`, pentagon) construction
    /// against `u₄(n)`, with equality required when `8 | n` or `10 | n`.
    U4Construct,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Turan => "turan",
            Family::U4 => "u4",
            Family::Md => "md",
            Family::M5 => "m5",
            Family::U5Constructive => "u5-constructive",
            Family::U4Step => "u4-step",
            Family::U4Construct => "u4-construct",
        })
    }
}

/// The tightest `k` of one `(family, d, n)` sweep, or the failing one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckRow {
    pub family: Family,
    pub d: u64,
    pub n: u64,
    pub k: u64,
    pub lhs: Ratio<i128>,
    pub rhs: Ratio<i128>,
    pub pass: bool,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct GrowthReport {
    pub rows: Vec<CheckRow>,
    /// Number of `(n, k)` instances checked.
    pub checked: u64,
    pub notes: Vec<String>,
}

impl GrowthReport {
    pub fn violations(&self) -> impl Iterator<Item = &CheckRow> {
        self.rows.iter().filter(|r| !r.pass)
    }

    pub fn passed(&self) -> bool {
        self.violations().next().is_none()
    }

    fn merge(&mut self, other: GrowthReport) {
        self.rows.extend(other.rows);
        self.checked += other.checked;
        self.notes.extend(other.notes);
    }
}

// Sweeps k for one n, keeping the row with least slack (or the first
// failure). Values are scaled by `scale` so that both sides are integers.
fn sweep(
    family: Family,
    d: u64,
    n: u64,
    ks: RangeInclusive<u64>,
    scale: i128,
    mut sides: impl FnMut(u64) -> (i128, i128),
) -> Option<(CheckRow, u64)> {
    let mut best: Option<(i128, CheckRow)> = None;
    let mut count = 0;
    for k in ks {
        count += 1;
        let (l, r) = sides(k);
        let slack = l - r;
        if best.as_ref().is_none_or(|(s, _)| slack < *s) {
            let row = CheckRow {
                family,
                d,
                n,
                k,
                lhs: Ratio::new(l, scale),
                rhs: Ratio::new(r, scale),
                pass: slack >= 0,
            };
            best = Some((slack, row));
            if slack < 0 {
                break;
            }
        }
    }
    best.map(|(_, row)| (row, count))
}

/// Verifies the growth inequalities for every `n` in `ns` and every
/// `1 ≤ k < n` with `n − k ≥ N_d`; the d = 4 step criterion is included.
pub fn growth_check(d: u64, ns: RangeInclusive<u64>, params: &BoundParams) -> Result<GrowthReport> {
    if d < 4 {
        return Err(Error::Dimension(d as usize));
    }
    params.validate()?;
    let p = d / 2;
    let big_n = params.n_for(d);
    let per_n: Vec<GrowthReport> = ns
        .clone()
        .into_par_iter()
        .map(|n| {
            let mut rep = GrowthReport::default();
            if n <= big_n {
                return rep;
            }
            let ks = 1..=n - big_n;
            let pi = p as i128;
            let cross = |k: u64| (k * (n - k)) as i128;
            let mut push = |r: Option<(CheckRow, u64)>| {
                if let Some((row, c)) = r {
                    rep.rows.push(row);
                    rep.checked += c;
                }
            };
            push(sweep(Family::Turan, d, n, ks.clone(), pi, |k| {
                let lhs = (turan(p, n) - turan(p, n - k)) as i128;
                (pi * lhs, (pi - 1) * cross(k))
            }));
            if d == 4 {
                let u4 = |m: u64| u4_exact(m).expect("m >= 5") as i128;
                let ks4 = 1..=n.saturating_sub(big_n.max(5));
                push(sweep(Family::U4, d, n, ks4, 2, |k| {
                    (2 * (u4(n) - u4(n - k)), cross(k))
                }));
            }
            push(sweep(Family::Md, d, n, ks.clone(), pi, |k| {
                let lhs = (md_value(d, n) - md_value(d, n - k)) as i128;
                (pi * lhs, (pi - 1) * cross(k))
            }));
            if d == 5 {
                push(sweep(Family::M5, d, n, ks.clone(), 4, |k| {
                    let lhs = (md_value(5, n) - md_value(5, n - k)) as i128;
                    let k = k as i128;
                    (4 * lhs, 2 * cross(k as u64) + k * k + 4 * k - 1)
                }));
            }
            rep
        })
        .collect();
    let mut report = GrowthReport::default();
    for r in per_n {
        report.merge(r);
    }
    if d == 4 {
        let lo = (*ns.start()).max(6);
        report.merge(step_criterion_check(lo..=*ns.end()));
    }
    if d == 5 && params.u5_n_max > big_n {
        let hi = params.u5_n_max.min(*ns.end());
        let lo = (*ns.start()).max(big_n + 1);
        report.merge(crate::constructions::u5_growth_check(lo..=hi, big_n)?);
    }
    report.rows.sort_by_key(|r| (r.family, r.n));
    Ok(report)
}

/// The u₄ step criterion over `ns` (`n ≥ 6`): one row per `n`, with
/// `lhs = u₄(n) − u₄(n−1)` and `rhs = (n−1)/2`.
pub fn step_criterion_check(ns: RangeInclusive<u64>) -> GrowthReport {
    let lo = (*ns.start()).max(6);
    let rows: Vec<CheckRow> = (lo..=*ns.end())
        .into_par_iter()
        .map(|n| {
            let step = (u4_exact(n).unwrap() - u4_exact(n - 1).unwrap()) as i128;
            let half = Ratio::new(n as i128 - 1, 2);
            let equal = Ratio::from_integer(step) == half;
            let allowed = (n - 1) % 8 == 0 || (n - 1) % 10 == 0;
            CheckRow {
                family: Family::U4Step,
                d: 4,
                n,
                k: 1,
                lhs: Ratio::from_integer(step),
                rhs: half,
                pass: !equal || allowed,
            }
        })
        .collect();
    GrowthReport {
        checked: rows.len() as u64,
        rows,
        notes: Vec::new(),
    }
}
