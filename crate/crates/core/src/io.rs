//! Point-set JSON files and CSV reports.

use std::io::Write;

use num_rational::{BigRational, Ratio};
use serde::{Deserialize, Serialize};

use crate::closed_forms::CheckRow;
use crate::digraph::{Decomposition, DistanceAssignment};
use crate::embed::NumericPointSet;
use crate::error::{Error, Result};
use crate::geometry::{CirclePoint, LenzSystem, Point, PointSet, SpherePoint};
use crate::scalar::{fmt_rational, parse_rational, ExactDist, ExtScalar, Phase};

pub const POINTSET_SCHEMA: &str = "lenzlab/pointset/1";

/// Contents of a point-set file.
#[derive(Clone, Debug, PartialEq)]
pub enum PointSetFile {
    Exact(PointSet),
    Numeric(NumericPointSet),
}

impl PointSetFile {
    pub fn dim(&self) -> usize {
        match self {
            PointSetFile::Exact(s) => s.dim(),
            PointSetFile::Numeric(s) => s.dim,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            PointSetFile::Exact(s) => s.len(),
            PointSetFile::Numeric(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Serialize, Deserialize)]
struct RawFile {
    schema: String,
    dim: usize,
    mode: String,
    system: Option<RawSystem>,
    points: Vec<RawPoint>,
}

#[derive(Serialize, Deserialize)]
struct RawSystem {
    lambda_sq: String,
    radii_sq: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawPoint {
    Circle {
        part: usize,
        turns: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        phase: Option<[String; 2]>,
    },
    Sphere {
        part: usize,
        dir: [i64; 3],
    },
    Exact(Vec<String>),
    Numeric(Vec<f64>),
}

fn emit_point(p: &Point) -> RawPoint {
    match p {
        Point::Cartesian(c) => RawPoint::Exact(c.iter().map(ToString::to_string).collect()),
        Point::Circle(c) => RawPoint::Circle {
            part: c.part() + 1,
            turns: fmt_rational(c.turns()),
            phase: (!c.phase().is_identity())
                .then(|| [fmt_rational(c.phase().cos()), fmt_rational(c.phase().sin())]),
        },
        Point::Sphere(s) => RawPoint::Sphere {
            part: s.part() + 1,
            dir: s.dir(),
        },
    }
}

fn parse_point(raw: RawPoint, index: usize) -> Result<Point> {
    let at = |e: Error| Error::Parse(format!("point {index}: {e}"));
    let part0 = |part: usize| {
        part.checked_sub(1)
            .ok_or_else(|| Error::Parse(format!("point {index}: parts are numbered from 1")))
    };
    Ok(match raw {
        RawPoint::Exact(c) => Point::Cartesian(
            c.iter()
                .map(|s| s.parse::<ExtScalar>())
                .collect::<Result<_>>()
                .map_err(at)?,
        ),
        RawPoint::Circle { part, turns, phase } => {
            let turns = parse_rational(&turns).map_err(at)?;
            let phase = match phase {
                None => Phase::identity(),
                Some([c, s]) => Phase::new(
                    parse_rational(&c).map_err(at)?,
                    parse_rational(&s).map_err(at)?,
                )
                .map_err(at)?,
            };
            Point::Circle(CirclePoint::new(part0(part)?, turns, phase))
        }
        RawPoint::Sphere { part, dir } => {
            Point::Sphere(SpherePoint::new(part0(part)?, dir).map_err(at)?)
        }
        RawPoint::Numeric(_) => {
            return Err(Error::Parse(format!(
                "point {index}: float coordinates in an exact file"
            )))
        }
    })
}

/// Parses a point-set document, checking the schema tag and validating
/// the points.
pub fn parse_pointset(text: &str) -> Result<PointSetFile> {
    let raw: RawFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if raw.schema != POINTSET_SCHEMA {
        return Err(Error::Parse(format!(
            "unsupported schema {:?}, expected {POINTSET_SCHEMA:?}",
            raw.schema
        )));
    }
    match raw.mode.as_str() {
        "exact" => {
            let system = raw
                .system
                .map(|s| -> Result<LenzSystem> {
                    let lam = s.lambda_sq.parse()?;
                    let radii = s
                        .radii_sq
                        .iter()
                        .map(|r| r.parse())
                        .collect::<Result<_>>()?;
                    LenzSystem::new(raw.dim, lam, radii)
                })
                .transpose()?;
            let points = raw
                .points
                .into_iter()
                .enumerate()
                .map(|(i, p)| parse_point(p, i))
                .collect::<Result<_>>()?;
            Ok(PointSetFile::Exact(PointSet::new(raw.dim, system, points)?))
        }
        "numeric" => {
            if raw.system.is_some() {
                return Err(Error::Parse("numeric files carry no Lenz system".into()));
            }
            let coords = raw
                .points
                .into_iter()
                .enumerate()
                .map(|(i, p)| match p {
                    RawPoint::Numeric(c)
                        if c.len() == raw.dim && c.iter().all(|x| x.is_finite()) =>
                    {
                        Ok(c)
                    }
                    _ => Err(Error::Parse(format!(
                        "point {i}: expected {} finite numbers",
                        raw.dim
                    ))),
                })
                .collect::<Result<_>>()?;
            Ok(PointSetFile::Numeric(NumericPointSet::new(raw.dim, coords)))
        }
        other => Err(Error::Parse(format!("unknown mode {other:?}"))),
    }
}

/// Canonical text of a point-set file: pretty JSON with a final newline.
pub fn emit_pointset(file: &PointSetFile) -> String {
    let raw = match file {
        PointSetFile::Exact(s) => RawFile {
            schema: POINTSET_SCHEMA.into(),
            dim: s.dim(),
            mode: "exact".into(),
            system: s.system().map(|sys| RawSystem {
                lambda_sq: sys.lambda_sq().to_string(),
                radii_sq: sys.radii_sq().iter().map(ToString::to_string).collect(),
            }),
            points: s.points().iter().map(emit_point).collect(),
        },
        PointSetFile::Numeric(s) => RawFile {
            schema: POINTSET_SCHEMA.into(),
            dim: s.dim,
            mode: "numeric".into(),
            system: None,
            points: s.coords.iter().cloned().map(RawPoint::Numeric).collect(),
        },
    };
    let mut out = serde_json::to_string_pretty(&raw).expect("point sets always serialize");
    out.push('\n');
    out
}

pub fn read_pointset(path: &std::path::Path) -> Result<PointSetFile> {
    parse_pointset(&std::fs::read_to_string(path)?)
}

pub fn write_pointset(path: &std::path::Path, file: &PointSetFile) -> Result<()> {
    std::fs::write(path, emit_pointset(file))?;
    Ok(())
}

/// Assignment file: a JSON array of squared distances, as exact strings or
/// numbers.
#[derive(Clone, Debug, PartialEq)]
pub enum AssignmentFile {
    Exact(DistanceAssignment<ExactDist>),
    Numeric(DistanceAssignment<f64>),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawValue {
    Text(String),
    Number(f64),
}

pub fn parse_assignment(text: &str) -> Result<AssignmentFile> {
    let raw: Vec<RawValue> = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if raw.iter().all(|v| matches!(v, RawValue::Number(_))) {
        let values = raw
            .into_iter()
            .map(|v| match v {
                RawValue::Number(x) => x,
                RawValue::Text(_) => unreachable!(),
            })
            .collect();
        return Ok(AssignmentFile::Numeric(DistanceAssignment::numeric(
            values,
        )?));
    }
    let values = raw
        .into_iter()
        .enumerate()
        .map(|(i, v)| match v {
            RawValue::Text(s) => s
                .parse::<ExtScalar>()
                .map(ExactDist::from)
                .map_err(|e| Error::Parse(format!("value {i}: {e}"))),
            RawValue::Number(_) => Err(Error::Parse(format!(
                "value {i}: mixed numbers and strings"
            ))),
        })
        .collect::<Result<_>>()?;
    Ok(AssignmentFile::Exact(DistanceAssignment::exact(values)?))
}

pub fn emit_assignment(file: &AssignmentFile) -> String {
    let json = match file {
        AssignmentFile::Exact(a) => serde_json::to_string(
            &a.values()
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>(),
        ),
        AssignmentFile::Numeric(a) => serde_json::to_string(a.values()),
    };
    json.expect("assignments always serialize") + "\n"
}

/// One row of a verification report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationRow {
    pub family: String,
    pub d: u64,
    pub n: u64,
    pub k: u64,
    pub lhs: String,
    pub rhs: String,
    pub pass: bool,
}

fn fmt_ratio(r: &Ratio<i128>) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl From<&CheckRow> for VerificationRow {
    fn from(r: &CheckRow) -> Self {
        VerificationRow {
            family: r.family.to_string(),
            d: r.d,
            n: r.n,
            k: r.k,
            lhs: fmt_ratio(&r.lhs),
            rhs: fmt_ratio(&r.rhs),
            pass: r.pass,
        }
    }
}

/// One row of a counts report; `components` lists the component sizes of
/// the double-edge graph separated by `;`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountRow {
    pub label: String,
    pub n: usize,
    pub e_r: usize,
    pub singles: usize,
    pub doubles: usize,
    pub components: String,
}

impl CountRow {
    pub fn new(label: &str, n: usize, e_r: usize, dec: &Decomposition) -> Self {
        CountRow {
            label: label.into(),
            n,
            e_r,
            singles: dec.singles.len(),
            doubles: dec.doubles.len(),
            components: dec
                .part_sizes
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(";"),
        }
    }
}

/// Writes rows as CSV with a header line.
pub fn write_csv<W: Write, T: Serialize>(out: W, rows: &[T]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    for row in rows {
        w.serialize(row).map_err(|e| Error::Parse(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<T: for<'de> Deserialize<'de>>(text: &str) -> Result<Vec<T>> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .map(|r| r.map_err(|e| Error::Parse(e.to_string())))
        .collect()
}

/// Parses `"a/b"` into a rational.
pub fn parse_ratio(s: &str) -> Result<BigRational> {
    parse_rational(s)
}
