use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use lenzlab::closed_forms::{
    erdos_even_sandwich, growth_check, step_criterion_check, u4_exact, BoundParams, Family,
};
use lenzlab::constructions::{
    arc_config, augment, balanced_squares_config, exceptional_config, pentagon_config,
    random_lenz_config, u4_construction_check, LenzConfiguration,
};
use lenzlab::digraph::{decompose, favourite_digraph, furthest_assignment, DistanceAssignment};
use lenzlab::embed::NumericPointSet;
use lenzlab::geometry::PointSet;
use lenzlab::io::{
    emit_pointset, parse_assignment, parse_ratio, read_pointset, write_csv, AssignmentFile,
    CountRow, PointSetFile, VerificationRow,
};
use lenzlab::metric::{Distances, FloatMetric, Metric, DEFAULT_TOL};
use lenzlab::scalar::{ExactDist, ExtScalar};
use lenzlab::search::{
    lenz_fit, lenz_fit_exact, local_search, optimal_assignment, FitTolerances, SearchOptions,
};
use lenzlab::Error;

/// Exact constructions, favourite-distance digraphs and Lenz configurations.
#[derive(Parser)]
#[command(name = "lenzlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Lenz,
    Squares,
    Pentagon,
    Exceptional,
    Arc,
    Augment,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Digraph {
    Favourite,
    Furthest,
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyFamily {
    T,
    U4,
    Md,
    Growth,
    Sandwich,
}

#[derive(Subcommand)]
enum Command {
    /// Build a configuration and write it as a point-set file.
    Construct {
        #[arg(long, value_enum)]
        kind: Kind,
        /// Dimension (pentagon and exceptional are always 4).
        #[arg(long, default_value_t = 4)]
        d: usize,
        #[arg(long)]
        n: usize,
        /// Points added by `augment` to a balanced configuration on n points.
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Arc width in turns for `arc`.
        #[arg(long, default_value = "1/8")]
        spread: String,
        /// Seed for `lenz`, which draws a random configuration.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output path; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Count a favourite-distance or furthest-neighbour digraph.
    Count {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "favourite")]
        digraph: Digraph,
        /// `optimal`, `constant:VALUE`, or a path to a JSON array of values.
        #[arg(long, default_value = "optimal")]
        assignment: String,
        /// Equality tolerance on squared distances for numeric files.
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value = "count")]
        label: String,
        /// Print a JSON report instead of text.
        #[arg(long)]
        json: bool,
        /// Print a one-row CSV counts report instead of text.
        #[arg(long, conflicts_with = "json")]
        csv: bool,
    },
    /// Check closed forms and growth inequalities; CSV rows on output.
    Verify {
        #[arg(long, value_enum)]
        family: VerifyFamily,
        #[arg(long, default_value_t = 4)]
        d: u64,
        #[arg(long)]
        n_max: u64,
        /// Threshold N_d of the growth inequalities.
        #[arg(long, default_value_t = 20)]
        n_d: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulated annealing on the optimal favourite count.
    Search {
        #[arg(long, default_value_t = 4)]
        d: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        iters: usize,
        /// Numeric or exact point-set file to start from.
        #[arg(long)]
        init: Option<PathBuf>,
        /// Best configuration as a numeric point-set file.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-iteration trace as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Fit a Lenz configuration; exit 3 when none is found.
    Fit {
        input: PathBuf,
        #[arg(long, default_value = "optimal")]
        assignment: String,
        /// Residual tolerance on the fitted carriers.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
}

enum Failure {
    Verification(String),
    Input(String),
    NoStructure(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type CliResult = std::result::Result<(), Failure>;

fn main() -> ExitCode {
    if let Some(n) = std::env::var("LENZLAB_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
    let cli = Cli::parse();
    let out = match cli.command {
        Command::Construct {
            kind,
            d,
            n,
            k,
            spread,
            seed,
            out,
        } => construct(kind, d, n, k, &spread, seed, out),
        Command::Count {
            input,
            digraph,
            assignment,
            tol,
            label,
            json,
            csv,
        } => count(&input, digraph, &assignment, tol, &label, json, csv),
        Command::Verify {
            family,
            d,
            n_max,
            n_d,
            out,
        } => verify(family, d, n_max, n_d, out),
        Command::Search {
            d,
            n,
            seed,
            iters,
            init,
            out,
            trace,
        } => search(d, n, seed, iters, init, out, trace),
        Command::Fit {
            input,
            assignment,
            tol,
        } => fit(&input, &assignment, tol),
    };
    match out {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(m)) => {
            eprintln!("verification failed: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::NoStructure(m)) => {
            eprintln!("no Lenz structure: {m}");
            ExitCode::from(3)
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> std::io::Result<()> {
    match out {
        Some(p) => std::fs::write(p, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    }
}

fn construct(
    kind: Kind,
    d: usize,
    n: usize,
    k: usize,
    spread: &str,
    seed: u64,
    out: Option<PathBuf>,
) -> CliResult {
    // the exceptional centre is not on any carrier, so it only lives in
    // the point set
    let (cfg, points): (LenzConfiguration, Option<PointSet>) = match kind {
        Kind::Squares => (balanced_squares_config(d, n)?, None),
        Kind::Pentagon => (pentagon_config(n)?, None),
        Kind::Exceptional => {
            let ex = exceptional_config(n)?;
            (ex.config, Some(ex.points))
        }
        Kind::Arc => (arc_config(d, n, &parse_ratio(spread)?)?, None),
        Kind::Augment => (augment(&balanced_squares_config(d, n)?, k)?, None),
        Kind::Lenz => (
            random_lenz_config(&mut ChaCha8Rng::seed_from_u64(seed), d, n)?,
            None,
        ),
    };
    let dim = cfg.system().dim();
    let points = points.unwrap_or_else(|| cfg.point_set());
    let sizes: Vec<String> = cfg.part_sizes().iter().map(ToString::to_string).collect();
    let summary = format!(
        "n = {}, d = {dim}, parts = ({}){}",
        points.len(),
        sizes.join(", "),
        if matches!(kind, Kind::Exceptional) {
            ", plus the centre"
        } else {
            ""
        }
    );
    emit(out.as_deref(), &emit_pointset(&PointSetFile::Exact(points)))?;
    if out.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(())
}

#[derive(Serialize)]
struct CountReport {
    label: String,
    n: usize,
    digraph: &'static str,
    assignment: Vec<(String, usize)>,
    e_r: usize,
    singles: usize,
    doubles: usize,
    component_sizes: Vec<usize>,
    densities: Vec<Vec<String>>,
}

enum AssignmentSpec {
    Optimal,
    Constant(String),
    File(AssignmentFile),
}

fn assignment_spec(s: &str) -> std::result::Result<AssignmentSpec, Failure> {
    Ok(if s == "optimal" {
        AssignmentSpec::Optimal
    } else if let Some(v) = s.strip_prefix("constant:") {
        AssignmentSpec::Constant(v.to_string())
    } else {
        AssignmentSpec::File(parse_assignment(&std::fs::read_to_string(s)?)?)
    })
}

fn resolve<M: Metric>(
    t: &Distances<'_, M>,
    digraph: Digraph,
    spec: &AssignmentSpec,
    constant: impl Fn(&str) -> lenzlab::Result<M::Dist>,
    from_file: impl Fn(&AssignmentFile) -> Option<DistanceAssignment<M::Dist>>,
) -> std::result::Result<DistanceAssignment<M::Dist>, Failure> {
    if digraph == Digraph::Furthest {
        return Ok(furthest_assignment(t)?);
    }
    Ok(match spec {
        AssignmentSpec::Optimal => optimal_assignment(t)?.0,
        AssignmentSpec::Constant(v) => DistanceAssignment::constant(t.len(), constant(v)?),
        AssignmentSpec::File(f) => {
            let a = from_file(f).ok_or_else(|| {
                Failure::Input("assignment mode does not match the point set".into())
            })?;
            if a.len() != t.len() {
                return Err(Failure::Input(format!(
                    "assignment has {} values for {} points",
                    a.len(),
                    t.len()
                )));
            }
            a
        }
    })
}

fn count_report<M: Metric>(
    t: &Distances<'_, M>,
    r: &DistanceAssignment<M::Dist>,
    digraph: Digraph,
    label: &str,
    show: impl Fn(&M::Dist) -> String,
) -> std::result::Result<CountReport, Failure> {
    let g = favourite_digraph(t, r)?;
    let dec = decompose(&g);
    let classes = t.metric().classes(r.values());
    Ok(CountReport {
        label: label.into(),
        n: t.len(),
        digraph: if digraph == Digraph::Furthest {
            "furthest"
        } else {
            "favourite"
        },
        assignment: classes.iter().map(|(v, c)| (show(v), *c)).collect(),
        e_r: g.edge_count(),
        singles: dec.singles.len(),
        doubles: dec.doubles.len(),
        component_sizes: dec.part_sizes.clone(),
        densities: dec
            .densities
            .iter()
            .map(|row| row.iter().map(|q| q.to_string()).collect())
            .collect(),
    })
}

fn count(
    input: &Path,
    digraph: Digraph,
    assignment: &str,
    tol: f64,
    label: &str,
    json: bool,
    csv: bool,
) -> CliResult {
    let spec = assignment_spec(assignment)?;
    let report = match read_pointset(input)? {
        PointSetFile::Exact(s) => {
            let t = Distances::build(&s)?;
            let r = resolve(
                &t,
                digraph,
                &spec,
                |v| Ok(ExactDist::from(v.parse::<ExtScalar>()?)),
                |f| match f {
                    AssignmentFile::Exact(a) => Some(a.clone()),
                    AssignmentFile::Numeric(_) => None,
                },
            )?;
            count_report(&t, &r, digraph, label, ToString::to_string)?
        }
        PointSetFile::Numeric(s) => {
            let m = FloatMetric::new(&s, tol);
            let t = Distances::build(&m)?;
            let r = resolve(
                &t,
                digraph,
                &spec,
                |v| {
                    let x = v.parse::<ExtScalar>()?;
                    Ok(x.to_f64())
                },
                |f| match f {
                    AssignmentFile::Numeric(a) => Some(a.clone()),
                    AssignmentFile::Exact(a) => Some(DistanceAssignment::new(
                        a.values().iter().map(ExactDist::to_f64).collect(),
                    )),
                },
            )?;
            count_report(&t, &r, digraph, label, ToString::to_string)?
        }
    };
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(&report).expect("report serializes")
        );
    } else if csv {
        let row = CountRow {
            label: report.label.clone(),
            n: report.n,
            e_r: report.e_r,
            singles: report.singles,
            doubles: report.doubles,
            components: report
                .component_sizes
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(";"),
        };
        write_csv(std::io::stdout(), &[row])?;
    } else {
        print_count(&report);
    }
    Ok(())
}

fn print_count(r: &CountReport) {
    let e = if r.digraph == "furthest" {
        "e_D"
    } else {
        "e_r"
    };
    println!("n = {}", r.n);
    if let [(v, _)] = r.assignment.as_slice() {
        println!("r ≡ {v}");
    } else {
        let vals: Vec<String> = r
            .assignment
            .iter()
            .map(|(v, c)| format!("{v} (x{c})"))
            .collect();
        println!("r takes {} values: {}", vals.len(), vals.join(", "));
    }
    println!("{e} = {}", r.e_r);
    println!("|E1| = {}", r.singles);
    println!("|E2| = {}", r.doubles);
    let sizes: Vec<String> = r.component_sizes.iter().map(ToString::to_string).collect();
    println!("components = {} ({})", sizes.len(), sizes.join(", "));
    if r.densities.len() <= 12 {
        println!("densities:");
        for row in &r.densities {
            println!("  {}", row.join(" "));
        }
    }
}

fn verify(family: VerifyFamily, d: u64, n_max: u64, n_d: u64, out: Option<PathBuf>) -> CliResult {
    let params = BoundParams {
        default_n: n_d,
        ..BoundParams::default()
    };
    let rows: Vec<VerificationRow> = match family {
        VerifyFamily::T | VerifyFamily::Md | VerifyFamily::Growth => {
            let rep = growth_check(d, 1..=n_max, &params)?;
            let keep = |f: Family| match family {
                VerifyFamily::T => f == Family::Turan,
                VerifyFamily::Md => f == Family::Md || f == Family::M5,
                _ => true,
            };
            for note in &rep.notes {
                eprintln!("note: {note}");
            }
            rep.rows
                .iter()
                .filter(|r| keep(r.family))
                .map(VerificationRow::from)
                .collect()
        }
        VerifyFamily::U4 => {
            let mut rep = u4_construction_check(5..=n_max);
            rep.rows.extend(step_criterion_check(6..=n_max).rows);
            rep.rows.iter().map(VerificationRow::from).collect()
        }
        VerifyFamily::Sandwich => (1..=n_max)
            .map(|n| -> lenzlab::Result<Vec<VerificationRow>> {
                let (lo, hi) = erdos_even_sandwich(d, n)?;
                let mut rows = vec![VerificationRow {
                    family: "sandwich".into(),
                    d,
                    n,
                    k: 0,
                    lhs: lo.to_string(),
                    rhs: hi.to_string(),
                    pass: lo <= hi,
                }];
                if d == 4 && n >= 5 {
                    let u = num_rational::Ratio::from_integer(u4_exact(n)? as i128);
                    rows.push(VerificationRow {
                        family: "sandwich-u4".into(),
                        d,
                        n,
                        k: 0,
                        lhs: u.to_string(),
                        rhs: hi.to_string(),
                        pass: lo <= u && u <= hi,
                    });
                }
                Ok(rows)
            })
            .collect::<lenzlab::Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect(),
    };
    let mut buf = Vec::new();
    write_csv(&mut buf, &rows)?;
    emit(
        out.as_deref(),
        &String::from_utf8(buf).expect("csv is utf-8"),
    )?;
    match rows.iter().find(|r| !r.pass) {
        Some(r) => Err(Failure::Verification(format!(
            "{} d={} n={} k={}: {} vs {}",
            r.family, r.d, r.n, r.k, r.lhs, r.rhs
        ))),
        None => Ok(()),
    }
}

fn numeric(file: PointSetFile) -> NumericPointSet {
    match file {
        PointSetFile::Exact(s) => lenzlab::embed::embed_f64(&s),
        PointSetFile::Numeric(s) => s,
    }
}

fn search(
    d: usize,
    n: usize,
    seed: u64,
    iters: usize,
    init: Option<PathBuf>,
    out: Option<PathBuf>,
    trace: Option<PathBuf>,
) -> CliResult {
    let init = init.map(|p| read_pointset(&p).map(numeric)).transpose()?;
    let opts = SearchOptions {
        seed,
        iterations: iters,
        ..SearchOptions::default()
    };
    let res = local_search(d, n, init, &opts)?;
    if let Some(p) = out {
        std::fs::write(p, emit_pointset(&PointSetFile::Numeric(res.best.clone())))?;
    }
    if let Some(p) = trace {
        write_csv(std::fs::File::create(p)?, &res.trace)?;
    }
    println!("initial score = {}", res.initial_score);
    println!("best score = {}", res.best_score);
    Ok(())
}

fn fit(input: &Path, assignment: &str, tol: f64) -> CliResult {
    let spec = assignment_spec(assignment)?;
    let tols = FitTolerances {
        residual: tol,
        ..FitTolerances::default()
    };
    let report = match read_pointset(input)? {
        PointSetFile::Exact(s) => {
            let t = Distances::build(&s)?;
            let r = resolve(
                &t,
                Digraph::Favourite,
                &spec,
                |v| Ok(ExactDist::from(v.parse::<ExtScalar>()?)),
                |f| match f {
                    AssignmentFile::Exact(a) => Some(a.clone()),
                    AssignmentFile::Numeric(_) => None,
                },
            )?;
            lenz_fit_exact(&s, &r, &tols)?
        }
        PointSetFile::Numeric(s) => {
            let m = FloatMetric::new(&s, tols.distance);
            let t = Distances::build(&m)?;
            let r = resolve(
                &t,
                Digraph::Favourite,
                &spec,
                |v| Ok(v.parse::<ExtScalar>()?.to_f64()),
                |f| match f {
                    AssignmentFile::Numeric(a) => Some(a.clone()),
                    AssignmentFile::Exact(a) => Some(DistanceAssignment::new(
                        a.values().iter().map(ExactDist::to_f64).collect(),
                    )),
                },
            )?;
            lenz_fit(&s, &r, &tols)?
        }
    };
    println!(
        "{}",
        serde_json::to_string_pretty(&report).expect("report serializes")
    );
    if report.ok {
        Ok(())
    } else {
        Err(Failure::NoStructure(report.failure.unwrap_or_default()))
    }
}
