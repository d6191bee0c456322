//! diophlab: command-line surface for the exact-arithmetic Diophantine
//! approximation workbench. Every run emits a machine-readable report with
//! exact rationals as `num/den` strings; identical configurations produce
//! byte-identical reports.

use std::io::Write;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use diophlab::dimension::{
    box_counting_estimate, critical_exponent_estimate, jb_dimension, s_volume, CoverSpec,
    DimensionFormulae,
};
use diophlab::directed::{ln_enclosure, pi_squared_enclosure, Enclosure, Evaluation};
use diophlab::error::Error as LibError;
use diophlab::limsup::build_b_1d;
use diophlab::metrics::{
    bc_lower_bound, convergence_tail_bound, count_solutions, dirichlet_approx, dyadic_family,
    quasi_independence_constant, ubiquity_defect, union_growth_ladder, DefectCase,
};
use diophlab::numth::{primitive_shell, shell_cardinality, totient_sum};
use diophlab::planar::{area_2d, build_strips_2d, RegionExpr};
use diophlab::psi::{parse_psi_spec, ApproximationFunction};
use diophlab::rational::{parse_rational, rat, rat_u64, Rational};
use diophlab::report::ExperimentReport;
use diophlab::torus::TorusIntervalSet;

use num_traits::{Signed, Zero};

const DEFAULT_SEED: u64 = 20260810;

const EXIT_VALIDATION: i32 = 2;
const EXIT_INTERNAL: i32 = 3;

#[derive(Parser)]
#[command(
    name = "diophlab",
    about = "Exact-arithmetic experiments in metric Diophantine approximation",
    after_help = "Rationals are written num/den. psi specs: power:V, recip:C, logref:E, \
ubiq:M,N, table:q=v,..., const:C (constant radius).\n\
CSV columns: reports with a ladder series use `x,y_rational,y_decimal`; \
scalar reports use `field,rational,decimal`.\n\
DIOPHLAB_THREADS caps the worker-thread count; results are identical for any value.",
    version
)]
struct Cli {
    /// Output format for the report document
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of standard output
    #[arg(long, global = true)]
    out: Option<std::path::PathBuf>,
    /// Seed recorded in the report (experiments here are deterministic)
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Include wall-clock timing in the report (breaks byte-identity)
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Plotdata,
}

#[derive(Subcommand)]
enum Command {
    /// Measure of the 1-D neighborhood B(q; rho)
    #[command(name = "measure-1d")]
    Measure1d {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        rho: String,
    },
    /// Exact area of a planar strip family B(q; rho)
    #[command(name = "area-2d")]
    Area2d {
        /// integer vector, e.g. 1,-2
        #[arg(long)]
        q: String,
        #[arg(long)]
        rho: String,
    },
    /// Exact area of B(q; rho) ∩ B(q'; rho')
    #[command(name = "intersect-2d")]
    Intersect2d {
        #[arg(long)]
        q: String,
        #[arg(long)]
        qprime: String,
        #[arg(long)]
        rho: String,
        #[arg(long)]
        rhoprime: String,
    },
    /// Primitive shell cardinality by Mobius inversion and by enumeration
    Shells {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: u64,
    },
    /// Totient summatory function and its distance to 3N²/π²
    TotientSum {
        #[arg(long)]
        n: u64,
    },
    /// Best rational approximation with denominator at most N
    Dirichlet {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        n: u64,
    },
    /// Count solutions of ||q alpha|| < psi(q) for q <= N
    Count {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        psi: String,
        #[arg(long)]
        n: u64,
    },
    /// Measures of the truncated unions along a ladder of N
    UnionGrowth {
        #[arg(long)]
        psi: String,
        /// comma-separated N values, e.g. 1,2,5,25
        #[arg(long)]
        ladder: String,
    },
    /// Generalized Borel-Cantelli lower bound
    BcBound {
        /// family: "dyadic" (analytic matrix) or a JSON matrix file path
        #[arg(long)]
        family: String,
        /// truncation N (dyadic family)
        #[arg(long)]
        n: Option<usize>,
    },
    /// Largest pairwise quasi-independence ratio of a family
    QuasiConst {
        /// "dyadic" or "b1d"
        #[arg(long)]
        family: String,
        /// dyadic family size (j = 1..=jmax)
        #[arg(long)]
        jmax: Option<u32>,
        /// q values for the b1d family, e.g. 2,3
        #[arg(long)]
        q_list: Option<String>,
        /// common rho for the b1d family
        #[arg(long)]
        rho: Option<String>,
    },
    /// Covering defect of the rho-neighborhoods of the resonant sets
    Ubiquity {
        #[arg(long, value_enum)]
        case: Case,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        rho: String,
        /// optional ladder of N values; emits a series
        #[arg(long)]
        ladder: Option<String>,
    },
    /// s-volume of the natural cover over a shell range
    Svolume {
        #[arg(long)]
        v: String,
        #[arg(long)]
        s: String,
        #[arg(long)]
        q0: u64,
        #[arg(long)]
        q1: u64,
    },
    /// Critical exponent of the natural cover by dyadic-block bisection
    CriticalS {
        #[arg(long)]
        v: String,
        #[arg(long, default_value_t = 4096)]
        qmax: u64,
    },
    /// Box-counting slope over dyadic shell approximants
    Boxcount {
        #[arg(long)]
        v: String,
        /// powers of two, e.g. 64,128,256,512,1024,2048,4096
        #[arg(long)]
        ladder: String,
    },
    /// Closed-form dimension evaluators
    Formulas {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        v: String,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Case {
    Line,
    Plane,
}

enum CliError {
    Validation(String),
    Internal(String),
}

impl From<LibError> for CliError {
    fn from(e: LibError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Internal(format!("i/o failure: {e}"))
    }
}

type CliResult<T> = Result<T, CliError>;

fn main() {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        std::process::exit(EXIT_VALIDATION);
    }
    match execute(&cli) {
        Ok(()) => {}
        Err(CliError::Validation(msg)) => {
            eprintln!("error: {msg}");
            std::process::exit(EXIT_VALIDATION);
        }
        Err(CliError::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            std::process::exit(EXIT_INTERNAL);
        }
    }
}

fn configure_threads() -> Result<(), String> {
    if let Ok(v) = std::env::var("DIOPHLAB_THREADS") {
        let n: usize = v
            .parse()
            .ok()
            .filter(|&n| n >= 1)
            .ok_or_else(|| format!("DIOPHLAB_THREADS must be a positive integer, got {v:?}"))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| format!("thread pool: {e}"))?;
    }
    Ok(())
}

fn execute(cli: &Cli) -> CliResult<()> {
    let start = Instant::now();
    let mut report = run(&cli.command, cli.seed)?;
    if cli.timing {
        report.wall_clock_ms = Some(start.elapsed().as_millis() as u64);
    }
    let body = match cli.format {
        Format::Json => report.to_json_string(),
        Format::Csv => report.to_csv(),
        Format::Plotdata => report.to_plotdata()?,
    };
    let summary = summarize(&report);
    match &cli.out {
        Some(path) => {
            std::fs::write(path, body)?;
            println!("{summary}");
            println!("report written to {}", path.display());
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(body.as_bytes())?;
            eprintln!("{summary}");
        }
    }
    Ok(())
}

fn summarize(report: &ExperimentReport) -> String {
    let mut parts = vec![format!("{}:", report.experiment)];
    for (k, v) in report.results.iter().take(4) {
        parts.push(format!("{k} = {} ({})", v.rational, v.decimal));
    }
    if let Some(s) = &report.series {
        parts.push(format!("series of {} points", s.len()));
    }
    parts.join(" ")
}

fn parse_vec2(s: &str) -> CliResult<[i64; 2]> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| CliError::Validation(format!("expected a,b integer pair, got {s:?}")))?;
    let pa = a.trim().parse().map_err(|_| CliError::Validation(format!("bad integer {a:?}")))?;
    let pb = b.trim().parse().map_err(|_| CliError::Validation(format!("bad integer {b:?}")))?;
    Ok([pa, pb])
}

fn parse_ladder(s: &str) -> CliResult<Vec<u64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<u64>()
                .map_err(|_| CliError::Validation(format!("bad ladder entry {t:?}")))
        })
        .collect()
}

/// Parses a psi spec, desugaring `const:C` over the given evaluation points.
fn parse_psi_or_const(spec: &str, points: &[u64]) -> CliResult<ApproximationFunction> {
    if let Some(c) = spec.strip_prefix("const:") {
        let value = parse_rational(c)?;
        return Ok(ApproximationFunction::constant_table(value, points)?);
    }
    Ok(parse_psi_spec(spec)?)
}

fn run(cmd: &Command, seed: u64) -> CliResult<ExperimentReport> {
    match cmd {
        Command::Measure1d { q, rho } => {
            let rho = parse_rational(rho)?;
            let mut rep = ExperimentReport::new("measure-1d", seed);
            rep.param("q", q).param("rho", &rho);
            let set = build_b_1d(*q, &rho)?;
            rep.result("measure", &set.measure());
            rep.result("arcs", &rat(set.arcs().len() as i64, 1));
            Ok(rep)
        }
        Command::Area2d { q, rho } => {
            let qv = parse_vec2(q)?;
            let rho = parse_rational(rho)?;
            let mut rep = ExperimentReport::new("area-2d", seed);
            rep.param("q", format!("{},{}", qv[0], qv[1])).param("rho", &rho);
            let strip = build_strips_2d(qv, &rho)?;
            rep.result("offsets", &rat(strip.offsets().len() as i64, 1));
            rep.result("area", &area_2d(&RegionExpr::leaf(strip)));
            Ok(rep)
        }
        Command::Intersect2d { q, qprime, rho, rhoprime } => {
            let qv = parse_vec2(q)?;
            let qp = parse_vec2(qprime)?;
            let rho = parse_rational(rho)?;
            let rhop = parse_rational(rhoprime)?;
            let mut rep = ExperimentReport::new("intersect-2d", seed);
            rep.param("q", format!("{},{}", qv[0], qv[1]))
                .param("qprime", format!("{},{}", qp[0], qp[1]))
                .param("rho", &rho)
                .param("rhoprime", &rhop);
            let cross = qv[0] as i128 * qp[1] as i128 - qv[1] as i128 * qp[0] as i128;
            rep.param("linearly_independent", cross != 0);
            let e = RegionExpr::intersect(
                RegionExpr::leaf(build_strips_2d(qv, &rho)?),
                RegionExpr::leaf(build_strips_2d(qp, &rhop)?),
            );
            rep.result("area", &area_2d(&e));
            rep.result("product_of_areas", &(rat(4, 1) * &rho * &rhop));
            Ok(rep)
        }
        Command::Shells { m, k } => {
            let mut rep = ExperimentReport::new("shells", seed);
            rep.param("m", m).param("k", k);
            let card = shell_cardinality(*m, *k)?;
            let shell = primitive_shell(*m, *k)?;
            rep.result("cardinality", &rat_u64(card));
            rep.result("enumerated", &rat_u64(shell.len() as u64));
            Ok(rep)
        }
        Command::TotientSum { n } => {
            let mut rep = ExperimentReport::new("totient-sum", seed);
            rep.param("n", n);
            let phi = totient_sum(*n)?;
            rep.result("phi_sum", &rat_u64(phi));
            if *n >= 2 {
                // |Phi(N) - 3N²/π²| / (N ln N), bracketed at 96 bits
                let n_sq = rat_u64(*n) * rat_u64(*n);
                let main = pi_squared_enclosure(96).recip_pos().scale(&(rat(3, 1) * n_sq));
                let phi_r = rat_u64(phi);
                let d1 = (&phi_r - &main.lo).abs();
                let d2 = (&phi_r - &main.hi).abs();
                let diff = if main.contains(&phi_r) {
                    Enclosure::new(Rational::zero(), d1.max(d2))
                } else {
                    Enclosure::new(d1.clone().min(d2.clone()), d1.max(d2))
                };
                let ln_n = ln_enclosure(&rat_u64(*n), 96)?;
                let scaled = diff.div_pos(&ln_n.scale(&rat_u64(*n)));
                rep.result_eval("normalized_error", &Evaluation::Directed(scaled));
            }
            Ok(rep)
        }
        Command::Dirichlet { alpha, n } => {
            let alpha = parse_rational(alpha)?;
            let mut rep = ExperimentReport::new("dirichlet", seed);
            rep.param("alpha", &alpha).param("n", n);
            let (p, q) = dirichlet_approx(&alpha, *n)?;
            let approx = Rational::new(p.clone(), q.clone());
            let error = (&alpha - &approx).abs();
            let bound = Rational::new(1.into(), &q * (n + 1));
            rep.param("satisfies_bound", error <= bound);
            rep.result("p", &Rational::from_integer(p));
            rep.result("q", &Rational::from_integer(q));
            rep.result("error", &error);
            rep.result("bound", &bound);
            Ok(rep)
        }
        Command::Count { alpha, psi, n } => {
            let alpha = parse_rational(alpha)?;
            let psi_fn = parse_psi_or_const(psi, &(1..=*n).collect::<Vec<_>>())?;
            let mut rep = ExperimentReport::new("count", seed);
            rep.param("alpha", &alpha).param("psi", psi).param("n", n);
            let sc = count_solutions(&alpha, &psi_fn, *n)?;
            rep.result("count", &rat_u64(sc.count));
            rep.result_eval("asymptote", &sc.asymptote);
            if !sc.asymptote.lower().is_zero() {
                rep.result("ratio", &(rat_u64(sc.count) / sc.asymptote.lower()));
            }
            Ok(rep)
        }
        Command::UnionGrowth { psi, ladder } => {
            let ladder = parse_ladder(ladder)?;
            let max = ladder.iter().copied().max().unwrap_or(1);
            let psi_fn = parse_psi_or_const(psi, &(1..=max).collect::<Vec<_>>())?;
            let mut rep = ExperimentReport::new("union-growth", seed);
            rep.param("psi", psi).param(
                "ladder",
                ladder.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(","),
            );
            let rows = union_growth_ladder(&psi_fn, &ladder)?;
            let mut all_exact = true;
            for (n, um) in &rows {
                if let Some(tail) = convergence_tail_bound(&psi_fn, *n) {
                    rep.result(format!("tail_bound_beyond_{n}"), &tail);
                }
                all_exact &= um.exact;
            }
            if !all_exact {
                rep.rounding_note("series", "lower");
            }
            rep.series(rows.into_iter().map(|(n, um)| (rat_u64(n), um.measure)).collect());
            Ok(rep)
        }
        Command::BcBound { family, n } => {
            let mut rep = ExperimentReport::new("bc-bound", seed);
            rep.param("family", family);
            let bound = if family == "dyadic" {
                let n = n.ok_or_else(|| CliError::Validation("dyadic family needs --n".into()))?;
                rep.param("n", n);
                let measures = vec![rat(1, 2); n];
                let mut pairs = vec![vec![rat(1, 4); n]; n];
                for (k, row) in pairs.iter_mut().enumerate() {
                    row[k] = rat(1, 2);
                }
                bc_lower_bound(&measures, &pairs)?
            } else {
                let doc = std::fs::read_to_string(family)?;
                let parsed: MatrixFile = serde_json::from_str(&doc)
                    .map_err(|e| CliError::Validation(format!("bad matrix file: {e}")))?;
                let measures = parsed
                    .measures
                    .iter()
                    .map(|s| parse_rational(s))
                    .collect::<Result<Vec<_>, _>>()?;
                let pairs = parsed
                    .pairs
                    .iter()
                    .map(|row| row.iter().map(|s| parse_rational(s)).collect())
                    .collect::<Result<Vec<Vec<_>>, _>>()?;
                bc_lower_bound(&measures, &pairs)?
            };
            rep.result("bound", &bound);
            Ok(rep)
        }
        Command::QuasiConst { family, jmax, q_list, rho } => {
            let mut rep = ExperimentReport::new("quasi-const", seed);
            rep.param("family", family);
            let sets: Vec<TorusIntervalSet> = match family.as_str() {
                "dyadic" => {
                    let jmax =
                        jmax.ok_or_else(|| CliError::Validation("dyadic family needs --jmax".into()))?;
                    rep.param("jmax", jmax);
                    dyadic_family(jmax)?
                }
                "b1d" => {
                    let qs = parse_ladder(
                        q_list
                            .as_deref()
                            .ok_or_else(|| CliError::Validation("b1d family needs --q-list".into()))?,
                    )?;
                    let rho = parse_rational(
                        rho.as_deref()
                            .ok_or_else(|| CliError::Validation("b1d family needs --rho".into()))?,
                    )?;
                    rep.param("q_list", qs.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(","));
                    rep.param("rho", &rho);
                    qs.iter().map(|&q| build_b_1d(q, &rho)).collect::<Result<_, _>>()?
                }
                other => {
                    return Err(CliError::Validation(format!("unknown family {other:?}")));
                }
            };
            rep.result("constant", &quasi_independence_constant(&sets)?);
            Ok(rep)
        }
        Command::Ubiquity { case, n, rho, ladder } => {
            let mut rep = ExperimentReport::new("ubiquity", seed);
            let case_val = match case {
                Case::Line => DefectCase::Line,
                Case::Plane => DefectCase::Plane,
            };
            rep.param("case", if *case == Case::Line { "line" } else { "plane" })
                .param("rho", rho);
            let ladder: Vec<u64> = match (ladder, n) {
                (Some(l), _) => parse_ladder(l)?,
                (None, Some(n)) => vec![*n],
                (None, None) => {
                    return Err(CliError::Validation("ubiquity needs --n or --ladder".into()))
                }
            };
            let rho_fn = parse_psi_or_const(rho, &ladder)?;
            let mut rows = Vec::new();
            let mut all_exact = true;
            for &nn in &ladder {
                let d = ubiquity_defect(case_val, nn, &rho_fn)?;
                all_exact &= d.exact;
                rows.push((rat_u64(nn), d.defect));
            }
            if !all_exact {
                // the radius entered through its lower rounding: reported
                // defects are upper bounds on the truth
                rep.rounding_note("defect", "upper_bound_via_lower_radius");
            }
            if rows.len() == 1 {
                rep.param("n", ladder[0]);
                rep.result("defect", &rows[0].1);
            } else {
                rep.param(
                    "ladder",
                    ladder.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(","),
                );
                rep.series(rows);
            }
            Ok(rep)
        }
        Command::Svolume { v, s, q0, q1 } => {
            let v = parse_rational(v)?;
            let s = parse_rational(s)?;
            let mut rep = ExperimentReport::new("svolume", seed);
            rep.param("v", &v).param("s", &s).param("q0", q0).param("q1", q1);
            let cover = CoverSpec::new(v, *q0, *q1)?;
            rep.result_eval("s_volume", &s_volume(&cover, &s)?);
            Ok(rep)
        }
        Command::CriticalS { v, qmax } => {
            let v = parse_rational(v)?;
            let mut rep = ExperimentReport::new("critical-s", seed);
            rep.param("v", &v).param("qmax", qmax);
            let est = critical_exponent_estimate(&v, *qmax)?;
            rep.result("estimate", &decimal_to_rational(est));
            rep.rounding_note("estimate", "bisection_width_1e-3");
            rep.result("formula_value", &(rat(2, 1) / (&v + rat(1, 1))));
            Ok(rep)
        }
        Command::Boxcount { v, ladder } => {
            let v = parse_rational(v)?;
            let ladder = parse_ladder(ladder)?;
            let mut rep = ExperimentReport::new("boxcount", seed);
            rep.param("v", &v).param(
                "ladder",
                ladder.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(","),
            );
            let run = box_counting_estimate(&v, &ladder)?;
            rep.result("slope", &decimal_to_rational(run.slope));
            rep.rounding_note("slope", "least_squares_estimate");
            rep.result("formula_value", &(rat(2, 1) / (&v + rat(1, 1))));
            let mut series = Vec::new();
            for p in &run.points {
                rep.result(format!("boxes_at_Q_{}", p.shell_q), &rat_u64(p.boxes));
                series.push((
                    rat_u64(p.log2_inv_delta as u64),
                    decimal_to_rational((p.boxes as f64).log2()),
                ));
            }
            rep.rounding_note("series", "log2_of_exact_counts");
            rep.series(series);
            Ok(rep)
        }
        Command::Formulas { m, n, v } => {
            let v = parse_rational(v)?;
            let mut rep = ExperimentReport::new("formulas", seed);
            rep.param("m", m).param("n", n).param("v", &v);
            let f = DimensionFormulae::new(*m, *n, v.clone())?;
            rep.result("jb_dimension", &jb_dimension(*m, *n, &v)?);
            rep.result("gamma", &f.gamma_exponent());
            rep.result("lower_bound", &f.lower_bound_dimension());
            Ok(rep)
        }
    }
}

#[derive(Deserialize)]
struct MatrixFile {
    measures: Vec<String>,
    pairs: Vec<Vec<String>>,
}

/// Estimator outputs are decimals by nature; record them as the exact
/// rational with six fixed decimal places.
fn decimal_to_rational(x: f64) -> Rational {
    let scaled = (x * 1e6).round() as i64;
    rat(scaled, 1_000_000)
}
