//! Command-line front end shared by the `stabcert` binary and the tests.

use crate::error::{Error, Result};
use crate::io::{self, Artifact};
use crate::nonlocality::{self, AggregateBound, PairBound, Threshold};
use crate::pauli::SiteLabel;
use crate::qudit_graph::{self, GraphReport};
use crate::sim::{self, VerifyMode, VerifyOptions};
use crate::stabilizer::StabilizerGroup;
use crate::witness::{witness_map, WitnessCertificate};
use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

pub const GRAPH_SUMMARY_SCHEMA: &str = "stabcert/graph-summary/v1";

#[derive(Debug, Parser)]
#[command(name = "stabcert", version, about = "Certify GME and full nonlocality of qubit stabilizer subspaces")]
pub struct Cli {
    /// Write the artifact here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for pair and branch fan-out.
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    pub workers: Option<u16>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a generator file and report the canonical group.
    Validate { file: PathBuf },
    /// Decide genuine multipartite entanglement.
    Gme { file: PathBuf },
    /// Search two-site witnesses for every pair of parties.
    Witness { file: PathBuf },
    /// Run every pair protocol on every outcome branch.
    Verify {
        file: PathBuf,
        #[arg(long, default_value = "both")]
        mode: VerifyMode,
        #[arg(long = "tol-fidelity", default_value_t = sim::DEFAULT_FIDELITY_TOLERANCE)]
        tol_fidelity: f64,
        /// Seed for branch sampling on large tableau runs.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Verify the pair protocol of a qudit graph state.
    Graph {
        file: PathBuf,
        /// Restrict to one pair, written `i,j`; by default every edge that
        /// survives reduction mod d is checked.
        #[arg(long)]
        pair: Option<String>,
        #[arg(long = "tol-fidelity", default_value_t = sim::DEFAULT_FIDELITY_TOLERANCE)]
        tol_fidelity: f64,
    },
    /// Tabulate minimal quantum values of the chained functional.
    Chained {
        #[arg(long = "n-min", default_value_t = 2)]
        n_min: usize,
        #[arg(long = "n-max", default_value_t = 10)]
        n_max: usize,
    },
    /// Aggregate pairwise bounds into a genuine-nonlocality lower bound.
    Bound {
        /// Number of parties.
        #[arg(long)]
        n: usize,
        /// `all=<p>` for a uniform bound, or a CSV file `alpha,alpha_bar,p_lower`.
        #[arg(long)]
        pairs: String,
    },
    /// Settings needed for a positive aggregate bound.
    Thresholds {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = nonlocality::DEFAULT_SETTINGS_CAP)]
        cap: usize,
    },
    /// Emit figure data as CSV.
    Figures {
        #[arg(value_enum)]
        figure: Figure,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    /// `N,n_min,m` for N = 4..40.
    Fig1,
    /// `m,p_nl_lower` for N = 5 and n = 4..60.
    Fig2,
}

/// What a run produced: the artifact text, a one-line summary and whether
/// the report passed.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub artifact: String,
    pub summary: String,
    pub passed: bool,
}

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

/// Exit code for an error: certification verdicts map to 1, everything
/// caused by the input to 2.
pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::NotGme { .. } | Error::NoWitness { .. } | Error::CertificateFailure { .. } => EXIT_FAIL,
        _ => EXIT_INPUT,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidateBody {
    pub valid: bool,
    pub error: Option<String>,
    pub n_qubits: Option<usize>,
    pub k: Option<usize>,
    pub generators: Vec<String>,
    pub removed: Vec<usize>,
    pub log2_dimension: Option<usize>,
    pub fact1_holds: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GmeBody {
    pub gme: bool,
    pub n_qubits: usize,
    pub k: usize,
    pub violating_bipartition: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundBody {
    pub n_parties: usize,
    pub pair_bounds: Vec<PairBound>,
    #[serde(flatten)]
    pub bound: AggregateBound,
    pub certified: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainedRow {
    pub n: usize,
    pub value: f64,
    pub pair_bound: f64,
    pub angles: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainedBody {
    pub d: usize,
    pub classical_bound: f64,
    pub rows: Vec<ChainedRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphSummary {
    pub schema: String,
    pub d: u32,
    pub n_vertices: usize,
    pub reports: Vec<GraphReport>,
    pub passed: bool,
}

fn origin(path: &Path) -> String {
    path.display().to_string()
}

fn with_pool<T: Send>(workers: Option<u16>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        Some(w) => Ok(rayon::ThreadPoolBuilder::new()
            .num_threads(w as usize)
            .build()
            .map_err(|e| Error::Domain(format!("cannot build worker pool: {e}")))?
            .install(f)),
        None => Ok(f()),
    }
}

fn check_tolerance(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("tolerance must be positive, got {t}")))
    }
}

fn parse_pair(text: &str, n: usize) -> Result<(SiteLabel, SiteLabel)> {
    let bad = || Error::Parse { column: 1, message: format!("expected `i,j`, found {text:?}") };
    let (a, b) = text.split_once(',').ok_or_else(bad)?;
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().parse().map_err(|_| bad())?;
    Ok((SiteLabel::new(a, n)?, SiteLabel::new(b, n)?))
}

fn uniform_or_file(arg: &str, n: usize) -> Result<Vec<PairBound>> {
    if let Some(value) = arg.strip_prefix("all=") {
        let p: f64 = value.trim().parse().map_err(|_| Error::Parse { column: 5, message: format!("expected a probability, found {value:?}") })?;
        let mut out = Vec::new();
        for a in 1..=n {
            for b in a + 1..=n {
                out.push(PairBound::new(SiteLabel::unchecked(a), SiteLabel::unchecked(b), p)?);
            }
        }
        return Ok(out);
    }
    let path = Path::new(arg);
    io::parse_pair_bounds(&io::read_file(path)?, &origin(path))
}

/// Executes one command and returns its artifact.
pub fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Validate { file } => {
            let text = io::read_file(file)?;
            let ops = io::parse_operators(&text, 2, &origin(file))?;
            let body = match StabilizerGroup::validate_and_canonicalize(ops) {
                Ok(g) => ValidateBody {
                    valid: true,
                    error: None,
                    n_qubits: Some(g.n_qubits()),
                    k: Some(g.k()),
                    generators: g.generators().iter().map(ToString::to_string).collect(),
                    removed: g.removed().to_vec(),
                    log2_dimension: Some(g.log2_dimension()),
                    fact1_holds: Some(g.commutation_matrices().sums_to_zero()),
                },
                Err(e @ (Error::NotAbelian(..) | Error::MinusIdentity | Error::InvalidPhase(_) | Error::Dimension(_))) => ValidateBody {
                    valid: false,
                    error: Some(e.to_string()),
                    n_qubits: None,
                    k: None,
                    generators: Vec::new(),
                    removed: Vec::new(),
                    log2_dimension: None,
                    fact1_holds: None,
                },
                Err(e) => return Err(e),
            };
            let summary = match &body.error {
                None => format!("valid group: N = {}, k = {}, dim = 2^{}", body.n_qubits.unwrap_or(0), body.k.unwrap_or(0), body.log2_dimension.unwrap_or(0)),
                Some(e) => format!("invalid group: {e}"),
            };
            let passed = body.valid;
            Ok(Outcome { artifact: io::to_json(&Artifact::new(io::VALIDATE_SCHEMA, body))?, summary, passed })
        }
        Command::Gme { file } => {
            let g = io::read_stab(file)?;
            let verdict = match cli.workers {
                Some(w) => g.is_gme_parallel(w as usize)?,
                None => g.is_gme()?,
            };
            let summary = match &verdict.violating {
                None => format!("GME: every bipartition of {} qubits has a non-commuting restriction", g.n_qubits()),
                Some(q) => format!("not GME: restrictions to {q:?} and its complement commute"),
            };
            let body = GmeBody { gme: verdict.gme, n_qubits: g.n_qubits(), k: g.k(), violating_bipartition: verdict.violating };
            Ok(Outcome { artifact: io::to_json(&Artifact::new(io::GME_SCHEMA, body))?, summary, passed: verdict.gme })
        }
        Command::Witness { file } => {
            let g = io::read_stab(file)?;
            let map = with_pool(cli.workers, || witness_map(&g))??;
            let cert = WitnessCertificate::build(&g, &map)?;
            let found = cert.pairs.len();
            let total = found + cert.missing_pairs.len();
            let summary = if cert.all_pairs_certified() {
                format!("{found}/{total} pairs have a witness")
            } else {
                format!("{found}/{total} pairs have a witness; missing {:?}", cert.missing_pairs)
            };
            let passed = cert.all_pairs_certified();
            Ok(Outcome { artifact: io::to_json(&cert)?, summary, passed })
        }
        Command::Verify { file, mode, tol_fidelity, seed } => {
            check_tolerance(*tol_fidelity)?;
            let g = io::read_stab(file)?;
            let options = VerifyOptions { mode: *mode, fidelity_tolerance: *tol_fidelity, workers: cli.workers.map(usize::from), seed: *seed };
            let report = with_pool(cli.workers, || sim::build_report(&g, &options))??;
            let certified = report.pairs.iter().filter(|p| p.witness_found && p.passed).count();
            let branches: u64 = report.pairs.iter().map(|p| p.branches_checked).sum();
            let min_fid = report.pairs.iter().filter_map(|p| p.min_fidelity).reduce(f64::min);
            let summary = format!(
                "{}: {certified}/{} pairs certified over {branches} branches{}",
                if report.passed { "MFNL certified" } else { "certification failed" },
                report.pairs.len(),
                min_fid.map(|f| format!(", min fidelity {f:.12}")).unwrap_or_default()
            );
            Ok(Outcome { artifact: io::to_json(&report)?, summary, passed: report.passed })
        }
        Command::Graph { file, pair, tol_fidelity } => {
            check_tolerance(*tol_fidelity)?;
            let gf = io::parse_graph(&io::read_file(file)?, &origin(file))?;
            let n = gf.graph.n_vertices();
            let pairs: Vec<(SiteLabel, SiteLabel)> = match pair {
                Some(p) => vec![parse_pair(p, n)?],
                None => crate::witness::all_pairs(n)
                    .into_iter()
                    .map(|(a, b)| (SiteLabel::unchecked(a), SiteLabel::unchecked(b)))
                    .filter(|&(a, b)| gf.graph.multiplicity(a, b) % gf.d != 0)
                    .collect(),
            };
            let reports = with_pool(cli.workers, || {
                pairs
                    .par_iter()
                    .map(|&(i, j)| qudit_graph::graph_protocol_verify(&gf.graph, gf.d, i, j, *tol_fidelity))
                    .collect::<Result<Vec<_>>>()
            })??;
            let passed = reports.iter().all(|r| r.passed);
            let summary = format!(
                "{}/{} pairs steered to maximally entangled states (d = {})",
                reports.iter().filter(|r| r.passed).count(),
                reports.len(),
                gf.d
            );
            let body = GraphSummary { schema: GRAPH_SUMMARY_SCHEMA.into(), d: gf.d, n_vertices: n, reports, passed };
            Ok(Outcome { artifact: io::to_json(&body)?, summary, passed })
        }
        Command::Chained { n_min, n_max } => {
            if n_min > n_max {
                return Err(Error::Domain(format!("empty range {n_min}..={n_max}")));
            }
            let rows = with_pool(cli.workers, || {
                (*n_min..=*n_max)
                    .into_par_iter()
                    .map(|n| {
                        let r = nonlocality::quantum_chained_minimum(n, 2)?;
                        Ok(ChainedRow { n, value: r.value, pair_bound: nonlocality::pair_bound_from_chained(r.value, 2)?, angles: r.angles })
                    })
                    .collect::<Result<Vec<_>>>()
            })??;
            let summary = format!("minimal I_(n,2) for n = {n_min}..{n_max}; smallest {:.9}", rows.last().map_or(f64::NAN, |r| r.value));
            let body = ChainedBody { d: 2, classical_bound: 1.0, rows };
            Ok(Outcome { artifact: io::to_json(&Artifact::new(io::CHAINED_SCHEMA, body))?, summary, passed: true })
        }
        Command::Bound { n, pairs } => {
            let list = uniform_or_file(pairs, *n)?;
            let bound = nonlocality::theorem2_bound_from_pairs(&list, *n)?;
            let certified = bound.clamped > 0.0;
            let summary = format!("genuine nonlocality content ≥ {:.6} (raw {:.6})", bound.clamped, bound.raw);
            let body = BoundBody { n_parties: *n, pair_bounds: list, bound, certified };
            Ok(Outcome { artifact: io::to_json(&Artifact::new(io::BOUND_SCHEMA, body))?, summary, passed: certified })
        }
        Command::Thresholds { n, d, cap } => {
            let t: Threshold = nonlocality::gmnl_threshold(*n, *d, *cap)?;
            let summary = format!("N = {n}: pair bounds above {:.6} need n ≥ {} settings, m = {}", t.pair_requirement, t.n_min, t.m);
            Ok(Outcome { artifact: io::to_json(&Artifact::new(io::THRESHOLD_SCHEMA, t))?, summary, passed: true })
        }
        Command::Figures { figure } => {
            let artifact = with_pool(cli.workers, || match figure {
                Figure::Fig1 => nonlocality::fig1(4..=40).and_then(|r| io::fig1_csv(&r)),
                Figure::Fig2 => nonlocality::fig2(5, 4..=60).and_then(|r| io::fig2_csv(&r)),
            })??;
            let summary = format!("{} rows", artifact.lines().count().saturating_sub(1));
            Ok(Outcome { artifact, summary, passed: true })
        }
    }
}

/// Runs the command, writes the artifact and returns the process exit code.
pub fn main_with(cli: &Cli) -> i32 {
    match run(cli) {
        Ok(outcome) => {
            let written = match &cli.out {
                Some(path) => io::write_file(path, &outcome.artifact),
                None => {
                    print!("{}", outcome.artifact);
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return EXIT_INPUT;
            }
            eprintln!("{}", outcome.summary);
            if outcome.passed {
                EXIT_PASS
            } else {
                EXIT_FAIL
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}
