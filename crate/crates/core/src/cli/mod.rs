//! Command-line orchestration: configuration, per-command reports, the
//! structure-polynomial check and the oracle-equivalence suite.

mod commands;
mod structure;
mod verify;

use std::fmt::Display;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

pub use commands::{
    cmd_cutoff, cmd_greens, cmd_hitting, cmd_instantiate, cmd_mixing, cmd_moments, cmd_rho, cmd_spectrum, cmd_structure_polys, cmd_verify,
    DENSE_LIMIT, ORACLE_LIMIT,
};
pub use structure::{edge_pairs, structure_polys, StructurePolyReport, StructureTerm};
pub use verify::{oracle_equivalence, suite_range, verify_suite, EquivalenceCell, SUITE_WALKS};

use crate::error::{Error, Result};
use crate::fispec::{builtin_family, FiGraphSpec};
use crate::mixing::{default_epsilons, Epsilon};
use crate::walks::{parse_walk, TransitionRelation};

pub(crate) fn ser_display<T: Display, S: serde::Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// Doubles are written with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Settings shared by every subcommand.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub family: Option<String>,
    pub spec_path: Option<PathBuf>,
    pub walk: String,
    /// Inclusive; `None` picks a per-command default from `n0`.
    pub n_range: Option<(i64, i64)>,
    pub eps: Vec<Epsilon>,
    pub order: usize,
    pub out: Option<PathBuf>,
    pub seed: u64,
    /// Walks for the Monte Carlo check in `moments`; 0 disables it.
    pub simulate: usize,
    pub jobs: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            family: None,
            spec_path: None,
            walk: "simple".into(),
            n_range: None,
            eps: default_epsilons(),
            order: 2,
            out: None,
            seed: 0,
            simulate: 0,
            jobs: None,
        }
    }
}

impl RunConfig {
    pub fn spec(&self) -> Result<FiGraphSpec> {
        match (&self.family, &self.spec_path) {
            (Some(_), Some(_)) => Err(Error::Parse("give either --family or --spec".into())),
            (Some(f), None) => builtin_family(f),
            (None, Some(p)) => {
                let mut spec = FiGraphSpec::from_json(&std::fs::read_to_string(p)?)?;
                if spec.name.is_empty() {
                    spec.name = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                }
                Ok(spec)
            }
            (None, None) => Err(Error::Parse("a family is required (--family or --spec)".into())),
        }
    }

    pub fn walk(&self, spec: &FiGraphSpec) -> Result<TransitionRelation> {
        parse_walk(spec, &self.walk)
    }

    /// The configured range, or `lo..=hi`; must start at or above `n0`.
    pub fn ns_or(&self, spec: &FiGraphSpec, lo: i64, hi: i64) -> Result<Vec<i64>> {
        let (a, b) = self.n_range.unwrap_or((lo, hi));
        let n0 = spec.stabilization_bound();
        if a < n0 {
            return Err(Error::TooSmallN { n: a, min: n0 });
        }
        Ok((a..=b).collect())
    }
}

/// Parses `a:b` into an inclusive range.
pub fn parse_n_range(text: &str) -> Result<(i64, i64)> {
    let bad = || Error::Parse(format!("bad n-range `{text}`, expected a:b"));
    let (a, b) = text.split_once(':').ok_or_else(bad)?;
    let (a, b): (i64, i64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
    if a > b {
        return Err(bad());
    }
    Ok((a, b))
}

/// A failed validation; `code` is the exit status it maps to.
#[derive(Clone, Debug, serde::Serialize)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn mismatch(message: String) -> Self {
        Failure { code: EXIT_MISMATCH, message }
    }

    pub fn unstable(message: String) -> Self {
        Failure { code: EXIT_UNSTABLE, message }
    }
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 2;
pub const EXIT_UNSTABLE: i32 = 3;
pub const EXIT_INPUT: i32 = 4;

/// Exit status for an error that aborted a command.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NoPolynomialFit { .. } | Error::NoRationalFit { .. } | Error::InsufficientPoints { .. } => EXIT_UNSTABLE,
        Error::ToleranceExceeded { .. } | Error::SingularMatrix | Error::PoleAtPoint(_) | Error::ComplexSpectrum(_) => EXIT_MISMATCH,
        _ => EXIT_INPUT,
    }
}

/// The machine-readable form of an aborting error.
pub fn error_json(e: &Error) -> serde_json::Value {
    json!({ "error": e.kind(), "message": e.to_string(), "exit_code": exit_code(e) })
}

/// Everything a command produces.
#[derive(Clone, Debug)]
pub struct Report {
    pub command: &'static str,
    pub json: serde_json::Value,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    /// Human-readable lines.
    pub summary: Vec<String>,
    pub failures: Vec<Failure>,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        if self.failures.is_empty() {
            EXIT_OK
        } else if self.failures.iter().any(|f| f.code == EXIT_MISMATCH) {
            EXIT_MISMATCH
        } else {
            EXIT_UNSTABLE
        }
    }

    /// The JSON report with the validation outcome attached.
    pub fn full_json(&self) -> serde_json::Value {
        let mut v = json!({ "command": self.command, "passed": self.failures.is_empty(), "failures": self.failures });
        v["report"] = self.json.clone();
        v
    }

    /// Writes `<command>.json` and `<command>.csv` into `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let mut f = std::fs::File::create(dir.join(format!("{}.json", self.command)))?;
        serde_json::to_writer_pretty(&mut f, &self.full_json())?;
        writeln!(f)?;
        let mut w = csv::Writer::from_path(dir.join(format!("{}.csv", self.command)))?;
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Parser)]
#[command(name = "fiwalk", version, about = "Exact random-walk analysis on symmetric graph families")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Built-in family selector such as `kneser:2`.
    #[arg(long, global = true)]
    pub family: Option<String>,
    /// Family spec JSON file.
    #[arg(long, global = true)]
    pub spec: Option<PathBuf>,
    /// simple | lazy:<p> | weighted | custom | custom:<file>
    #[arg(long, global = true, default_value = "simple")]
    pub walk: String,
    /// Inclusive range `a:b`.
    #[arg(long, global = true)]
    pub n_range: Option<String>,
    /// Mixing thresholds, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    pub eps: Vec<String>,
    /// Highest moment order.
    #[arg(long, global = true, default_value_t = 2)]
    pub order: usize,
    /// Directory for the CSV and JSON reports; without it JSON goes to stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Seed for the Monte Carlo check.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Vertex and edge counts of G_n.
    Instantiate {
        #[arg(long)]
        n: i64,
    },
    /// Compositions of orbit indicators as polynomial combinations.
    StructurePolys {
        #[arg(long, requires = "second")]
        first: Option<String>,
        #[arg(long, requires = "first")]
        second: Option<String>,
    },
    /// Expected hitting times with full-graph checks.
    Hitting,
    /// Raw and central moments and cumulants of hitting times.
    Moments {
        /// Monte Carlo walks per state at the first n.
        #[arg(long, default_value_t = 0)]
        simulate: usize,
    },
    /// Green's function of the normalized Laplacian.
    Greens,
    /// Exact total-variation profiles and t_mix trends.
    Mixing,
    /// rho(n) and the bound t_mix(1/4) <= C / rho(n).
    Rho,
    /// Spectra across n with multiplicity fits.
    Spectrum {
        /// adjacency | laplacian | walk
        #[arg(long, default_value = "adjacency")]
        relation: String,
    },
    /// Cutoff window widths.
    Cutoff,
    /// Symbolic moments against exact full-graph solves on n0..n0+3.
    Verify,
}

impl Cli {
    pub fn config(&self) -> Result<RunConfig> {
        let c = &self.common;
        let eps = if c.eps.is_empty() { default_epsilons() } else { c.eps.iter().map(|e| Epsilon::parse(e)).collect::<Result<_>>()? };
        Ok(RunConfig {
            family: c.family.clone(),
            spec_path: c.spec.clone(),
            walk: c.walk.clone(),
            n_range: c.n_range.as_deref().map(parse_n_range).transpose()?,
            eps,
            order: c.order,
            out: c.out.clone(),
            seed: c.seed,
            simulate: match self.command {
                Command::Moments { simulate } => simulate,
                _ => 0,
            },
            jobs: c.jobs,
        })
    }
}

/// Runs one parsed invocation.
pub fn execute(cli: &Cli) -> Result<Report> {
    let cfg = cli.config()?;
    if let Some(j) = cfg.jobs {
        // A second call in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global();
    }
    match &cli.command {
        Command::Instantiate { n } => cmd_instantiate(&cfg, *n),
        Command::StructurePolys { first, second } => cmd_structure_polys(&cfg, first.as_deref(), second.as_deref()),
        Command::Hitting => cmd_hitting(&cfg),
        Command::Moments { .. } => cmd_moments(&cfg),
        Command::Greens => cmd_greens(&cfg),
        Command::Mixing => cmd_mixing(&cfg),
        Command::Rho => cmd_rho(&cfg),
        Command::Spectrum { relation } => cmd_spectrum(&cfg, relation),
        Command::Cutoff => cmd_cutoff(&cfg),
        Command::Verify => cmd_verify(&cfg),
    }
}

/// Parses arguments, runs, prints and returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if !e.use_stderr() {
                print!("{e}");
                return EXIT_OK;
            }
            let msg = e.render().to_string();
            eprintln!("{}", json!({ "error": "usage", "message": msg.trim(), "exit_code": EXIT_INPUT }));
            return EXIT_INPUT;
        }
    };
    let report = match execute(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("{}", error_json(&e));
            return exit_code(&e);
        }
    };
    match &cli.common.out {
        Some(dir) => {
            if let Err(e) = report.write_to(dir) {
                eprintln!("{}", error_json(&e));
                return exit_code(&e);
            }
            for line in &report.summary {
                println!("{line}");
            }
        }
        None => {
            for line in &report.summary {
                eprintln!("{line}");
            }
            println!("{}", serde_json::to_string_pretty(&report.full_json()).expect("report serializes"));
        }
    }
    let code = report.exit_code();
    if code != EXIT_OK {
        let failures: Vec<_> = report.failures.iter().map(|f| &f.message).collect();
        eprintln!(
            "{}",
            json!({ "error": "validation_failed", "message": format!("{} validation(s) failed", failures.len()), "failures": failures, "exit_code": code })
        );
    }
    code
}
