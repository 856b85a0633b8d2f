//! The `bound`, `verify`, `sweep` and `catalogue` commands.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{self, BoundResult, GStrategy, SearchGrid};
use crate::catalogue;
use crate::coeff::{check_hypotheses, HypothesisReport, Problem};
use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::norms;
use crate::verify::{self, Status, VerificationReport, VerifyOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_EMPTY: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_FAILED: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Bound,
    Verify,
    Sweep,
    Catalogue,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Text,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "sturm-bounds", version, about = "Spectral lower bounds for (1/r)(-(p f')' + q f)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Evaluate every bound and report the best one
    Bound(CliArgs),
    /// Compare every bound with the spectral oracle and fuzz the lemmas
    Verify(CliArgs),
    /// Best bound per exponent s
    Sweep(CliArgs),
    /// Verify all built-in problems
    Catalogue(CliArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CliArgs {
    /// problem JSON file, or the name of a built-in problem
    #[arg(long, value_name = "PATH")]
    pub problem: Option<PathBuf>,
    /// exponents s: `1,3/2,inf`, `start:step:stop` or `default`
    #[arg(long, value_name = "LIST", default_value = "default")]
    pub s: String,
    /// exponents eta for 1/p
    #[arg(long, value_name = "LIST", default_value = "default")]
    pub eta: String,
    /// `auto`, `c=VALUE` or `inv_r`
    #[arg(long, value_name = "G", default_value = "auto")]
    pub g: String,
    /// relative tolerance for the norms
    #[arg(long, value_name = "REAL", default_value_t = norms::DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
    #[arg(long, value_name = "INT", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub problem_path: Option<PathBuf>,
    /// `None` is the default grid
    pub s_grid: Option<Vec<Exponent>>,
    pub eta_grid: Option<Vec<Exponent>>,
    pub g_strategy: GStrategy,
    pub tol: f64,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub seed: u64,
}

pub fn parse_g(text: &str) -> Result<GStrategy> {
    match text.trim() {
        "auto" => Ok(GStrategy::Auto),
        "inv_r" => Ok(GStrategy::InvR),
        t => match t.strip_prefix("c=").map(|v| v.trim().parse::<f64>()) {
            Some(Ok(c)) if c > 0.0 && c.is_finite() => Ok(GStrategy::Constant(c)),
            _ => Err(Error::Invalid(format!("--g expects auto, c=VALUE with VALUE > 0, or inv_r; got {t:?}"))),
        },
    }
}

impl RunConfig {
    pub fn new(command: Command) -> RunConfig {
        RunConfig {
            command,
            problem_path: None,
            s_grid: None,
            eta_grid: None,
            g_strategy: GStrategy::Auto,
            tol: norms::DEFAULT_TOL,
            output: None,
            format: Format::Json,
            seed: 0,
        }
    }

    pub fn from_cli(cli: Cli) -> Result<RunConfig> {
        let (command, args) = match cli.command {
            CliCommand::Bound(a) => (Command::Bound, a),
            CliCommand::Verify(a) => (Command::Verify, a),
            CliCommand::Sweep(a) => (Command::Sweep, a),
            CliCommand::Catalogue(a) => (Command::Catalogue, a),
        };
        let config = RunConfig {
            command,
            problem_path: args.problem,
            s_grid: Exponent::parse_list(&args.s)?,
            eta_grid: Exponent::parse_list(&args.eta)?,
            g_strategy: parse_g(&args.g)?,
            tol: args.tol,
            output: args.output,
            format: args.format,
            seed: args.seed,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || !self.tol.is_finite() {
            return Err(Error::Invalid(format!("--tol must be positive, got {}", self.tol)));
        }
        if self.s_grid.as_ref().is_some_and(|g| g.is_empty()) || self.eta_grid.as_ref().is_some_and(|g| g.is_empty()) {
            return Err(Error::Invalid("exponent grids must be nonempty".into()));
        }
        if self.command == Command::Sweep && self.format == Format::Text {
            return Err(Error::Invalid("sweep writes csv or json only".into()));
        }
        if self.command != Command::Catalogue && self.problem_path.is_none() {
            return Err(Error::Invalid("--problem is required".into()));
        }
        Ok(())
    }

    pub fn grid(&self) -> SearchGrid {
        SearchGrid {
            s: self.s_grid.clone().unwrap_or_else(SearchGrid::default_s),
            eta: self.eta_grid.clone().unwrap_or_else(SearchGrid::default_eta),
            g: self.g_strategy,
        }
    }

    fn verify_options(&self) -> VerifyOptions {
        VerifyOptions { tol: self.tol, seed: self.seed, ..VerifyOptions::default() }
    }
}

/// Result of a command before it is written anywhere.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub body: String,
}

impl Outcome {
    fn input_error(e: impl std::fmt::Display) -> Outcome {
        Outcome { code: EXIT_INPUT, body: format!("error: {e}\n") }
    }
}

/// A file path, or failing that the name of a built-in problem.
pub fn load_problem(path: &Path) -> Result<Problem> {
    if !path.exists() {
        if let Some(p) = path.to_str().and_then(catalogue::get) {
            return Ok(p);
        }
    }
    let text = std::fs::read_to_string(path)?;
    let mut prob = Problem::from_json(&text)?;
    if prob.name == "problem" {
        if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
            prob.name = stem.to_string();
        }
    }
    Ok(prob)
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn num(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}

#[derive(Serialize)]
struct HypothesisFailure<'a> {
    problem: &'a str,
    error: &'static str,
    failures: Vec<String>,
    hypotheses: &'a HypothesisReport,
}

fn hypothesis_outcome(prob: &Problem, rep: &HypothesisReport, format: Format) -> Outcome {
    let body = match format {
        Format::Json => to_json(&HypothesisFailure {
            problem: &prob.name,
            error: "hypotheses not satisfied",
            failures: rep.failures(),
            hypotheses: rep,
        }),
        _ => {
            let mut s = format!("{}: hypotheses not satisfied\n", prob.name);
            for f in rep.failures() {
                let _ = writeln!(s, "  {f}");
            }
            s
        }
    };
    Outcome { code: EXIT_INPUT, body }
}

#[derive(Serialize)]
struct BoundReport<'a> {
    problem: &'a str,
    hypotheses: &'a HypothesisReport,
    bounds: &'a [BoundResult],
    best: &'a Option<BoundResult>,
}

const BOUND_CSV_HEADER: &str = "tag,theorem,s,eta,g,alpha,beta,omega_measure,bound,applicable";

fn bound_csv_row(r: &BoundResult) -> String {
    format!(
        "{},{:?},{},{},{},{},{},{},{},{}",
        r.tag(),
        r.theorem,
        r.s.map(|s| s.to_string()).unwrap_or_default(),
        r.eta.map(|s| s.to_string()).unwrap_or_default(),
        r.g.map(|g| g.to_string()).unwrap_or_default(),
        num(r.alpha),
        num(r.beta),
        num(r.omega_measure),
        num(r.bound),
        r.applicable
    )
}

fn render_bound(prob: &Problem, hyp: &HypothesisReport, best: &bounds::BestBound, format: Format) -> String {
    match format {
        Format::Json => to_json(&BoundReport { problem: &prob.name, hypotheses: hyp, bounds: &best.results, best: &best.best }),
        Format::Csv => {
            let mut s = format!("{BOUND_CSV_HEADER}\n");
            for r in &best.results {
                s.push_str(&bound_csv_row(r));
                s.push('\n');
            }
            s
        }
        Format::Text => {
            let mut s = format!("problem {}\n", prob.name);
            for r in &best.results {
                match r.bound {
                    Some(b) => {
                        let g = r.g.map(|g| format!("  [{g}]")).unwrap_or_default();
                        let _ = writeln!(s, "  {:<22} {b:>14.8}{g}", r.tag());
                    }
                    None => {
                        let _ = writeln!(s, "  {:<22} {:>14}  ({})", r.tag(), "n/a", r.reason.as_deref().unwrap_or(""));
                    }
                }
            }
            match &best.best {
                Some(b) => {
                    let _ = writeln!(s, "best {} = {}", b.tag(), num(b.bound));
                }
                None => s.push_str("no certified bound\n"),
            }
            s
        }
    }
}

fn render_verify(rep: &VerificationReport, format: Format) -> String {
    match format {
        Format::Json => to_json(rep),
        Format::Csv => {
            let mut s = String::from("tag,bound,oracle,margin,below_oracle\n");
            for r in rep.bounds.iter().filter(|r| r.applicable) {
                let b = r.bound.unwrap_or(f64::NAN);
                let _ = writeln!(
                    s,
                    "{},{b},{},{},{}",
                    r.tag(),
                    rep.oracle.lambda_min,
                    rep.margin,
                    b <= rep.oracle.lambda_min + rep.margin
                );
            }
            s
        }
        Format::Text => {
            let mut s = format!("problem {}: {:?}\n", rep.problem, rep.status);
            let _ = writeln!(
                s,
                "  oracle lambda_min = {} (L = {}, n = {}, converged = {})",
                rep.oracle.lambda_min, rep.oracle.half_length, rep.oracle.n, rep.oracle.converged
            );
            let _ = writeln!(s, "  margin = {:e}", rep.margin);
            if let Some(b) = &rep.best {
                let _ = writeln!(s, "  best {} = {}", b.tag(), num(b.bound));
            }
            let _ = writeln!(s, "  all bounds below oracle: {}", rep.all_bounds_below_oracle);
            if let Some(f) = &rep.lemma_fuzz {
                let _ = writeln!(s, "  lemma fuzz: {} trials, {} violations", f.trials, f.violations());
            }
            s
        }
    }
}

pub fn status_code(status: Status) -> i32 {
    match status {
        Status::Pass => EXIT_OK,
        Status::Unconfirmed => EXIT_EMPTY,
        Status::Fail => EXIT_FAILED,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub s: Exponent,
    pub theorem: Option<String>,
    pub bound: Option<f64>,
}

/// Best bound for each `s` separately, the other parameters fixed.
pub fn sweep(prob: &Problem, grid: &SearchGrid, tol: f64) -> Vec<SweepRow> {
    grid.s
        .par_iter()
        .map(|&s| {
            let single = SearchGrid { s: vec![s], ..grid.clone() };
            let best = bounds::best_bound(prob, &single, tol).best;
            SweepRow { s, theorem: best.as_ref().map(|b| b.tag()), bound: best.and_then(|b| b.bound) }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CatalogueRow {
    pub problem: String,
    pub status: Status,
    pub best: Option<String>,
    pub bound: Option<f64>,
    pub oracle: f64,
    pub margin: f64,
    pub fuzz_violations: usize,
}

impl From<&VerificationReport> for CatalogueRow {
    fn from(rep: &VerificationReport) -> Self {
        CatalogueRow {
            problem: rep.problem.clone(),
            status: rep.status,
            best: rep.best.as_ref().map(|b| b.tag()),
            bound: rep.best.as_ref().and_then(|b| b.bound),
            oracle: rep.oracle.lambda_min,
            margin: rep.margin,
            fuzz_violations: rep.lemma_fuzz.as_ref().map_or(0, |f| f.violations()),
        }
    }
}

fn run_catalogue(config: &RunConfig) -> Outcome {
    let reports = match catalogue::verify_all(&config.grid(), &config.verify_options()) {
        Ok(r) => r,
        Err(e) => return Outcome::input_error(e),
    };
    let rows: Vec<CatalogueRow> = reports.iter().map(CatalogueRow::from).collect();
    let code = rows.iter().map(|r| status_code(r.status)).max().unwrap_or(EXIT_EMPTY);
    let body = match config.format {
        Format::Json => to_json(&rows),
        Format::Csv => {
            let mut s = String::from("problem,status,best,bound,oracle,margin,fuzz_violations\n");
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{}",
                    r.problem,
                    serde_json::to_value(r.status).unwrap().as_str().unwrap(),
                    r.best.as_deref().unwrap_or(""),
                    num(r.bound),
                    r.oracle,
                    r.margin,
                    r.fuzz_violations
                );
            }
            s
        }
        Format::Text => {
            let mut s = format!("{:<18} {:<12} {:<16} {:>14} {:>14}\n", "problem", "status", "best", "bound", "oracle");
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{:<18} {:<12} {:<16} {:>14} {:>14.8}",
                    r.problem,
                    format!("{:?}", r.status).to_lowercase(),
                    r.best.as_deref().unwrap_or("-"),
                    r.bound.map(|b| format!("{b:.8}")).unwrap_or_else(|| "-".into()),
                    r.oracle
                );
            }
            s
        }
    };
    Outcome { code, body }
}

/// Runs a command without touching the output destination.
pub fn execute(config: &RunConfig) -> Outcome {
    if let Err(e) = config.validate() {
        return Outcome::input_error(e);
    }
    if config.command == Command::Catalogue {
        return run_catalogue(config);
    }
    let path = config.problem_path.as_deref().expect("validated");
    let prob = match load_problem(path) {
        Ok(p) => p,
        Err(e) => return Outcome::input_error(e),
    };
    let hyp = check_hypotheses(&prob, config.tol);
    if !hyp.passes() {
        return hypothesis_outcome(&prob, &hyp, config.format);
    }
    let grid = config.grid();
    match config.command {
        Command::Bound => {
            let best = bounds::best_bound(&prob, &grid, config.tol);
            let code = if best.best.is_some() { EXIT_OK } else { EXIT_EMPTY };
            Outcome { code, body: render_bound(&prob, &hyp, &best, config.format) }
        }
        Command::Verify => match verify::validate_bounds(&prob, &grid, &config.verify_options()) {
            Ok(rep) => Outcome { code: status_code(rep.status), body: render_verify(&rep, config.format) },
            Err(e) => Outcome::input_error(e),
        },
        Command::Sweep => {
            let rows = sweep(&prob, &grid, config.tol);
            let code = if rows.iter().any(|r| r.bound.is_some()) { EXIT_OK } else { EXIT_EMPTY };
            let body = match config.format {
                Format::Csv => {
                    let mut s = String::from("s,theorem,bound\n");
                    for r in &rows {
                        let _ = writeln!(s, "{},{},{}", r.s, r.theorem.as_deref().unwrap_or(""), num(r.bound));
                    }
                    s
                }
                _ => to_json(&rows),
            };
            Outcome { code, body }
        }
        Command::Catalogue => unreachable!(),
    }
}

/// Executes and writes the body to `--output` or standard output. Input
/// errors in text form go to standard error.
pub fn run(config: &RunConfig) -> i32 {
    let out = execute(config);
    if out.body.starts_with("error: ") {
        eprint!("{}", out.body);
        return out.code;
    }
    match &config.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &out.body) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return EXIT_INPUT;
            }
        }
        None => print!("{}", out.body),
    }
    out.code
}

/// Entry point for the binary.
pub fn main_with(cli: Cli) -> i32 {
    match RunConfig::from_cli(cli) {
        Ok(config) => run(&config),
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    }
}
