//! Command-line front end: sweeps, verification, conjecture searches and
//! witness replay.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::schur::SchurParams;
use crate::search::{search, Parameterization, SearchConfig, SearchError, SearchReport};
use crate::series::{DEFAULT_ORDER, MAX_ORDER};
use crate::suite::{run_suite, SuiteConfig};
use crate::vclass::{
    conjectured_bound, extremal_member, membership_check_default, nonsharp_bound, ClassParams,
    MembershipStatus, VClassError,
};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot write {path}: {source}")]
    Output {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot read {path}: {source}")]
    Input {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed JSON in {path}: {source}")]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error(transparent)]
    Class(#[from] VClassError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    #[default]
    Extremal,
    BoundsTable,
    Verify,
    Search,
    Report,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Everything a run needs. Also the schema of `--config` files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    pub p_grid: Vec<f64>,
    pub lambda_grid: Vec<f64>,
    /// Inclusive `[lo, hi]`.
    pub n_range: [u32; 2],
    pub order: usize,
    pub seed: Option<u64>,
    pub restarts: usize,
    pub budget: usize,
    pub output_path: Option<PathBuf>,
    pub format: Format,
    pub workers: Option<usize>,
    pub param_count: usize,
    pub parameterization: Parameterization,
    pub tolerance_scale: f64,
    pub cases: usize,
    pub sweep_tuples: usize,
    pub witness_path: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self::defaults_for(Command::Extremal)
    }
}

impl RunConfig {
    pub fn defaults_for(command: Command) -> Self {
        let (p_grid, lambda_grid, n_range) = match command {
            Command::Extremal => (linspace(0.1, 0.9, 5), linspace(0.2, 1.0, 5), [1, 10]),
            Command::BoundsTable => (linspace(0.1, 0.9, 5), linspace(0.2, 1.0, 5), [3, 10]),
            Command::Verify => (linspace(0.1, 0.9, 5), linspace(0.2, 1.0, 5), [1, 20]),
            Command::Search | Command::Report => {
                (linspace(0.1, 0.5, 5), vec![0.5, 1.0], [3, 5])
            }
        };
        Self {
            command,
            p_grid,
            lambda_grid,
            n_range,
            order: DEFAULT_ORDER,
            seed: None,
            restarts: 64,
            budget: 10_000,
            output_path: None,
            format: Format::Csv,
            workers: None,
            param_count: 6,
            parameterization: Parameterization::FromW1,
            tolerance_scale: 1.0,
            cases: 200,
            sweep_tuples: 10_000,
            witness_path: None,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let usage = |m: String| Err(CliError::Usage(m));
        if self.command != Command::Report {
            if self.p_grid.is_empty() || self.lambda_grid.is_empty() {
                return usage("grids must not be empty".into());
            }
            for &p in &self.p_grid {
                for &l in &self.lambda_grid {
                    if let Err(e) = ClassParams::new(p, l) {
                        return usage(format!("invalid grid value: {e}"));
                    }
                }
            }
            if self.n_range[0] > self.n_range[1] {
                return usage(format!("empty n range {:?}", self.n_range));
            }
        }
        if self.order < 3 || self.order > MAX_ORDER {
            return usage(format!("order must lie in 3..={MAX_ORDER}"));
        }
        match self.command {
            Command::Search => {
                if self.seed.is_none() {
                    return usage("search requires --seed".into());
                }
                if self.n_range[0] < 2 {
                    return usage("search needs n >= 2".into());
                }
                if self.restarts == 0 || self.param_count == 0 {
                    return usage("restarts and param-count must be positive".into());
                }
            }
            Command::Report if self.witness_path.is_none() => {
                return usage("report requires a witness file".into());
            }
            Command::Extremal | Command::BoundsTable if self.n_range[0] < 1 => {
                return usage("n starts at 1".into());
            }
            _ => {}
        }
        if self.workers == Some(0) {
            return usage("workers must be positive".into());
        }
        Ok(())
    }

    fn ns(&self) -> std::ops::RangeInclusive<u32> {
        self.n_range[0]..=self.n_range[1]
    }

    fn cells(&self) -> Vec<(ClassParams, u32)> {
        let mut out = Vec::new();
        for &p in &self.p_grid {
            for &l in &self.lambda_grid {
                let cp = ClassParams::new(p, l).expect("validated grid");
                out.extend(self.ns().map(|n| (cp, n)));
            }
        }
        out
    }
}

/// `count` equally spaced values from `start` to `stop`, both included.
pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![start],
        _ => (0..count)
            .map(|i| {
                if i == count - 1 {
                    stop
                } else {
                    let t = i as f64 / (count - 1) as f64;
                    start * (1.0 - t) + stop * t
                }
            })
            .collect(),
    }
}

/// Parses `start:stop:count`, a single value, or a comma-separated list.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, String> {
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("bad number {t:?}: {e}"));
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [start, stop, count] => {
            let count: usize = count
                .trim()
                .parse()
                .map_err(|e| format!("bad count {count:?}: {e}"))?;
            if count == 0 {
                return Err("grid count must be positive".into());
            }
            Ok(linspace(num(start)?, num(stop)?, count))
        }
        [_] => s.split(',').map(num).collect(),
        _ => Err(format!("expected start:stop:count, got {s:?}")),
    }
}

/// Parses `lo:hi` (inclusive) or a single index.
pub fn parse_n_range(s: &str) -> Result<[u32; 2], String> {
    let int = |t: &str| t.trim().parse::<u32>().map_err(|e| format!("bad index {t:?}: {e}"));
    match s.split(':').collect::<Vec<_>>().as_slice() {
        [n] => {
            let n = int(n)?;
            Ok([n, n])
        }
        [lo, hi] => Ok([int(lo)?, int(hi)?]),
        _ => Err(format!("expected lo:hi, got {s:?}")),
    }
}

#[derive(Debug, Parser)]
#[command(name = "vplambda", version, about = "Coefficient bounds for meromorphic functions with a pole at p")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Coefficients of the extremal function against the conjectured bound.
    Extremal(CommonArgs),
    /// Conjectured and Cauchy–Schwarz bounds side by side.
    BoundsTable(CommonArgs),
    /// Run every invariant suite and report margins.
    Verify(VerifyArgs),
    /// Search Schur-parameter space for large coefficients.
    Search(CommonArgs),
    /// Rebuild a member from a witness file and re-check it.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Pole locations, `start:stop:count` or a list.
    #[arg(long = "p", value_parser = parse_grid)]
    pub p: Option<::std::vec::Vec<f64>>,
    /// Levels λ, `start:stop:count` or a list.
    #[arg(long = "lambda", value_parser = parse_grid)]
    pub lambda: Option<::std::vec::Vec<f64>>,
    /// Coefficient indices, `lo:hi`.
    #[arg(long = "n", value_parser = parse_n_range)]
    pub n: Option<[u32; 2]>,
    #[arg(long)]
    pub order: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub restarts: Option<usize>,
    /// Objective evaluations per grid cell.
    #[arg(long)]
    pub budget: Option<usize>,
    #[arg(long)]
    pub param_count: Option<usize>,
    #[arg(long, value_enum)]
    pub parameterization: Option<Parameterization>,
    /// Output file (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// JSON run configuration; explicit flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Multiplier applied to every tolerance.
    #[arg(long)]
    pub tolerance_scale: Option<f64>,
    /// Random cases per suite.
    #[arg(long)]
    pub cases: Option<usize>,
    /// Sampled coefficient tuples per polynomial sweep.
    #[arg(long)]
    pub sweep_tuples: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    /// Witness JSON written by `search`.
    pub witness: PathBuf,
    #[command(flatten)]
    pub common: CommonArgs,
}

impl Cli {
    /// Resolves defaults, an optional config file, and explicit flags into a
    /// single run configuration.
    pub fn into_config(self) -> Result<RunConfig, CliError> {
        let (command, common, verify, witness) = match self.command {
            CliCommand::Extremal(c) => (Command::Extremal, c, None, None),
            CliCommand::BoundsTable(c) => (Command::BoundsTable, c, None, None),
            CliCommand::Verify(v) => (Command::Verify, v.common.clone(), Some(v), None),
            CliCommand::Search(c) => (Command::Search, c, None, None),
            CliCommand::Report(r) => (Command::Report, r.common, None, Some(r.witness)),
        };
        let mut cfg = match &common.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|source| CliError::Input {
                    path: path.clone(),
                    source,
                })?;
                let mut cfg: RunConfig = serde_json::from_str(&text).map_err(|source| {
                    CliError::Json {
                        path: path.clone(),
                        source,
                    }
                })?;
                cfg.command = command;
                cfg
            }
            None => RunConfig::defaults_for(command),
        };
        if let Some(v) = common.p {
            cfg.p_grid = v;
        }
        if let Some(v) = common.lambda {
            cfg.lambda_grid = v;
        }
        if let Some(v) = common.n {
            cfg.n_range = v;
        }
        if let Some(v) = common.order {
            cfg.order = v;
        }
        if common.seed.is_some() {
            cfg.seed = common.seed;
        }
        if let Some(v) = common.restarts {
            cfg.restarts = v;
        }
        if let Some(v) = common.budget {
            cfg.budget = v;
        }
        if let Some(v) = common.param_count {
            cfg.param_count = v;
        }
        if let Some(v) = common.parameterization {
            cfg.parameterization = v;
        }
        if common.out.is_some() {
            cfg.output_path = common.out;
        }
        if let Some(v) = common.format {
            cfg.format = v;
        }
        if common.workers.is_some() {
            cfg.workers = common.workers;
        }
        if let Some(v) = verify {
            if let Some(s) = v.tolerance_scale {
                cfg.tolerance_scale = s;
            }
            if let Some(c) = v.cases {
                cfg.cases = c;
            }
            if let Some(t) = v.sweep_tuples {
                cfg.sweep_tuples = t;
            }
        }
        if witness.is_some() {
            cfg.witness_path = witness;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// A serialized witness, sufficient to rebuild the member exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessFile {
    pub p: f64,
    pub lambda: f64,
    pub n: u32,
    pub parameterization: Parameterization,
    pub gammas: SchurParams,
    pub order: usize,
    pub seed: u64,
}

impl From<&SearchReport> for WitnessFile {
    fn from(r: &SearchReport) -> Self {
        Self {
            p: r.p,
            lambda: r.lambda,
            n: r.n,
            parameterization: r.parameterization,
            gammas: r.witness.clone(),
            order: r.order,
            seed: r.seed,
        }
    }
}

/// Rendered output of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub body: Vec<u8>,
    /// Nonzero-exit condition: a failed invariant or a conjecture violation.
    pub failed: bool,
    pub witnesses: Vec<(PathBuf, Vec<u8>)>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        i32::from(self.failed)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Float(x) => fmt_float(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Float(x) => serde_json::Number::from_f64(*x)
                .map(Value::Number)
                .unwrap_or_else(|| Value::String(fmt_float(*x))),
            Cell::Int(i) => Value::from(*i),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Empty => Value::Null,
        }
    }
}

/// Shortest representation that round-trips to the same `f64` (at most 17
/// significant digits), always with a decimal point or exponent.
pub fn fmt_float(x: f64) -> String {
    format!("{x:?}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn header(&self) -> &[&'static str] {
        &self.header
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv))?;
        }
        w.into_inner()
            .map_err(|e| CliError::Csv(csv::Error::from(e.into_error())))
    }

    pub fn to_json(&self) -> Vec<u8> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .header
                    .iter()
                    .zip(row)
                    .map(|(k, c)| (k.to_string(), c.json()))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let mut out = serde_json::to_vec_pretty(&rows).expect("plain JSON values");
        out.push(b'\n');
        out
    }

    fn render(&self, format: Format) -> Result<Vec<u8>, CliError> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => Ok(self.to_json()),
        }
    }
}

fn check_truncation(order: usize, n_hi: u32) -> Result<(), CliError> {
    if n_hi as usize >= order {
        return Err(CliError::Usage(format!(
            "series order {order} cannot resolve coefficient a_{n_hi}; use --order {} or more",
            n_hi + 1
        )));
    }
    Ok(())
}

/// Rows `(p, λ, n, extremal_coeff, conjectured_bound, ratio)`; the extremal
/// coefficient is read from the constructed series.
pub fn cmd_extremal(cfg: &RunConfig) -> Result<Table, CliError> {
    check_truncation(cfg.order, cfg.n_range[1])?;
    let mut rows = Vec::new();
    for &p in &cfg.p_grid {
        for &l in &cfg.lambda_grid {
            let cp = ClassParams::new(p, l)?;
            let m = extremal_member(cp, cfg.order)?;
            for n in cfg.ns() {
                let coeff = m.coeff(n as usize).re;
                let bound = conjectured_bound(cp, n);
                rows.push(vec![
                    Cell::Float(p),
                    Cell::Float(l),
                    Cell::Int(n.into()),
                    Cell::Float(coeff),
                    Cell::Float(bound),
                    Cell::Float(coeff / bound),
                ]);
            }
        }
    }
    Ok(Table {
        header: vec!["p", "lambda", "n", "extremal_coeff", "conjectured_bound", "ratio"],
        rows,
    })
}

/// Rows `(p, λ, n, conjectured, nonsharp, slack)`; the last two are empty
/// for `n < 3`.
pub fn cmd_bounds_table(cfg: &RunConfig) -> Result<Table, CliError> {
    let mut rows = Vec::new();
    for &p in &cfg.p_grid {
        for &l in &cfg.lambda_grid {
            let cp = ClassParams::new(p, l)?;
            for n in cfg.ns() {
                let conj = conjectured_bound(cp, n);
                let (ns, slack) = if n >= 3 {
                    let ns = nonsharp_bound(cp, n);
                    (Cell::Float(ns), Cell::Float(ns - conj))
                } else {
                    (Cell::Empty, Cell::Empty)
                };
                rows.push(vec![
                    Cell::Float(p),
                    Cell::Float(l),
                    Cell::Int(n.into()),
                    Cell::Float(conj),
                    ns,
                    slack,
                ]);
            }
        }
    }
    Ok(Table {
        header: vec!["p", "lambda", "n", "conjectured", "nonsharp", "slack"],
        rows,
    })
}

pub fn cmd_verify(cfg: &RunConfig) -> crate::suite::SuiteReport {
    run_suite(&SuiteConfig {
        p_grid: cfg.p_grid.clone(),
        lambda_grid: cfg.lambda_grid.clone(),
        n_max: cfg.n_range[1],
        order: cfg.order,
        cases: cfg.cases,
        sweep_tuples: cfg.sweep_tuples,
        seed: cfg.seed.unwrap_or(0),
        tolerance_scale: cfg.tolerance_scale,
    })
}

/// One report per `(p, λ, n)` cell, in grid order.
pub fn cmd_search(cfg: &RunConfig) -> Result<Vec<SearchReport>, CliError> {
    let seed = cfg
        .seed
        .ok_or_else(|| CliError::Usage("search requires --seed".into()))?;
    cfg.cells()
        .into_par_iter()
        .map(|(cp, n)| {
            let sc = SearchConfig {
                param_count: cfg.param_count,
                restarts: cfg.restarts,
                budget: cfg.budget,
                parameterization: cfg.parameterization,
                order: cfg.order,
                ..SearchConfig::new(n, seed)
            };
            search(cp, &sc).map_err(CliError::from)
        })
        .collect()
}

const SEARCH_HEADER: [&str; 17] = [
    "p",
    "lambda",
    "n",
    "parameterization",
    "best_abs_coeff",
    "bound",
    "ratio",
    "nonsharp",
    "status",
    "sup_u",
    "margin",
    "pole_count",
    "evals",
    "seed",
    "order",
    "violation",
    "witness",
];

fn status_name(s: MembershipStatus) -> String {
    serde_json::to_value(s)
        .ok()
        .and_then(|v| v.as_str().map(str::to_owned))
        .unwrap_or_default()
}

fn param_name(p: Parameterization) -> String {
    serde_json::to_value(p)
        .ok()
        .and_then(|v| v.as_str().map(str::to_owned))
        .unwrap_or_default()
}

pub fn search_table(reports: &[SearchReport]) -> Table {
    let rows = reports
        .iter()
        .map(|r| {
            let nonsharp = ClassParams::new(r.p, r.lambda)
                .ok()
                .filter(|_| r.n >= 3)
                .map(|cp| Cell::Float(nonsharp_bound(cp, r.n)))
                .unwrap_or(Cell::Empty);
            vec![
                Cell::Float(r.p),
                Cell::Float(r.lambda),
                Cell::Int(r.n.into()),
                Cell::Text(param_name(r.parameterization)),
                Cell::Float(r.best_abs_coeff),
                Cell::Float(r.bound),
                Cell::Float(r.ratio),
                nonsharp,
                Cell::Text(status_name(r.membership.status)),
                Cell::Float(r.membership.sup_u),
                Cell::Float(r.membership.margin),
                Cell::Int(r.membership.pole_count),
                Cell::Int(r.evals as i64),
                Cell::Int(r.seed as i64),
                Cell::Int(r.order as i64),
                Cell::Bool(r.violation),
                Cell::Text(serde_json::to_string(&r.witness).expect("finite witness")),
            ]
        })
        .collect();
    Table {
        header: SEARCH_HEADER.to_vec(),
        rows,
    }
}

fn witness_path(out: Option<&Path>, index: usize) -> PathBuf {
    let name = format!("witness-{index:04}.json");
    match out {
        Some(path) => {
            let stem = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "search".into());
            path.with_file_name(format!("{stem}.{name}"))
        }
        None => PathBuf::from(format!("vplambda-{name}")),
    }
}

/// Rebuilds the member described by a witness and re-checks it.
pub fn cmd_report(witness: &WitnessFile) -> Result<SearchReport, CliError> {
    let cp = ClassParams::new(witness.p, witness.lambda)?;
    let m = witness
        .parameterization
        .build(cp, &witness.gammas, witness.order)?;
    let verdict = membership_check_default(&m, 256)?;
    let best = m.coeff(witness.n as usize).norm();
    let bound = conjectured_bound(cp, witness.n);
    let mut report = SearchReport {
        n: witness.n,
        p: witness.p,
        lambda: witness.lambda,
        parameterization: witness.parameterization,
        best_abs_coeff: best,
        witness: witness.gammas.clone(),
        bound,
        ratio: best / bound,
        membership: verdict,
        evals: 0,
        seed: witness.seed,
        order: m.order(),
        violation: false,
    };
    report.violation = report.is_violation();
    Ok(report)
}

/// Executes a validated configuration without touching the filesystem
/// (except for reading a witness file).
pub fn render(cfg: &RunConfig) -> Result<Outcome, CliError> {
    cfg.validate()?;
    let mut witnesses = Vec::new();
    let (body, failed) = match cfg.command {
        Command::Extremal => (cmd_extremal(cfg)?.render(cfg.format)?, false),
        Command::BoundsTable => (cmd_bounds_table(cfg)?.render(cfg.format)?, false),
        Command::Verify => {
            let report = cmd_verify(cfg);
            let body = match cfg.format {
                Format::Json => {
                    let mut v = serde_json::to_vec_pretty(&report).expect("plain report");
                    v.push(b'\n');
                    v
                }
                Format::Csv => {
                    let rows = report
                        .checks
                        .iter()
                        .map(|c| {
                            vec![
                                Cell::Text(c.name.clone()),
                                Cell::Bool(c.passed),
                                Cell::Float(c.worst_margin),
                                Cell::Float(c.tolerance),
                                Cell::Int(c.cases as i64),
                                Cell::Text(c.detail.clone().unwrap_or_default()),
                            ]
                        })
                        .collect();
                    Table {
                        header: vec!["name", "passed", "worst_margin", "tolerance", "cases", "detail"],
                        rows,
                    }
                    .to_csv()?
                }
            };
            (body, !report.passed)
        }
        Command::Search => {
            let reports = cmd_search(cfg)?;
            for (i, r) in reports.iter().enumerate().filter(|(_, r)| r.violation) {
                let mut bytes =
                    serde_json::to_vec_pretty(&WitnessFile::from(r)).expect("plain witness");
                bytes.push(b'\n');
                witnesses.push((witness_path(cfg.output_path.as_deref(), i), bytes));
            }
            let failed = !witnesses.is_empty();
            let body = match cfg.format {
                Format::Csv => search_table(&reports).to_csv()?,
                Format::Json => {
                    let mut v = serde_json::to_vec_pretty(&reports).expect("plain reports");
                    v.push(b'\n');
                    v
                }
            };
            (body, failed)
        }
        Command::Report => {
            let path = cfg.witness_path.as_ref().expect("validated");
            let text = fs::read_to_string(path).map_err(|source| CliError::Input {
                path: path.clone(),
                source,
            })?;
            let witness: WitnessFile =
                serde_json::from_str(&text).map_err(|source| CliError::Json {
                    path: path.clone(),
                    source,
                })?;
            let report = cmd_report(&witness)?;
            let failed = report.violation;
            let body = match cfg.format {
                Format::Csv => search_table(std::slice::from_ref(&report)).to_csv()?,
                Format::Json => {
                    let mut v = serde_json::to_vec_pretty(&report).expect("plain report");
                    v.push(b'\n');
                    v
                }
            };
            (body, failed)
        }
    };
    Ok(Outcome {
        body,
        failed,
        witnesses,
    })
}

/// Runs a configuration on a worker pool of the configured size and writes
/// the output and any witness files.
pub fn execute(cfg: &RunConfig) -> Result<i32, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = cfg.workers {
        builder = builder.num_threads(w);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?;
    let outcome = pool.install(|| render(cfg))?;

    match &cfg.output_path {
        Some(path) => write_file(path, &outcome.body)?,
        None => std::io::stdout()
            .write_all(&outcome.body)
            .map_err(|source| CliError::Output {
                path: PathBuf::from("<stdout>"),
                source,
            })?,
    }
    for (path, bytes) in &outcome.witnesses {
        write_file(path, bytes)?;
        log::error!("conjecture violation witness written to {}", path.display());
    }
    Ok(outcome.exit_code())
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|source| CliError::Output {
        path: path.to_path_buf(),
        source,
    })
}
