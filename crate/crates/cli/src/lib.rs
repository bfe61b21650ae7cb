//! The `bohr` command line: radius solving, verification over random slices,
//! witness searches, parameter sweeps and counterexample reproduction.
//!
//! Every command produces a table that is written as CSV or as a JSON report.
//! Exit codes: 0 when everything checked passed, 1 when a check failed or no
//! witness was found, 2 for usage, configuration and domain errors.

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use bohr_core::{
    closed_form_radius, eval_functional_with_phases, extremal_slice, find_witness_with,
    random_equimodular_slice, reproduce_counterexample, solve_radius, verify_theorem_with_phases,
    BohrError, CounterexampleId, FunctionalSpec, RadiusEquation, WitnessSearch,
    DEFAULT_LAMBDA_LEVELS, DEFAULT_SOLVER_TOL,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Slack on `value_upper ≤ 1` when deciding `bound_ok`.
const BOUND_TOLERANCE: f64 = 1e-10;
const MIN_TRUNCATION: usize = 8;

#[derive(Debug, Parser)]
#[command(
    name = "bohr",
    version,
    about = "Bohr-type inequalities for polydisc-valued maps"
)]
#[command(args_override_self = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Print the sharp radius of a functional.
    Radius,
    /// Check the inequality on random equimodular slices at or below the radius.
    Verify,
    /// Search the extremal family for a value above 1 beyond the radius.
    Witness,
    /// Evaluate a functional over a grid of radii on one slice.
    Sweep,
    /// Evaluate a functional on a pair with unequal initial moduli.
    Counterexample,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Radius => "radius",
            Command::Verify => "verify",
            Command::Witness => "witness",
            Command::Sweep => "sweep",
            Command::Counterexample => "counterexample",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Theorem {
    #[value(name = "improved_squared")]
    ImprovedSquared,
    #[value(name = "refined_p")]
    RefinedP,
    #[value(name = "composed_k")]
    ComposedK,
    #[value(name = "classical")]
    Classical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

/// Options shared by every command. All of them may also come from `--config`.
#[derive(Debug, Clone, Args, Serialize)]
pub struct Options {
    /// Which functional to use.
    #[arg(long, global = true, value_enum, default_value = "improved_squared")]
    pub theorem: Theorem,
    /// Exponent of the refined functional (1 or 2).
    #[arg(long, global = true, default_value_t = 1)]
    pub p: u8,
    /// Order of the Schwarz map in the composed functional.
    #[arg(long, global = true, default_value_t = 1)]
    pub k: u32,
    /// Radii, comma separated.
    #[arg(long, global = true)]
    pub r: Option<String>,
    #[arg(long, global = true)]
    pub r_min: Option<f64>,
    #[arg(long, global = true)]
    pub r_max: Option<f64>,
    #[arg(long, global = true, default_value_t = 11)]
    pub r_steps: usize,
    /// Parameter of the extremal Möbius family (sweep).
    #[arg(long, global = true)]
    pub lambda: Option<f64>,
    /// Number of random slices (verify).
    #[arg(long, global = true, default_value_t = 100)]
    pub seeds: u64,
    /// Seed of a single random slice (sweep).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Number of components of the slice; random slices default to 1 + seed % 3.
    #[arg(long, global = true)]
    pub components: Option<usize>,
    /// Initial moduli of the counterexample pair.
    #[arg(long, global = true)]
    pub a1: Option<f64>,
    #[arg(long, global = true)]
    pub a2: Option<f64>,
    /// Truncation order of every series.
    #[arg(long, global = true, default_value_t = 64)]
    pub truncation: usize,
    /// Number of phases sampled on each circle.
    #[arg(long, global = true, default_value_t = 64)]
    pub phases: usize,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// File of `key = value` lines providing defaults for the options above.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

/// A failure that maps to an exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(io::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => f.write_str(msg),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<BohrError> for CliError {
    fn from(e: BohrError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.into())
    }
}

fn usage<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Usage(msg.into()))
}

/// One table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    fn to_csv(&self) -> String {
        match self {
            Cell::Num(x) => format_number(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Num(x) => format_number(*x)
                .parse::<f64>()
                .ok()
                .and_then(serde_json::Number::from_f64)
                .map_or(Value::Null, Value::Number),
            Cell::Int(i) => json!(i),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
            Cell::Empty => Value::Null,
        }
    }
}

/// Formats to 12 significant digits with trailing zeros removed.
pub fn format_number(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let exponent = x.abs().log10().floor() as i32;
    if (-5..12).contains(&exponent) {
        let decimals = (11 - exponent).max(0) as usize;
        let s = format!("{x:.decimals$}");
        let s = if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        };
        if s == "-0" {
            "0".into()
        } else {
            s
        }
    } else {
        let s = format!("{x:.11e}");
        let (mantissa, exp) = s.split_once('e').expect("scientific format");
        let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
        format!("{mantissa}e{exp}")
    }
}

/// The output of one command: a table plus an overall verdict.
#[derive(Debug, Clone)]
pub struct Report {
    pub command: Command,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub all_pass: bool,
    /// One-line human summary for standard error.
    pub summary: String,
}

impl Report {
    fn new(command: Command, header: &[&'static str]) -> Self {
        Self {
            command,
            header: header.to_vec(),
            rows: Vec::new(),
            all_pass: true,
            summary: String::new(),
        }
    }

    pub fn write_csv(&self, out: impl Write) -> Result<(), CliError> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::to_csv))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self, options: &Options) -> Value {
        let results: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .header
                    .iter()
                    .zip(row)
                    .map(|(k, v)| (k.to_string(), v.to_json()))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        json!({
            "command": self.command.name(),
            "config": options,
            "results": results,
            "all_pass": self.all_pass,
        })
    }
}

impl Options {
    pub fn spec(&self) -> FunctionalSpec {
        match self.theorem {
            Theorem::ImprovedSquared => FunctionalSpec::ImprovedSquared,
            Theorem::RefinedP => FunctionalSpec::Refined { p: self.p },
            Theorem::ComposedK => FunctionalSpec::Composed { k: self.k },
            Theorem::Classical => FunctionalSpec::Classical,
        }
    }

    fn validate(&self) -> Result<FunctionalSpec, CliError> {
        let spec = self.spec();
        spec.validate()?;
        if self.truncation < MIN_TRUNCATION {
            return usage(format!("--truncation must be at least {MIN_TRUNCATION}"));
        }
        if self.phases == 0 {
            return usage("--phases must be at least 1");
        }
        if self.seeds == 0 {
            return usage("--seeds must be at least 1");
        }
        if self.components == Some(0) {
            return usage("--components must be at least 1");
        }
        Ok(spec)
    }

    /// Explicit `--r` values, or the `--r-min/--r-max/--r-steps` grid, if any.
    pub fn radii(&self) -> Result<Option<Vec<f64>>, CliError> {
        let values = match (&self.r, self.r_min, self.r_max) {
            (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
                return usage("give either --r or --r-min/--r-max, not both")
            }
            (Some(list), None, None) => list
                .split(',')
                .map(|v| {
                    v.trim()
                        .parse::<f64>()
                        .map_err(|_| CliError::Usage(format!("invalid --r value '{v}'")))
                })
                .collect::<Result<Vec<_>, _>>()?,
            (None, Some(lo), Some(hi)) => {
                if self.r_steps < 2 {
                    return usage("--r-steps must be at least 2");
                }
                if lo > hi {
                    return usage("--r-min must not exceed --r-max");
                }
                let last = (self.r_steps - 1) as f64;
                (0..self.r_steps)
                    .map(|i| lo + (hi - lo) * i as f64 / last)
                    .collect()
            }
            (None, None, None) => return Ok(None),
            _ => return usage("--r-min and --r-max must be given together"),
        };
        if let Some(bad) = values.iter().find(|r| !(0.0..1.0).contains(*r)) {
            return usage(format!("r = {bad} must lie in [0, 1)"));
        }
        Ok(Some(values))
    }

    fn single_r(&self, name: &str) -> Result<f64, CliError> {
        match self.radii()?.as_deref() {
            Some([r]) => Ok(*r),
            _ => usage(format!("{name} needs exactly one --r value")),
        }
    }

    fn m_for_seed(&self, seed: u64) -> usize {
        self.components.unwrap_or(1 + (seed % 3) as usize)
    }
}

/// Reads `key = value` lines into `--key value` arguments.
pub fn config_args(text: &str) -> Result<Vec<OsString>, CliError> {
    let mut args = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return usage(format!("config line {}: expected `key = value`", i + 1));
        };
        let key = key.trim();
        if key.is_empty() || key == "config" || key.starts_with('-') {
            return usage(format!("config line {}: invalid key '{key}'", i + 1));
        }
        args.push(format!("--{key}").into());
        args.push(value.trim().into());
    }
    Ok(args)
}

/// Parses arguments, merging a config file underneath the command-line flags.
pub fn parse_args(args: Vec<OsString>) -> Result<Cli, clap::Error> {
    let cli = Cli::try_parse_from(&args)?;
    let Some(path) = cli.options.config.clone() else {
        return Ok(cli);
    };
    let text = fs::read_to_string(&path)
        .map_err(|e| Cli::command_error(format!("cannot read config {}: {e}", path.display())))?;
    let file_args = config_args(&text).map_err(|e| Cli::command_error(e.to_string()))?;
    // File values come first so that later command-line flags override them.
    let mut merged = Vec::with_capacity(args.len() + file_args.len());
    merged.extend(args.first().cloned());
    merged.extend(file_args);
    merged.extend(args.into_iter().skip(1));
    Cli::try_parse_from(merged)
}

impl Cli {
    fn command_error(msg: String) -> clap::Error {
        use clap::CommandFactory;
        Cli::command().error(clap::error::ErrorKind::InvalidValue, msg)
    }
}

/// Executes a parsed command and builds its report.
pub fn execute(command: Command, options: &Options) -> Result<Report, CliError> {
    let spec = options.validate()?;
    match command {
        Command::Radius => radius(&spec),
        Command::Verify => verify(&spec, options),
        Command::Witness => witness(&spec, options),
        Command::Sweep => sweep(&spec, options),
        Command::Counterexample => counterexample(&spec, options),
    }
}

fn spec_cells(spec: &FunctionalSpec) -> [Cell; 3] {
    [
        Cell::Text(spec.kind_name().into()),
        spec.p().map_or(Cell::Empty, |p| Cell::Int(p.into())),
        spec.k().map_or(Cell::Empty, |k| Cell::Int(k.into())),
    ]
}

const SWEEP_HEADER: [&str; 9] = [
    "theorem",
    "p",
    "k",
    "lambda_or_seed",
    "r",
    "value_lower",
    "value_upper",
    "tail",
    "bound_ok",
];

fn radius(spec: &FunctionalSpec) -> Result<Report, CliError> {
    let mut report = Report::new(
        Command::Radius,
        &[
            "theorem",
            "p",
            "k",
            "radius",
            "bracket_lo",
            "bracket_hi",
            "residual",
            "iterations",
        ],
    );
    let mut row = spec_cells(spec).to_vec();
    match spec {
        FunctionalSpec::Composed { k } => {
            let res = solve_radius(&RadiusEquation::Theorem3 { k: *k }, DEFAULT_SOLVER_TOL)?;
            row.extend([
                Cell::Num(res.radius),
                Cell::Num(res.bracket_lo),
                Cell::Num(res.bracket_hi),
                Cell::Num(res.residual),
                Cell::Int(res.iterations as u64),
            ]);
            report.summary = format!("{spec}: radius {}", format_number(res.radius));
        }
        _ => {
            let r = closed_form_radius(spec)?;
            row.push(Cell::Num(r));
            row.extend(std::iter::repeat_n(Cell::Empty, 4));
            report.summary = format!("{spec}: radius {}", format_number(r));
        }
    }
    report.rows.push(row);
    Ok(report)
}

fn verify(spec: &FunctionalSpec, options: &Options) -> Result<Report, CliError> {
    let radius = closed_form_radius(spec)?;
    let radii = options.radii()?.unwrap_or_else(|| vec![radius]);
    let mut report = Report::new(Command::Verify, &SWEEP_HEADER);
    let (mut passed, mut total, mut max_upper) = (0u64, 0u64, f64::NEG_INFINITY);
    for &r in &radii {
        for seed in 0..options.seeds {
            let slice =
                random_equimodular_slice(seed, options.m_for_seed(seed), options.truncation)?;
            let out = verify_theorem_with_phases(&slice, spec, r, options.phases)?;
            total += 1;
            passed += u64::from(out.holds);
            max_upper = max_upper.max(out.value.upper);
            let mut row = spec_cells(spec).to_vec();
            row.extend([
                Cell::Int(seed),
                Cell::Num(r),
                Cell::Num(out.value.lower),
                Cell::Num(out.value.upper),
                Cell::Num(out.value.tail),
                Cell::Bool(out.holds),
            ]);
            report.rows.push(row);
        }
    }
    report.all_pass = passed == total;
    report.summary = format!(
        "{spec}: {passed}/{total} pass, max upper {}",
        format_number(max_upper)
    );
    Ok(report)
}

fn witness(spec: &FunctionalSpec, options: &Options) -> Result<Report, CliError> {
    let Some(radii) = options.radii()? else {
        return usage("witness needs --r (or --r-min/--r-max)");
    };
    let search = WitnessSearch {
        lambda_levels: DEFAULT_LAMBDA_LEVELS,
        truncation: options.truncation,
        phases: options.phases,
    };
    let mut report = Report::new(
        Command::Witness,
        &[
            "theorem",
            "p",
            "k",
            "lambda",
            "r",
            "value_lower",
            "margin",
            "found",
        ],
    );
    let mut found = 0;
    for &r in &radii {
        let mut row = spec_cells(spec).to_vec();
        match find_witness_with(spec, r, &search) {
            Ok(w) => {
                found += 1;
                row.extend([
                    Cell::Num(w.lambda),
                    Cell::Num(r),
                    Cell::Num(w.value_lower),
                    Cell::Num(w.margin),
                    Cell::Bool(true),
                ]);
            }
            Err(BohrError::Search(_)) => {
                report.all_pass = false;
                row.extend([
                    Cell::Empty,
                    Cell::Num(r),
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Bool(false),
                ]);
            }
            Err(e) => return Err(e.into()),
        }
        report.rows.push(row);
    }
    report.summary = format!("{spec}: witnesses found at {found}/{} radii", radii.len());
    Ok(report)
}

fn sweep(spec: &FunctionalSpec, options: &Options) -> Result<Report, CliError> {
    let Some(radii) = options.radii()? else {
        return usage("sweep needs --r or --r-min/--r-max/--r-steps");
    };
    let (slice, label) = match (options.lambda, options.seed) {
        (Some(lambda), None) => (
            extremal_slice(
                spec,
                lambda,
                options.components.unwrap_or(1),
                options.truncation,
            )?,
            Cell::Num(lambda),
        ),
        (None, Some(seed)) => (
            random_equimodular_slice(seed, options.m_for_seed(seed), options.truncation)?,
            Cell::Int(seed),
        ),
        _ => return usage("sweep needs exactly one of --lambda or --seed"),
    };
    let mut report = Report::new(Command::Sweep, &SWEEP_HEADER);
    for &r in &radii {
        let v = eval_functional_with_phases(&slice, spec, r, options.phases)?;
        let ok = v.upper <= 1.0 + BOUND_TOLERANCE;
        report.all_pass &= ok;
        let mut row = spec_cells(spec).to_vec();
        row.extend([
            label.clone(),
            Cell::Num(r),
            Cell::Num(v.lower),
            Cell::Num(v.upper),
            Cell::Num(v.tail),
            Cell::Bool(ok),
        ]);
        report.rows.push(row);
    }
    let within = report
        .rows
        .iter()
        .filter(|row| row[8] == Cell::Bool(true))
        .count();
    report.summary = format!("{spec}: bound holds at {within}/{} radii", radii.len());
    Ok(report)
}

fn counterexample(spec: &FunctionalSpec, options: &Options) -> Result<Report, CliError> {
    let Some(id) = CounterexampleId::for_spec(spec) else {
        return usage(format!("no counterexample is defined for {spec}"));
    };
    let (Some(a1), Some(a2)) = (options.a1, options.a2) else {
        return usage("counterexample needs --a1 and --a2");
    };
    let r = options.single_r("counterexample")?;
    let rep = reproduce_counterexample(id, a1, a2, r, options.truncation)?;
    let mut report = Report::new(
        Command::Counterexample,
        &[
            "theorem",
            "p",
            "k",
            "a1",
            "a2",
            "r",
            "value_lower",
            "chain_bound",
            "limit_bound",
            "success",
        ],
    );
    let mut row = spec_cells(spec).to_vec();
    row.extend([
        Cell::Num(a1),
        Cell::Num(a2),
        Cell::Num(r),
        Cell::Num(rep.value_lower),
        Cell::Num(rep.chain_bound),
        Cell::Num(rep.limit_bound),
        Cell::Bool(rep.success),
    ]);
    report.rows.push(row);
    report.all_pass = rep.success;
    report.summary = format!(
        "{spec}: value {} ({})",
        format_number(rep.value_lower),
        if rep.success {
            "exceeds 1"
        } else {
            "does not exceed 1"
        }
    );
    Ok(report)
}

fn emit(report: &Report, options: &Options, stdout: &mut dyn Write) -> Result<(), CliError> {
    let mut buf = Vec::new();
    match options.format {
        Format::Csv => report.write_csv(&mut buf)?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut buf, &report.to_json(options))
                .map_err(io::Error::from)?;
            buf.push(b'\n');
        }
    }
    match &options.out {
        Some(path) => fs::write(path, buf)?,
        None => stdout.write_all(&buf)?,
    }
    Ok(())
}

/// Runs the command line and returns the process exit code.
pub fn run(args: Vec<OsString>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let cli = match parse_args(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_PASS
            };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(rendered.as_bytes())
            } else {
                stdout.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    let result = execute(cli.command, &cli.options)
        .and_then(|report| emit(&report, &cli.options, stdout).map(|()| report));
    match result {
        Ok(report) => {
            let _ = writeln!(stderr, "{}", report.summary);
            if report.all_pass {
                EXIT_PASS
            } else {
                EXIT_FAIL
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_USAGE
        }
    }
}
