//! Command-line front end.
//!
//! Three subcommands: `figure` regenerates figure data as CSV or JSON,
//! `verify` runs the margin checks and writes JSON reports, `compute`
//! prints the full record for one state. Exit codes are 0 on success,
//! 1 when an inequality is violated, 2 on usage or input errors and 3 on
//! I/O failures.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::error::Error;
use crate::states::{bell_state, densify, BellKind, DensityMatrix, StateFile};
use crate::verify::{
    evaluate_point, evaluate_state, margin_report_for_states, run_margin_check, sweep, sweep_theta,
    Check, MarginReport, SweepRecord,
};

pub const DEFAULT_SEED: u64 = 2019;
pub const DEFAULT_THETA_STEPS: usize = 61;
pub const DEFAULT_P_STEPS: usize = 41;
pub const DEFAULT_SAMPLES: usize = 10_000;

/// Significant digits in CSV output.
const CSV_DIGITS: usize = 12;
const NA: &str = "NA";

#[derive(Debug, Parser)]
#[command(name = "qcoherence", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Regenerate the data behind one of the four figures.
    Figure(FigureArgs),
    /// Check the complementarity inequalities on random or given states.
    Verify(VerifyArgs),
    /// Print every quantity for a single state.
    Compute(ComputeArgs),
}

#[derive(Debug, Args)]
pub struct FigureArgs {
    #[arg(long)]
    pub figure: u8,
    #[arg(long, default_value_t = DEFAULT_THETA_STEPS)]
    pub theta_steps: usize,
    #[arg(long, default_value_t = DEFAULT_P_STEPS)]
    pub p_steps: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    pub samples: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// `bell` or a JSON state file; replaces random sampling.
    #[arg(long)]
    pub state: Option<String>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["theta", "state"])))]
pub struct ComputeArgs {
    /// Resource angle in radians.
    #[arg(long, allow_negative_numbers = true)]
    pub theta: Option<f64>,
    /// `bell` or a JSON state file.
    #[arg(long)]
    pub state: Option<String>,
    /// Two-sided depolarizing strength.
    #[arg(long, default_value_t = 0.0)]
    pub p: f64,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Figure,
    Verify,
    Compute,
}

/// Where a single state comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    Theta(f64),
    Bell,
    File(PathBuf),
}

impl StateSpec {
    fn parse(raw: &str) -> Self {
        if raw.eq_ignore_ascii_case("bell") {
            StateSpec::Bell
        } else {
            StateSpec::File(PathBuf::from(raw))
        }
    }
}

/// Flattened, validated view of the command line.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub figure_id: Option<u8>,
    pub theta_steps: usize,
    pub p_steps: usize,
    pub samples: usize,
    pub seed: u64,
    pub format: Format,
    pub output_path: Option<PathBuf>,
    pub state: Option<StateSpec>,
    pub p: f64,
}

impl RunConfig {
    fn base(command: CommandKind) -> Self {
        Self {
            command,
            figure_id: None,
            theta_steps: DEFAULT_THETA_STEPS,
            p_steps: DEFAULT_P_STEPS,
            samples: DEFAULT_SAMPLES,
            seed: DEFAULT_SEED,
            format: Format::Json,
            output_path: None,
            state: None,
            p: 0.0,
        }
    }

    pub fn from_command(command: Command) -> Self {
        match command {
            Command::Figure(a) => Self {
                figure_id: Some(a.figure),
                theta_steps: a.theta_steps,
                p_steps: a.p_steps,
                format: a.format,
                output_path: a.output,
                ..Self::base(CommandKind::Figure)
            },
            Command::Verify(a) => Self {
                samples: a.samples,
                seed: a.seed,
                output_path: a.output,
                state: a.state.as_deref().map(StateSpec::parse),
                ..Self::base(CommandKind::Verify)
            },
            Command::Compute(a) => Self {
                state: match (a.theta, a.state.as_deref()) {
                    (Some(t), _) => Some(StateSpec::Theta(t)),
                    (None, Some(raw)) => Some(StateSpec::parse(raw)),
                    (None, None) => None,
                },
                p: a.p,
                output_path: a.output,
                ..Self::base(CommandKind::Compute)
            },
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let usage = |msg: String| Err(CliError::Usage(msg));
        match (self.command, self.figure_id) {
            (CommandKind::Figure, None) => return usage("--figure is required".into()),
            (CommandKind::Figure, Some(f)) if !(1..=4).contains(&f) => {
                return usage(format!("--figure must be 1-4, got {f}"))
            }
            (CommandKind::Verify | CommandKind::Compute, Some(_)) => {
                return usage("--figure only applies to the figure command".into())
            }
            _ => {}
        }
        if self.theta_steps < 2 || self.p_steps < 2 {
            return usage("grid steps must be at least 2".into());
        }
        if self.samples < 1 {
            return usage("--samples must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.p) {
            return usage(format!("--p must lie in [0, 1], got {}", self.p));
        }
        match &self.state {
            Some(StateSpec::Theta(t)) if !t.is_finite() => usage("--theta must be finite".into()),
            None if self.command == CommandKind::Compute => {
                usage("compute needs --theta or --state".into())
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(#[from] Error),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Input(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

/// Whether the run found an inequality violation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Clean,
    Violation,
}

/// Parses `args`, runs the command and maps the result to an exit code.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(&RunConfig::from_command(cli.command)) {
        Ok(Outcome::Clean) => ExitCode::SUCCESS,
        Ok(Outcome::Violation) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

pub fn execute(config: &RunConfig) -> Result<Outcome, CliError> {
    config.validate()?;
    let (text, outcome) = match config.command {
        CommandKind::Figure => (run_figure(config)?, Outcome::Clean),
        CommandKind::Verify => run_verify(config)?,
        CommandKind::Compute => (run_compute(config)?, Outcome::Clean),
    };
    emit(config, &text)?;
    Ok(outcome)
}

fn emit(config: &RunConfig, text: &str) -> Result<(), CliError> {
    match &config.output_path {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Io(format!("cannot write to stdout: {e}")))
        }
    }
}

fn load_state(spec: &StateSpec) -> Result<DensityMatrix, CliError> {
    match spec {
        StateSpec::Theta(t) => Ok(densify(&crate::states::resource_state(*t))),
        StateSpec::Bell => Ok(densify(&bell_state(BellKind::PhiPlus))),
        StateSpec::File(path) => {
            let raw = fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
            let file: StateFile = serde_json::from_str(&raw).map_err(|e| {
                CliError::Usage(format!("malformed state file {}: {e}", path.display()))
            })?;
            Ok(file.to_density()?)
        }
    }
}

// ---------------------------------------------------------------------------
// figure

/// Column names and rows (with `None` for not-applicable cells).
#[derive(Debug, Clone, PartialEq)]
pub struct FigureTable {
    pub columns: &'static [&'static str],
    pub rows: Vec<Vec<Option<f64>>>,
}

pub fn figure_table(
    figure: u8,
    theta_steps: usize,
    p_steps: usize,
) -> Result<FigureTable, CliError> {
    let records = match figure {
        1 | 3 => sweep(theta_steps, p_steps)?,
        2 | 4 => sweep_theta(theta_steps, 0.0)?,
        other => return Err(CliError::Usage(format!("no figure {other}"))),
    };
    let theta = |r: &SweepRecord| r.theta;
    let t1_sum = |r: &SweepRecord| Some(r.capacity + r.coherence_b);
    let t2_sum = |r: &SweepRecord| r.h_of_f.map(|h| h + r.coherence_a);
    // not-applicable rows blank out the whole teleportation side
    let gated = |r: &SweepRecord, x: f64| r.h_of_f.map(|_| x);
    let (columns, rows): (&'static [&'static str], Vec<Vec<Option<f64>>>) = match figure {
        1 => (
            &["theta", "p", "sum", "coherence_b", "capacity"],
            records
                .iter()
                .map(|r| {
                    vec![
                        theta(r),
                        Some(r.p),
                        t1_sum(r),
                        Some(r.coherence_b),
                        Some(r.capacity),
                    ]
                })
                .collect(),
        ),
        2 => (
            &["theta", "sum", "coherence_b", "capacity"],
            records
                .iter()
                .map(|r| vec![theta(r), t1_sum(r), Some(r.coherence_b), Some(r.capacity)])
                .collect(),
        ),
        3 => (
            &["theta", "p", "sum", "h_of_f", "coherence_a"],
            records
                .iter()
                .map(|r| {
                    vec![
                        theta(r),
                        Some(r.p),
                        t2_sum(r),
                        r.h_of_f,
                        gated(r, r.coherence_a),
                    ]
                })
                .collect(),
        ),
        _ => (
            &["theta", "sum", "h_of_f", "coherence_a"],
            records
                .iter()
                .map(|r| vec![theta(r), t2_sum(r), r.h_of_f, gated(r, r.coherence_a)])
                .collect(),
        ),
    };
    Ok(FigureTable { columns, rows })
}

fn run_figure(config: &RunConfig) -> Result<String, CliError> {
    let figure = config.figure_id.expect("validated");
    let table = figure_table(figure, config.theta_steps, config.p_steps)?;
    Ok(match config.format {
        Format::Csv => table_to_csv(&table),
        Format::Json => table_to_json(&table),
    })
}

pub fn table_to_csv(table: &FigureTable) -> String {
    let mut out = table.columns.join(",");
    out.push('\n');
    for row in &table.rows {
        let cells: Vec<String> = row
            .iter()
            .map(|c| c.map_or_else(|| NA.to_string(), |x| format_sig(x, CSV_DIGITS)))
            .collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn table_to_json(table: &FigureTable) -> String {
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|row| {
            let obj: Map<String, Value> = table
                .columns
                .iter()
                .zip(row)
                .map(|(name, cell)| (name.to_string(), cell.map_or(Value::Null, Value::from)))
                .collect();
            Value::Object(obj)
        })
        .collect();
    to_json_text(&Value::Array(rows))
}

fn to_json_text<T: serde::Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("plain data serializes");
    text.push('\n');
    text
}

/// `x` with `digits` significant digits in C's `%g` style: fixed notation
/// for decimal exponents in `[-4, digits)`, scientific otherwise, trailing
/// zeros removed.
pub fn format_sig(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    if x == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let mut s = trim_fraction(mantissa).to_string();
        let _ = write!(s, "e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs());
        s
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_fraction(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

// ---------------------------------------------------------------------------
// verify and compute

const ALL_CHECKS: [Check; 3] = [Check::Theorem1, Check::Theorem2, Check::EfCoherence];

/// Reports for every check, either on seeded random states or on one state.
pub fn verify_reports(config: &RunConfig) -> Result<Vec<MarginReport>, CliError> {
    match &config.state {
        None => ALL_CHECKS
            .iter()
            .map(|&c| run_margin_check(c, config.samples, config.seed).map_err(CliError::from))
            .collect(),
        Some(spec) => {
            let rho = load_state(spec)?;
            let two_qubit = rho.bipartite_dims().map_err(CliError::from)? == (2, 2);
            let checks: &[Check] = if two_qubit {
                &ALL_CHECKS
            } else {
                &ALL_CHECKS[..1]
            };
            let states = [rho];
            checks
                .iter()
                .map(|&c| margin_report_for_states(c, &states, config.seed).map_err(CliError::from))
                .collect()
        }
    }
}

fn run_verify(config: &RunConfig) -> Result<(String, Outcome), CliError> {
    let reports = verify_reports(config)?;
    let outcome = if reports.iter().any(|r| r.violations > 0) {
        Outcome::Violation
    } else {
        Outcome::Clean
    };
    let doc = json!({ "seed": config.seed, "reports": reports });
    Ok((to_json_text(&doc), outcome))
}

pub fn compute_record(config: &RunConfig) -> Result<SweepRecord, CliError> {
    match config.state.as_ref().expect("validated") {
        StateSpec::Theta(t) => Ok(evaluate_point(*t, config.p)?),
        spec => Ok(evaluate_state(&load_state(spec)?, config.p, None)?),
    }
}

fn run_compute(config: &RunConfig) -> Result<String, CliError> {
    Ok(to_json_text(&compute_record(config)?))
}
