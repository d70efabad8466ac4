//! Command-line front end.
//!
//! Exit codes: 0 on success, 2 for usage or input errors, 3 when the data
//! is degenerate for the requested test.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::classic_tests::runs_test;
use crate::detector::{run_detector, BinomialAlternative, DetectorConfig, MajorityTieBreak, PatternVerdict};
use crate::error::Error;
use crate::power::{compare_methods, estimate_power_with, write_csv, Execution, Method, PowerStudySpec, RejectionRule};
use crate::result::{Alternative, HypothesisResult, SignificanceLevel};
use crate::scale_tests::{rank, RankScheme};
use crate::sequence::BinarySequence;
use crate::trend_sim::{simulate_sequence, SeedSpec, TrendModel};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "gapdetect", version, about = "Detect non-random patterns in ordered binary sequences")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SeqFormat {
    Chars,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Ties {
    Vegelius,
    SiegelTukey,
}

impl From<Ties> for RankScheme {
    fn from(t: Ties) -> Self {
        match t {
            Ties::Vegelius => RankScheme::Vegelius,
            Ties::SiegelTukey => RankScheme::SiegelTukey,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BinomialAlt {
    Greater,
    TwoSided,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Side {
    TwoSided,
    Less,
    Greater,
}

impl From<Side> for Alternative {
    fn from(s: Side) -> Self {
        match s {
            Side::TwoSided => Alternative::TwoSided,
            Side::Less => Alternative::Less,
            Side::Greater => Alternative::Greater,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TieBreak {
    Ones,
    Zeros,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Rule {
    BinomialOrKendall,
    BinomialOnly,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the gap-based detector on a sequence file.
    Analyze {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long, value_enum, default_value = "vegelius")]
        ties: Ties,
        #[arg(long = "binomial-alt", value_enum, default_value = "greater")]
        binomial_alt: BinomialAlt,
        /// Majority symbol when ones and zeros are equally frequent.
        #[arg(long = "tie-break", value_enum, default_value = "ones")]
        tie_break: TieBreak,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Wald-Wolfowitz runs test on a sequence file.
    Runs {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "two-sided")]
        alternative: Side,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Simulate one sequence from the linear trend model.
    Simulate {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        b: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        c: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Trial index selecting the stream under the base seed.
        #[arg(long, default_value_t = 0)]
        trial: u64,
        #[arg(long, value_enum, default_value = "chars")]
        format: SeqFormat,
    },
    /// Monte Carlo power study; writes CSV.
    Power {
        #[arg(long = "n-grid", default_value = "20")]
        n_grid: String,
        #[arg(long = "b-grid", default_value = "0.01,0.02,0.03,0.04,0.05,0.06,0.07,0.08,0.09,0.1")]
        b_grid: String,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long, default_value_t = 0.5)]
        a: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        c: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "runs,proposed,proposed-vegelius")]
        methods: String,
        #[arg(long = "rejection-rule", value_enum, default_value = "binomial-or-kendall")]
        rejection_rule: Rule,
        #[arg(long = "runs-alternative", value_enum, default_value = "two-sided")]
        runs_alternative: Side,
        /// Worker threads; 1 runs serially, 0 uses every core.
        #[arg(long, default_value_t = 0)]
        threads: usize,
        /// CSV destination; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Show Siegel-Tukey or Vegelius ranks for a list of values.
    Ranks {
        #[arg(long, allow_hyphen_values = true)]
        values: String,
        #[arg(long, value_enum, default_value = "vegelius")]
        scheme: Ties,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Degenerate(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            Self::Usage(_) => EXIT_USAGE,
            Self::Degenerate(_) => EXIT_DEGENERATE,
        }
    }

    fn message(&self) -> &str {
        match self {
            Self::Usage(m) | Self::Degenerate(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::DegenerateSequence | Error::ConstantValues => Self::Degenerate(e.to_string()),
            _ => Self::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Usage(e.to_string())
    }
}

/// Parse error in a sequence file, with 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {column}: unexpected character {found:?} (expected '0', '1', ',' or whitespace)")]
pub struct SequenceParseError {
    pub line: usize,
    pub column: usize,
    pub found: char,
}

/// Parses `0`/`1` characters separated by optional whitespace or commas.
/// Lines whose first non-blank character is `#` are skipped.
pub fn parse_sequence_text(text: &str) -> Result<Vec<u8>, SequenceParseError> {
    let mut out = Vec::new();
    for (li, line) in text.lines().enumerate() {
        if line.trim_start().starts_with('#') {
            continue;
        }
        for (ci, ch) in line.chars().enumerate() {
            match ch {
                '0' => out.push(0),
                '1' => out.push(1),
                ',' => {}
                c if c.is_whitespace() => {}
                found => return Err(SequenceParseError { line: li + 1, column: ci + 1, found }),
            }
        }
    }
    Ok(out)
}

fn read_sequence(path: &Path) -> Result<BinarySequence, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let outcomes = parse_sequence_text(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    BinarySequence::new(outcomes).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn parse_list<T: std::str::FromStr>(what: &str, raw: &str) -> Result<Vec<T>, CliError> {
    if raw.trim().is_empty() {
        return Err(CliError::Usage(format!("{what} must not be empty")));
    }
    raw.split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("{what}: cannot parse {:?}", s.trim())))
        })
        .collect()
}

fn parse_method(s: &str) -> Result<Method, CliError> {
    match s.trim() {
        "runs" => Ok(Method::Runs),
        "proposed" => Ok(Method::Proposed),
        "proposed-vegelius" | "proposed_vegelius" => Ok(Method::ProposedVegelius),
        other => Err(CliError::Usage(format!("unknown method {other:?}"))),
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report types serialize")
}

pub fn format_runs_text(r: &HypothesisResult) -> String {
    let get = |k| r.detail_f64(k).unwrap_or(f64::NAN);
    format!(
        "statistic = {:.5}, runs = {}, n1 = {}, n2 = {}, n = {}, p-value = {:.4}",
        r.statistic,
        get("R"),
        get("n1"),
        get("n2"),
        get("n1") + get("n2"),
        r.p_value
    )
}

pub fn format_verdict_text(v: &PatternVerdict) -> String {
    if v.insufficient_data {
        return "insufficient data: fewer than two gaps between majority symbols\n".to_owned();
    }
    let mut s = String::new();
    if let Some(g) = &v.gap_series {
        s += &format!("majority symbol: {} (k = {})\n", g.majority, g.k);
        s += &format!("positions: {:?}\n", g.positions);
        s += &format!("gaps: {:?}\n", g.gaps);
        s += &format!("threshold alpha = {}, gaps at or below = {}\n", g.alpha, g.x);
    }
    for r in &v.stage_results {
        let method = serde_json::to_value(r.method).expect("serializable");
        s += &format!(
            "{}: statistic = {:.5}, p-value = {:.6}, alternative = {}{}\n",
            method.as_str().unwrap_or_default(),
            r.statistic,
            r.p_value,
            r.alternative,
            if r.degenerate { " (degenerate)" } else { "" }
        );
    }
    s += &format!("pattern detected: {}\ndirection: {}\n", v.pattern_detected, v.direction);
    s
}

/// Output of the `ranks` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RanksReport {
    pub scheme: RankScheme,
    pub values: Vec<f64>,
    pub pre_tie_ranks: Vec<usize>,
    pub ranks: Vec<f64>,
}

fn execute(command: Command, out: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Analyze { input, alpha, ties, binomial_alt, tie_break, format } => {
            let seq = read_sequence(&input)?;
            let config = DetectorConfig {
                alpha_level: SignificanceLevel::new(alpha)?,
                tie_scheme: ties.into(),
                binomial_alternative: match binomial_alt {
                    BinomialAlt::Greater => BinomialAlternative::Greater,
                    BinomialAlt::TwoSided => BinomialAlternative::TwoSided,
                },
                majority_tie_break: match tie_break {
                    TieBreak::Ones => MajorityTieBreak::PreferOnes,
                    TieBreak::Zeros => MajorityTieBreak::PreferZeros,
                },
            };
            let verdict = run_detector(&seq, &config)?;
            match format {
                Format::Json => writeln!(out, "{}", to_json(&verdict))?,
                Format::Text => write!(out, "{}", format_verdict_text(&verdict))?,
            }
        }
        Command::Runs { input, alternative, format } => {
            let seq = read_sequence(&input)?;
            let result = runs_test(&seq, alternative.into())
                .map_err(|e| CliError::Degenerate(format!("{e}: both symbols must occur, with at least two of the majority")))?;
            match format {
                Format::Json => writeln!(out, "{}", to_json(&result))?,
                Format::Text => writeln!(out, "{}", format_runs_text(&result))?,
            }
        }
        Command::Simulate { n, a, b, c, seed, trial, format } => {
            let model = TrendModel::new(a, b, c, n)?;
            let seq = simulate_sequence(&model, SeedSpec::new(seed, trial));
            match format {
                SeqFormat::Chars => writeln!(out, "{seq}")?,
                SeqFormat::Csv => {
                    let cells: Vec<String> = seq.outcomes().iter().map(u8::to_string).collect();
                    writeln!(out, "{}", cells.join(","))?
                }
            }
        }
        Command::Power {
            n_grid,
            b_grid,
            trials,
            alpha,
            a,
            c,
            seed,
            methods,
            rejection_rule,
            runs_alternative,
            threads,
            out: path,
        } => {
            let spec = PowerStudySpec {
                n_values: parse_list("--n-grid", &n_grid)?,
                b_values: parse_list("--b-grid", &b_grid)?,
                a,
                c,
                trials,
                alpha_level: SignificanceLevel::new(alpha)?,
                base_seed: seed,
                methods: parse_list::<String>("--methods", &methods)?
                    .iter()
                    .map(|m| parse_method(m))
                    .collect::<Result<_, _>>()?,
                rejection_rule: match rejection_rule {
                    Rule::BinomialOrKendall => RejectionRule::BinomialOrKendall,
                    Rule::BinomialOnly => RejectionRule::BinomialOnly,
                },
                runs_alternative: runs_alternative.into(),
            };
            let curves = run_power(&spec, threads)?;
            match path {
                Some(path) => {
                    let file = std::fs::File::create(&path)
                        .map_err(|e| CliError::Usage(format!("cannot create {}: {e}", path.display())))?;
                    let mut w = std::io::BufWriter::new(file);
                    write_csv(&curves, &mut w)?;
                    w.flush()?;
                    write!(out, "{}", compare_methods(&curves)?)?;
                }
                None => write_csv(&curves, &mut *out)?,
            }
        }
        Command::Ranks { values, scheme, format } => {
            let values: Vec<f64> = parse_list("--values", &values)?;
            let assignment = rank(&values, scheme.into())?;
            let report = RanksReport {
                scheme: assignment.scheme,
                values: assignment.values,
                pre_tie_ranks: assignment.pre_tie_ranks,
                ranks: assignment.ranks,
            };
            match format {
                Format::Json => writeln!(out, "{}", to_json(&report))?,
                Format::Text => {
                    writeln!(out, "{:>10} {:>12} {:>12}", "value", "pre-tie rank", "rank")?;
                    for i in 0..report.values.len() {
                        writeln!(out, "{:>10} {:>12} {:>12.4}", report.values[i], report.pre_tie_ranks[i], report.ranks[i])?;
                    }
                }
            }
        }
    }
    Ok(())
}

fn run_power(spec: &PowerStudySpec, threads: usize) -> Result<Vec<crate::power::PowerCurve>, CliError> {
    if threads == 1 {
        return Ok(estimate_power_with(spec, Execution::Serial)?);
    }
    #[cfg(feature = "parallel")]
    {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| CliError::Usage(format!("cannot start thread pool: {e}")))?;
        Ok(pool.install(|| estimate_power_with(spec, Execution::Parallel))?)
    }
    #[cfg(not(feature = "parallel"))]
    Ok(estimate_power_with(spec, Execution::Serial)?)
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message());
            e.code()
        }
    }
}
