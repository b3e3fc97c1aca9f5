//! Command-line front end.
//!
//! Exit codes: 0 success, 1 I/O or internal error, 2 bad arguments or
//! mismatched dimensions, 3 encoder failure after all retries, 4 failed
//! self-check.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bits::BitSequence;
use crate::codec::{
    decode, encode, EncodeFailure, EncodeOptions, FrozenRule, DEFAULT_MAX_ATTEMPTS,
};
use crate::construct::{
    construct, CacheConfig, ConstructionCache, HighEntropySet, Method, SelectionMode,
    DEFAULT_SAMPLES, DEFAULT_THRESHOLD, MAX_EXACT_LEN,
};
use crate::error::WomError;
use crate::model::{model_stats, SourceModel};
use crate::polar::TransformSize;
use crate::seed::DEFAULT_SEED;
use crate::sim::{reports_to_csv, reports_to_json, run_multiwrite, run_write_experiment};
use crate::validate::run_checks;

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_ENCODE_FAILED: i32 = 3;
pub const EXIT_CHECK_FAILED: i32 = 4;

/// Largest log block length accepted on the command line.
pub const MAX_LOG: u32 = 24;

#[derive(Debug, Parser)]
#[command(
    name = "wompolar",
    version,
    about = "Write-once-memory rewriting with polar source codes"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a high-entropy set and write it as JSON.
    Construct(ConstructArgs),
    /// Write a message over a memory state.
    Encode(EncodeArgs),
    /// Read a message back from a codeword.
    Decode(DecodeArgs),
    /// Run write experiments for several block lengths.
    Bench(BenchArgs),
    /// Chain several writes on the same pages.
    Multiwrite(MultiwriteArgs),
    /// Run the exact-oracle self-checks.
    Validate(ValidateArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Exact,
    #[value(alias = "monte_carlo", alias = "mc")]
    MonteCarlo,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Exact => Method::Exact,
            MethodArg::MonteCarlo => Method::MonteCarlo,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Threshold,
    #[value(alias = "target-rate", alias = "target_rate")]
    Rate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct SelectionArgs {
    /// Statistic source; `exact` needs N <= 8.
    #[arg(long, value_enum, default_value = "monte-carlo")]
    method: MethodArg,
    /// Monte Carlo draws.
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: u64,
    #[arg(long, value_enum, default_value = "threshold")]
    mode: ModeArg,
    /// Largest admitted deviation from uniform in threshold mode.
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    threshold: f64,
    /// Fraction of capacity to target in rate mode.
    #[arg(long)]
    target: Option<f64>,
}

impl SelectionArgs {
    fn mode(&self) -> Result<SelectionMode, CliError> {
        let mode = match self.mode {
            ModeArg::Threshold => SelectionMode::Threshold(self.threshold),
            ModeArg::Rate => SelectionMode::TargetRate(
                self.target
                    .ok_or_else(|| CliError::Usage("--mode rate needs --target".into()))?,
            ),
        };
        if !mode.value().is_finite() || mode.value() < 0.0 {
            return Err(CliError::Usage(format!(
                "{} must be a non-negative number",
                mode.name()
            )));
        }
        Ok(mode)
    }

    fn check(&self, len: usize) -> Result<(), CliError> {
        if self.method == MethodArg::Exact && len > MAX_EXACT_LEN {
            return Err(CliError::Usage(format!(
                "--method exact supports N <= {MAX_EXACT_LEN}, got {len}"
            )));
        }
        if self.method == MethodArg::MonteCarlo && self.samples == 0 {
            return Err(CliError::Usage("--samples must be at least 1".into()));
        }
        self.mode().map(|_| ())
    }
}

#[derive(Debug, Args)]
struct ConstructArgs {
    /// Log2 of the block length.
    #[arg(long)]
    n: u32,
    /// Fraction of programmed cells.
    #[arg(long)]
    s: f64,
    /// Probability that an erased cell is programmed by the write.
    #[arg(long)]
    t: f64,
    #[command(flatten)]
    selection: SelectionArgs,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Set file to write; JSON goes to stdout and the summary to stderr when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EncodeArgs {
    #[arg(long)]
    set: PathBuf,
    /// Current memory state, one line of 0/1.
    #[arg(long)]
    state: PathBuf,
    #[arg(long)]
    message: PathBuf,
    /// Codeword file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_ATTEMPTS)]
    max_attempts: u32,
    /// Fill non-message indices with the more likely bit instead of sampling.
    #[arg(long)]
    greedy: bool,
}

#[derive(Debug, Args)]
struct DecodeArgs {
    #[arg(long)]
    set: PathBuf,
    #[arg(long)]
    codeword: PathBuf,
    /// Message file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Comma-separated log2 block lengths.
    #[arg(long, value_delimiter = ',', required = true)]
    n_list: Vec<u32>,
    #[arg(long, default_value_t = 0.5)]
    s: f64,
    #[arg(long, default_value_t = 0.5)]
    t: f64,
    /// Fraction of capacity to target.
    #[arg(long, default_value_t = 0.8)]
    target: f64,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Monte Carlo draws for construction; N <= 8 uses exact statistics.
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_ATTEMPTS)]
    max_attempts: u32,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    /// Fill the seconds column (makes output run-dependent).
    #[arg(long)]
    timing: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct MultiwriteArgs {
    /// Comma-separated flip probabilities, one per write.
    #[arg(long, value_delimiter = ',', required = true)]
    schedule: Vec<f64>,
    #[arg(long)]
    n: u32,
    #[arg(long, default_value_t = 0.8)]
    target: f64,
    #[arg(long, default_value_t = 200)]
    trials: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = 10_000)]
    samples: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_ATTEMPTS)]
    max_attempts: u32,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    #[arg(long)]
    timing: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    /// Checks run for N = 2^0 .. 2^max_n (at most 3).
    #[arg(long, default_value_t = 3)]
    max_n: u32,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Runtime(WomError),
    EncodeFailed(EncodeFailure, u32),
    CheckFailed(usize),
}

impl From<WomError> for CliError {
    fn from(e: WomError) -> Self {
        match e {
            WomError::Domain { .. }
            | WomError::LengthMismatch { .. }
            | WomError::NotPowerOfTwo(_)
            | WomError::TooLarge { .. }
            | WomError::RateUnachievable { .. } => CliError::Usage(e.to_string()),
            other => CliError::Runtime(other),
        }
    }
}

fn block_len(log: u32) -> Result<usize, CliError> {
    if log > MAX_LOG {
        return Err(CliError::Usage(format!(
            "--n must be at most {MAX_LOG}, got {log}"
        )));
    }
    Ok(TransformSize::from_log(log)?.len())
}

fn emit(out: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Runtime(WomError::io(path, e))),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Runtime(WomError::io("<stdout>", e))),
    }
}

fn construct_cmd(
    args: &ConstructArgs,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    let len = block_len(args.n)?;
    let model = SourceModel::new(args.s, args.t)?;
    args.selection.check(len)?;
    let set = construct(
        &model,
        len,
        args.selection.method.into(),
        args.selection.samples,
        args.seed,
        args.selection.mode()?,
    )?;
    let cap = model_stats(&model).capacity;
    let summary = format!(
        "N={} M={} rate={} capacity={} rate/capacity={}\n",
        len,
        set.message_len(),
        set.rate(),
        cap,
        set.rate() / cap
    );
    let json = set.to_json()?;
    match &args.out {
        Some(path) => {
            emit(Some(path), &json, stdout)?;
            let _ = stdout.write_all(summary.as_bytes());
        }
        None => {
            emit(None, &json, stdout)?;
            let _ = stderr.write_all(summary.as_bytes());
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct FailureReport<'a> {
    #[serde(flatten)]
    failure: &'a EncodeFailure,
    attempts: u32,
}

fn encode_cmd(args: &EncodeArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let set = HighEntropySet::load(&args.set)?;
    let y = BitSequence::read_file(&args.state)?;
    let v = BitSequence::read_file(&args.message)?;
    if args.max_attempts == 0 {
        return Err(CliError::Usage("--max-attempts must be at least 1".into()));
    }
    let model = SourceModel::new(set.s, set.t)?;
    let options = EncodeOptions {
        max_attempts: args.max_attempts,
        rule: if args.greedy {
            FrozenRule::Greedy
        } else {
            FrozenRule::Sample
        },
    };
    let outcome = encode(&model, &set, &y, &v, args.seed, options)?;
    match outcome.result {
        Ok(x) => emit(args.out.as_deref(), &x.to_line(), stdout),
        Err(f) => Err(CliError::EncodeFailed(f, outcome.attempts)),
    }
}

fn decode_cmd(args: &DecodeArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let set = HighEntropySet::load(&args.set)?;
    let x = BitSequence::read_file(&args.codeword)?;
    let v = decode(&x, &set)?;
    emit(args.out.as_deref(), &v.to_line(), stdout)
}

fn bench_cmd(args: &BenchArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let model = SourceModel::new(args.s, args.t)?;
    if !(args.target.is_finite() && args.target >= 0.0) {
        return Err(CliError::Usage(
            "--target must be a non-negative number".into(),
        ));
    }
    if args.samples == 0 || args.max_attempts == 0 {
        return Err(CliError::Usage(
            "--samples and --max-attempts must be at least 1".into(),
        ));
    }
    let lens = args
        .n_list
        .iter()
        .map(|&n| block_len(n))
        .collect::<Result<Vec<_>, _>>()?;
    let options = EncodeOptions {
        max_attempts: args.max_attempts,
        rule: FrozenRule::Sample,
    };
    let mut reports = Vec::with_capacity(lens.len());
    for len in lens {
        let method = if len <= MAX_EXACT_LEN {
            Method::Exact
        } else {
            Method::MonteCarlo
        };
        let set = construct(
            &model,
            len,
            method,
            args.samples,
            args.seed,
            SelectionMode::TargetRate(args.target),
        )?;
        reports.push(run_write_experiment(
            &model,
            &set,
            args.trials,
            args.seed,
            options,
        )?);
    }
    let text = match args.format {
        FormatArg::Csv => reports_to_csv(&reports, args.timing),
        FormatArg::Json => reports_to_json(&reports, args.timing)?,
    };
    emit(args.out.as_deref(), &text, stdout)
}

fn multiwrite_cmd(args: &MultiwriteArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let len = block_len(args.n)?;
    for &t in &args.schedule {
        SourceModel::new(0.5, t)?;
    }
    if !(args.target.is_finite() && args.target >= 0.0) {
        return Err(CliError::Usage(
            "--target must be a non-negative number".into(),
        ));
    }
    if args.samples == 0 || args.max_attempts == 0 {
        return Err(CliError::Usage(
            "--samples and --max-attempts must be at least 1".into(),
        ));
    }
    let mut cache = ConstructionCache::new(CacheConfig {
        method: if len <= MAX_EXACT_LEN {
            Method::Exact
        } else {
            Method::MonteCarlo
        },
        samples: args.samples,
        seed: args.seed,
        mode: SelectionMode::TargetRate(args.target),
    });
    let options = EncodeOptions {
        max_attempts: args.max_attempts,
        rule: FrozenRule::Sample,
    };
    let reports = run_multiwrite(
        &args.schedule,
        len,
        args.trials,
        args.seed,
        options,
        &mut cache,
    )?;
    let text = match args.format {
        FormatArg::Csv => reports_to_csv(&reports, args.timing),
        FormatArg::Json => reports_to_json(&reports, args.timing)?,
    };
    emit(args.out.as_deref(), &text, stdout)
}

fn validate_cmd(args: &ValidateArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let checks = run_checks(args.max_n)?;
    let mut failed = 0;
    for c in &checks {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        failed += usize::from(!c.passed);
        let _ = writeln!(stdout, "{tag} {}: {}", c.name, c.detail);
    }
    if failed > 0 {
        return Err(CliError::CheckFailed(failed));
    }
    Ok(())
}

/// Parses `args` (including the program name) and runs the subcommand.
/// Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    let result = match &cli.command {
        Command::Construct(a) => construct_cmd(a, stdout, stderr),
        Command::Encode(a) => encode_cmd(a, stdout),
        Command::Decode(a) => decode_cmd(a, stdout),
        Command::Bench(a) => bench_cmd(a, stdout),
        Command::Multiwrite(a) => multiwrite_cmd(a, stdout),
        Command::Validate(a) => validate_cmd(a, stdout),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
        Err(CliError::Runtime(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_RUNTIME
        }
        Err(CliError::EncodeFailed(failure, attempts)) => {
            let report = FailureReport {
                failure: &failure,
                attempts,
            };
            let json = serde_json::to_string(&report).unwrap_or_default();
            let _ = writeln!(
                stderr,
                "encode failed: {} after {attempts} attempt(s)",
                failure.kind()
            );
            let _ = writeln!(stderr, "{json}");
            EXIT_ENCODE_FAILED
        }
        Err(CliError::CheckFailed(n)) => {
            let _ = writeln!(stderr, "{n} check(s) failed");
            EXIT_CHECK_FAILED
        }
    }
}
