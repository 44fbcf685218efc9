//! `facticity` command-line front end.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on runtime errors.

mod emit;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use facticity::bitcodec::{decode_sd, encode_sd, sd_len, BitString};
use facticity::exact::{enumerate, report, CodeTable, MAX_CODE_LEN};
use facticity::microvm::{run, Budget};
use facticity::processes::series_report;
use facticity::{estimate, Real};

use crate::emit::ExactRow;

#[derive(Debug)]
enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<facticity::Error> for Failure {
    fn from(e: facticity::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

#[derive(Parser)]
#[command(
    name = "facticity",
    version,
    about = "Exact and estimated facticity of binary strings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact two-part complexity and facticity from a complete enumeration.
    Exact(ExactArgs),
    /// Estimated facticity from explicit model classes.
    Estimate(EstimateArgs),
    /// Entropy sweep of the estimator over stochastic strings.
    Sweep(SweepArgs),
    /// Classify a sequence of strings as a process.
    Classify(ClassifyArgs),
    /// Collapse probability and threshold curves.
    Curves(CurvesArgs),
    /// Self-delimiting code helpers.
    Codec {
        #[command(subcommand)]
        op: CodecOp,
    },
    /// Run the reference machine on one input and print the outcome.
    Run(RunArgs),
}

#[derive(Args)]
#[command(group(clap::ArgGroup::new("target").required(true).args(["string", "all"])))]
struct ExactArgs {
    /// Longest input enumerated (at most 30).
    #[arg(long, default_value_t = 18, value_parser = clap::value_parser!(u64).range(1..=MAX_CODE_LEN as u64))]
    max_code_len: u64,
    #[arg(long, default_value_t = 4096)]
    step_budget: u64,
    #[arg(long, default_value_t = 32)]
    max_output: usize,
    /// Report a single string given as '0'/'1' characters.
    #[arg(long)]
    string: Option<String>,
    /// Report every certified string.
    #[arg(long)]
    all: bool,
    #[arg(long, conflicts_with = "csv")]
    json: bool,
    #[arg(long)]
    csv: bool,
}

#[derive(Args)]
struct EstimateArgs {
    #[arg(long)]
    input: PathBuf,
    /// Read bytes and expand each into 8 bits instead of reading '0'/'1' text.
    #[arg(long)]
    raw: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u32).range(2..=12))]
    k: u32,
    #[arg(long, default_value_t = 21, value_parser = clap::value_parser!(u64).range(2..))]
    grid: u64,
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
    reps: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Also draw mean estimated facticity and the threshold curve.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct ClassifyArgs {
    /// One '0'/'1' string per line, in time order.
    #[arg(long)]
    input: PathBuf,
    /// Dead band for slope signs; defaults to 1% of mean complexity per step.
    #[arg(long)]
    eta: Option<Real>,
}

#[derive(Args)]
struct CurvesArgs {
    #[arg(long, value_delimiter = ',', required = true, value_parser = clap::value_parser!(u32).range(1..=24))]
    k_list: Vec<u32>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 101, value_parser = clap::value_parser!(u64).range(2..))]
    grid: u64,
    /// Additive constant of the threshold.
    #[arg(long, default_value_t = 0)]
    c: u64,
}

#[derive(Subcommand)]
enum CodecOp {
    /// Print the self-delimiting code of a string.
    Encode { bits: String },
    /// Split a stream into its leading payload and the remainder.
    Decode { bits: String },
    /// Print the code length for a payload of `n` bits.
    Len { n: usize },
}

#[derive(Args)]
struct RunArgs {
    /// Input `w` as '0'/'1' characters (may be empty).
    #[arg(default_value = "")]
    input: String,
    #[arg(long, default_value_t = 4096)]
    step_budget: u64,
    #[arg(long, default_value_t = 64)]
    max_output: usize,
}

fn parse_bits(flag: &str, text: &str) -> Result<BitString, Failure> {
    BitString::parse_ascii(text).map_err(|e| Failure::Usage(format!("{flag}: {e}")))
}

fn budget(steps: u64, output: usize) -> Result<Budget, Failure> {
    Budget::new(steps, output)
        .map_err(|e| Failure::Usage(format!("--step-budget/--max-output: {e}")))
}

fn read_input(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::Runtime(format!("cannot read {}: {e}", path.display())))
}

fn print_json<T: serde::Serialize>(value: &T) -> Outcome {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| Failure::Runtime(e.to_string()))?;
    writeln!(out)?;
    Ok(())
}

fn exact_row(table: &CodeTable, x: &BitString) -> Result<ExactRow, Failure> {
    let e = table.lookup(x)?;
    let r = report(table, x)?;
    Ok(ExactRow {
        x: x.to_string(),
        n: r.n,
        k2: r.k2,
        phi: r.phi,
        k1: e.k1,
        delta: r.delta,
        rho: r.rho,
        certified: r.certified,
        label: r.label.to_string(),
    })
}

fn cmd_exact(a: ExactArgs) -> Outcome {
    let b = budget(a.step_budget, a.max_output)?;
    let target = a
        .string
        .as_deref()
        .map(|s| parse_bits("--string", s))
        .transpose()?;
    if let Some(x) = &target {
        if x.len() > a.max_output {
            return Err(Failure::Usage(format!(
                "--string has {} bits, more than --max-output {}",
                x.len(),
                a.max_output
            )));
        }
    }
    let table = enumerate(a.max_code_len as usize, b).map_err(|e| match e {
        facticity::Error::Capacity(m) | facticity::Error::Domain(m) => Failure::Usage(m),
        other => other.into(),
    })?;
    let rows = match target {
        Some(x) => vec![exact_row(&table, &x)?],
        None => table
            .certified_strings()
            .map(|x| exact_row(&table, &x))
            .collect::<Result<_, _>>()?,
    };
    if a.csv {
        emit::exact_csv(io::stdout().lock(), &rows)?;
        Ok(())
    } else if rows.len() == 1 && !a.all {
        print_json(&rows[0])
    } else {
        print_json(&rows)
    }
}

fn cmd_estimate(a: EstimateArgs) -> Outcome {
    let bytes = read_input(&a.input)?;
    let x = if a.raw {
        BitString::from_bytes(&bytes)
    } else {
        let text = String::from_utf8(bytes).map_err(|_| {
            Failure::Runtime(format!("{} is not text; use --raw", a.input.display()))
        })?;
        BitString::parse_ascii(&text)?
    };
    print_json(&estimate::<Real>(&x)?)
}

fn cmd_sweep(a: SweepArgs) -> Outcome {
    let table = facticity::estimator::sweep::<Real>(a.k, a.grid as usize, a.reps as usize, a.seed)?;
    emit::write_file(&a.out, |w| emit::sweep_csv(w, &table))?;
    if let Some(path) = &a.svg {
        emit::write_file(path, |w| emit::sweep_svg(w, &table))?;
    }
    Ok(())
}

fn cmd_classify(a: ClassifyArgs) -> Outcome {
    let text = String::from_utf8(read_input(&a.input)?)
        .map_err(|_| Failure::Runtime(format!("{} is not text", a.input.display())))?;
    let xs = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(BitString::parse_ascii)
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(eta) = a.eta {
        if eta.is_nan() || eta < 0.0 {
            return Err(Failure::Usage(format!("--eta must be >= 0, got {eta}")));
        }
    }
    print_json(&series_report::<Real>(&xs, a.eta)?)
}

fn cmd_curves(a: CurvesArgs) -> Outcome {
    emit::write_file(&a.out, |w| {
        emit::curves_csv(w, &a.k_list, a.grid as usize, a.c)
    })
}

fn cmd_codec(op: CodecOp) -> Outcome {
    match op {
        CodecOp::Encode { bits } => println!("{}", encode_sd(&parse_bits("encode", &bits)?)),
        CodecOp::Decode { bits } => {
            let (payload, rest) = decode_sd(&parse_bits("decode", &bits)?)?;
            print_json(&serde_json::json!({
                "payload": payload.to_string(),
                "rest": rest.to_string(),
            }))?;
        }
        CodecOp::Len { n } => println!("{}", sd_len(n)),
    }
    Ok(())
}

fn cmd_run(a: RunArgs) -> Outcome {
    let w = parse_bits("input", &a.input)?;
    print_json(&run(&w, budget(a.step_budget, a.max_output)?))
}

fn configure_threads() -> Outcome {
    let Ok(value) = std::env::var("FACTICITY_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| {
            Failure::Usage(format!(
                "FACTICITY_THREADS must be a positive integer, got {value:?}"
            ))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Runtime(e.to_string()))
}

fn dispatch(cli: Cli) -> Outcome {
    configure_threads()?;
    match cli.command {
        Command::Exact(a) => cmd_exact(a),
        Command::Estimate(a) => cmd_estimate(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Classify(a) => cmd_classify(a),
        Command::Curves(a) => cmd_curves(a),
        Command::Codec { op } => cmd_codec(op),
        Command::Run(a) => cmd_run(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
