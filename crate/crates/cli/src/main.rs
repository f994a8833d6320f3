use std::fs;
use std::io::{self, Read};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use modmul::bench::{self, BenchConfig, CSV_HEADER};
use modmul::multiply::{multiply, parse_threshold, plan, PlanOptions};
use modmul::params::{select_params_with, Params};
use modmul::selftest::{self, Fault, Level};
use modmul::{mul_oracle, BigNat, SearchStrategy};

#[derive(Parser)]
#[command(
    name = "modmul",
    version,
    about = "Exact integer multiplication over Z[a]/(p^c, a^m + 1)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Multiply two hex integers.
    Mul {
        /// Operands: hex literal, @path, or - for stdin. With none given,
        /// two whitespace-separated operands are read from stdin.
        operands: Vec<String>,
        /// Use the naive multiplier.
        #[arg(long)]
        oracle: bool,
        /// Number of variables.
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Seed for the randomized prime search (deterministic search if absent).
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print the parameter plan for an input size.
    Params {
        /// Input size in bits (decimal or 2^e).
        #[arg(long, value_parser = parse_bits, required_unless_present = "input")]
        bits: Option<usize>,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Validate a key=value block (from --input, or the computed plan)
        /// and exit nonzero on any violation.
        #[arg(long)]
        check: bool,
        /// Parameter block to check; - for stdin.
        #[arg(long, requires = "check")]
        input: Option<String>,
    },
    /// Run the invariant suites.
    Selftest {
        #[arg(long, value_enum, default_value_t = LevelArg::Quick)]
        level: LevelArg,
        #[arg(long, value_enum, hide = true)]
        inject_fault: Option<FaultArg>,
    },
    /// Time the transform path against the oracle and write CSV.
    Bench {
        #[arg(long, value_parser = parse_bits)]
        min_bits: usize,
        #[arg(long, value_parser = parse_bits)]
        max_bits: usize,
        #[arg(long, default_value_t = 6)]
        steps: usize,
        /// Output path; stdout if absent.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Include plan construction in the transform timings.
        #[arg(long)]
        include_plan: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Quick,
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    FlipTwiddle,
}

fn parse_bits(s: &str) -> Result<usize, String> {
    parse_threshold(s).map_err(|e| e.to_string())
}

fn strategy(seed: Option<u64>) -> SearchStrategy {
    match seed {
        Some(seed) => SearchStrategy::Randomized { seed },
        None => SearchStrategy::Deterministic,
    }
}

fn read_stdin() -> Result<String> {
    let mut s = String::new();
    io::stdin()
        .read_to_string(&mut s)
        .context("reading stdin")?;
    Ok(s)
}

fn read_operand(arg: &str) -> Result<String> {
    if arg == "-" {
        read_stdin()
    } else if let Some(path) = arg.strip_prefix('@') {
        fs::read_to_string(path).with_context(|| format!("reading {path}"))
    } else {
        Ok(arg.to_string())
    }
}

fn parse_hex(text: &str) -> Result<BigNat> {
    let t = text.trim();
    let t = t.strip_prefix("0x").unwrap_or(t);
    BigNat::from_hex(t).with_context(|| format!("invalid hex operand {:?}", truncate(t)))
}

fn truncate(s: &str) -> String {
    if s.len() > 40 {
        format!("{}...", &s[..40])
    } else {
        s.to_string()
    }
}

fn cmd_mul(operands: &[String], oracle: bool, k: usize, seed: Option<u64>) -> Result<()> {
    let texts = match operands.len() {
        0 => read_stdin()?
            .split_whitespace()
            .map(str::to_string)
            .collect(),
        2 => vec![read_operand(&operands[0])?, read_operand(&operands[1])?],
        n => bail!("expected two operands, got {n}"),
    };
    if texts.len() != 2 {
        bail!("expected two operands on stdin, got {}", texts.len());
    }
    let a = parse_hex(&texts[0])?;
    let b = parse_hex(&texts[1])?;
    let product = if oracle {
        mul_oracle(&a, &b)
    } else {
        let options = PlanOptions::from_env()?
            .with_num_vars(k)
            .with_strategy(strategy(seed));
        let bits = a.bit_len().max(b.bit_len());
        multiply(&a, &b, &plan(bits, &options)?)?
    };
    println!("{}", product.to_hex());
    Ok(())
}

fn cmd_params(
    bits: Option<usize>,
    k: usize,
    seed: Option<u64>,
    check: bool,
    input: Option<&str>,
) -> Result<bool> {
    let params = match input {
        Some("-") => Params::from_kv(&read_stdin()?)?,
        Some(path) => {
            Params::from_kv(&fs::read_to_string(path).with_context(|| format!("reading {path}"))?)?
        }
        None => {
            let bits = bits.expect("clap requires --bits without --input");
            let (params, report) = select_params_with(bits, k, strategy(seed))?;
            print!("{}", params.to_kv());
            println!("prime_trials={}", report.trials);
            println!("prime_strategy={}", report.strategy);
            params
        }
    };
    if !check {
        return Ok(true);
    }
    let violations = params.validate();
    for v in &violations {
        eprintln!("violation: {v}");
    }
    println!(
        "check={}",
        if violations.is_empty() {
            "ok"
        } else {
            "failed"
        }
    );
    Ok(violations.is_empty())
}

fn cmd_selftest(level: LevelArg, fault: Option<FaultArg>) -> bool {
    let level = match level {
        LevelArg::Quick => Level::Quick,
        LevelArg::Full => Level::Full,
    };
    let fault = fault.map(|FaultArg::FlipTwiddle| Fault::FlipTwiddle);
    let results = selftest::run(level, fault);
    for r in &results {
        println!("{r}");
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    println!("{} suites, {failed} failed", results.len());
    failed == 0
}

fn cmd_bench(config: &BenchConfig, csv_path: Option<&PathBuf>) -> Result<()> {
    let records = bench::run(config)?;
    let sink: Box<dyn io::Write> = match csv_path {
        Some(p) => {
            Box::new(fs::File::create(p).with_context(|| format!("creating {}", p.display()))?)
        }
        None => Box::new(io::stdout()),
    };
    let mut writer = csv::Writer::from_writer(sink);
    writer.write_record(CSV_HEADER)?;
    for r in &records {
        writer.write_record(r.fields())?;
    }
    writer.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Mul {
            operands,
            oracle,
            k,
            seed,
        } => cmd_mul(&operands, oracle, k, seed).map(|()| true),
        Command::Params {
            bits,
            k,
            seed,
            check,
            input,
        } => cmd_params(bits, k, seed, check, input.as_deref()),
        Command::Selftest {
            level,
            inject_fault,
        } => Ok(cmd_selftest(level, inject_fault)),
        Command::Bench {
            min_bits,
            max_bits,
            steps,
            csv,
            include_plan,
            seed,
        } => {
            let config = BenchConfig {
                min_bits,
                max_bits,
                steps,
                include_plan,
                seed,
                options: PlanOptions::from_env()?,
            };
            cmd_bench(&config, csv.as_ref()).map(|()| true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
