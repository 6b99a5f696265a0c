//! `camellia` command-line interface.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::config::{CodeDescriptor, Coordinates, DecoderDescriptor, ExperimentConfig, Target};
use super::estimate::{strictly_decreasing, trend, trend_csv, Engine};
use super::stats::format_float;
use crate::analysis::{
    entropy_audit, exact_expected_covariance, parseval_check, TabulatedFunction,
};
use crate::camellia::{
    correlation_rho, petal_dimension, rho_asymptotic_bound, verify_camellia, EXHAUSTIVE_MAX_M,
};
use crate::channel::{ChannelDescriptor, SymmetricChannel};
use crate::error::{Error, Result};
use crate::gf2::gaussian_binomial;
use crate::rm::RmCode;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "camellia",
    version,
    about = "Reed-Muller codes and camellia boosting decoders"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Rate of RM(m, r).
    Rate(CodeArgs),
    /// Capacity of a symmetric channel.
    Capacity(ChannelArgs),
    /// Coset petal parameters, plus an exhaustive check for small m.
    Petals(PetalArgs),
    /// Run a Monte-Carlo experiment from a JSON config.
    Simulate(SimulateArgs),
    /// Exact oracles on small instances.
    #[command(subcommand)]
    Audit(AuditCommand),
    /// Sweep m and emit P_bit against n.
    Trend(TrendArgs),
}

#[derive(Args, Debug)]
struct CodeArgs {
    #[arg(long)]
    m: usize,
    #[arg(long)]
    r: usize,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct ChannelArgs {
    /// Binary symmetric channel with this crossover probability.
    #[arg(long, value_name = "EPS")]
    bsc: Option<f64>,
    /// Binary erasure channel with this erasure probability.
    #[arg(long, value_name = "P")]
    bec: Option<f64>,
    /// BSC mixture as comma-separated weight:crossover pairs.
    #[arg(long, value_name = "W:EPS,...")]
    mixture: Option<String>,
}

impl ChannelArgs {
    fn descriptor(&self) -> Result<ChannelDescriptor> {
        if let Some(eps) = self.bsc {
            return Ok(ChannelDescriptor::Bsc { eps });
        }
        if let Some(p) = self.bec {
            return Ok(ChannelDescriptor::Bec { p });
        }
        let spec = self.mixture.as_deref().unwrap_or_default();
        let components = spec
            .split(',')
            .map(|pair| {
                let (w, e) = pair.split_once(':').ok_or_else(|| {
                    Error::Config(format!(
                        "mixture component {pair:?} is not weight:crossover"
                    ))
                })?;
                let num = |s: &str| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Config(format!("{s:?} is not a number")))
                };
                Ok([num(w)?, num(e)?])
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ChannelDescriptor::Mixture { components })
    }

    fn build(&self) -> Result<SymmetricChannel> {
        self.descriptor()?.build().map_err(config_error)
    }
}

#[derive(Args, Debug)]
struct PetalArgs {
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = 1)]
    r: usize,
    /// Petal dimension; defaults to the rule for m (m >= 5).
    #[arg(long)]
    d: Option<usize>,
    /// Allowed excess of the restricted rate over the code rate.
    #[arg(long, default_value_t = 0.5)]
    rate_margin: f64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the seed in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the trial count in the config.
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Worker threads (also CAMELLIA_THREADS); never changes the output.
    #[arg(long)]
    threads: Option<usize>,
    /// Transmit uniformly random codewords instead of zero.
    #[arg(long)]
    random_codeword: bool,
}

#[derive(Subcommand, Debug)]
enum AuditCommand {
    /// Chain-rule entropies, the entropy inequality and exact P_loc.
    Entropy {
        #[command(flatten)]
        code: CodeArgs,
        #[command(flatten)]
        channel: ChannelArgs,
    },
    /// Exact average covariance of petal votes against sqrt(rho).
    Covariance {
        #[command(flatten)]
        code: CodeArgs,
        #[command(flatten)]
        channel: ChannelArgs,
        #[arg(long, default_value_t = 0)]
        i: usize,
        #[arg(long)]
        d: usize,
    },
    /// Efron-Stein decomposition of a random +-1 function.
    Parseval {
        #[arg(long, default_value_t = 3)]
        coords: usize,
        #[arg(long, default_value_t = 2)]
        states: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args, Debug)]
struct TrendArgs {
    #[arg(long, default_value_t = 1)]
    r: usize,
    #[command(flatten)]
    channel: ChannelArgs,
    /// Values of m, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [6usize, 8, 10])]
    ms: Vec<usize>,
    #[arg(long, default_value_t = 64)]
    k: usize,
    /// Petal dimension for every m; defaults to the rule for each m.
    #[arg(long)]
    d: Option<usize>,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Coordinates: "all" or a comma-separated list.
    #[arg(long, default_value = "0")]
    coords: String,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
}

fn config_error(e: Error) -> Error {
    match e {
        Error::BudgetExceeded { .. } | Error::Config(_) => e,
        other => Error::Config(other.to_string()),
    }
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::BudgetExceeded { .. } => EXIT_BUDGET,
        Error::Config(_)
        | Error::InvalidParameter(_)
        | Error::Parse(_)
        | Error::DimensionMismatch { .. } => EXIT_CONFIG,
        _ => EXIT_FAILURE,
    }
}

/// Runs the CLI on `argv` (program name first) and returns the exit code.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_CONFIG
                }
            };
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn emit(text: &str, path: Option<&PathBuf>, out: &mut dyn Write) -> Result<()> {
    let io = |e: std::io::Error| Error::Config(format!("cannot write output: {e}"));
    match path {
        Some(p) => std::fs::write(p, text).map_err(io),
        None => out.write_all(text.as_bytes()).map_err(io),
    }
}

fn pretty(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("json value serializes");
    s.push('\n');
    s
}

fn build_code(args: &CodeArgs) -> Result<RmCode> {
    RmCode::new(args.m, args.r).map_err(config_error)
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    match command {
        Command::Rate(args) => {
            let code = build_code(&args)?;
            emit(&format!("{}\n", format_float(code.rate())), None, out)
        }
        Command::Capacity(args) => {
            let ch = args.build()?;
            emit(&format!("{}\n", format_float(ch.capacity())), None, out)
        }
        Command::Petals(args) => petals(&args, out),
        Command::Simulate(args) => simulate(&args, out, err),
        Command::Audit(cmd) => audit(cmd, out),
        Command::Trend(args) => run_trend(&args, out, err),
    }
}

fn petals(args: &PetalArgs, out: &mut dyn Write) -> Result<()> {
    let code = RmCode::new(args.m, args.r).map_err(config_error)?;
    let d = match args.d {
        Some(d) => d,
        None => petal_dimension(args.m).map_err(config_error)?,
    };
    let rho = correlation_rho(args.m, d).map_err(config_error)?;
    let subspaces = gaussian_binomial(args.m, d)?;
    let petal_count = subspaces * (num::BigUint::from(1u8) << (args.m - d));
    let report = if args.m <= EXHAUSTIVE_MAX_M {
        Some(verify_camellia(&code, d, args.rate_margin)?)
    } else {
        None
    };
    let value = json!({
        "m": args.m,
        "r": args.r,
        "d": d,
        "rate": code.rate(),
        "rho": rho.to_string(),
        "rho_value": rho.to_f64(),
        "rho_asymptotic_bound": rho_asymptotic_bound(args.m).ok(),
        "petal_count": petal_count.to_string(),
        "report": report,
    });
    emit(&pretty(&value), None, out)
}

fn simulate(args: &SimulateArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", args.config.display())))?;
    let mut cfg = ExperimentConfig::from_json(&text)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    cfg.random_codeword |= args.random_codeword;
    if let Some(trials) = args.trials {
        cfg.trials = trials;
        cfg.validate()?;
    }
    let engine = Engine::from_env(args.threads)?;
    let report = engine.run(&cfg)?;
    let _ = writeln!(err, "wall-clock: {:.3}s", report.wall_clock.as_secs_f64());
    let text = match args.format {
        Format::Csv => report.to_csv(),
        Format::Json => report.to_json(),
    };
    emit(&text, args.out.as_ref(), out)
}

fn audit(cmd: AuditCommand, out: &mut dyn Write) -> Result<()> {
    let value = match cmd {
        AuditCommand::Entropy { code, channel } => {
            let report = entropy_audit(&build_code(&code)?, &channel.build()?)?;
            json!({
                "chain_rule_violation": report.chain_rule_violation(),
                "informative_coordinates": report.informative_coordinates(0.49),
                "audit": report,
            })
        }
        AuditCommand::Covariance {
            code,
            channel,
            i,
            d,
        } => {
            let report = exact_expected_covariance(&build_code(&code)?, &channel.build()?, i, d)
                .map_err(config_error)?;
            serde_json::to_value(report).expect("audit serializes")
        }
        AuditCommand::Parseval {
            coords,
            states,
            seed,
        } => {
            if states < 2 {
                return Err(Error::Config(
                    "need at least 2 states per coordinate".into(),
                ));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let probs: Vec<Vec<f64>> = (0..coords)
                .map(|_| {
                    let raw: Vec<f64> = (0..states).map(|_| rng.gen_range(0.05..1.0)).collect();
                    let total: f64 = raw.iter().sum();
                    raw.into_iter().map(|x| x / total).collect()
                })
                .collect();
            let f = TabulatedFunction::from_fn(probs, |_| if rng.gen() { 1.0 } else { -1.0 })?;
            let report = parseval_check(&f);
            json!({
                "max_violation": report.max_violation(),
                "report": report,
            })
        }
    };
    emit(&pretty(&value), None, out)
}

fn run_trend(args: &TrendArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let coordinates = if args.coords.trim() == "all" {
        Coordinates::default()
    } else {
        let list = args
            .coords
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Config(format!("{s:?} is not a coordinate")))
            })
            .collect::<Result<Vec<_>>>()?;
        Coordinates::List(list)
    };
    let first_m = *args
        .ms
        .first()
        .ok_or_else(|| Error::Config("no values of m given".into()))?;
    let base = ExperimentConfig {
        code: CodeDescriptor::Rm {
            m: first_m,
            r: args.r,
        },
        channel: args.channel.descriptor()?,
        decoder: DecoderDescriptor::Boosted {
            k: args.k,
            d: args.d,
        },
        target: Target::PBit,
        trials: args.trials,
        seed: args.seed,
        coordinates,
        random_codeword: false,
    };
    let engine = Engine::from_env(args.threads)?;
    let start = std::time::Instant::now();
    let points = trend(&base, &args.ms, &engine)?;
    let _ = writeln!(
        err,
        "wall-clock: {:.3}s; strictly decreasing with separated intervals: {}",
        start.elapsed().as_secs_f64(),
        strictly_decreasing(&points)
    );
    emit(&trend_csv(&points), args.out.as_ref(), out)
}
