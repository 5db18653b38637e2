//! `ascap`: parameter sweeps and self-checks from the command line.

mod config_file;
mod grid;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use ascap_core::config::{DEFAULT_BANDWIDTH_HZ, DEFAULT_FRAME_S};
use ascap_core::montecarlo::{Power, Scheme};
use ascap_core::sweep::{run_sweep, SweepRow, SweepSpec};
use ascap_core::validate::{run_validate, ValidateOptions, ValidationReport};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "ascap",
    about = "Effective capacity of antenna-selection MIMO links",
    args_override_self = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate effective capacity over a parameter grid.
    Sweep(SweepArgs),
    /// Run exact identities, cutoff convergence and closed-form vs simulation checks.
    Validate(ValidateArgs),
    /// Print the version.
    Version,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum SchemeArg {
    Ras,
    Tas,
    Joint,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum PowerArg {
    Optimal,
    Constant,
    Both,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Read defaults from a file of `key = value` lines; flags take precedence.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "tas")]
    scheme: SchemeArg,
    /// Transmit antenna counts (list or range).
    #[arg(long, value_parser = grid::counts, default_value = "2")]
    mt: grid::Counts,
    /// Receive antenna counts (list or range).
    #[arg(long, value_parser = grid::counts, default_value = "2")]
    mr: grid::Counts,
    /// Average branch SNR in dB (list or start:step:stop).
    #[arg(long = "snr-db", value_parser = grid::reals, default_value = "0:2:20", allow_hyphen_values = true)]
    snr_db: grid::Reals,
    /// QoS exponents in 1/bits (list or start:step:stop).
    #[arg(long, value_parser = grid::reals, conflicts_with = "theta_log")]
    theta: Option<grid::Reals>,
    /// Log-spaced QoS exponents `start:stop[:per_decade]`; varies fastest in the output.
    #[arg(long = "theta-log", value_parser = grid::log_reals)]
    theta_log: Option<grid::Reals>,
    #[arg(long, value_enum, default_value = "optimal")]
    power: PowerArg,
    /// Add Monte Carlo estimates next to every closed-form value.
    #[arg(long)]
    mc: bool,
    #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; standard output when absent.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long = "bandwidth-hz", default_value_t = DEFAULT_BANDWIDTH_HZ)]
    bandwidth_hz: f64,
    #[arg(long = "frame-s", default_value_t = DEFAULT_FRAME_S)]
    frame_s: f64,
    /// Worker threads; all cores when absent.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..1025))]
    jobs: Option<u64>,
    /// Add ergodic capacity and the strict-QoS limit (transmit and joint selection).
    #[arg(long)]
    asymptotes: bool,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    /// 10^5 trials per point and a 5 standard error band instead of 10^6 and 3.
    #[arg(long)]
    quick: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the JSON report here instead of after the table.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..1025))]
    jobs: Option<u64>,
}

const DEFAULT_THETA_LOG: &str = "1e-4:10";

impl SweepArgs {
    fn spec(&self) -> SweepSpec {
        let (theta, theta_innermost) = match (&self.theta, &self.theta_log) {
            (Some(t), _) => (t.0.clone(), false),
            (None, Some(t)) => (t.0.clone(), true),
            (None, None) => (grid::parse_log_range(DEFAULT_THETA_LOG).expect("default range"), true),
        };
        SweepSpec {
            scheme: match self.scheme {
                SchemeArg::Ras => Scheme::Ras,
                SchemeArg::Tas => Scheme::Tas,
                SchemeArg::Joint => Scheme::Joint,
            },
            mt: self.mt.0.clone(),
            mr: self.mr.0.clone(),
            gamma0_db: self.snr_db.0.clone(),
            theta,
            power: match self.power {
                PowerArg::Optimal => vec![Power::Optimal],
                PowerArg::Constant => vec![Power::Constant],
                PowerArg::Both => vec![Power::Optimal, Power::Constant],
            },
            bandwidth_hz: self.bandwidth_hz,
            frame_s: self.frame_s,
            mc_trials: self.mc.then_some(self.trials),
            seed: self.seed,
            asymptotes: self.asymptotes,
            theta_innermost,
        }
    }
}

/// Error carrying the process exit code.
struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

fn thread_pool(jobs: Option<u64>) -> Result<rayon::ThreadPool, Failure> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0) as usize)
        .build()
        .map_err(|e| fail(EXIT_FAILURE, format!("cannot start worker threads: {e}")))
}

fn write_output(out: Option<&PathBuf>, bytes: &[u8]) -> Result<(), Failure> {
    match out {
        Some(p) => {
            std::fs::write(p, bytes).map_err(|e| fail(EXIT_FAILURE, format!("cannot write {}: {e}", p.display())))
        }
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| fail(EXIT_FAILURE, format!("cannot write output: {e}"))),
    }
}

#[derive(Serialize)]
struct SweepResult<'a> {
    spec: &'a SweepSpec,
    rows: &'a [SweepRow],
}

fn csv_bytes(rows: &[SweepRow]) -> Result<Vec<u8>, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if rows.is_empty() {
        w.write_record(SWEEP_HEADER)
            .map_err(|e| fail(EXIT_FAILURE, e.to_string()))?;
    }
    for r in rows {
        w.serialize(r).map_err(|e| fail(EXIT_FAILURE, e.to_string()))?;
    }
    w.into_inner().map_err(|e| fail(EXIT_FAILURE, e.to_string()))
}

const SWEEP_HEADER: [&str; 12] = [
    "gamma0_db",
    "theta",
    "scheme",
    "power",
    "ec_norm_analytic",
    "ec_norm_mc",
    "mc_std_error",
    "cutoff",
    "ergodic_norm",
    "ec_inf_norm",
    "mt",
    "mr",
];

fn sweep(args: &SweepArgs) -> Result<(), Failure> {
    let spec = args.spec();
    spec.validate().map_err(|e| fail(EXIT_USAGE, e.to_string()))?;
    let rows = thread_pool(args.jobs)?
        .install(|| run_sweep(&spec))
        .map_err(|e| fail(EXIT_NUMERIC, format!("numeric failure at {e}")))?;
    let bytes = match args.format {
        Format::Csv => csv_bytes(&rows)?,
        Format::Json => {
            let mut b = serde_json::to_vec_pretty(&SweepResult {
                spec: &spec,
                rows: &rows,
            })
            .map_err(|e| fail(EXIT_FAILURE, e.to_string()))?;
            b.push(b'\n');
            b
        }
    };
    write_output(args.out.as_ref(), &bytes)
}

fn report_table(report: &ValidationReport) -> String {
    let width = report.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    let mut s = String::new();
    for c in &report.checks {
        s.push_str(&format!(
            "{}  {:<width$}  {}\n",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        ));
    }
    let failed = report.checks.iter().filter(|c| !c.passed).count();
    s.push_str(&format!("{} checks, {} failed\n", report.checks.len(), failed));
    s
}

fn validate(args: &ValidateArgs) -> Result<(), Failure> {
    let opts = if args.quick {
        ValidateOptions::quick(args.seed)
    } else {
        ValidateOptions::full(args.seed)
    };
    let report = thread_pool(args.jobs)?
        .install(|| run_validate(&opts))
        .map_err(|e| fail(EXIT_NUMERIC, format!("numeric failure during validation: {e}")))?;
    let mut json = serde_json::to_vec_pretty(&report).map_err(|e| fail(EXIT_FAILURE, e.to_string()))?;
    json.push(b'\n');
    let mut text = report_table(&report).into_bytes();
    match &args.out {
        Some(p) => {
            write_output(None, &text)?;
            write_output(Some(p), &json)?;
        }
        None => {
            text.push(b'\n');
            text.extend_from_slice(&json);
            write_output(None, &text)?;
        }
    }
    if report.all_passed() {
        Ok(())
    } else {
        Err(fail(EXIT_FAILURE, "validation failed"))
    }
}

fn parse(argv: Vec<OsString>) -> Result<Cli, clap::Error> {
    let cli = Cli::try_parse_from(&argv)?;
    let path = match &cli.command {
        Command::Sweep(SweepArgs { config: Some(p), .. }) => p.clone(),
        _ => return Ok(cli),
    };
    let text = std::fs::read_to_string(&path).map_err(|e| {
        clap::Error::raw(
            clap::error::ErrorKind::Io,
            format!("cannot read {}: {e}\n", path.display()),
        )
    })?;
    let file_args = config_file::to_args(&text, &argv[2..]).map_err(|e| {
        clap::Error::raw(
            clap::error::ErrorKind::InvalidValue,
            format!("{}: {e}\n", path.display()),
        )
    })?;
    // file values first so that repeated flags from the command line win
    let mut merged: Vec<OsString> = argv[..2].to_vec();
    merged.extend(file_args.into_iter().map(OsString::from));
    merged.extend_from_slice(&argv[2..]);
    Cli::try_parse_from(merged)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match parse(std::env::args_os().collect()) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Sweep(a) => sweep(a),
        Command::Validate(a) => validate(a),
        Command::Version => {
            println!("ascap {}", env!("CARGO_PKG_VERSION"));
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
