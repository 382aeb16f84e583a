//! `qpbkit`: runs verification suites over a scenario file and prints a
//! deterministic report.
//!
//! Exit status: 0 all checks pass (and the golden file matches), 1 some check
//! fails or the golden file differs, 2 the input or golden file cannot be
//! read or parsed, 3 internal inconsistency.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use qpbkit::input::Scenario;
use qpbkit::report::{diff_golden, Report};
use qpbkit::runner::{run, Suite};

const THREADS_VAR: &str = "QPBKIT_THREADS";

#[derive(Parser)]
#[command(name = "qpbkit", version, about = "Exact checks for quantum principal bundles over finite quantum groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a suite over a scenario file.
    Run {
        #[arg(long, value_parser = parse_suite)]
        suite: Suite,
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Compare the report with a stored JSON report.
        #[arg(long)]
        golden: Option<PathBuf>,
    },
    /// List the available suites.
    ListSuites,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

fn parse_suite(s: &str) -> std::result::Result<Suite, String> {
    s.parse::<Suite>().map_err(|e| e.to_string())
}

fn exit_code_for(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<qpbkit::Error>() {
        Some(qpbkit::Error::Internal(_)) => 3,
        Some(qpbkit::Error::Parse { .. }) => 2,
        Some(_) => 3,
        None => 2,
    }
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var(THREADS_VAR) {
        let n: usize = v.trim().parse().with_context(|| format!("{THREADS_VAR} must be a positive integer, got '{v}'"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring the thread pool")?;
    }
    Ok(())
}

fn run_suite(suite: Suite, input: &PathBuf, format: Format, golden: Option<&PathBuf>) -> Result<u8> {
    let text = std::fs::read_to_string(input).with_context(|| format!("reading {}", input.display()))?;
    let scenario = Scenario::from_toml(&text).with_context(|| format!("parsing {}", input.display()))?;
    let report = run(&scenario, suite)?;
    match format {
        Format::Json => print!("{}", report.to_json()),
        Format::Text => print!("{}", report.to_text()),
    }
    let mut code = if report.all_passed() { 0 } else { 1 };
    if let Some(g) = golden {
        let gtext = std::fs::read_to_string(g).with_context(|| format!("reading {}", g.display()))?;
        let expected = Report::from_json(&gtext).with_context(|| format!("parsing golden file {}", g.display()))?;
        let diffs = diff_golden(&report, &expected);
        for d in &diffs {
            eprintln!("golden difference at {}: expected {}, got {}", d.path, d.expected, d.actual);
        }
        if !diffs.is_empty() {
            code = 1;
        }
    }
    Ok(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| match &cli.command {
        Command::ListSuites => {
            for s in Suite::ALL {
                println!("{:<12} {}", s.as_str(), s.description());
            }
            Ok(0)
        }
        Command::Run { suite, input, format, golden } => run_suite(*suite, input, *format, golden.as_ref()),
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
