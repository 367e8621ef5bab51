use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use qsh_core::scalar::parse_rational;
use qsh_core::Rational;
use qsh_lab::report::write_atomic;
use qsh_lab::{run, Format, RunConfig, Suite};

/// Verify the flat quaternionic skew-Hermitian model, its curvature space and
/// the Swann-bundle fiber calculus.
#[derive(Parser, Debug)]
#[command(name = "qsh-lab", version)]
struct Args {
    /// Quaternionic dimension (repeatable).
    #[arg(long = "n", default_values_t = [2usize, 3])]
    n: Vec<usize>,
    /// Curvature scale, as an integer, "p/q" or a decimal.
    #[arg(long, default_value = "1", value_parser = rational)]
    kappa: Rational,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sample points per randomized identity.
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 1e-10)]
    tolerance: f64,
    /// Comma-separated list of suites.
    #[arg(long, value_delimiter = ',', default_value = "all")]
    suites: Vec<Suite>,
    /// JSON file with keys F1, F2, F3 for the flat suite.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Report path; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

fn rational(s: &str) -> Result<Rational, String> {
    parse_rational(s).ok_or_else(|| format!("not a rational number: {s:?}"))
}

fn main() -> ExitCode {
    let args = Args::parse();
    let config = RunConfig {
        ns: args.n,
        kappa: args.kappa,
        seed: args.seed,
        trials: args.trials,
        tolerance: args.tolerance,
        suites: args.suites.into_iter().collect::<BTreeSet<_>>(),
        input: args.input,
        output: args.output,
        format: args.format,
    };
    let report = match run(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("qsh-lab: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let text = report.render(config.format);
    match &config.output {
        Some(path) => {
            if let Err(e) = write_atomic(path, &text) {
                eprintln!("qsh-lab: {e}");
                return ExitCode::from(e.exit_code() as u8);
            }
        }
        None => print!("{text}"),
    }
    eprintln!(
        "qsh-lab: {} passed, {} failed in {:.1} s",
        report.passed,
        report.failed,
        report.wall_ms / 1e3
    );
    ExitCode::from(report.exit_code() as u8)
}
