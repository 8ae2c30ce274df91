//! `qch`: run identity suites on catalog charts or chart files.
//!
//! Exit status: 0 all checks pass, 1 some check failed, 2 usage or parse error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qch_core::catalog::{self, ENTRIES};
use qch_core::dsl::print_chart;
use qch_core::verify::{render, run_suite, ChartSource, ReportFormat, RunOptions, VerifyError, SUITES};

#[derive(Parser)]
#[command(name = "qch", version, about = "Certify curvature and Hermitian-structure identities on Kähler surface charts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a suite on a catalog chart or a chart file.
    Verify {
        /// Catalog name or path to a `.chart` file.
        chart: String,
        #[arg(long, default_value = "full")]
        suite: String,
        #[arg(long, default_value_t = 20)]
        points: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(2..=3))]
        order: u8,
        /// Tolerance override `check=value`; a prefix such as `kahler` or `killing.isometry` applies to all matching ids.
        #[arg(long = "tol", value_name = "K=V", value_parser = parse_tol, num_args = 1..)]
        tol: Vec<(String, f64)>,
        #[arg(long, default_value = "json", value_parser = ["json", "csv", "markdown"])]
        format: String,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also run negative controls, which must fail their underlying identity.
        #[arg(long)]
        controls: bool,
        /// Domain margin for sample rejection.
        #[arg(long, default_value_t = 1e-6)]
        margin: f64,
    },
    /// List catalog charts.
    ListCharts,
    /// List suites.
    ListSuites,
    /// Print a catalog chart as DSL text.
    DumpChart { name: String },
}

fn parse_tol(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected K=V, got `{s}`"))?;
    let v: f64 = v.trim().parse().map_err(|e| format!("bad tolerance `{v}`: {e}"))?;
    Ok((k.trim().to_string(), v))
}

enum Failure {
    Checks,
    Usage(String),
}

impl From<VerifyError> for Failure {
    fn from(e: VerifyError) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::ListCharts => {
            for e in ENTRIES {
                println!("{:26} {:22} {}", e.name, e.family.name(), e.summary);
            }
        }
        Command::ListSuites => {
            for (name, about) in SUITES {
                println!("{name:14} {about}");
            }
        }
        Command::DumpChart { name } => {
            let chart = catalog::chart(&name).map_err(|e| Failure::Usage(e.to_string()))?;
            print!("{}", print_chart(&chart));
        }
        Command::Verify { chart, suite, points, seed, order, tol, format, out, controls, margin } => {
            let source = ChartSource::resolve(&chart)?;
            let opts = RunOptions { suite, n_points: points, seed, order: order as usize, tolerances: tol, controls, margin };
            let report = run_suite(&source, &opts)?;
            let text = render(&report, format.parse::<ReportFormat>()?)?;
            match out {
                Some(path) => std::fs::write(&path, text)
                    .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?,
                None => print!("{text}"),
            }
            eprintln!(
                "{}: {} passed, {} failed, max residual {:.3e}",
                report.chart, report.summary.n_pass, report.summary.n_fail, report.summary.max_residual
            );
            if !report.passed() {
                return Err(Failure::Checks);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
