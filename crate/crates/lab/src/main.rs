use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use radwave_lab::sweep::{thread_count, DEFAULT_CAP};
use radwave_lab::{report_dir, run, selftest, sweep, Axis, ExperimentConfig, LabResult, Scale};

/// Numerical laboratory for the radial defocusing wave equation.
#[derive(Parser)]
#[command(name = "radwave", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment from a JSON configuration.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the cartesian product of the given axes over a base configuration.
    /// Parallelism is capped by the RW_THREADS environment variable.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// `field=v1,v2,...`; dotted paths reach nested fields (`grid.n`).
        #[arg(long = "axis")]
        axes: Vec<String>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
    },
    /// Summarize every run below a directory and spot-check its files.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
        /// Print the machine-readable document instead of the table.
        #[arg(long)]
        json: bool,
    },
    /// Run the built-in acceptance suite.
    Selftest {
        #[arg(long, default_value = "selftest-out")]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Scale::Full)]
        scale: Scale,
    },
}

fn execute(command: Command) -> LabResult<bool> {
    match command {
        Command::Simulate { config, out } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            cfg.out_dir = Some(out);
            let summary = run(&cfg)?;
            if let Some(e) = &summary.error {
                println!("run failed: {e}");
            }
            for c in &summary.checks {
                println!("{}", c.describe());
            }
            Ok(summary.passed())
        }
        Command::Sweep { config, axes, out, cap } => {
            let base = ExperimentConfig::load(&config)?;
            let axes = axes.iter().map(|a| Axis::parse(a)).collect::<LabResult<Vec<_>>>()?;
            let outcome = sweep(&base, &axes, &out, cap, thread_count())?;
            for cell in &outcome.cells {
                let label: Vec<String> = cell.assignment.iter().map(|(k, v)| format!("{k}={v}")).collect();
                let verdict = if cell.summary.passed() { "PASS" } else { "FAIL" };
                println!("cell {:03} [{}] {verdict}", cell.index, label.join(" "));
            }
            Ok(outcome.passed())
        }
        Command::Report { input, json } => {
            let report = report_dir(&input)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            } else {
                print!("{}", report.to_text());
            }
            Ok(report.all_passed)
        }
        Command::Selftest { out, scale } => {
            let outcome = selftest(&out, scale)?;
            for c in &outcome.static_checks {
                println!("{}", c.describe());
            }
            print!("{}", outcome.report.to_text());
            Ok(outcome.passed())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
