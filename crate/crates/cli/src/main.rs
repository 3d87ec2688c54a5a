//! `wvlab`: weak values, strong and weak pointer runs, disturbance tables.
//!
//! Exit codes: 0 success, 1 I/O error, 2 validation failure, 3 degenerate
//! postselection.

mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use wvlab_core::{runner, RunReport, Scenario};

#[derive(Parser, Debug)]
#[command(name = "wvlab", version, about = "Weak values and measurement pointers for pre/post-selected systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Weak value of every site at its stage, plus declared sum rules.
    WeakValues(CommonArgs),
    /// Pointer simulation: couplings, postselection, click statistics.
    Run(CommonArgs),
    /// Disturbance of vanishing transition amplitudes by the pointers.
    Disturbance(CommonArgs),
    /// Load and validate a scenario without running it.
    Validate(CommonArgs),
    /// Write a built-in scenario as a scenario file.
    ExportDefault(ExportArgs),
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// `builtin:NAME` or a path to a scenario file.
    #[arg(long)]
    scenario: String,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Overrides the scenario tolerance.
    #[arg(long, env = "WVLAB_TOLERANCE")]
    tolerance: Option<f64>,
    /// Overrides the coupling strength of every weak pointer.
    #[arg(long)]
    g: Option<f64>,
    /// Write output here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ExportArgs {
    #[arg(long, default_value = "builtin:three-path")]
    scenario: String,
    #[arg(long, env = "WVLAB_TOLERANCE")]
    tolerance: Option<f64>,
    #[arg(long)]
    g: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug)]
enum Failure {
    Io(String),
    Validation(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Validation(_) => 2,
        }
    }
}

impl From<wvlab_core::Error> for Failure {
    fn from(e: wvlab_core::Error) -> Self {
        Failure::Validation(format!("{} [{}]", e, e.code()))
    }
}

fn load_scenario(source: &str, tolerance: Option<f64>, g: Option<f64>) -> Result<Scenario, Failure> {
    let mut sc = match source.strip_prefix("builtin:") {
        Some(name) => Scenario::builtin(name)?,
        None => {
            let text = std::fs::read_to_string(source)
                .map_err(|e| Failure::Io(format!("cannot read `{source}`: {e}")))?;
            Scenario::load(&text).map_err(|e| Failure::Validation(format!("{source}: {e} [{}]", e.code())))?
        }
    };
    if let Some(t) = tolerance {
        sc = sc.with_tolerance(t)?;
    }
    if let Some(g) = g {
        sc = sc.with_coupling(g)?;
    }
    Ok(sc)
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::Io(format!("cannot write `{}`: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Runs a command; `Ok(true)` means the postselection was degenerate.
fn execute(cli: Cli) -> Result<bool, Failure> {
    match cli.command {
        Command::WeakValues(args) => {
            let sc = load_scenario(&args.scenario, args.tolerance, args.g)?;
            let report = runner::run_weak_values(&sc)?;
            let text = match args.format {
                Format::Text => render::weak_values(&report),
                Format::Json => json(&report),
            };
            emit(args.out.as_ref(), &text)?;
            Ok(report.degenerate)
        }
        Command::Run(args) => {
            let sc = load_scenario(&args.scenario, args.tolerance, args.g)?;
            let report = runner::run_pointers(&sc)?;
            let text = match args.format {
                Format::Text => render::run(&report),
                Format::Json => json(&report),
            };
            emit(args.out.as_ref(), &text)?;
            Ok(report.degenerate)
        }
        Command::Disturbance(args) => {
            let sc = load_scenario(&args.scenario, args.tolerance, args.g)?;
            let mut report = runner::run_weak_values(&sc)?;
            report.disturbance = runner::disturbance_table(&sc)?;
            let text = match args.format {
                Format::Text => render::disturbance(&report),
                Format::Json => json(&report),
            };
            emit(args.out.as_ref(), &text)?;
            Ok(report.degenerate)
        }
        Command::Validate(args) => {
            let sc = load_scenario(&args.scenario, args.tolerance, args.g)?;
            let text = match args.format {
                Format::Text => render::validation(&sc),
                Format::Json => format!(
                    "{{\"valid\": true, \"scenario\": {:?}, \"checksum\": {:?}}}\n",
                    sc.name(),
                    sc.checksum()
                ),
            };
            emit(args.out.as_ref(), &text)?;
            Ok(false)
        }
        Command::ExportDefault(args) => {
            let sc = load_scenario(&args.scenario, args.tolerance, args.g)?;
            emit(args.out.as_ref(), &format!("{}\n", sc.to_json()))?;
            Ok(false)
        }
    }
}

fn json(report: &RunReport) -> String {
    format!("{}\n", report.to_json())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => {
            eprintln!("wvlab: degenerate postselection: the postselected state is unreachable");
            ExitCode::from(3)
        }
        Err(failure) => {
            let (Failure::Io(msg) | Failure::Validation(msg)) = &failure;
            eprintln!("wvlab: {msg}");
            ExitCode::from(failure.exit_code())
        }
    }
}
