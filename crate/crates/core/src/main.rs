use clap::{Parser, Subcommand};
use mdf_core::corpus::BUNDLED;
use mdf_core::runner::{run_scenario, summary, write_report, RunReport};
use mdf_core::scenario::{generate_scenario, CoefficientKind, Scenario, Suite};
use mdf_core::MdfError;
use rayon::prelude::*;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_PASS: u8 = 0;
const EXIT_VIOLATIONS: u8 = 1;
const EXIT_INPUT: u8 = 2;

#[derive(Parser)]
#[command(
    name = "mdf",
    version,
    about = "Verify Dirichlet forms and KMS-symmetric Lindblad generators on matrix algebras"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the suites of a scenario file and write a JSON report.
    Run {
        file: PathBuf,
        /// Report path (default: `<file stem>.report.json` next to the input).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Comma-separated subset of suites.
        #[arg(long, value_delimiter = ',')]
        suites: Option<Vec<String>>,
    },
    /// Emit a reproducible random scenario.
    Generate {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        dim: usize,
        /// hermitian, ginibre or balanced_pair
        #[arg(long)]
        kind: String,
        /// Output path (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every bundled scenario.
    Corpus {
        /// Directory for the per-scenario reports (not written when absent).
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

fn input_error(context: &str, e: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {context}: {e}");
    ExitCode::from(EXIT_INPUT)
}

fn parse_suites(names: &[String]) -> Result<Vec<Suite>, String> {
    names
        .iter()
        .map(|s| Suite::parse(s.trim()).ok_or_else(|| format!("unknown suite `{s}`")))
        .collect()
}

fn default_report_path(input: &Path) -> PathBuf {
    let stem = input
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "scenario".into());
    input.with_file_name(format!("{stem}.report.json"))
}

fn exit_for(report: &RunReport) -> ExitCode {
    ExitCode::from(if report.passed { EXIT_PASS } else { EXIT_VIOLATIONS })
}

fn cmd_run(file: &Path, out: Option<PathBuf>, seed: Option<u64>, suites: Option<Vec<String>>) -> ExitCode {
    let context = file.display().to_string();
    let scenario = match Scenario::load(file) {
        Ok(s) => s,
        Err(e) => return input_error(&context, e),
    };
    let suites = match suites.as_deref().map(parse_suites).transpose() {
        Ok(s) => s,
        Err(e) => return input_error("--suites", e),
    };
    let report = match run_scenario(&scenario, seed, suites.as_deref()) {
        Ok(r) => r,
        Err(e) => return input_error(&format!("{context} (scenario {})", scenario.name), e),
    };
    let path = out.unwrap_or_else(|| default_report_path(file));
    if let Err(e) = write_report(&report, &path) {
        return input_error("report", e);
    }
    print!("{}", summary(&report));
    println!("report written to {}", path.display());
    exit_for(&report)
}

fn cmd_generate(seed: u64, dim: usize, kind: &str, out: Option<PathBuf>) -> ExitCode {
    let Some(kind) = CoefficientKind::parse(kind) else {
        return input_error(
            "--kind",
            format!("unknown kind `{kind}` (hermitian, ginibre, balanced_pair)"),
        );
    };
    let scenario = match generate_scenario(seed, dim, kind) {
        Ok(s) => s,
        Err(e) => return input_error("generate", e),
    };
    let mut text = scenario.to_json();
    text.push('\n');
    match out {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, text) {
                return input_error(&path.display().to_string(), e);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(EXIT_PASS)
}

fn cmd_corpus(out_dir: Option<PathBuf>) -> ExitCode {
    if let Some(dir) = &out_dir {
        if let Err(e) = std::fs::create_dir_all(dir) {
            return input_error(&dir.display().to_string(), e);
        }
    }
    let results: Vec<(&str, Result<RunReport, MdfError>)> = BUNDLED
        .par_iter()
        .map(|(name, text)| {
            (
                *name,
                Scenario::from_json(text).and_then(|s| run_scenario(&s, None, None)),
            )
        })
        .collect();
    let mut code = EXIT_PASS;
    for (name, result) in results {
        match result {
            Ok(report) => {
                print!("{}", summary(&report));
                if let Some(dir) = &out_dir {
                    if let Err(e) = write_report(&report, &dir.join(format!("{name}.report.json"))) {
                        eprintln!("error: {name}: {e}");
                        code = EXIT_INPUT;
                    }
                }
                if !report.passed && code == EXIT_PASS {
                    code = EXIT_VIOLATIONS;
                }
            }
            Err(e) => {
                eprintln!("error: {name}: {e}");
                code = EXIT_INPUT;
            }
        }
    }
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { EXIT_PASS });
        }
    };
    match cli.command {
        Command::Run {
            file,
            out,
            seed,
            suites,
        } => cmd_run(&file, out, seed, suites),
        Command::Generate { seed, dim, kind, out } => cmd_generate(seed, dim, &kind, out),
        Command::Corpus { out_dir } => cmd_corpus(out_dir),
    }
}
