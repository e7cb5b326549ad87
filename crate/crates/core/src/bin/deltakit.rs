use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use deltakit::scenario::{parse_scenario, run, Report, RunOptions, Task, EXIT_INVALID};

#[derive(Parser)]
#[command(name = "deltakit", version, about = "Exact Zariski-chamber sweeps and δ-invariant bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Md,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Run one or more scenario files.
    Run {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Restrict to these tasks (repeatable).
        #[arg(long = "task", value_name = "NAME")]
        tasks: Vec<String>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Run cross-checks and fail on expected-value mismatches.
        #[arg(long)]
        check: bool,
        /// Compare sampled decompositions against the exhaustive-support oracle.
        #[arg(long)]
        oracle: bool,
        /// Samples per sweep for pointwise verification.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
        /// Include wall time in the report.
        #[arg(long)]
        timing: bool,
    },
    /// Parse a scenario and print it in canonical form.
    Fmt { file: PathBuf },
}

fn load(path: &PathBuf) -> Result<deltakit::scenario::Scenario, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_scenario(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Fmt { file } => match load(&file) {
            Ok(s) => {
                print!("{}", s.to_json());
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("{e}");
                ExitCode::from(EXIT_INVALID as u8)
            }
        },
        Command::Run {
            files,
            tasks,
            format,
            check,
            oracle,
            samples,
            seed,
            timing,
        } => {
            let tasks = if tasks.is_empty() {
                None
            } else {
                match tasks.iter().map(|t| t.parse::<Task>()).collect::<Result<Vec<_>, _>>() {
                    Ok(t) => Some(t),
                    Err(e) => {
                        eprintln!("{e}");
                        return ExitCode::from(EXIT_INVALID as u8);
                    }
                }
            };
            let opts = RunOptions {
                tasks,
                check,
                oracle,
                samples,
                seed,
                timing,
            };
            let outcomes: Vec<Result<Report, String>> =
                files.par_iter().map(|f| load(f).map(|s| run(&s, &opts))).collect();
            let mut code = 0;
            let mut reports = Vec::new();
            for o in outcomes {
                match o {
                    Ok(r) => {
                        code = code.max(r.exit_code(check));
                        reports.push(r);
                    }
                    Err(e) => {
                        eprintln!("{e}");
                        code = code.max(EXIT_INVALID);
                    }
                }
            }
            match format {
                Format::Json if reports.len() == 1 => print!("{}", reports[0].to_json()),
                Format::Json => {
                    println!("{}", serde_json::to_string_pretty(&reports).expect("reports serialize"))
                }
                Format::Md => {
                    for r in &reports {
                        print!("{}", r.to_markdown());
                    }
                }
                Format::Csv => {
                    for (i, r) in reports.iter().enumerate() {
                        print!("{}", r.to_csv(i == 0));
                    }
                }
            }
            for r in &reports {
                for m in r.mismatches() {
                    eprintln!("{}: {} expected {} computed {}", r.scenario, m.key, m.expected, m.computed);
                }
                for c in r.failed_checks() {
                    eprintln!("{}: check failed: {} ({})", r.scenario, c.name, c.detail);
                }
                for e in &r.errors {
                    eprintln!("{}: {}: {}", r.scenario, e.task, e.message);
                }
            }
            ExitCode::from(code as u8)
        }
    }
}
