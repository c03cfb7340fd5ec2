use std::process::ExitCode;

use cefai_cli::commands::named_instance;
use cefai_cli::document::{from_json, to_json, CandidateDocument, ErrorDocument};
use cefai_cli::{
    cmd_exists, cmd_export, cmd_solve, cmd_sweep, cmd_verify, exit, load_instance, read_input,
    run_repro, CliError, CliResult, ReproConfig, Source,
};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "cefai",
    version,
    about = "Competitive equilibria for indivisible items with unequal incomes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a CE with the picking-sequence game for the instance's case.
    Solve {
        /// Instance file, or `-` for standard input.
        instance: String,
        /// Also audit the maximin-share guarantees up to this many parts.
        #[arg(long)]
        dmax: Option<usize>,
    },
    /// Check a candidate allocation and price vector exactly.
    Verify {
        instance: String,
        /// Candidate file with `allocation` and `prices`; a solve result works.
        candidate: String,
        /// Empty-bundle agents may spend up to the price of their bundle (zero).
        #[arg(long)]
        strict_literal: bool,
        #[arg(long)]
        dmax: Option<usize>,
    },
    /// Decide whether any CE exists by exhaustive search.
    Exists { instance: String },
    /// Estimate how often a CE exists over sampled incomes.
    Sweep {
        /// `random`, `four-items-four-agents` or `five-items-two-agents`.
        #[arg(long, default_value = "random")]
        source: String,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Run every soundness and non-existence check and print the table.
    Repro {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// One tenth of the trials.
        #[arg(long)]
        quick: bool,
    },
    /// Print a named instance as an instance file.
    Export { name: String },
}

fn run(command: Command) -> CliResult<(String, i32)> {
    match command {
        Command::Solve { instance, dmax } => {
            let inst = load_instance(&read_input(&instance)?)?;
            Ok((to_json(&cmd_solve(&inst, dmax)?), exit::OK))
        }
        Command::Verify {
            instance,
            candidate,
            strict_literal,
            dmax,
        } => {
            let inst = load_instance(&read_input(&instance)?)?;
            let cand: CandidateDocument = from_json(&read_input(&candidate)?)?;
            let doc = cmd_verify(&inst, &cand, strict_literal, dmax)?;
            let code = if doc.valid {
                exit::OK
            } else {
                exit::INVALID_CE
            };
            Ok((to_json(&doc), code))
        }
        Command::Exists { instance } => {
            let inst = load_instance(&read_input(&instance)?)?;
            Ok((to_json(&cmd_exists(&inst)?), exit::OK))
        }
        Command::Sweep {
            source,
            m,
            n,
            trials,
            seed,
            jobs,
        } => {
            let src = if source == "random" {
                match (m, n) {
                    (Some(m), Some(n)) => Source::Random { m, n },
                    _ => return Err(CliError::Usage("random sweeps need --m and --n".into())),
                }
            } else {
                let inst = named_instance(&source)?;
                if m.is_some_and(|m| m != inst.m()) || n.is_some_and(|n| n != inst.n()) {
                    return Err(CliError::Usage(format!(
                        "{source} has m={}, n={}",
                        inst.m(),
                        inst.n()
                    )));
                }
                Source::Named(inst)
            };
            Ok((to_json(&cmd_sweep(&src, trials, seed, jobs)?), exit::OK))
        }
        Command::Repro { seed, jobs, quick } => {
            let config = if quick {
                ReproConfig::quick(seed, jobs)
            } else {
                ReproConfig::full(seed, jobs)
            };
            let report = run_repro(&config)?;
            let code = if report.passed() {
                exit::OK
            } else {
                exit::FAILURE
            };
            Ok((report.to_string(), code))
        }
        Command::Export { name } => Ok((cmd_export(&name)?.to_json(), exit::OK)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(cli.command) {
        Ok((text, code)) => {
            println!("{text}");
            code
        }
        Err(e) => {
            println!("{}", to_json(&ErrorDocument::from_error(&e)));
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
