use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use coxtop_cli::{execute, explain, load_config, load_report, presets_text, report_json, summarize};

/// Batch verifier for Coxeter-group, braid-monoid, and word-poset structure.
#[derive(Parser)]
#[command(name = "coxtop", version, about)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the suites selected by a config file and emit a JSON report.
    Run {
        /// Key-value config file (system, suites, budgets, seed).
        #[arg(long)]
        config: PathBuf,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Suppress per-suite progress on stderr.
        #[arg(long)]
        quiet: bool,
    },
    /// Show one instance of a previously written report in detail.
    Explain {
        /// Report file produced by `coxtop run`.
        #[arg(long)]
        report: PathBuf,
        /// Instance id, optionally qualified as `suite/id`.
        #[arg(long)]
        id: String,
    },
    /// List built-in Coxeter matrices and their default budgets.
    Presets,
}

fn main() -> ExitCode {
    match Cli::parse().cmd {
        Cmd::Run { config, out, quiet } => {
            let cfg = match load_config(&config) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("{e}");
                    return ExitCode::from(2);
                }
            };
            let report = match execute(&cfg, quiet) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("{e}");
                    return ExitCode::from(2);
                }
            };
            let json = report_json(&report);
            if let Some(path) = out {
                if let Err(e) = std::fs::write(&path, &json) {
                    eprintln!("cannot write {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            } else {
                print!("{json}");
            }
            ExitCode::from(summarize(&report) as u8)
        }
        Cmd::Explain { report, id } => {
            let doc = match load_report(&report) {
                Ok(d) => d,
                Err(e) => {
                    eprintln!("{e}");
                    return ExitCode::from(2);
                }
            };
            match explain(&doc, &id) {
                Some(text) => {
                    println!("{text}");
                    ExitCode::SUCCESS
                }
                None => {
                    eprintln!("no instance with id `{id}` in {}", report.display());
                    ExitCode::from(2)
                }
            }
        }
        Cmd::Presets => {
            print!("{}", presets_text());
            ExitCode::SUCCESS
        }
    }
}
