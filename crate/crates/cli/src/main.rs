// Copyright 2026 the Holoknot Authors
// SPDX-License-Identifier: Apache-2.0 OR MIT

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use holoknot_cli::*;

/// Invariants of framed holonomic knots given by functions on the circle.
#[derive(Parser, Debug)]
#[command(name = "holoknot", version)]
struct Cli {
    /// Base sampling grid.
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Genericity threshold (critical margin, value gap, x2 gap).
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    #[arg(long = "render-scale", global = true, default_value_t = 1.0)]
    render_scale: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Invariant report of a function file.
    Invariants { file: PathBuf },
    /// Event trace of the straight path between two function files.
    Path { from: PathBuf, to: PathBuf },
    /// SVG drawing of the diagram.
    Render { file: PathBuf },
    /// A function with prescribed (W, S).
    Generate {
        #[arg(long, allow_hyphen_values = true)]
        w: i64,
        #[arg(long, allow_hyphen_values = true)]
        s: i64,
    },
    /// Two functions of one knot class and equal (W, S) with different S_k.
    SearchPair {
        #[arg(long, allow_hyphen_values = true)]
        w: i64,
        #[arg(long, allow_hyphen_values = true)]
        s: i64,
        #[arg(long)]
        knot: Option<String>,
        #[arg(long, default_value_t = 20000)]
        budget: usize,
    },
    /// Deform into a closed braid and check the split identity.
    Normalize { file: PathBuf },
    /// Fast consistency suites.
    Selftest,
}

fn threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("HOLOKNOT_THREADS") else { return Ok(()) };
    let n: usize = v.parse().map_err(|_| Failure::input(format!("HOLOKNOT_THREADS={v} is not a count")))?;
    // a pool built earlier in the process keeps its size
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn run(cli: Cli) -> CmdResult<Outcome> {
    threads()?;
    let name = match &cli.command {
        Command::Invariants { .. } => "invariants",
        Command::Path { .. } => "path",
        Command::Render { .. } => "render",
        Command::Generate { .. } => "generate",
        Command::SearchPair { .. } => "search-pair",
        Command::Normalize { .. } => "normalize",
        Command::Selftest => "selftest",
    };
    let mut cfg = RunConfig::new(name, cli.grid, cli.tol, cli.seed, cli.out, cli.render_scale);
    match cli.command {
        Command::Invariants { file } => {
            cfg.inputs = vec![file.clone()];
            cmd_invariants(&cfg, &file)
        }
        Command::Path { from, to } => {
            cfg.inputs = vec![from.clone(), to.clone()];
            cmd_path(&cfg, &from, &to)
        }
        Command::Render { file } => {
            cfg.inputs = vec![file.clone()];
            cmd_render(&cfg, &file)
        }
        Command::Generate { w, s } => cmd_generate(&cfg, w, s),
        Command::SearchPair { w, s, knot, budget } => cmd_search_pair(&cfg, w, s, knot.as_deref(), budget),
        Command::Normalize { file } => {
            cfg.inputs = vec![file.clone()];
            cmd_normalize(&cfg, &file)
        }
        Command::Selftest => cmd_selftest(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_INPUT as u8),
            };
        }
    };
    match run(cli) {
        Ok(outcome) => {
            println!("{}", outcome.path.display());
            if outcome.ok {
                ExitCode::SUCCESS
            } else {
                eprintln!("holoknot: check failed, see {}", outcome.path.display());
                ExitCode::from(EXIT_INPUT as u8)
            }
        }
        Err(f) => {
            eprintln!("holoknot: {}", f.message);
            if let Some(d) = &f.diagnostics {
                eprintln!("{}", serde_json::to_string_pretty(d).expect("diagnostics serialize"));
            }
            ExitCode::from(f.code as u8)
        }
    }
}
