use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use temporal_loops::cli::{run, Command, RunConfig, DEFAULT_SEED};
use temporal_loops::ops::OpKind;

#[derive(Parser)]
#[command(name = "tloop", version, about = "Closures, pseudo-loops and loop conditions for temporal relations")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Operation generating the clone, e.g. min, dual:mi, ll, const.
    #[arg(long, global = true)]
    clone: Option<OpKind>,
    #[arg(long, global = true)]
    k: Option<usize>,
    /// Orbit budget for closures [default: 20000, loopcond 1000000].
    #[arg(long = "budget-orbits", global = true)]
    budget_orbits: Option<usize>,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// List all weak orders of length k.
    Orbits,
    /// Preservation table over the classified operations.
    Classify { file: PathBuf },
    /// Close a relation file under --clone.
    Closure { file: PathBuf },
    /// Close under --clone and search for a pseudo-loop.
    Pseudoloop { file: PathBuf },
    /// Verify the pseudo-loop condition of a structure at dimension k.
    Loopcond {
        file: Option<PathBuf>,
        #[arg(long)]
        preset: Option<String>,
        /// Record wall-clock timings in the report.
        #[arg(long)]
        timings: bool,
    },
    /// Relation generated by random tuples.
    Random {
        #[arg(long)]
        arity: usize,
        #[arg(long, default_value_t = 3)]
        count: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, inputs, preset, timings) = match cli.command {
        Cmd::Orbits => (Command::Orbits, vec![], None, false),
        Cmd::Classify { file } => (Command::Classify, vec![file], None, false),
        Cmd::Closure { file } => (Command::Closure, vec![file], None, false),
        Cmd::Pseudoloop { file } => (Command::Pseudoloop, vec![file], None, false),
        Cmd::Loopcond { file, preset, timings } => (Command::Loopcond, file.into_iter().collect(), preset, timings),
        Cmd::Random { arity, count } => (Command::Random { arity, count }, vec![], None, false),
    };
    let cfg = RunConfig {
        command,
        inputs,
        clone: cli.clone,
        k: cli.k,
        budget: cli.budget_orbits,
        seed: cli.seed,
        out: cli.out,
        preset,
        timings,
    };
    match run(&cfg) {
        Ok(text) => {
            if cfg.out.is_none() {
                print!("{text}");
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
