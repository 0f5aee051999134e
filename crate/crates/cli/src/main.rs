//! `walras`: run auctions, check structure, query oracles and reproduce the
//! reference examples from the command line.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "walras", version, about = "Ascending auctions and Walrasian equilibrium checks")]
struct Cli {
    /// Enumeration budget; overrides WALRAS_BUDGET.
    #[arg(long, global = true)]
    budget: Option<u64>,

    /// Write the JSON report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run an auction from zero prices and certify where it stops.
    Run {
        #[arg(long)]
        instance: PathBuf,
        /// gs, ausubel, fine, ggs2, ggs2-obstacle-first or
        /// policy:{full,min-index,max-index,random,random-item}
        #[arg(long, default_value = "gs")]
        algorithm: String,
        /// Seed for randomized policies.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a checker suite and report witnesses.
    Check {
        what: CheckKind,
        #[arg(long)]
        instance: PathBuf,
        /// Price for the matroid and lemma checks (JSON map or file); zero by default.
        #[arg(long)]
        price: Option<String>,
    },
    /// Rebuild a reference example and compare expected with observed.
    Demo { name: String },
    /// Query the brute-force oracle.
    Oracle {
        what: OracleKind,
        #[arg(long)]
        instance: PathBuf,
        /// Price (JSON map or file), for envy-free.
        #[arg(long)]
        price: Option<String>,
        /// Largest price per item for min-walrasian; the largest value by default.
        #[arg(long)]
        bound: Option<u32>,
    },
    /// Print demand, minimal demand, O* and the Lyapunov at a price.
    Inspect {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        price: Option<String>,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum CheckKind {
    Gs,
    Matroid,
    Lemmas,
    Ggs2Shape,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum OracleKind {
    Welfare,
    MinWalrasian,
    EnvyFree,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let budget = cli.budget.or_else(commands::env_budget).unwrap_or(walras::oracle::DEFAULT_BUDGET);
    let ctx = commands::Context {
        budget,
        out: cli.out,
    };
    let outcome = match cli.command {
        Command::Run {
            instance,
            algorithm,
            seed,
        } => commands::run(&ctx, &instance, &algorithm, seed),
        Command::Check {
            what,
            instance,
            price,
        } => commands::check(&ctx, what, &instance, price.as_deref()),
        Command::Demo { name } => commands::demo(&ctx, &name),
        Command::Oracle {
            what,
            instance,
            price,
            bound,
        } => commands::oracle(&ctx, what, &instance, price.as_deref(), bound),
        Command::Inspect { instance, price } => commands::inspect(&ctx, &instance, price.as_deref()),
    };
    match outcome {
        Ok(code) => code.into(),
        Err(e) => {
            eprintln!("error: {e}");
            commands::Outcome::InputError.into()
        }
    }
}
