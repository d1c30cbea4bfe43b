mod commands;
mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::Outcome;
use config::{CommonArgs, Settings};

/// Design-space generation for piecewise polynomial fixed-point hardware.
#[derive(Parser, Debug)]
#[command(name = "polyspace", version, about)]
struct Cli {
    #[command(flatten)]
    common: CommonArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print or save the bound table.
    Bounds {
        /// Write the table here instead of stdout.
        #[arg(long, short = 'o')]
        output: Option<PathBuf>,
    },
    /// Report feasibility per R and the smallest feasible R.
    Feasible,
    /// Generate the coefficient catalog at the minimal shift.
    Generate,
    /// Select, pack, check and emit a design.
    Build,
    /// Check a design file against the bounds.
    Verify {
        /// Design file written by `build`.
        design: PathBuf,
        /// Check this many random inputs instead of all of them.
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Also simulate the emitted datapath against the evaluator.
        #[arg(long)]
        hdl: bool,
    },
    /// Time generation with the skip rule and with the naive search.
    Bench {
        /// Range of R values, such as 6..10.
        #[arg(long)]
        sweep: Option<String>,
        /// Repetitions per measurement; the fastest is kept.
        #[arg(long, default_value_t = 1)]
        reps: u32,
    },
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    let settings = Settings::resolve(&cli.common)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = settings.threads {
        pool = pool.num_threads(n);
    }
    let pool = pool.build()?;
    let mut out: Vec<u8> = Vec::new();
    let outcome = pool.install(|| match &cli.command {
        Command::Bounds { output } => commands::bounds(&settings, output.as_deref(), &mut out),
        Command::Feasible => commands::feasible(&settings, &mut out),
        Command::Generate => commands::generate(&settings, &mut out),
        Command::Build => commands::build(&settings, &mut out),
        Command::Verify {
            design,
            samples,
            seed,
            hdl,
        } => commands::verify(&settings, design, *samples, *seed, *hdl, &mut out),
        Command::Bench { sweep, reps } => {
            commands::bench(&settings, sweep.as_deref(), *reps, &mut out)
        }
    });
    let mut stdout = std::io::stdout().lock();
    stdout.write_all(&out)?;
    stdout.flush()?;
    outcome
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
