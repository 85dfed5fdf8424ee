use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use tentropy_cli::suites::{Profile, Suite};
use tentropy_cli::{cmd_certify, cmd_lambda, cmd_random_systems, cmd_tau, cmd_validate, Options, Route, EXIT_INPUT};

#[derive(Parser)]
#[command(name = "tentropy", version, about = "Spectral potential and t-entropy certification on finite systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Largest iterate count used by sweeps and searches.
    #[arg(long, global = true, default_value_t = 12)]
    n_max: usize,

    /// Comma-separated ε grid replacing the built-in ones.
    #[arg(long, global = true, value_delimiter = ',')]
    eps: Option<Vec<f64>>,

    #[arg(long, global = true, env = "TENTROPY_SEED", default_value_t = 0)]
    seed: u64,

    /// Pass tolerance replacing the built-in ones.
    #[arg(long, global = true)]
    tolerance: Option<f64>,

    #[arg(long, global = true, value_enum, default_value = "quick")]
    profile: Profile,

    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Check a system file.
    Validate { system: PathBuf },
    /// Spectral potential of a potential file.
    Lambda { system: PathBuf, phi: PathBuf },
    /// t-entropy of a functional file.
    Tau {
        system: PathBuf,
        mu: PathBuf,
        #[arg(long, value_enum, default_value = "both")]
        route: Route,
    },
    /// Run certification suites.
    Certify {
        system: PathBuf,
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        /// Functional added to the sampled ones.
        #[arg(long)]
        mu: Option<PathBuf>,
    },
    /// Generate random valid system files.
    RandomSystems {
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 6)]
        max_atoms: usize,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
}

fn main() -> ExitCode {
    // usage errors share the input-error status; 2 is reserved for invalid systems
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT as u8 } else { 0 });
        }
    };
    let opts = Options {
        n_max: cli.n_max,
        eps: cli.eps,
        seed: cli.seed,
        tolerance: cli.tolerance,
        profile: cli.profile,
    };
    let run = match &cli.command {
        Command::Validate { system } => cmd_validate(system, &opts),
        Command::Lambda { system, phi } => cmd_lambda(system, phi, &opts),
        Command::Tau { system, mu, route } => cmd_tau(system, mu, *route, &opts),
        Command::Certify { system, suite, mu } => cmd_certify(system, *suite, mu.as_deref(), &opts),
        Command::RandomSystems {
            count,
            max_atoms,
            out_dir,
        } => cmd_random_systems(*count, *max_atoms, out_dir, &opts),
    };
    match run {
        Ok(run) => {
            let text = run.report.to_text();
            match &cli.out {
                Some(path) => {
                    if let Err(e) = fs::write(path, text) {
                        eprintln!("tentropy: {}: {e}", path.display());
                        return ExitCode::from(EXIT_INPUT as u8);
                    }
                }
                None => print!("{text}"),
            }
            ExitCode::from(run.exit as u8)
        }
        Err(e) => {
            eprintln!("tentropy: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
