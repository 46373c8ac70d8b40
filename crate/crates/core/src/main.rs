use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use photon_mode::cli::{execute, CliError, Command, Config, Options};

#[derive(Parser)]
#[command(name = "photon-mode", version, about = "Purity and mode matching of heralded single photons")]
struct Args {
    /// Configuration file of `key = value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Machine-readable CSV output only.
    #[arg(long, global = true)]
    csv: bool,
    /// Overrides `grid.n`.
    #[arg(long, global = true)]
    grid_n: Option<usize>,
    /// Use all cores; output is identical either way.
    #[arg(long, global = true)]
    parallel: bool,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Analytic and numeric purity side by side.
    Purity,
    /// Mode matching between the heralded photon and a difference-frequency wave.
    Match,
    /// Square-root purity, optimal and plane-wave match against the filter width.
    Sweep {
        #[arg(long, default_value = "mu_t")]
        axis: String,
        #[arg(long, default_value_t = 0.0)]
        from: f64,
        #[arg(long, default_value_t = 2.0)]
        to: f64,
        #[arg(long, default_value_t = 21)]
        steps: usize,
    },
    /// Overall mode-matching chain from lab parameters.
    Report,
    /// A correlation matrix as CSV (`dump.kernel` selects which).
    Dump,
}

fn run(args: Args) -> Result<String, CliError> {
    let cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            Config::parse(&text)?
        }
        None => Config::default(),
    };
    let opts = Options { csv: args.csv, grid_n: args.grid_n, parallel: args.parallel };
    let cmd = match args.command {
        Cmd::Purity => Command::Purity,
        Cmd::Match => Command::Match,
        Cmd::Sweep { axis, from, to, steps } => Command::Sweep { axis, from, to, steps },
        Cmd::Report => Command::Report,
        Cmd::Dump => Command::Dump,
    };
    execute(&cmd, &cfg, &opts)
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("photon-mode: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
