use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use esopt::cli::{self, RunOptions};

/// Energy-system optimisation from JSON scenarios.
#[derive(Parser)]
#[command(name = "esopt", version)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a scenario and write its artifacts.
    Run {
        scenario: PathBuf,
        /// Artifact directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Relative gap at which branch-and-bound stops.
        #[arg(long)]
        mip_gap: Option<f64>,
        /// Stored in the solver settings; the built-in solver is deterministic and ignores it.
        #[arg(long)]
        seed: Option<u64>,
        /// Also write the compiled program as model.lp.
        #[arg(long)]
        export_lp: bool,
        /// Exit 9 unless the residual check and the solver certificate pass.
        #[arg(long)]
        verify: bool,
    },
    /// Check a scenario without solving it.
    Validate { scenario: PathBuf },
    /// Print system and program dimensions.
    Dimensions { scenario: PathBuf },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("ESOPT_LOG", "warn")).init();
    let args = Args::parse();
    ExitCode::from(dispatch(args.command) as u8)
}

fn dispatch(cmd: Command) -> i32 {
    let path = match &cmd {
        Command::Run { scenario, .. }
        | Command::Validate { scenario }
        | Command::Dimensions { scenario } => scenario,
    };
    let sc = match cli::load_scenario(path) {
        Ok(sc) => sc,
        Err(e) => {
            eprintln!("{e}");
            return e.exit_code();
        }
    };
    match cmd {
        Command::Validate { .. } => {
            print!("{}", cli::validate_scenario(&sc));
            println!("valid");
            cli::exit::OPTIMAL
        }
        Command::Dimensions { .. } => match cli::dimensions_text(&sc) {
            Ok(text) => {
                print!("{text}");
                cli::exit::OPTIMAL
            }
            Err(e) => {
                eprintln!("{e}");
                cli::exit::INVALID
            }
        },
        Command::Run {
            out,
            mip_gap,
            seed,
            export_lp,
            verify,
            ..
        } => {
            let opts = RunOptions {
                out_dir: Some(out),
                mip_gap,
                seed,
                export_lp,
                verify,
            };
            match cli::run(&sc, &opts) {
                Ok(outcome) => {
                    print!("{}", outcome.summary);
                    outcome.exit_code
                }
                Err(e) => {
                    eprintln!("{e}");
                    e.exit_code()
                }
            }
        }
    }
}
