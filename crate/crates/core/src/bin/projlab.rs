//! Command-line front end. Exit status: 0 when every gate passes, 2 when some
//! gate fails, 1 on configuration or I/O errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use projlab::experiment::{resolve_out_dir, run, run_with_threads, ExperimentConfig, Profile, RunReport, OUT_DIR_ENV};

#[derive(Parser)]
#[command(name = "projlab", version, about = "Random-projection laboratory: experiment runner and oracle suites")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config.
    Run {
        config: PathBuf,
        /// Output directory (overrides the PROJLAB_OUT_DIR variable and the config).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Replaces the config's master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads; defaults to the number of cores.
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long, value_enum)]
        profile: Option<Profile>,
    },
    /// Pretty-print the report of a finished run.
    Report { run_dir: PathBuf },
    /// Run the algebra and metrics oracle suites.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    match dispatch(Cli::parse().command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(command: Command) -> projlab::Result<bool> {
    match command {
        Command::Run { config, out, seed, threads, profile } => {
            let mut cfg = ExperimentConfig::from_file(&config)?;
            if let Some(seed) = seed {
                cfg.master_seed = seed;
            }
            if let Some(profile) = profile {
                cfg.profile = profile;
            }
            let dir = resolve_out_dir(out.as_deref(), &cfg);
            let report = match threads {
                Some(t) => run_with_threads(&cfg, &dir, t)?,
                None => run(&cfg, &dir)?,
            };
            print!("{}", report.render());
            println!("written to {} (override with --out or {OUT_DIR_ENV})", dir.display());
            Ok(report.passed)
        }
        Command::Report { run_dir } => {
            let report = RunReport::load(&run_dir)?;
            print!("{}", report.render());
            Ok(true)
        }
        Command::Selftest { seed } => {
            let suites = projlab::selftest::run_all(seed)?;
            for s in &suites {
                let mark = if s.passed() { "PASS" } else { "FAIL" };
                println!("{mark}  {:<36} n={:<6} max error {:.3e} (tol {:.0e})", s.name, s.instances, s.max_error, s.tolerance);
            }
            Ok(suites.iter().all(|s| s.passed()))
        }
    }
}
