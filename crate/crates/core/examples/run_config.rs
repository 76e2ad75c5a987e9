//! Drives the batch runner from code: builds a config, runs it into a
//! temporary directory and reads the report back.
//!
//!     cargo run --release --example run_config

use projlab::experiment::{run_with_threads, ExperimentConfig, ExperimentKind, RunReport, SourceSpec};

fn main() -> projlab::Result<()> {
    let mut cfg = ExperimentConfig::new(ExperimentKind::Converse, 2024);
    cfg.source = SourceSpec::Isotropic;
    cfg.n_list = vec![50, 200, 800];
    cfg.converse.pairs = 50_000;
    cfg.converse.laplace_samples = 50_000;
    println!("config:\n{}", cfg.to_json());

    let dir = std::env::temp_dir().join("projlab-run-config-example");
    let report = run_with_threads(&cfg, &dir, 2)?;
    let back = RunReport::load(&dir)?;
    assert_eq!(back.config_digest, cfg.digest());
    print!("{}", back.render());
    println!("{} of {} checks passed", report.checks.iter().filter(|c| c.passed).count(), report.checks.len());
    Ok(())
}
