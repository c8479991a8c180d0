//! A small covariance run for the centered resolvent trace: n = 400, M = 120.
use mesolab::harness::{run_cov_v, Experiment, ExperimentConfig};

fn main() -> mesolab::Result<()> {
    let mut cfg = ExperimentConfig::for_experiment(Experiment::CovV);
    cfg.ensemble.n = 400;
    cfg.samples = 120;
    let report = run_cov_v(&cfg)?;
    print!("{}", report.summary());
    println!("exit status would be {}", report.exit_code());
    Ok(())
}
