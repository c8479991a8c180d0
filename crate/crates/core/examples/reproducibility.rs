//! The same seed gives the same report regardless of the worker count.
use mesolab::harness::{run_cov_v, Experiment, ExperimentConfig};

fn main() -> mesolab::Result<()> {
    let mut cfg = ExperimentConfig::for_experiment(Experiment::CovV);
    cfg.ensemble.n = 200;
    cfg.samples = 40;
    let one = run_cov_v(&cfg)?;
    cfg.workers = 4;
    let four = run_cov_v(&cfg)?;
    println!("identical: {}", one.fingerprint() == four.fingerprint());
    println!("seconds: {:.2} vs {:.2}", one.timing.total_seconds, four.timing.total_seconds);
    Ok(())
}
