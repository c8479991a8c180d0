//! Increment variances of the two log-correlated fields.
use mesolab::harness::{run_gaussian_field, Experiment, ExperimentConfig};

fn main() -> mesolab::Result<()> {
    let cfg = ExperimentConfig {
        samples: 20_000,
        ..ExperimentConfig::for_experiment(Experiment::GaussianField)
    };
    print!("{}", run_gaussian_field(&cfg)?.summary());
    Ok(())
}
