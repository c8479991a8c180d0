//! GUE against an entry law with a different fourth moment.
use mesolab::ensembles::EnsembleKind;
use mesolab::harness::{run_universality, Experiment, ExperimentConfig};

fn main() -> mesolab::Result<()> {
    let mut cfg = ExperimentConfig::for_experiment(Experiment::Universality);
    cfg.ensemble.n = 400;
    cfg.samples = 120;
    cfg.compare_with = Some(EnsembleKind::ComplexUniformDisk);
    let report = run_universality(&cfg)?;
    print!("{}", report.summary());
    Ok(())
}
