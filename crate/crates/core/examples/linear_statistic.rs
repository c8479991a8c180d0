//! Variance of a mesoscopic linear statistic next to its H^{1/2} target.
use mesolab::harness::{h_half_targets, run_var_meso, Experiment, ExperimentConfig};
use mesolab::testfn::TestFunction;

fn main() -> mesolab::Result<()> {
    let f = TestFunction::bump_c2(0.0, 1.0);
    for t in h_half_targets(&f)? {
        println!("target {:<16} {:.6}  ({})", t.label, t.value.re, t.citation);
    }
    let mut cfg = ExperimentConfig::for_experiment(Experiment::VarMeso);
    cfg.ensemble.n = 400;
    cfg.samples = 150;
    let report = run_var_meso(&cfg, &f)?;
    print!("{}", report.summary());
    Ok(())
}
