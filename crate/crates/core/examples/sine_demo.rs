//! Resolvent covariance on the microscopic scale, written out for plotting.
use mesolab::harness::{run_sine_kernel_demo, Experiment, ExperimentConfig};

fn main() -> mesolab::Result<()> {
    let mut cfg = ExperimentConfig::for_experiment(Experiment::SineKernel);
    cfg.ensemble.n = 400;
    cfg.frame.d_n = Some(400.0);
    cfg.samples = 60;
    let report = run_sine_kernel_demo(&cfg)?;
    let out = std::env::temp_dir().join("mesolab_sine_demo");
    report.write(&out)?;
    for row in &report.plots[0].1.rows {
        println!("dt {:.1}  |cov| {:.4}  smoothed {:+.4}  sinc^2 {:.4}", row[0], row[3], row[5], row[7]);
    }
    println!("wrote {}", out.display());
    Ok(())
}
