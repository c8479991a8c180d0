use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use mesolab::ensembles::{sample_spectrum, EnsembleKind, EnsembleSpec};
use mesolab::harness::{self, EstimateReport, Experiment, ExperimentConfig, TestFunctionSpec};
use mesolab::processes::{
    B0Sampler, ComplexGaussianSpec, GaussianSampler, HurstParam, IntegratedGammaSampler, SeriesOptions,
    SeriesSampler,
};
use mesolab::rng::{CounterRng, Domain};
use mesolab::spectral::{semicircle_ks, MesoPoint};
use mesolab::Result;

#[derive(Parser)]
#[command(name = "mesolab", version, about = "Mesoscopic eigenvalue statistics of Wigner matrices")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON experiment configuration; flags below override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Number of Monte Carlo samples M.
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Matrix dimension.
    #[arg(long, global = true)]
    n: Option<usize>,
    /// GUE, FourPhase or ComplexUniformDisk.
    #[arg(long, global = true)]
    ensemble: Option<EnsembleKind>,
    #[arg(long, global = true)]
    gamma: Option<f64>,
    #[arg(long, global = true)]
    energy: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Draw one matrix and write its spectrum.
    Sample {
        #[arg(long, default_value_t = 0)]
        index: u64,
    },
    /// Covariance of the resolvent-trace process on a grid.
    CovV,
    /// Variance of a mesoscopic linear statistic.
    VarMeso {
        #[arg(long)]
        function: Option<FunctionArg>,
    },
    /// Covariance differences between two ensembles.
    Universality {
        #[arg(long)]
        compare: Option<EnsembleKind>,
    },
    /// Moment and KS diagnostics of standardized statistics.
    Normality {
        #[arg(long)]
        function: Option<FunctionArg>,
    },
    /// Increments of the log-characteristic process.
    LogProcess {
        #[arg(long, value_delimiter = ',')]
        taus: Option<Vec<f64>>,
        #[arg(long)]
        eta: Option<f64>,
    },
    /// Resolvent covariance at microscopic scale (exploratory).
    SineDemo,
    /// KS distance of each spectrum to the semicircle.
    SemicircleKs,
    /// Draw Gaussian process paths.
    GpSample {
        #[arg(long, value_enum, default_value_t = Method::Series)]
        method: Method,
        #[arg(long, default_value_t = 0.0)]
        hurst: f64,
        #[arg(long, value_delimiter = ',', default_value = "0,0.5,1,2")]
        taus: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        eta: f64,
        #[arg(long, default_value_t = 1)]
        paths: usize,
    },
    /// Helffer-Sjostrand reconstruction checks on the compact corpus.
    HsVerify,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    /// Truncated Cayley series.
    Series,
    /// Cholesky factor of the limit kernel.
    Cholesky,
    /// Regularized log-correlated field.
    B0,
    /// Integral of the limit process along a horizontal line.
    Integrated,
}

#[derive(Clone, Copy, ValueEnum)]
enum FunctionArg {
    CauchyReal,
    CauchyImag,
    BumpC2,
    BumpHolder,
    BumpSmooth,
    Gaussian,
}

impl FunctionArg {
    fn spec(self) -> TestFunctionSpec {
        let (center, half_width) = (0.0, 1.0);
        match self {
            FunctionArg::CauchyReal => TestFunctionSpec::CauchyReal { tau: 0.0, eta: 1.0 },
            FunctionArg::CauchyImag => TestFunctionSpec::CauchyImag { tau: 0.0, eta: 1.0 },
            FunctionArg::BumpC2 => TestFunctionSpec::BumpC2 { center, half_width },
            FunctionArg::BumpHolder => TestFunctionSpec::BumpHolder { center, half_width },
            FunctionArg::BumpSmooth => TestFunctionSpec::BumpSmooth { center, half_width },
            FunctionArg::Gaussian => TestFunctionSpec::Gaussian,
        }
    }
}

fn experiment_of(cmd: &Command) -> Option<Experiment> {
    Some(match cmd {
        Command::CovV => Experiment::CovV,
        Command::VarMeso { .. } => Experiment::VarMeso,
        Command::Universality { .. } => Experiment::Universality,
        Command::Normality { .. } => Experiment::Normality,
        Command::LogProcess { .. } => Experiment::LogProcess,
        Command::SineDemo => Experiment::SineKernel,
        Command::SemicircleKs => Experiment::SemicircleKS,
        Command::HsVerify => Experiment::HsVerify,
        Command::Sample { .. } | Command::GpSample { .. } => return None,
    })
}

fn build_config(common: &Common, experiment: Experiment) -> Result<ExperimentConfig> {
    let mut cfg = match &common.config {
        Some(p) => ExperimentConfig::from_json_file(p)?,
        None => ExperimentConfig::for_experiment(experiment),
    };
    cfg.experiment = experiment;
    if let Some(s) = common.seed {
        cfg.master_seed = s;
    }
    if let Some(w) = common.workers {
        cfg.workers = w;
    }
    if let Some(m) = common.samples {
        cfg.samples = m;
    }
    if let Some(n) = common.n {
        cfg.ensemble.n = n;
        if experiment == Experiment::SineKernel {
            cfg.frame.d_n = Some(n as f64);
        }
    }
    if let Some(k) = common.ensemble {
        cfg.ensemble.kind = k;
    }
    if let Some(g) = common.gamma {
        cfg.frame.gamma = g;
    }
    if let Some(e) = common.energy {
        cfg.frame.energy = e;
    }
    Ok(cfg)
}

fn finish(report: &EstimateReport, out: &Path) -> Result<u8> {
    report.write(out)?;
    print!("{}", report.summary());
    println!("wrote {}", out.display());
    Ok(report.exit_code() as u8)
}

fn run(cli: Cli) -> Result<u8> {
    let common = &cli.common;
    if let Some(experiment) = experiment_of(&cli.command) {
        let mut cfg = build_config(common, experiment)?;
        match &cli.command {
            Command::VarMeso { function } | Command::Normality { function } => {
                if let Some(f) = function {
                    cfg.test_function = Some(f.spec());
                }
            }
            Command::Universality { compare } => {
                if compare.is_some() {
                    cfg.compare_with = *compare;
                }
            }
            Command::LogProcess { taus, eta } => {
                if let Some(t) = taus {
                    cfg.taus = t.clone();
                }
                if let Some(e) = eta {
                    cfg.eta = *e;
                }
            }
            _ => {}
        }
        let out = common.out.clone().unwrap_or_else(|| harness::default_out_dir(experiment));
        let report = harness::run(&cfg)?;
        return finish(&report, &out);
    }
    let out = common.out.clone().unwrap_or_else(|| PathBuf::from("out"));
    let seed = common.seed.unwrap_or(ExperimentConfig::default().master_seed);
    match cli.command {
        Command::Sample { index } => {
            let spec = EnsembleSpec::new(
                common.ensemble.unwrap_or(EnsembleKind::Gue),
                common.n.unwrap_or(1000),
                seed,
            )
            .with_sample(index);
            let s = sample_spectrum(spec)?;
            std::fs::create_dir_all(&out)?;
            let path = s.write_to_dir(&out)?;
            println!("ks distance to semicircle {:.5}", semicircle_ks(&s));
            println!("wrote {}", path.display());
        }
        Command::GpSample {
            method,
            hurst,
            taus,
            eta,
            paths,
        } => {
            std::fs::create_dir_all(&out)?;
            gp_sample(method, hurst, &taus, eta, paths, seed, &out)?;
        }
        _ => unreachable!("experiment subcommands handled above"),
    }
    Ok(0)
}

fn gp_sample(method: Method, hurst: f64, taus: &[f64], eta: f64, paths: usize, seed: u64, out: &Path) -> Result<()> {
    let rng = |i: usize| CounterRng::new(seed, i as u64, Domain::Process);
    let meta = serde_json::json!({ "hurst": hurst, "taus": taus, "eta": eta, "seed": seed });
    match method {
        Method::Series | Method::Cholesky => {
            let points: Vec<MesoPoint> = taus.iter().map(|&t| MesoPoint::new(t, eta)).collect::<Result<_>>()?;
            let h = HurstParam::new(hurst)?;
            let series = matches!(method, Method::Series)
                .then(|| SeriesSampler::new(&points, h, SeriesOptions::for_hurst(h)))
                .transpose()?;
            let chol = matches!(method, Method::Cholesky)
                .then(|| {
                    let spec = ComplexGaussianSpec::from_kernel(&points, |a, b| {
                        mesolab::processes::gamma_covariance(a, b, h).unwrap_or(Complex64::new(f64::NAN, 0.0))
                    });
                    GaussianSampler::new(&spec)
                })
                .transpose()?;
            for i in 0..paths {
                let path = match (&series, &chol) {
                    (Some(s), _) => s.sample(&mut rng(i)),
                    (_, Some(c)) => c.sample(&mut rng(i)),
                    _ => unreachable!(),
                };
                let file = out.join(format!("path_{i}.csv"));
                path.write(&file, &meta)?;
                println!("wrote {}", file.display());
            }
        }
        Method::B0 | Method::Integrated => {
            let draw: Box<dyn Fn(usize) -> Vec<f64>> = if matches!(method, Method::B0) {
                let s = B0Sampler::new(taus, eta)?;
                Box::new(move |i| s.sample(&mut rng(i)))
            } else {
                let s = IntegratedGammaSampler::new(taus, eta, harness::FIELD_STEP)?;
                Box::new(move |i| s.sample(&mut rng(i)))
            };
            let mut table = harness::Table::new(&[]);
            table.header = std::iter::once("tau".to_string())
                .chain((0..paths).map(|i| format!("path_{i}")))
                .collect();
            let drawn: Vec<Vec<f64>> = (0..paths).map(&draw).collect();
            for (k, &t) in taus.iter().enumerate() {
                table.rows.push(std::iter::once(t).chain(drawn.iter().map(|p| p[k])).collect());
            }
            let file = out.join("paths.csv");
            table.write_csv(&file)?;
            std::fs::write(out.join("paths.json"), serde_json::to_string_pretty(&meta)?)?;
            println!("wrote {}", file.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
