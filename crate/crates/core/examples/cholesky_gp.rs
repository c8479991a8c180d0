//! Cholesky sampling of the limit process and its empirical covariance.
use mesolab::processes::{gamma_covariance, ComplexGaussianSpec, GaussianSampler, HurstParam};
use mesolab::rng::{CounterRng, Domain};
use mesolab::spectral::MesoPoint;
use num_complex::Complex64;

fn main() -> mesolab::Result<()> {
    let points = [MesoPoint::new(0.0, 1.0)?, MesoPoint::new(1.0, 1.0)?, MesoPoint::new(0.0, 2.0)?];
    let sampler = GaussianSampler::new(&ComplexGaussianSpec::gamma0(&points))?;
    let m = 20_000;
    let draws: Vec<Vec<Complex64>> = (0..m)
        .map(|i| sampler.sample_values(&mut CounterRng::new(5, i, Domain::Process)))
        .collect();
    println!("rank {}", sampler.rank());
    for a in 0..points.len() {
        for b in a..points.len() {
            let emp: Complex64 = draws.iter().map(|d| d[a] * d[b].conj()).sum::<Complex64>() / m as f64;
            let k = gamma_covariance(points[a], points[b], HurstParam::ZERO)?;
            println!("({a},{b})  empirical {:+.4}{:+.4}i  kernel {:+.4}{:+.4}i", emp.re, emp.im, k.re, k.im);
        }
    }
    Ok(())
}
