//! Series construction of the limit process: truncated covariance against
//! the closed form, and one sample path along Im z = 1.
use mesolab::processes::{gamma_covariance, series_covariance, HurstParam, SeriesOptions, SeriesSampler};
use mesolab::rng::{CounterRng, Domain};
use mesolab::spectral::MesoPoint;

fn main() -> mesolab::Result<()> {
    let (a, b) = (MesoPoint::new(0.0, 1.0)?, MesoPoint::new(1.5, 0.5)?);
    for h in [0.0, 0.25, 0.5] {
        let h = HurstParam::new(h)?;
        let exact = gamma_covariance(a, b, h)?;
        for terms in [10, 100, 2000] {
            let s = series_covariance(a, b, h, terms, h.default_normalization());
            println!("H {:.2}  K {terms:>5}  |series - kernel| {:.2e}", h.value(), (s - exact).norm());
        }
    }
    let points: Vec<MesoPoint> = (0..9).map(|k| MesoPoint::new(-2.0 + 0.5 * k as f64, 1.0)).collect::<Result<_, _>>()?;
    let sampler = SeriesSampler::new(&points, HurstParam::ZERO, SeriesOptions::for_hurst(HurstParam::ZERO))?;
    let path = sampler.sample(&mut CounterRng::new(1, 0, Domain::Process));
    for (p, v) in path.points.iter().zip(&path.values) {
        println!("tau {:+.1}  {:+.4}{:+.4}i", p.tau, v.re, v.im);
    }
    Ok(())
}
