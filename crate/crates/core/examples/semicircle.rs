//! Histogram of one GUE spectrum against the semicircle density.
use mesolab::ensembles::{sample_spectrum, EnsembleKind, EnsembleSpec};
use mesolab::spectral::{semicircle_density, semicircle_ks};

fn main() -> mesolab::Result<()> {
    let n = 1000;
    let s = sample_spectrum(EnsembleSpec::new(EnsembleKind::Gue, n, 7))?;
    println!("n = {n}, KS distance {:.4}", semicircle_ks(&s));
    let bins = 20;
    let width = 4.4 / bins as f64;
    let mut counts = vec![0usize; bins];
    for &l in &s.eigenvalues {
        let k = ((l + 2.2) / width).floor();
        if k >= 0.0 && (k as usize) < bins {
            counts[k as usize] += 1;
        }
    }
    println!("{:>7} {:>9} {:>9}", "x", "empirical", "density");
    for (k, c) in counts.iter().enumerate() {
        let x = -2.2 + (k as f64 + 0.5) * width;
        println!("{x:>7.2} {:>9.4} {:>9.4}", *c as f64 / (n as f64 * width), semicircle_density(x));
    }
    Ok(())
}
