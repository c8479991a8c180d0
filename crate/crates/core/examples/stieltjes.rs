//! Empirical Stieltjes transform against the semicircle one, from macroscopic
//! heights down to the mesoscopic scale 1/d_N.
use mesolab::ensembles::{sample_spectrum, EnsembleKind, EnsembleSpec};
use mesolab::spectral::{empirical_stieltjes, semicircle_stieltjes, MesoFrame};
use num_complex::Complex64;

fn main() -> mesolab::Result<()> {
    let n = 1000;
    let s = sample_spectrum(EnsembleSpec::new(EnsembleKind::Gue, n, 3))?;
    let frame = MesoFrame::new(0.0, 0.25, n)?;
    println!("d_N = {:.3}", frame.d_n);
    for eta in [1.0, 0.3, 0.1, 1.0 / frame.d_n, 0.01] {
        let z = Complex64::new(0.0, eta);
        let m = semicircle_stieltjes(z)?;
        let e = empirical_stieltjes(&s, z)?;
        println!(
            "eta {eta:.4}  s {:+.5}{:+.5}i  s_N - s {:.2e}  n eta |s_N - s| {:.3}",
            m.re,
            m.im,
            (e - m).norm(),
            n as f64 * eta * (e - m).norm()
        );
    }
    Ok(())
}
