//! FFT Hilbert transform of a bump against principal-value quadrature.
use mesolab::sobolev::{hilbert_pv_quadrature, hilbert_transform, GridFunction, GridSpec};
use mesolab::testfn::TestFunction;

fn main() -> mesolab::Result<()> {
    let f = TestFunction::bump_c2(0.0, 1.0);
    let h = hilbert_transform(&GridFunction::from_test_function(&f, GridSpec::new(256.0, 1 << 18)))?;
    println!("{:>6} {:>12} {:>12}", "x", "fft", "pv");
    for k in -6..=6 {
        let x = 0.5 * k as f64;
        let pv = hilbert_pv_quadrature(&|t| f.value(t), x, 1.0);
        println!("{x:>6.2} {:>12.8} {:>12.8}", h.at(x).re, pv);
    }
    Ok(())
}
