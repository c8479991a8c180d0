//! Reconstructing a bump from its almost-analytic extension; the imaginary
//! part is minus the Hilbert transform.
use mesolab::hscalc::{hs_reconstruct, AlmostAnalyticExtension};
use mesolab::sobolev::hilbert_pv_quadrature;
use mesolab::testfn::TestFunction;

fn main() -> mesolab::Result<()> {
    let f = TestFunction::bump_c2(0.0, 1.0);
    let ext = AlmostAnalyticExtension::new(f.clone());
    println!("{:>6} {:>11} {:>11} {:>11} {:>11}", "x", "f", "re", "-H f", "im");
    for k in -6..=6 {
        let x = 0.25 * k as f64;
        let v = hs_reconstruct(&ext, x)?;
        let h = -hilbert_pv_quadrature(&|t| f.value(t), x, 1.0);
        println!("{x:>6.2} {:>11.7} {:>11.7} {:>11.7} {:>11.7}", f.value(x), v.re, h, v.im);
    }
    Ok(())
}
