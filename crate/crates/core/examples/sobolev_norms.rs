//! Independent routes to the H^{1/2} norm of a few test functions.
use mesolab::sobolev::{
    cauchy_pair_inner, h_half_inner_closed, h_half_inner_grid, h_half_norm_sq_double_integral, GridFunction,
    GridSpec, CLOSED_FORM_K_MAX,
};
use mesolab::testfn::TestFunction;

fn main() -> mesolab::Result<()> {
    let grid = GridSpec::new(256.0, 1 << 18);
    let mut fs = TestFunction::compact_corpus();
    fs.push(TestFunction::gaussian());
    fs.push(TestFunction::cauchy_real(0.0, 1.0));
    for f in &fs {
        let g = GridFunction::from_test_function(f, grid);
        let fft = h_half_inner_grid(&g, &g).map(|v| format!("{:.8}", v.re)).unwrap_or_else(|e| format!("({e})"));
        let closed = h_half_inner_closed(f, f, CLOSED_FORM_K_MAX).map(|v| format!("{:.8}", v.re));
        let pair = cauchy_pair_inner(f, f).map(|v| format!("{:.8}", v.re));
        let double = f.support.map(|_| h_half_norm_sq_double_integral(f).map(|v| format!("{v:.8}")));
        println!("{}", f.name());
        println!("  fft             {fft}");
        println!("  closed form     {}", closed.unwrap_or_else(|| "-".into()));
        println!("  cauchy pair     {}", pair.unwrap_or_else(|| "-".into()));
        println!("  double integral {}", double.transpose()?.unwrap_or_else(|| "-".into()));
    }
    Ok(())
}
