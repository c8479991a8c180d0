//! Helffer-Sjostrand calculus: almost-analytic extensions, their `dbar`,
//! and reconstruction of functions and linear statistics from resolvents.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::ensembles::Spectrum;
use crate::error::{invalid, Error, Result};
use crate::quad::{integrate_with_breaks, QuadOptions};
use crate::spectral::MesoFrame;
use crate::testfn::TestFunction;

/// Cutoff in `eta`: 1 below `eta_lo`, 0 above 1, a quintic smoothstep between.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CutoffProfile {
    pub eta_lo: f64,
}

impl Default for CutoffProfile {
    fn default() -> Self {
        CutoffProfile { eta_lo: 0.25 }
    }
}

impl CutoffProfile {
    pub fn new(eta_lo: f64) -> Result<Self> {
        if !(eta_lo > 0.0 && eta_lo < 1.0) {
            return Err(invalid("eta_lo", format!("{eta_lo} is outside (0, 1)")));
        }
        Ok(CutoffProfile { eta_lo })
    }

    fn u(&self, eta: f64) -> f64 {
        (eta - self.eta_lo) / (1.0 - self.eta_lo)
    }

    pub fn j(&self, eta: f64) -> f64 {
        if eta <= self.eta_lo {
            1.0
        } else if eta >= 1.0 {
            0.0
        } else {
            let u = self.u(eta);
            1.0 - u * u * u * (10.0 + u * (-15.0 + 6.0 * u))
        }
    }

    pub fn dj(&self, eta: f64) -> f64 {
        if eta <= self.eta_lo || eta >= 1.0 {
            0.0
        } else {
            let u = self.u(eta);
            -30.0 * u * u * (1.0 - u) * (1.0 - u) / (1.0 - self.eta_lo)
        }
    }

    /// `max |J'|`, attained at the midpoint of the transition.
    pub fn max_abs_derivative(&self) -> f64 {
        1.875 / (1.0 - self.eta_lo)
    }
}

/// `Psi_f(t, eta) = (f(t) + i (f(t + eta) - f(t))) J(eta)`.
#[derive(Clone, Debug)]
pub struct AlmostAnalyticExtension {
    pub f: TestFunction,
    pub cutoff: CutoffProfile,
}

impl AlmostAnalyticExtension {
    pub fn new(f: TestFunction) -> Self {
        AlmostAnalyticExtension {
            f,
            cutoff: CutoffProfile::default(),
        }
    }

    pub fn with_cutoff(f: TestFunction, cutoff: CutoffProfile) -> Self {
        AlmostAnalyticExtension { f, cutoff }
    }

    pub fn psi(&self, t: f64, eta: f64) -> Complex64 {
        let (f0, f1) = (self.f.value(t), self.f.value(t + eta));
        Complex64::new(f0, f1 - f0) * self.cutoff.j(eta)
    }
}

/// `(d/dt + i d/deta) Psi_f`.
pub fn dbar_psi(ext: &AlmostAnalyticExtension, t: f64, eta: f64) -> Complex64 {
    let j = ext.cutoff.j(eta);
    let dj = ext.cutoff.dj(eta);
    if j == 0.0 && dj == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let (d0, d1) = (ext.f.derivative(t), ext.f.derivative(t + eta));
    let mut out = Complex64::new(d0 - d1, d1 - d0) * j;
    if dj != 0.0 {
        let (f0, f1) = (ext.f.value(t), ext.f.value(t + eta));
        out += Complex64::new(-(f1 - f0), f0) * dj;
    }
    out
}

/// Tolerance on the estimated quadrature error of one reconstruction.
pub const HS_TOLERANCE: f64 = 1e-4;
/// Half-width of the `x` window used for functions without compact support.
pub const DECAY_WINDOW: f64 = 200.0;

fn outer_breaks(eta_lo: f64) -> Vec<f64> {
    let mut b: Vec<f64> = (1..=30).map(|k| 0.5f64.powi(k)).collect();
    b.push(eta_lo);
    b
}

/// `(1/pi) int_0^inf int dbar Psi_f(x, y) / (lambda - x - i y) dx dy`.
///
/// The real part approximates `f(lambda)`. The imaginary part is
/// `-H[f](lambda)` for the transform with multiplier `-i sgn(k)`.
pub fn hs_reconstruct(ext: &AlmostAnalyticExtension, lambda: f64) -> Result<Complex64> {
    let (a, b) = ext
        .f
        .support
        .unwrap_or((lambda - DECAY_WINDOW, lambda + DECAY_WINDOW));
    let inner_opts = QuadOptions {
        abs_tol: 1e-10,
        rel_tol: 1e-9,
        max_intervals: 400,
    };
    let outer_opts = QuadOptions {
        abs_tol: 1e-8,
        rel_tol: 1e-8,
        max_intervals: 400,
    };
    let kinks = &ext.f.kinks;
    let mut worst_inner = 0.0f64;
    let outer = integrate_with_breaks(
        |y| {
            // dbar Psi vanishes unless x or x + y lies in [a, b].
            let (lo, hi) = (a - y, b);
            if hi <= lo {
                return Complex64::new(0.0, 0.0);
            }
            let mut xs: Vec<f64> = vec![a, b - y, lambda];
            for &k in kinks {
                xs.push(k);
                xs.push(k - y);
            }
            // x = lambda + y sinh(u) flattens the pole at x = lambda.
            let to_u = |x: f64| ((x - lambda) / y).asinh();
            let ubreaks: Vec<f64> = xs.iter().map(|&x| to_u(x)).collect();
            let r = integrate_with_breaks(
                |u| {
                    let (s, c) = (u.sinh(), u.cosh());
                    let x = lambda + y * s;
                    -dbar_psi(ext, x, y) * c / Complex64::new(s, 1.0)
                },
                to_u(lo),
                to_u(hi),
                &ubreaks,
                &inner_opts,
            );
            worst_inner = worst_inner.max(r.error);
            r.value
        },
        0.0,
        1.0,
        &outer_breaks(ext.cutoff.eta_lo),
        &outer_opts,
    );
    let estimate = (outer.error + worst_inner) / PI;
    if !outer.value.re.is_finite() || estimate > HS_TOLERANCE {
        return Err(Error::Quadrature {
            tolerance: HS_TOLERANCE,
            estimate,
        });
    }
    Ok(outer.value / PI)
}

/// Linear statistic `sum_j f(d_N (E - lambda_j))` through the
/// Helffer-Sjostrand integral against the rescaled resolvent.
pub fn hs_linear_statistic(spectrum: &Spectrum, frame: &MesoFrame, ext: &AlmostAnalyticExtension) -> Result<f64> {
    let mut total = 0.0;
    for &l in &spectrum.eigenvalues {
        total += hs_reconstruct(ext, frame.rescale(l))?.re;
    }
    Ok(total)
}

/// Slope of `log max_t |dbar Psi_f(t, eta)|` against `log eta`, by least squares.
pub fn dbar_decay_exponent(ext: &AlmostAnalyticExtension, ts: &[f64], etas: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = etas
        .iter()
        .map(|&e| {
            let m = ts.iter().map(|&t| dbar_psi(ext, t, e).norm()).fold(0.0, f64::max);
            (e.ln(), m.ln())
        })
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
