//! Finite-N spectral observables: Stieltjes transforms, the mesoscopic
//! resolvent trace, linear statistics and the log-characteristic process.

use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ensembles::Spectrum;
use crate::error::{invalid, Result};
use crate::quad::{integrate, integrate_with_breaks, QuadOptions};
use crate::testfn::TestFunction;

/// Where a frame sits relative to the proven mesoscopic regime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// `0 < gamma < 1/3`.
    Theorem,
    /// `gamma >= 1/3`, still mesoscopic.
    OutsideProvenRegime,
    /// `d_N = N`.
    Microscopic,
}

/// Observation window `(E, gamma, d_N)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MesoFrame {
    pub energy: f64,
    pub gamma: f64,
    pub d_n: f64,
    pub n: usize,
}

impl MesoFrame {
    /// `d_N = N^gamma`.
    pub fn new(energy: f64, gamma: f64, n: usize) -> Result<Self> {
        if !(0.0 < gamma && gamma < 1.0) {
            return Err(invalid("gamma", format!("{gamma} is outside (0, 1)")));
        }
        Self::with_scale(energy, gamma, (n as f64).powf(gamma), n)
    }

    /// Explicit `d_N`; `gamma` is recorded as given.
    pub fn with_scale(energy: f64, gamma: f64, d_n: f64, n: usize) -> Result<Self> {
        if !(energy > -2.0 && energy < 2.0) {
            return Err(invalid("energy", format!("{energy} is outside the bulk (-2, 2)")));
        }
        if n == 0 {
            return Err(invalid("n", "must be positive"));
        }
        if !(d_n > 1.0 && d_n <= n as f64) {
            return Err(invalid("d_n", format!("{d_n} must satisfy 1 < d_N <= n = {n}")));
        }
        Ok(MesoFrame {
            energy,
            gamma,
            d_n,
            n,
        })
    }

    /// `d_N = N`, the scale of individual eigenvalue spacings.
    pub fn microscopic(energy: f64, n: usize) -> Result<Self> {
        Self::with_scale(energy, 1.0, n as f64, n)
    }

    pub fn regime(&self) -> Regime {
        if self.d_n >= self.n as f64 {
            Regime::Microscopic
        } else if self.gamma < 1.0 / 3.0 {
            Regime::Theorem
        } else {
            Regime::OutsideProvenRegime
        }
    }

    /// The unscaled spectral parameter `E + z / d_N`.
    pub fn spectral_point(&self, p: MesoPoint) -> Complex64 {
        Complex64::new(self.energy, 0.0) + p.z() / self.d_n
    }

    /// `d_N (E - lambda)`.
    pub fn rescale(&self, lambda: f64) -> f64 {
        self.d_n * (self.energy - lambda)
    }
}

/// A point `tau + i eta` of the upper half-plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MesoPoint {
    pub tau: f64,
    pub eta: f64,
}

impl MesoPoint {
    pub fn new(tau: f64, eta: f64) -> Result<Self> {
        if !(eta > 0.0) || !tau.is_finite() || !eta.is_finite() {
            return Err(invalid(
                "eta",
                format!("point {tau} + {eta}i is not in the upper half-plane"),
            ));
        }
        Ok(MesoPoint { tau, eta })
    }

    pub fn z(&self) -> Complex64 {
        Complex64::new(self.tau, self.eta)
    }

    pub fn shifted(&self, t: f64) -> Self {
        MesoPoint {
            tau: self.tau + t,
            eta: self.eta,
        }
    }
}

/// Semicircle density `sqrt(4 - x^2) / (2 pi)` on `[-2, 2]`.
pub fn semicircle_density(x: f64) -> f64 {
    if x.abs() >= 2.0 {
        0.0
    } else {
        (4.0 - x * x).sqrt() / (2.0 * PI)
    }
}

/// Semicircle distribution function.
pub fn semicircle_cdf(x: f64) -> f64 {
    if x <= -2.0 {
        0.0
    } else if x >= 2.0 {
        1.0
    } else {
        0.5 + x * (4.0 - x * x).sqrt() / (4.0 * PI) + (x / 2.0).asin() / PI
    }
}

/// Closed-form Stieltjes transform of the semicircle on the upper half-plane.
pub fn semicircle_stieltjes(z: Complex64) -> Result<Complex64> {
    if !(z.im > 0.0) {
        return Err(invalid("z", format!("{z} is not in the upper half-plane")));
    }
    // sqrt(z - 2) sqrt(z + 2) is the branch of sqrt(z^2 - 4) that behaves like z at infinity.
    let root = (z - 2.0).sqrt() * (z + 2.0).sqrt();
    let s = (-z + root) * 0.5;
    Ok(if s.im > 0.0 { s } else { (-z - root) * 0.5 })
}

/// The defining integral of the semicircle Stieltjes transform, evaluated
/// by adaptive quadrature after `x = 2 sin(theta)`.
pub fn semicircle_stieltjes_quadrature(z: Complex64, opts: &QuadOptions) -> Complex64 {
    let half = PI / 2.0;
    let mut breaks = Vec::new();
    // The integrand peaks where 2 sin(theta) is close to Re z.
    if z.re.abs() < 2.0 {
        breaks.push((z.re / 2.0).asin());
    }
    let r = integrate_with_breaks(
        |theta| {
            let (s, c) = theta.sin_cos();
            Complex64::new(4.0 * c * c, 0.0) / (Complex64::new(2.0 * s, 0.0) - z)
        },
        -half,
        half,
        &breaks,
        opts,
    );
    r.value / (2.0 * PI)
}

#[derive(Clone, Copy, Default)]
struct KahanC {
    sum: Complex64,
    comp: Complex64,
}

impl KahanC {
    fn add(&mut self, x: Complex64) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }
}

const COMPENSATED_FROM: usize = 10_000;

fn resolvent_sum(eigenvalues: &[f64], z: Complex64) -> Complex64 {
    if eigenvalues.len() >= COMPENSATED_FROM {
        let mut acc = KahanC::default();
        for &l in eigenvalues {
            acc.add((Complex64::new(l, 0.0) - z).inv());
        }
        acc.sum
    } else {
        eigenvalues
            .iter()
            .map(|&l| (Complex64::new(l, 0.0) - z).inv())
            .sum()
    }
}

/// `N^{-1} sum_j (lambda_j - z)^{-1}`.
pub fn empirical_stieltjes(spectrum: &Spectrum, z: Complex64) -> Result<Complex64> {
    if z.im == 0.0 || !z.im.is_finite() {
        return Err(invalid("z", format!("{z} must have nonzero imaginary part")));
    }
    Ok(resolvent_sum(&spectrum.eigenvalues, z) / spectrum.n as f64)
}

/// `Tr G(E + z / d_N) = sum_j (lambda_j - E - z / d_N)^{-1}`.
pub fn resolvent_trace(spectrum: &Spectrum, frame: &MesoFrame, p: MesoPoint) -> Complex64 {
    resolvent_sum(&spectrum.eigenvalues, frame.spectral_point(p))
}

/// `(1 / d_N)(trace_m - mean)`, centering by the empirical mean of the batch.
pub fn centered_v(traces: &[Complex64], frame: &MesoFrame) -> Result<Vec<Complex64>> {
    if traces.len() < 2 {
        return Err(invalid("traces", "centering needs at least two samples"));
    }
    let mean = traces.iter().sum::<Complex64>() / traces.len() as f64;
    Ok(traces.iter().map(|t| (t - mean) / frame.d_n).collect())
}

/// `sum_j f(d_N (E - lambda_j))`.
pub fn linear_statistic(spectrum: &Spectrum, frame: &MesoFrame, f: &TestFunction) -> f64 {
    let terms = spectrum
        .eigenvalues
        .iter()
        .map(|&l| f.value(frame.rescale(l)));
    if spectrum.n >= COMPENSATED_FROM {
        let (mut sum, mut comp) = (0.0f64, 0.0f64);
        for x in terms {
            let y = x - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        sum
    } else {
        terms.sum()
    }
}

/// `sum_j log|lambda_j - E - (tau + i eta)/d_N| - log|lambda_j - E - i eta/d_N|`,
/// evaluated eigenvalue by eigenvalue.
pub fn log_char_process(spectrum: &Spectrum, frame: &MesoFrame, tau: f64, eta: f64) -> Result<f64> {
    if !(eta > 0.0) {
        return Err(invalid("eta", "must be positive"));
    }
    let d = frame.d_n;
    let mut sum = 0.0;
    for &l in &spectrum.eigenvalues {
        // Rescaled: log|a - tau - i eta| - log|a - i eta| with a = d (lambda - E).
        let a = d * (l - frame.energy);
        let shifted = (a - tau).powi(2) + eta * eta;
        let base = a * a + eta * eta;
        sum += 0.5 * (shifted / base).ln();
    }
    Ok(sum)
}

/// Trapezoid integral of `-Re Tr G(E + (t + i eta)/d_N) / d_N` over `[0, tau]`.
/// Matches [`log_char_process`] up to discretization error.
pub fn integrated_resolvent_real(
    spectrum: &Spectrum,
    frame: &MesoFrame,
    tau: f64,
    eta: f64,
    step: f64,
) -> Result<f64> {
    let p0 = MesoPoint::new(0.0, eta)?;
    if !(step > 0.0) {
        return Err(invalid("step", "must be positive"));
    }
    let steps = ((tau.abs() / step).ceil() as usize).max(1);
    let h = tau / steps as f64;
    let g = |t: f64| -resolvent_trace(spectrum, frame, p0.shifted(t)).re / frame.d_n;
    let mut acc = 0.5 * (g(0.0) + g(tau));
    for k in 1..steps {
        acc += g(k as f64 * h);
    }
    Ok(acc * h)
}

/// Kolmogorov-Smirnov distance between the empirical spectral CDF and the
/// semicircle CDF.
pub fn semicircle_ks(spectrum: &Spectrum) -> f64 {
    let n = spectrum.n as f64;
    spectrum
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = semicircle_cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Quadrature of `f` against the semicircle density on `[a, b]`.
pub fn semicircle_integral<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let a = a.max(-2.0);
    let b = b.min(2.0);
    if b <= a {
        return 0.0;
    }
    integrate(
        |x| Complex64::new(f(x) * semicircle_density(x), 0.0),
        a,
        b,
        &QuadOptions::tol(1e-14, 1e-13),
    )
    .value
    .re
}

/// One row of a grid evaluation export.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridValue {
    pub sample_index: u64,
    pub tau: f64,
    pub eta: f64,
    pub value: Complex64,
}

/// CSV with columns `sample_index,tau,eta,re,im`.
pub fn write_grid_csv(path: &Path, rows: &[GridValue]) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "sample_index,tau,eta,re,im")?;
    for r in rows {
        writeln!(
            out,
            "{},{:e},{:e},{:e},{:e}",
            r.sample_index, r.tau, r.eta, r.value.re, r.value.im
        )?;
    }
    out.flush()?;
    Ok(())
}
