//! Continuum Fourier transform on uniform grids, the `H^{1/2}` bilinear
//! form and the Hilbert transform.

use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::quad::{integrate, QuadOptions};
use crate::testfn::{CauchyTerm, TestFunction};

/// Relative size `|f| / max|f|` allowed at the grid ends.
pub const DECAY_LIMIT: f64 = 1e-8;

/// Uniform samples `values[j] = f(x0 + j dx)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    pub x0: f64,
    pub dx: f64,
    pub values: Vec<Complex64>,
}

/// Symmetric grid `[-half_width, half_width)` with `points` samples.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub half_width: f64,
    pub points: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            half_width: 512.0,
            points: 1 << 20,
        }
    }
}

impl GridSpec {
    pub fn new(half_width: f64, points: usize) -> Self {
        GridSpec { half_width, points }
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / self.points as f64
    }
}

impl GridFunction {
    pub fn new(x0: f64, dx: f64, values: Vec<Complex64>) -> Result<Self> {
        if !(dx > 0.0) {
            return Err(invalid("dx", "grid spacing must be positive"));
        }
        if values.is_empty() {
            return Err(invalid("values", "grid function must be non-empty"));
        }
        Ok(GridFunction { x0, dx, values })
    }

    pub fn sample(f: impl Fn(f64) -> f64, grid: GridSpec) -> Self {
        let dx = grid.dx();
        let x0 = -grid.half_width;
        let values = (0..grid.points)
            .map(|j| Complex64::new(f(x0 + j as f64 * dx), 0.0))
            .collect();
        GridFunction { x0, dx, values }
    }

    pub fn from_test_function(f: &TestFunction, grid: GridSpec) -> Self {
        Self::sample(|x| f.value(x), grid)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x0 + j as f64 * self.dx
    }

    /// Linear interpolation at `x` (zero outside the grid).
    pub fn at(&self, x: f64) -> Complex64 {
        let s = (x - self.x0) / self.dx;
        if s < 0.0 || s > (self.len() - 1) as f64 {
            return Complex64::new(0.0, 0.0);
        }
        let j = (s.floor() as usize).min(self.len() - 2);
        let t = s - j as f64;
        self.values[j] * (1.0 - t) + self.values[j + 1] * t
    }

    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.dx).sqrt()
    }

    /// Fails when either end carries more than [`DECAY_LIMIT`] of the peak.
    pub fn check_decay(&self) -> Result<()> {
        let peak = self.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if peak == 0.0 {
            return Ok(());
        }
        let boundary = self.values[0]
            .norm()
            .max(self.values[self.len() - 1].norm())
            / peak;
        if boundary > DECAY_LIMIT {
            return Err(Error::DecayCheck {
                boundary,
                limit: DECAY_LIMIT,
            });
        }
        Ok(())
    }

    fn check_power_of_two(&self) -> Result<()> {
        if !self.len().is_power_of_two() {
            return Err(invalid("values", format!("length {} is not a power of two", self.len())));
        }
        Ok(())
    }

    /// CSV with columns `x,re,im`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(out, "x,re,im")?;
        for (j, v) in self.values.iter().enumerate() {
            writeln!(out, "{:e},{:e},{:e}", self.x(j), v.re, v.im)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut xs = Vec::new();
        let mut values = Vec::new();
        for line in text.lines().skip(1).filter(|l| !l.trim().is_empty()) {
            let cols: Vec<f64> = line
                .split(',')
                .map(|c| c.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| invalid("csv", format!("bad row `{line}`")))?;
            if cols.len() != 3 {
                return Err(invalid("csv", format!("expected 3 columns in `{line}`")));
            }
            xs.push(cols[0]);
            values.push(Complex64::new(cols[1], cols[2]));
        }
        if xs.len() < 2 {
            return Err(invalid("csv", "need at least two rows"));
        }
        GridFunction::new(xs[0], xs[1] - xs[0], values)
    }
}

fn fft_in_place(data: &mut [Complex64], inverse: bool) {
    let mut planner = FftPlanner::new();
    let plan = if inverse {
        planner.plan_fft_inverse(data.len())
    } else {
        planner.plan_fft_forward(data.len())
    };
    plan.process(data);
}

/// Samples of `f^(k) = (2 pi)^{-1/2} int f(x) e^{-ikx} dx` on the conjugate
/// grid `k_m = (m - N/2) dk`, `dk = 2 pi / (N dx)`.
pub fn fourier_transform(g: &GridFunction) -> Result<GridFunction> {
    g.check_power_of_two()?;
    g.check_decay()?;
    Ok(fourier_unchecked(g))
}

fn fourier_unchecked(g: &GridFunction) -> GridFunction {
    let n = g.len();
    let dk = 2.0 * PI / (n as f64 * g.dx);
    let k0 = -((n / 2) as f64) * dk;
    // e^{-i k0 j dx} = (-1)^j for k0 = -(N/2) dk.
    let mut data: Vec<Complex64> = g
        .values
        .iter()
        .enumerate()
        .map(|(j, &v)| if j % 2 == 0 { v } else { -v })
        .collect();
    fft_in_place(&mut data, false);
    let scale = g.dx / (2.0 * PI).sqrt();
    for (m, v) in data.iter_mut().enumerate() {
        let k = k0 + m as f64 * dk;
        *v *= Complex64::from_polar(scale, -k * g.x0);
    }
    GridFunction {
        x0: k0,
        dx: dk,
        values: data,
    }
}

/// Inverse of [`fourier_transform`], returning samples on the grid starting at `x0`.
fn inverse_fourier(h: &GridFunction, x0: f64) -> GridFunction {
    let n = h.len();
    let dx = 2.0 * PI / (n as f64 * h.dx);
    let k0 = h.x0;
    let mut data: Vec<Complex64> = h
        .values
        .iter()
        .enumerate()
        .map(|(m, &v)| v * Complex64::from_polar(1.0, (k0 + m as f64 * h.dx) * x0))
        .collect();
    fft_in_place(&mut data, true);
    let scale = h.dx / (2.0 * PI).sqrt();
    for (j, v) in data.iter_mut().enumerate() {
        // e^{i k0 j dx} = (-1)^j.
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        *v *= scale * sign;
    }
    GridFunction {
        x0,
        dx,
        values: data,
    }
}

/// `(1/2pi) sum_m |k_m| F_m conj(G_m) dk` on the FFT grid, with a
/// second-order correction at `k = 0`.
pub fn h_half_inner_grid(f: &GridFunction, g: &GridFunction) -> Result<Complex64> {
    if f.len() != g.len() || f.dx != g.dx || f.x0 != g.x0 {
        return Err(invalid("g", "grid functions must share a grid"));
    }
    let fh = fourier_transform(f)?;
    let gh = fourier_transform(g)?;
    let sum: Complex64 = fh
        .values
        .iter()
        .zip(&gh.values)
        .enumerate()
        .map(|(m, (a, b))| a * b.conj() * (fh.x0 + m as f64 * fh.dx).abs())
        .sum();
    // Euler-Maclaurin end correction for the kink of |k| at the node k = 0.
    let mid = fh.len() / 2;
    let kink = fh.values[mid] * gh.values[mid].conj() * (fh.dx * fh.dx / 6.0);
    Ok((sum * fh.dx + kink) / (2.0 * PI))
}

/// `(1/2pi) int |k| f^(k) conj(g^(k)) dk` from closed-form transforms,
/// integrated adaptively on `[-k_max, k_max]`.
pub fn h_half_inner_closed(f: &TestFunction, g: &TestFunction, k_max: f64) -> Option<Complex64> {
    if !f.has_fourier() || !g.has_fourier() {
        return None;
    }
    let integrand = |k: f64| f.fourier(k).unwrap() * g.fourier(k).unwrap().conj() * k.abs();
    let opts = QuadOptions {
        abs_tol: 1e-14,
        rel_tol: 1e-12,
        max_intervals: 5000,
    };
    let neg = integrate(integrand, -k_max, 0.0, &opts).value;
    let pos = integrate(integrand, 0.0, k_max, &opts).value;
    Some((neg + pos) / (2.0 * PI))
}

/// Cutoff in `k` for closed-form transforms of the corpus.
pub const CLOSED_FORM_K_MAX: f64 = 400.0;

/// The `H^{1/2}` form: closed-form Fourier data when both functions carry
/// it, otherwise the FFT route on `grid`.
pub fn h_half_inner(f: &TestFunction, g: &TestFunction, grid: GridSpec) -> Result<Complex64> {
    if let Some(v) = h_half_inner_closed(f, g, CLOSED_FORM_K_MAX) {
        return Ok(v);
    }
    let fg = GridFunction::from_test_function(f, grid);
    let gg = GridFunction::from_test_function(g, grid);
    h_half_inner_grid(&fg, &gg)
}

/// Limit covariance of the resolvent process,
/// `((eta1 + eta2) - i (tau1 - tau2))^{-2}`.
pub fn cauchy_kernel_pair(a: &CauchyTerm, b: &CauchyTerm) -> Complex64 {
    Complex64::new(a.eta + b.eta, -(a.tau - b.tau)).powi(-2)
}

/// Exact `H^{1/2}` form of two functions given as sums of Cauchy parts.
/// With `term = a r + b conj(r)` and disjoint Fourier supports of `r` and
/// `conj(r)`, only the `r r` and `conj(r) conj(r)` pairings survive.
pub fn cauchy_pair_inner(f: &TestFunction, g: &TestFunction) -> Option<Complex64> {
    if f.cauchy.is_empty() || g.cauchy.is_empty() {
        return None;
    }
    let mut total = Complex64::new(0.0, 0.0);
    for s in &f.cauchy {
        for t in &g.cauchy {
            let (a1, b1) = s.kernel_weights();
            let (a2, b2) = t.kernel_weights();
            let c = cauchy_kernel_pair(s, t);
            total += a1 * a2.conj() * c + b1 * b2.conj() * c.conj();
        }
    }
    Some(total)
}

/// `(1 / 4 pi^2) int int ((f(x) - f(y)) / (x - y))^2 dx dy` for compactly
/// supported `f`; an independent route to `h_half_inner(f, f)`.
pub fn h_half_norm_sq_double_integral(f: &TestFunction) -> Result<f64> {
    let (a, b) = f
        .support
        .ok_or_else(|| invalid("f", "double-integral route needs compact support"))?;
    let opts = QuadOptions {
        abs_tol: 1e-13,
        rel_tol: 1e-11,
        max_intervals: 4000,
    };
    let quotient = |x: f64, y: f64| {
        let d = x - y;
        if d.abs() < 1e-7 {
            f.derivative(0.5 * (x + y))
        } else {
            (f.value(x) - f.value(y)) / d
        }
    };
    let kinks: Vec<f64> = f.kinks.clone();
    let inner = |x: f64| {
        let mut breaks = kinks.clone();
        breaks.push(x);
        crate::quad::integrate_with_breaks(
            |y| Complex64::new(quotient(x, y).powi(2), 0.0),
            a,
            b,
            &breaks,
            &opts,
        )
        .value
        .re
    };
    let square = crate::quad::integrate_with_breaks(
        |x| Complex64::new(inner(x), 0.0),
        a,
        b,
        &kinks,
        &opts,
    )
    .value
    .re;
    // y outside [a, b]: int dy/(x - y)^2 over both tails is 1/(x - a) + 1/(b - x).
    let tails = crate::quad::integrate_with_breaks(
        |x| {
            let v = f.value(x);
            Complex64::new(v * v * (1.0 / (x - a) + 1.0 / (b - x)), 0.0)
        },
        a,
        b,
        &kinks,
        &opts,
    )
    .value
    .re;
    Ok((square + 2.0 * tails) / (4.0 * PI * PI))
}

/// Inverse transform of `-i sgn(k) f^(k)`, `sgn(0) = 0`, on the input grid.
pub fn hilbert_transform(g: &GridFunction) -> Result<GridFunction> {
    g.check_power_of_two()?;
    g.check_decay()?;
    let mut fh = fourier_unchecked(g);
    for (m, v) in fh.values.iter_mut().enumerate() {
        let k = fh.x0 + m as f64 * fh.dx;
        let sgn = if k > 0.0 {
            1.0
        } else if k < 0.0 {
            -1.0
        } else {
            0.0
        };
        *v *= Complex64::new(0.0, -sgn);
    }
    Ok(inverse_fourier(&fh, g.x0))
}

/// Principal-value quadrature `(1/pi) p.v. int f(t) / (x - t) dt` over
/// `[-half_width, half_width]`, by symmetric subtraction around `x`.
pub fn hilbert_pv_quadrature(f: &dyn Fn(f64) -> f64, x: f64, half_width: f64) -> f64 {
    let opts = QuadOptions {
        abs_tol: 1e-13,
        rel_tol: 1e-12,
        max_intervals: 4000,
    };
    // p.v. int_{x-r}^{x+r} f(t)/(x-t) dt = -int_0^r (f(x+s) - f(x-s))/s ds.
    let r = (half_width - x.abs()).max(0.0);
    let near = integrate(
        |s| {
            let v = if s < 1e-9 {
                0.0
            } else {
                -(f(x + s) - f(x - s)) / s
            };
            Complex64::new(v, 0.0)
        },
        0.0,
        r.min(50.0),
        &opts,
    )
    .value
    .re;
    let mid = if r > 50.0 {
        integrate(
            |s| Complex64::new(-(f(x + s) - f(x - s)) / s, 0.0),
            50.0,
            r,
            &opts,
        )
        .value
        .re
    } else {
        0.0
    };
    let lo = -half_width;
    let hi = half_width;
    let outer = |a: f64, b: f64| {
        if b <= a {
            0.0
        } else {
            integrate(|t| Complex64::new(f(t) / (x - t), 0.0), a, b, &opts)
                .value
                .re
        }
    };
    let rest = outer(lo, x - r) + outer(x + r, hi);
    (near + mid + rest) / PI
}
