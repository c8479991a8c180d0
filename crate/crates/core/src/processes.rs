//! Limit processes: the `Gamma'_H` family on the upper half-plane, its Cayley
//! series, Cholesky path sampling from covariance kernels and the
//! regularized log-correlated field `B0`.

use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rng::CounterRng;
use crate::spectral::MesoPoint;

/// Hurst-type index `H < 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HurstParam(f64);

impl HurstParam {
    pub fn new(h: f64) -> Result<Self> {
        if !(h < 1.0) || !h.is_finite() {
            return Err(invalid("h", format!("{h} must be finite and below 1")));
        }
        Ok(HurstParam(h))
    }

    pub const ZERO: HurstParam = HurstParam(0.0);

    pub fn value(self) -> f64 {
        self.0
    }

    /// `2 - 2H`, the power in the covariance.
    pub fn exponent(self) -> f64 {
        2.0 - 2.0 * self.0
    }

    /// Scale applied to the Cayley series so that it has the closed-form covariance.
    pub fn default_normalization(self) -> f64 {
        2f64.powf(self.0 - 1.0)
    }
}

/// `(-i (z1 - conj z2))^{-(2 - 2H)}` on the principal branch. The base has
/// positive real part `eta1 + eta2`, and for `H = 0` this is exactly
/// `1 / (i (z1 - conj z2))^2`.
pub fn gamma_covariance(z1: MesoPoint, z2: MesoPoint, h: HurstParam) -> Result<Complex64> {
    if !(z1.eta > 0.0 && z2.eta > 0.0) {
        return Err(invalid("eta", "both points need eta > 0"));
    }
    let q = Complex64::new(z1.eta + z2.eta, -(z1.tau - z2.tau));
    if h.0 == 0.0 {
        return Ok(q.powi(-2));
    }
    Ok(q.powf(-h.exponent()))
}

fn cayley(z: Complex64) -> Complex64 {
    let i = Complex64::i();
    (z - i) / (z + i)
}

fn prefactor(z: Complex64, h: HurstParam) -> Complex64 {
    let i = Complex64::i();
    ((z + i) / 2.0).powf(-h.exponent()) / std::f64::consts::SQRT_2
}

/// `c_k^2 = Gamma(a + k) / (Gamma(a) k!)` for `k < terms`, by the ratio
/// recurrence in log space.
pub fn cayley_coefficients_sq(h: HurstParam, terms: usize) -> Vec<f64> {
    let a = h.exponent();
    let mut out = Vec::with_capacity(terms);
    let mut log_c = 0.0f64;
    for k in 0..terms {
        if k > 0 {
            log_c += ((a + k as f64 - 1.0) / k as f64).ln();
        }
        out.push(log_c.exp());
    }
    out
}

/// Truncated `sum_{k<terms} c_k^2 x^k`, which tends to `(1 - x)^{-(2 - 2H)}`.
pub fn binomial_series(h: HurstParam, x: Complex64, terms: usize) -> Complex64 {
    let coeffs = cayley_coefficients_sq(h, terms);
    let mut power = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for c in coeffs {
        sum += power * c;
        power *= x;
    }
    sum
}

/// Covariance of the series truncated at `terms`, summed exactly.
pub fn series_covariance(
    z1: MesoPoint,
    z2: MesoPoint,
    h: HurstParam,
    terms: usize,
    normalization: f64,
) -> Complex64 {
    let (a, b) = (z1.z(), z2.z());
    let x = cayley(a) * cayley(b).conj();
    // E|xi1 + i xi2|^2 = 2.
    normalization * normalization * 2.0 * prefactor(a, h) * prefactor(b, h).conj() * binomial_series(h, x, terms)
}

/// Largest series length this module will use for one point.
pub const MAX_TERMS: usize = 100_000;
/// Relative size of the truncated tail, in units of the marginal standard deviation.
pub const TAIL_TOLERANCE: f64 = 1e-4;

/// Bound on `sqrt(sum_{k >= terms} c_k^2 r^k) / sqrt(sum_k c_k^2 r^k)` with `r = |w|^2`.
fn tail_ratio(h: HurstParam, r: f64, terms: usize) -> f64 {
    if r == 0.0 {
        return if terms >= 1 { 0.0 } else { 1.0 };
    }
    let a = h.exponent();
    let total = (1.0 - r).powf(-a);
    let c = cayley_coefficients_sq(h, terms + 1)[terms];
    // Successive ratios (a + k) / (k + 1) are bounded by their value at k = terms.
    let rho = r * ((a + terms as f64) / (terms as f64 + 1.0)).max(1.0);
    if rho >= 1.0 {
        return f64::INFINITY;
    }
    (c * r.powi(terms as i32) / (1.0 - rho) / total).sqrt()
}

/// Smallest series length meeting [`TAIL_TOLERANCE`] at `z`.
pub fn default_terms(z: MesoPoint, h: HurstParam) -> Result<usize> {
    let r = cayley(z.z()).norm_sqr();
    if r.sqrt() >= 1.0 - 1e-6 {
        return Err(Error::Truncation(format!(
            "point {} + {}i has |w| = {} too close to the unit circle",
            z.tau,
            z.eta,
            r.sqrt()
        )));
    }
    let mut k = 1usize;
    while k <= MAX_TERMS {
        if tail_ratio(h, r, k) < TAIL_TOLERANCE {
            return Ok(k);
        }
        k = if k < 64 { k + 1 } else { k + k / 8 };
    }
    Err(Error::Truncation(format!(
        "point {} + {}i needs more than {MAX_TERMS} terms",
        z.tau, z.eta
    )))
}

/// How a path was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PathOrigin {
    CayleySeries,
    CholeskyKernel,
    IntegratedGamma,
}

/// A joint draw of a complex process at a list of points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GPPath {
    pub points: Vec<MesoPoint>,
    pub values: Vec<Complex64>,
    pub origin: PathOrigin,
}

impl GPPath {
    /// CSV `index,tau,eta,re,im` and a JSON sidecar with `meta`.
    pub fn write(&self, csv: &Path, meta: &serde_json::Value) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(csv)?);
        writeln!(out, "index,tau,eta,re,im")?;
        for (j, (p, v)) in self.points.iter().zip(&self.values).enumerate() {
            writeln!(out, "{j},{},{},{:e},{:e}", p.tau, p.eta, v.re, v.im)?;
        }
        out.flush()?;
        let sidecar = serde_json::json!({ "origin": self.origin, "meta": meta });
        std::fs::write(csv.with_extension("json"), serde_json::to_string_pretty(&sidecar)?)?;
        Ok(())
    }
}

/// Options for [`cayley_series_sample`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesOptions {
    /// Fixed series length; `None` picks the per-point default.
    pub terms: Option<usize>,
    pub normalization: f64,
}

impl SeriesOptions {
    pub fn for_hurst(h: HurstParam) -> Self {
        SeriesOptions {
            terms: None,
            normalization: h.default_normalization(),
        }
    }
}

/// Precomputed series evaluation for repeated draws at fixed points.
#[derive(Clone, Debug)]
pub struct SeriesSampler {
    points: Vec<MesoPoint>,
    /// Per-point prefactor times normalization.
    scale: Vec<Complex64>,
    cayley: Vec<Complex64>,
    coeffs: Vec<f64>,
    terms: Vec<usize>,
}

impl SeriesSampler {
    pub fn new(points: &[MesoPoint], h: HurstParam, opts: SeriesOptions) -> Result<Self> {
        if points.is_empty() {
            return Err(invalid("points", "need at least one point"));
        }
        let mut terms = Vec::with_capacity(points.len());
        for &p in points {
            let r = cayley(p.z()).norm_sqr();
            let k = match opts.terms {
                Some(0) => return Err(invalid("terms", "series needs at least one term")),
                Some(k) => {
                    if tail_ratio(h, r, k) > TAIL_TOLERANCE {
                        return Err(Error::Truncation(format!(
                            "{k} terms leave a tail above {TAIL_TOLERANCE} of the standard deviation at {} + {}i",
                            p.tau, p.eta
                        )));
                    }
                    k
                }
                None => default_terms(p, h)?,
            };
            terms.push(k);
        }
        let kmax = *terms.iter().max().unwrap();
        Ok(SeriesSampler {
            points: points.to_vec(),
            scale: points
                .iter()
                .map(|p| prefactor(p.z(), h) * opts.normalization)
                .collect(),
            cayley: points.iter().map(|p| cayley(p.z())).collect(),
            coeffs: cayley_coefficients_sq(h, kmax).into_iter().map(f64::sqrt).collect(),
            terms,
        })
    }

    pub fn terms(&self) -> &[usize] {
        &self.terms
    }

    /// One joint draw; all points share the Gaussian coefficients.
    pub fn sample(&self, rng: &mut CounterRng) -> GPPath {
        let mut sums = vec![Complex64::new(0.0, 0.0); self.points.len()];
        let mut powers = vec![Complex64::new(1.0, 0.0); self.points.len()];
        for (k, &c) in self.coeffs.iter().enumerate() {
            let (a, b) = rng.normal_pair();
            let xi = Complex64::new(a, b) * c;
            for j in 0..self.points.len() {
                if k < self.terms[j] {
                    sums[j] += powers[j] * xi;
                    powers[j] *= self.cayley[j];
                }
            }
        }
        GPPath {
            points: self.points.clone(),
            values: sums.iter().zip(&self.scale).map(|(s, c)| s * c).collect(),
            origin: PathOrigin::CayleySeries,
        }
    }
}

/// One draw of the truncated Cayley series at `points`.
pub fn cayley_series_sample(
    points: &[MesoPoint],
    h: HurstParam,
    opts: SeriesOptions,
    rng: &mut CounterRng,
) -> Result<GPPath> {
    Ok(SeriesSampler::new(points, h, opts)?.sample(rng))
}

/// Lower factor `L` (row-major `m x rank`) with `C = L L^*` up to tolerance.
#[derive(Clone, Debug)]
pub struct PivotedCholesky {
    pub m: usize,
    pub rank: usize,
    factor: Vec<Complex64>,
}

impl PivotedCholesky {
    /// Diagonal-pivoted factorization of a Hermitian `m x m` matrix (row-major).
    /// Stops when the largest remaining pivot is below `1e-10 * trace`.
    pub fn factor(c: &[Complex64], m: usize) -> Result<Self> {
        if c.len() != m * m || m == 0 {
            return Err(invalid("covariance", "expected a non-empty square matrix"));
        }
        for a in 0..m {
            for b in 0..=a {
                let (x, y) = (c[a * m + b], c[b * m + a].conj());
                if (x - y).norm() > 1e-12 * (1.0 + x.norm()) {
                    return Err(invalid("covariance", format!("not Hermitian at ({a}, {b})")));
                }
            }
        }
        let trace: f64 = (0..m).map(|a| c[a * m + a].re).sum();
        let tol = 1e-10 * trace.abs().max(f64::MIN_POSITIVE);
        let mut resid: Vec<f64> = (0..m).map(|a| c[a * m + a].re).collect();
        let mut cols: Vec<Vec<Complex64>> = Vec::new();
        let mut used = vec![false; m];
        for _ in 0..m {
            let (p, &d) = resid
                .iter()
                .enumerate()
                .filter(|(i, _)| !used[*i])
                .max_by(|a, b| a.1.total_cmp(b.1))
                .unwrap();
            if d <= tol {
                break;
            }
            used[p] = true;
            let s = d.sqrt();
            let mut col = vec![Complex64::new(0.0, 0.0); m];
            for a in 0..m {
                if used[a] && a != p {
                    continue;
                }
                let mut v = c[a * m + p];
                for prev in &cols {
                    v -= prev[a] * prev[p].conj();
                }
                col[a] = v / s;
            }
            col[p] = Complex64::new(s, 0.0);
            for a in 0..m {
                if !used[a] {
                    resid[a] -= col[a].norm_sqr();
                }
            }
            cols.push(col);
        }
        for a in 0..m {
            if !used[a] && resid[a] < -tol {
                return Err(Error::NotPositiveSemidefinite {
                    pivot: a,
                    value: resid[a],
                    tolerance: tol,
                });
            }
        }
        let rank = cols.len();
        let mut factor = vec![Complex64::new(0.0, 0.0); m * rank];
        for (r, col) in cols.iter().enumerate() {
            for a in 0..m {
                factor[a * rank + r] = col[a];
            }
        }
        Ok(PivotedCholesky { m, rank, factor })
    }

    pub fn entry(&self, a: usize, r: usize) -> Complex64 {
        self.factor[a * self.rank + r]
    }

    /// `L zeta` for a coefficient vector of length `rank`.
    pub fn apply(&self, zeta: &[Complex64]) -> Vec<Complex64> {
        (0..self.m)
            .map(|a| {
                self.factor[a * self.rank..(a + 1) * self.rank]
                    .iter()
                    .zip(zeta)
                    .map(|(l, z)| l * z)
                    .sum()
            })
            .collect()
    }
}

/// Points with a Hermitian covariance and zero pseudo-covariance.
#[derive(Clone, Debug)]
pub struct ComplexGaussianSpec {
    pub points: Vec<MesoPoint>,
    /// Row-major `C[a][b] = E(X_a conj(X_b))`.
    pub covariance: Vec<Complex64>,
}

impl ComplexGaussianSpec {
    pub fn from_kernel(points: &[MesoPoint], kernel: impl Fn(MesoPoint, MesoPoint) -> Complex64) -> Self {
        let m = points.len();
        let mut covariance = Vec::with_capacity(m * m);
        for &a in points {
            for &b in points {
                covariance.push(kernel(a, b));
            }
        }
        ComplexGaussianSpec {
            points: points.to_vec(),
            covariance,
        }
    }

    /// The `H = 0` kernel on `points`.
    pub fn gamma0(points: &[MesoPoint]) -> Self {
        Self::from_kernel(points, |a, b| gamma_covariance(a, b, HurstParam::ZERO).unwrap())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Factor once, draw many circular complex Gaussian vectors.
#[derive(Clone, Debug)]
pub struct GaussianSampler {
    points: Vec<MesoPoint>,
    chol: PivotedCholesky,
}

impl GaussianSampler {
    pub fn new(spec: &ComplexGaussianSpec) -> Result<Self> {
        Ok(GaussianSampler {
            points: spec.points.clone(),
            chol: PivotedCholesky::factor(&spec.covariance, spec.len())?,
        })
    }

    pub fn rank(&self) -> usize {
        self.chol.rank
    }

    pub fn sample_values(&self, rng: &mut CounterRng) -> Vec<Complex64> {
        let zeta: Vec<Complex64> = (0..self.chol.rank)
            .map(|_| {
                let (a, b) = rng.normal_pair();
                Complex64::new(a, b) * std::f64::consts::FRAC_1_SQRT_2
            })
            .collect();
        self.chol.apply(&zeta)
    }

    pub fn sample(&self, rng: &mut CounterRng) -> GPPath {
        GPPath {
            points: self.points.clone(),
            values: self.sample_values(rng),
            origin: PathOrigin::CholeskyKernel,
        }
    }
}

pub fn cholesky_gp_sample(spec: &ComplexGaussianSpec, rng: &mut CounterRng) -> Result<GPPath> {
    Ok(GaussianSampler::new(spec)?.sample(rng))
}

/// `E (B(t) - B(s))^2 = (1/2) log((t - s)^2 / eta^2 + 1)`.
pub fn b0_increment_variance(t: f64, s: f64, eta: f64) -> Result<f64> {
    if !(eta > 0.0) {
        return Err(invalid("eta", format!("{eta} must be positive")));
    }
    let d = (t - s) / eta;
    Ok(0.5 * d.mul_add(d, 1.0).ln())
}

/// Increment variance of `int_0^tau Re Gamma'_0(t + i eta) dt`:
/// `(1/2) log(1 + Delta^2 / (4 eta^2))`.
pub fn integrated_gamma_increment_variance(t: f64, s: f64, eta: f64) -> Result<f64> {
    b0_increment_variance(t, s, 2.0 * eta)
}

fn check_origin_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() || grid[0] != 0.0 {
        return Err(invalid("grid", "must start at 0"));
    }
    if grid.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(invalid("grid", "must be sorted ascending"));
    }
    Ok(())
}

/// Real Gaussian paths with `B(0) = 0` and stationary increments of
/// variance [`b0_increment_variance`].
#[derive(Clone, Debug)]
pub struct B0Sampler {
    grid: Vec<f64>,
    chol: Option<PivotedCholesky>,
}

impl B0Sampler {
    pub fn new(grid: &[f64], eta: f64) -> Result<Self> {
        check_origin_grid(grid)?;
        b0_increment_variance(0.0, 0.0, eta)?;
        let inner = &grid[1..];
        let m = inner.len();
        let chol = if m == 0 {
            None
        } else {
            let v = |d: f64| b0_increment_variance(d, 0.0, eta).unwrap();
            let mut c = Vec::with_capacity(m * m);
            for &t in inner {
                for &s in inner {
                    c.push(Complex64::new(0.5 * (v(t) + v(s) - v(t - s)), 0.0));
                }
            }
            Some(PivotedCholesky::factor(&c, m)?)
        };
        Ok(B0Sampler {
            grid: grid.to_vec(),
            chol,
        })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn sample(&self, rng: &mut CounterRng) -> Vec<f64> {
        let mut out = vec![0.0; self.grid.len()];
        if let Some(chol) = &self.chol {
            let mut g = Vec::with_capacity(chol.rank);
            while g.len() < chol.rank {
                let (a, b) = rng.normal_pair();
                g.push(Complex64::new(a, 0.0));
                if g.len() < chol.rank {
                    g.push(Complex64::new(b, 0.0));
                }
            }
            for (o, v) in out[1..].iter_mut().zip(chol.apply(&g)) {
                *o = v.re;
            }
        }
        out
    }
}

/// One path of `B0` on `grid` (sorted, `grid[0] = 0`).
pub fn b0_sample(grid: &[f64], eta: f64, rng: &mut CounterRng) -> Result<Vec<f64>> {
    Ok(B0Sampler::new(grid, eta)?.sample(rng))
}

/// `tau -> int_0^tau Re Gamma'_0(t + i eta) dt` on `taus`, by the trapezoid
/// rule over a Cholesky path of `Gamma'_0` on a refined horizontal line.
#[derive(Clone, Debug)]
pub struct IntegratedGammaSampler {
    taus: Vec<f64>,
    eta: f64,
    line: GaussianSampler,
    /// Trapezoid weights per output tau, over the fine line.
    weights: Vec<Vec<f64>>,
}

impl IntegratedGammaSampler {
    /// `step` is the fine spacing; every tau must be a multiple of it.
    pub fn new(taus: &[f64], eta: f64, step: f64) -> Result<Self> {
        check_origin_grid(taus)?;
        if !(eta > 0.0) || !(step > 0.0) {
            return Err(invalid("eta", "eta and step must be positive"));
        }
        let tmax = *taus.last().unwrap();
        let count = (tmax / step).round() as usize;
        let idx: Vec<usize> = taus
            .iter()
            .map(|&t| {
                let j = (t / step).round();
                if (j * step - t).abs() > 1e-9 * step.max(t) {
                    Err(invalid("taus", format!("{t} is not a multiple of the step {step}")))
                } else {
                    Ok(j as usize)
                }
            })
            .collect::<Result<_>>()?;
        let line: Vec<MesoPoint> = (0..=count)
            .map(|j| MesoPoint::new(j as f64 * step, eta))
            .collect::<Result<_>>()?;
        let weights = idx
            .iter()
            .map(|&j| {
                let mut w = vec![0.0; count + 1];
                if j > 0 {
                    for (i, wi) in w.iter_mut().enumerate().take(j + 1) {
                        *wi = if i == 0 || i == j { 0.5 * step } else { step };
                    }
                }
                w
            })
            .collect();
        Ok(IntegratedGammaSampler {
            taus: taus.to_vec(),
            eta,
            line: GaussianSampler::new(&ComplexGaussianSpec::gamma0(&line))?,
            weights,
        })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn taus(&self) -> &[f64] {
        &self.taus
    }

    pub fn sample(&self, rng: &mut CounterRng) -> Vec<f64> {
        let values = self.line.sample_values(rng);
        self.weights
            .iter()
            .map(|w| w.iter().zip(&values).map(|(a, v)| a * v.re).sum())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Domain;

    fn pt(t: f64, e: f64) -> MesoPoint {
        MesoPoint::new(t, e).unwrap()
    }

    #[test]
    fn hurst_bounds() {
        assert!(HurstParam::new(1.0).is_err());
        assert!(HurstParam::new(f64::NAN).is_err());
        assert!(HurstParam::new(0.99).is_ok());
        assert!(HurstParam::new(-0.5).is_ok());
    }

    #[test]
    fn covariance_examples() {
        let c = gamma_covariance(pt(0.0, 1.0), pt(0.0, 1.0), HurstParam::ZERO).unwrap();
        assert!((c - Complex64::new(0.25, 0.0)).norm() < 1e-15);
        let c = gamma_covariance(pt(1.0, 1.0), pt(-1.0, 1.0), HurstParam::ZERO).unwrap();
        assert!((c - Complex64::new(0.0, 0.125)).norm() < 1e-15);
        // The H = 0 form is the reciprocal square of i(z1 - conj z2).
        let (a, b) = (pt(0.3, 0.7), pt(-1.1, 2.0));
        let direct = (Complex64::i() * (a.z() - b.z().conj())).powi(-2);
        assert!((gamma_covariance(a, b, HurstParam::ZERO).unwrap() - direct).norm() < 1e-15);
        let h = HurstParam::new(0.5).unwrap();
        assert!((gamma_covariance(pt(0.0, 1.0), pt(0.0, 1.0), h).unwrap() - 0.5).norm() < 1e-15);
    }

    #[test]
    fn covariance_is_stationary_and_hermitian() {
        let h = HurstParam::new(0.25).unwrap();
        let (a, b) = (pt(0.375, 0.9), pt(-0.75, 1.5));
        let c = gamma_covariance(a, b, h).unwrap();
        for t in [-3.0, 0.5, 10.25] {
            assert_eq!(gamma_covariance(a.shifted(t), b.shifted(t), h).unwrap(), c);
        }
        assert!((gamma_covariance(b, a, h).unwrap() - c.conj()).norm() < 1e-15);
    }

    #[test]
    fn binomial_identity() {
        for h in [0.0, 0.25, 0.5] {
            let h = HurstParam::new(h).unwrap();
            for x in [
                Complex64::new(0.1, 0.0),
                Complex64::new(0.5, 0.0),
                Complex64::from_polar(0.9, 0.7),
                Complex64::from_polar(0.9, -2.5),
            ] {
                let s = binomial_series(h, x, 4000);
                let exact = (Complex64::new(1.0, 0.0) - x).powf(-h.exponent());
                assert!((s - exact).norm() <= 1e-10 * exact.norm(), "{x}");
            }
        }
    }

    #[test]
    fn series_matches_kernel() {
        for h in [0.0, 0.25, 0.5] {
            let h = HurstParam::new(h).unwrap();
            for (a, b) in [(pt(0.0, 1.0), pt(1.0, 1.0)), (pt(-1.5, 2.0), pt(0.7, 0.5)), (pt(0.2, 3.0), pt(0.2, 3.0))] {
                let s = series_covariance(a, b, h, 2000, h.default_normalization());
                let c = gamma_covariance(a, b, h).unwrap();
                assert!((s - c).norm() <= 1e-6 * c.norm(), "{s} vs {c}");
            }
        }
    }

    #[test]
    fn single_point_at_i_has_one_term() {
        let h = HurstParam::ZERO;
        let sampler = SeriesSampler::new(&[pt(0.0, 1.0)], h, SeriesOptions::for_hurst(h)).unwrap();
        assert_eq!(sampler.terms(), &[1]);
        let s = series_covariance(pt(0.0, 1.0), pt(0.0, 1.0), h, 1, 0.5);
        assert!((s.re - 0.25).abs() < 1e-15);
    }

    #[test]
    fn truncation_errors() {
        let h = HurstParam::ZERO;
        // |w| close to 1.
        assert!(default_terms(pt(1e5, 1e-3), h).is_err());
        assert!(SeriesSampler::new(&[pt(3.0, 0.2)], h, SeriesOptions { terms: Some(5), normalization: 0.5 }).is_err());
        assert!(SeriesSampler::new(&[pt(0.0, 1.0)], h, SeriesOptions { terms: Some(0), normalization: 0.5 }).is_err());
        let k = default_terms(pt(1.0, 1.0), h).unwrap();
        assert!(tail_ratio(h, cayley(Complex64::new(1.0, 1.0)).norm_sqr(), k) < TAIL_TOLERANCE);
    }

    fn mc_check(values: &[Vec<Complex64>], target: &[Complex64], pseudo: bool) {
        let m = values[0].len();
        let n = values.len() as f64;
        for a in 0..m {
            for b in 0..m {
                let prods: Vec<Complex64> = values
                    .iter()
                    .map(|v| if pseudo { v[a] * v[b] } else { v[a] * v[b].conj() })
                    .collect();
                let mean: Complex64 = prods.iter().sum::<Complex64>() / n;
                let var = prods.iter().map(|p| (p - mean).norm_sqr()).sum::<f64>() / (n - 1.0);
                let se = (var / n).sqrt();
                let t = if pseudo { Complex64::new(0.0, 0.0) } else { target[a * m + b] };
                assert!((mean - t).norm() <= 4.0 * se, "({a},{b}) {mean} vs {t}, se {se}");
            }
        }
    }

    #[test]
    fn series_sampler_monte_carlo() {
        let h = HurstParam::ZERO;
        let pts = [pt(0.0, 1.0), pt(1.0, 1.0)];
        let sampler = SeriesSampler::new(&pts, h, SeriesOptions { terms: Some(500), normalization: 0.5 }).unwrap();
        let mut rng = CounterRng::new(11, 0, Domain::Process);
        let draws: Vec<Vec<Complex64>> = (0..100_000).map(|_| sampler.sample(&mut rng).values).collect();
        let spec = ComplexGaussianSpec::gamma0(&pts);
        mc_check(&draws, &spec.covariance, false);
        mc_check(&draws, &spec.covariance, true);
    }

    #[test]
    fn cholesky_sampler_monte_carlo() {
        let pts = [pt(0.0, 1.0), pt(1.0, 1.0), pt(0.0, 2.0)];
        let spec = ComplexGaussianSpec::gamma0(&pts);
        let sampler = GaussianSampler::new(&spec).unwrap();
        let mut rng = CounterRng::new(12, 0, Domain::Process);
        let draws: Vec<Vec<Complex64>> = (0..100_000).map(|_| sampler.sample_values(&mut rng)).collect();
        mc_check(&draws, &spec.covariance, false);
        mc_check(&draws, &spec.covariance, true);

        let unit = ComplexGaussianSpec {
            points: vec![pt(0.0, 1.0)],
            covariance: vec![Complex64::new(1.0, 0.0)],
        };
        let s = GaussianSampler::new(&unit).unwrap();
        let d: Vec<Vec<Complex64>> = (0..100_000).map(|_| s.sample_values(&mut rng)).collect();
        mc_check(&d, &unit.covariance, false);
    }

    #[test]
    fn rank_one_is_proportional() {
        let v = [Complex64::new(1.0, 0.5), Complex64::new(-0.3, 2.0)];
        let cov: Vec<Complex64> = (0..4).map(|k| v[k / 2] * v[k % 2].conj()).collect();
        let spec = ComplexGaussianSpec {
            points: vec![pt(0.0, 1.0), pt(1.0, 1.0)],
            covariance: cov,
        };
        let sampler = GaussianSampler::new(&spec).unwrap();
        assert_eq!(sampler.rank(), 1);
        let mut rng = CounterRng::new(3, 0, Domain::Process);
        for _ in 0..10 {
            let x = sampler.sample_values(&mut rng);
            let ratio = x[1] / x[0];
            assert!((ratio - v[1] / v[0]).norm() < 1e-12);
        }
    }

    #[test]
    fn not_psd_rejected() {
        let c = vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(2.0, 0.0),
            Complex64::new(2.0, 0.0),
            Complex64::new(1.0, 0.0),
        ];
        assert!(matches!(PivotedCholesky::factor(&c, 2), Err(Error::NotPositiveSemidefinite { .. })));
        let asym = vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.5),
            Complex64::new(0.0, 0.5),
            Complex64::new(1.0, 0.0),
        ];
        assert!(PivotedCholesky::factor(&asym, 2).is_err());
    }

    #[test]
    fn b0_formula() {
        assert_eq!(b0_increment_variance(0.3, 0.3, 1.0).unwrap(), 0.0);
        assert!((b0_increment_variance(2.0, 0.0, 2.0).unwrap() - 0.346_573_590_3).abs() < 1e-10);
        assert!(b0_increment_variance(1.0, 0.0, 0.0).is_err());
        let (t, s, e) = (1.3, -0.4, 0.7);
        let base = b0_increment_variance(t, s, e).unwrap();
        for a in [0.1, 3.0, 17.0] {
            assert!((b0_increment_variance(a * t, a * s, a * e).unwrap() - base).abs() < 1e-14);
        }
    }

    #[test]
    fn b0_paths() {
        let grid = [0.0, 0.5, 1.0, 2.0];
        assert!(b0_sample(&[0.0, 1.0, 0.5], 1.0, &mut CounterRng::new(0, 0, Domain::Process)).is_err());
        assert!(b0_sample(&[0.5, 1.0], 1.0, &mut CounterRng::new(0, 0, Domain::Process)).is_err());
        let sampler = B0Sampler::new(&grid, 1.0).unwrap();
        let mut rng = CounterRng::new(5, 0, Domain::Process);
        let paths: Vec<Vec<f64>> = (0..100_000).map(|_| sampler.sample(&mut rng)).collect();
        assert!(paths.iter().all(|p| p[0] == 0.0));
        for (i, j) in [(0, 1), (1, 2), (0, 3), (2, 3)] {
            let d: Vec<f64> = paths.iter().map(|p| p[j] - p[i]).collect();
            let n = d.len() as f64;
            let sq: Vec<f64> = d.iter().map(|x| x * x).collect();
            let mean = sq.iter().sum::<f64>() / n;
            let se = (sq.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt();
            let target = b0_increment_variance(grid[j], grid[i], 1.0).unwrap();
            assert!((mean - target).abs() <= 4.0 * se, "{i},{j}: {mean} vs {target}");
        }
    }

    #[test]
    fn integrated_gamma_variance_by_quadrature() {
        // Exact variance of the trapezoid functional against the closed form.
        let s = IntegratedGammaSampler::new(&[0.0, 1.0], 0.5, 1.0 / 64.0).unwrap();
        let line: Vec<MesoPoint> = (0..=64).map(|j| pt(j as f64 / 64.0, 0.5)).collect();
        let w = &s.weights[1];
        let mut var = 0.0;
        for (a, pa) in line.iter().enumerate() {
            for (b, pb) in line.iter().enumerate() {
                var += 0.5 * w[a] * w[b] * gamma_covariance(*pa, *pb, HurstParam::ZERO).unwrap().re;
            }
        }
        let target = integrated_gamma_increment_variance(1.0, 0.0, 0.5).unwrap();
        assert!((var - target).abs() < 1e-4, "{var} vs {target}");
        assert!((target - 0.5 * 2f64.ln()).abs() < 1e-15);
    }
}
