//! Jackknife errors, moment diagnostics and the Kolmogorov-Smirnov test.

use num_complex::Complex64;
use statrs::function::erf::erfc;

/// Estimate and leave-one-out standard error of `g(column means)`.
///
/// `rows[i]` holds the per-sample quantities whose means feed `g`. The
/// error is infinite when fewer than three samples are present.
pub fn jackknife<G>(rows: &[Vec<Complex64>], g: G) -> (Complex64, f64)
where
    G: Fn(&[Complex64]) -> Complex64,
{
    let m = rows.len();
    if m == 0 {
        return (Complex64::new(f64::NAN, 0.0), f64::INFINITY);
    }
    let d = rows[0].len();
    let mut total = vec![Complex64::new(0.0, 0.0); d];
    for r in rows {
        for (t, v) in total.iter_mut().zip(r) {
            *t += v;
        }
    }
    let full: Vec<Complex64> = total.iter().map(|t| t / m as f64).collect();
    let estimate = g(&full);
    if m < 3 {
        return (estimate, f64::INFINITY);
    }
    let mut loo = vec![Complex64::new(0.0, 0.0); d];
    let thetas: Vec<Complex64> = rows
        .iter()
        .map(|r| {
            for ((l, t), v) in loo.iter_mut().zip(&total).zip(r) {
                *l = (t - v) / (m - 1) as f64;
            }
            g(&loo)
        })
        .collect();
    let mean: Complex64 = thetas.iter().sum::<Complex64>() / m as f64;
    let ss: f64 = thetas.iter().map(|t| (t - mean).norm_sqr()).sum();
    (estimate, ((m as f64 - 1.0) / m as f64 * ss).sqrt())
}

/// Real-valued wrapper of [`jackknife`].
pub fn jackknife_real<G>(rows: &[Vec<f64>], g: G) -> (f64, f64)
where
    G: Fn(&[f64]) -> f64,
{
    let rows: Vec<Vec<Complex64>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
        .collect();
    let (est, se) = jackknife(&rows, |means| {
        let re: Vec<f64> = means.iter().map(|c| c.re).collect();
        Complex64::new(g(&re), 0.0)
    });
    (est.re, se)
}

/// Sample covariance `E(x conj(y))` from the means of `x`, `y`, `x conj(y)`,
/// with the `M / (M - 1)` correction for centering by the sample mean.
pub fn centered_product(m: usize, mean_x: Complex64, mean_y: Complex64, mean_xy: Complex64) -> Complex64 {
    let c = m as f64 / (m as f64 - 1.0);
    (mean_xy - mean_x * mean_y.conj()) * c
}

/// Jackknifed `E((x - x_bar) conj(y - y_bar))`.
pub fn covariance(x: &[Complex64], y: &[Complex64]) -> (Complex64, f64) {
    let m = x.len();
    let rows: Vec<Vec<Complex64>> = x
        .iter()
        .zip(y)
        .map(|(a, b)| vec![*a, *b, a * b.conj()])
        .collect();
    jackknife(&rows, |mu| centered_product(m, mu[0], mu[1], mu[2]))
}

/// Jackknifed `E((x - x_bar)(y - y_bar))`.
pub fn pseudo_covariance(x: &[Complex64], y: &[Complex64]) -> (Complex64, f64) {
    let yc: Vec<Complex64> = y.iter().map(|v| v.conj()).collect();
    covariance(x, &yc)
}

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Unbiased sample variance.
pub fn variance(x: &[f64]) -> f64 {
    let mu = mean(x);
    x.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / (x.len() as f64 - 1.0)
}

/// Moment summary of a real sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
}

/// Population-form skewness and excess kurtosis; `None` for zero variance.
pub fn moments(x: &[f64]) -> Option<Moments> {
    let n = x.len() as f64;
    if x.len() < 2 {
        return None;
    }
    let mu = mean(x);
    let m2 = x.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / n;
    if !(m2 > 0.0) || m2 <= (f64::EPSILON * mu.abs()).powi(2) {
        return None;
    }
    let m3 = x.iter().map(|v| (v - mu).powi(3)).sum::<f64>() / n;
    let m4 = x.iter().map(|v| (v - mu).powi(4)).sum::<f64>() / n;
    Some(Moments {
        mean: mu,
        variance: m2 * n / (n - 1.0),
        skewness: m3 / m2.powf(1.5),
        excess_kurtosis: m4 / (m2 * m2) - 3.0,
    })
}

/// `(x - mean) / sd`, or `None` for constant data.
pub fn standardize(x: &[f64]) -> Option<Vec<f64>> {
    let m = moments(x)?;
    let sd = m.variance.sqrt();
    Some(x.iter().map(|v| (v - m.mean) / sd).collect())
}

pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// `sup |F_n - F|` for a continuous reference CDF.
pub fn ks_statistic(sample: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut x = sample.to_vec();
    x.sort_by(f64::total_cmp);
    let n = x.len() as f64;
    x.iter()
        .enumerate()
        .map(|(i, &v)| {
            let f = cdf(v);
            (f - i as f64 / n).max((i as f64 + 1.0) / n - f)
        })
        .fold(0.0, f64::max)
}

/// Asymptotic `P(sqrt(n) D_n > t)`, with the small-sample correction
/// `t = (sqrt(n) + 0.12 + 0.11 / sqrt(n)) D`.
pub fn ks_p_value(d: f64, n: usize) -> f64 {
    let sn = (n as f64).sqrt();
    let t = (sn + 0.12 + 0.11 / sn) * d;
    if t < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let k = k as f64;
        let term = 2.0 * (-2.0 * k * k * t * t).exp();
        sum += if k as i64 % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    sum.clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{CounterRng, Domain};

    fn normals(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = CounterRng::new(seed, 0, Domain::Synthetic);
        (0..n).map(|_| rng.normal_pair().0).collect()
    }

    #[test]
    fn jackknife_of_mean_is_classical_se() {
        let x = normals(1000, 1);
        let rows: Vec<Vec<f64>> = x.iter().map(|&v| vec![v]).collect();
        let (est, se) = jackknife_real(&rows, |m| m[0]);
        assert!((est - mean(&x)).abs() < 1e-14);
        let classical = (variance(&x) / 1000.0).sqrt();
        assert!((se - classical).abs() < 1e-12);
    }

    #[test]
    fn jackknife_degenerate() {
        let rows = vec![vec![Complex64::new(1.0, 0.0)], vec![Complex64::new(2.0, 0.0)]];
        let (_, se) = jackknife(&rows, |m| m[0]);
        assert!(se.is_infinite());
    }

    #[test]
    fn covariance_matches_direct() {
        let a = normals(400, 2);
        let b = normals(400, 3);
        let x: Vec<Complex64> = a.iter().zip(&b).map(|(p, q)| Complex64::new(*p, *q)).collect();
        let (c, se) = covariance(&x, &x);
        let mu: Complex64 = x.iter().sum::<Complex64>() / 400.0;
        let direct = x.iter().map(|v| (v - mu).norm_sqr()).sum::<f64>() / 399.0;
        assert!((c.re - direct).abs() < 1e-12 && c.im.abs() < 1e-12);
        assert!(se > 0.0 && se < 0.3);
    }

    #[test]
    fn moments_of_normals() {
        let x = normals(20_000, 4);
        let m = moments(&x).unwrap();
        assert!(m.skewness.abs() < 3.0 * (6.0f64 / 20_000.0).sqrt());
        assert!(m.excess_kurtosis.abs() < 3.0 * (24.0f64 / 20_000.0).sqrt());
        assert!(moments(&[2.0; 10]).is_none());
        assert!(standardize(&[1.0, 1.0, 1.0]).is_none());
    }

    #[test]
    fn normal_cdf_values() {
        assert!((normal_cdf(0.0) - 0.5).abs() < 1e-9);
        assert!((normal_cdf(1.96) - 0.975_002_1).abs() < 1e-6);
        assert!((normal_cdf(-1.0) - 0.158_655_25).abs() < 1e-6);
    }

    #[test]
    fn ks_on_normal_sample() {
        let x = normals(2000, 9);
        let d = ks_statistic(&x, normal_cdf);
        assert!(ks_p_value(d, x.len()) > 0.0027);
        let shifted: Vec<f64> = x.iter().map(|v| v + 0.5).collect();
        assert!(ks_p_value(ks_statistic(&shifted, normal_cdf), x.len()) < 1e-6);
        assert!((ks_p_value(0.0, 10) - 1.0).abs() < 1e-15);
    }
}
