//! Test functions for linear statistics, with derivative, regularity
//! metadata and optional closed-form Fourier data.
//!
//! Fourier transforms use `f^(k) = (2 pi)^{-1/2} int f(x) e^{-ikx} dx`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type FourierFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// Which part of the Cauchy kernel `r(x) = (x - tau - i eta)^{-1}` a term uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CauchyPart {
    Re,
    Im,
}

/// `coeff * Part[(x - tau - i eta)^{-1}]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CauchyTerm {
    pub coeff: f64,
    pub tau: f64,
    pub eta: f64,
    pub part: CauchyPart,
}

impl CauchyTerm {
    /// Coefficients `(a, b)` with `term = a r + b conj(r)`.
    pub fn kernel_weights(&self) -> (Complex64, Complex64) {
        let half = 0.5 * self.coeff;
        match self.part {
            CauchyPart::Re => (Complex64::new(half, 0.0), Complex64::new(half, 0.0)),
            CauchyPart::Im => (Complex64::new(0.0, -half), Complex64::new(0.0, half)),
        }
    }
}

/// A real test function `f` with `f'`, Holder exponent of `f'` and decay
/// exponent (`f, f' = O(|x|^{-1-beta})`).
#[derive(Clone)]
pub struct TestFunction {
    name: String,
    f: RealFn,
    df: RealFn,
    pub holder: f64,
    pub decay: f64,
    fourier: Option<FourierFn>,
    /// Closed interval outside which `f` vanishes identically.
    pub support: Option<(f64, f64)>,
    /// Points where `f` loses smoothness beyond its stated regularity.
    pub kinks: Vec<f64>,
    /// Exact decomposition into Cauchy kernels, when there is one.
    pub cauchy: Vec<CauchyTerm>,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction")
            .field("name", &self.name)
            .field("holder", &self.holder)
            .field("decay", &self.decay)
            .field("support", &self.support)
            .field("closed_form_fourier", &self.fourier.is_some())
            .finish()
    }
}

impl TestFunction {
    pub fn new(
        name: impl Into<String>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        df: impl Fn(f64) -> f64 + Send + Sync + 'static,
        holder: f64,
        decay: f64,
    ) -> Self {
        TestFunction {
            name: name.into(),
            f: Arc::new(f),
            df: Arc::new(df),
            holder,
            decay,
            fourier: None,
            support: None,
            kinks: Vec::new(),
            cauchy: Vec::new(),
        }
    }

    pub fn with_fourier(mut self, fhat: impl Fn(f64) -> Complex64 + Send + Sync + 'static) -> Self {
        self.fourier = Some(Arc::new(fhat));
        self
    }

    pub fn with_support(mut self, a: f64, b: f64) -> Self {
        self.support = Some((a, b));
        self.kinks.extend([a, b]);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn value(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        (self.df)(x)
    }

    pub fn fourier(&self, k: f64) -> Option<Complex64> {
        self.fourier.as_ref().map(|g| g(k))
    }

    pub fn has_fourier(&self) -> bool {
        self.fourier.is_some()
    }

    pub fn zero() -> Self {
        TestFunction {
            support: Some((0.0, 0.0)),
            ..Self::new("zero", |_| 0.0, |_| 0.0, 1.0, f64::INFINITY)
                .with_fourier(|_| Complex64::new(0.0, 0.0))
        }
    }

    /// `exp(-x^2 / 2)`, self-dual under the unitary transform.
    pub fn gaussian() -> Self {
        Self::new(
            "gaussian",
            |x| (-0.5 * x * x).exp(),
            |x| -x * (-0.5 * x * x).exp(),
            1.0,
            f64::INFINITY,
        )
        .with_fourier(|k| Complex64::new((-0.5 * k * k).exp(), 0.0))
    }

    /// `(1 - u^2)^3` with `u = (x - center) / half_width`: compactly supported, C^2.
    pub fn bump_c2(center: f64, half_width: f64) -> Self {
        let (c, w) = (center, half_width);
        Self::new(
            format!("bump_c2({c},{w})"),
            move |x| {
                let u = (x - c) / w;
                if u.abs() >= 1.0 {
                    0.0
                } else {
                    (1.0 - u * u).powi(3)
                }
            },
            move |x| {
                let u = (x - c) / w;
                if u.abs() >= 1.0 {
                    0.0
                } else {
                    -6.0 * u * (1.0 - u * u).powi(2) / w
                }
            },
            1.0,
            f64::INFINITY,
        )
        .with_support(c - w, c + w)
    }

    /// `(1 - u^2)^{3/2}`: compactly supported, `f'` is Holder-1/2 at the edges.
    pub fn bump_holder(center: f64, half_width: f64) -> Self {
        let (c, w) = (center, half_width);
        Self::new(
            format!("bump_holder({c},{w})"),
            move |x| {
                let u = (x - c) / w;
                if u.abs() >= 1.0 {
                    0.0
                } else {
                    (1.0 - u * u).powf(1.5)
                }
            },
            move |x| {
                let u = (x - c) / w;
                if u.abs() >= 1.0 {
                    0.0
                } else {
                    -3.0 * u * (1.0 - u * u).sqrt() / w
                }
            },
            0.5,
            f64::INFINITY,
        )
        .with_support(c - w, c + w)
    }

    /// `exp(1 - 1/(1 - u^2))`: compactly supported and smooth.
    pub fn bump_smooth(center: f64, half_width: f64) -> Self {
        let (c, w) = (center, half_width);
        Self::new(
            format!("bump_smooth({c},{w})"),
            move |x| {
                let u = (x - c) / w;
                if u.abs() >= 1.0 {
                    0.0
                } else {
                    (1.0 - 1.0 / (1.0 - u * u)).exp()
                }
            },
            move |x| {
                let u = (x - c) / w;
                if u.abs() >= 1.0 {
                    0.0
                } else {
                    let q = 1.0 - u * u;
                    (1.0 - 1.0 / q).exp() * (-2.0 * u / (q * q)) / w
                }
            },
            1.0,
            f64::INFINITY,
        )
        .with_support(c - w, c + w)
    }

    /// `Re (x - tau - i eta)^{-1} = (x - tau) / ((x - tau)^2 + eta^2)`.
    pub fn cauchy_real(tau: f64, eta: f64) -> Self {
        let t = Self::new(
            format!("cauchy_re({tau},{eta})"),
            move |x| {
                let y = x - tau;
                y / (y * y + eta * eta)
            },
            move |x| {
                let y = x - tau;
                let q = y * y + eta * eta;
                (eta * eta - y * y) / (q * q)
            },
            1.0,
            0.0,
        )
        .with_fourier(move |k| {
            let mag = (PI / 2.0).sqrt() * (-k.abs() * eta).exp();
            Complex64::new(0.0, -k.signum() * mag) * Complex64::from_polar(1.0, -k * tau)
        });
        TestFunction {
            cauchy: vec![CauchyTerm {
                coeff: 1.0,
                tau,
                eta,
                part: CauchyPart::Re,
            }],
            ..t
        }
    }

    /// `Im (x - tau - i eta)^{-1} = eta / ((x - tau)^2 + eta^2)`.
    pub fn cauchy_imag(tau: f64, eta: f64) -> Self {
        let t = Self::new(
            format!("cauchy_im({tau},{eta})"),
            move |x| {
                let y = x - tau;
                eta / (y * y + eta * eta)
            },
            move |x| {
                let y = x - tau;
                let q = y * y + eta * eta;
                -2.0 * eta * y / (q * q)
            },
            1.0,
            1.0,
        )
        .with_fourier(move |k| {
            Complex64::from_polar((PI / 2.0).sqrt() * (-k.abs() * eta).exp(), -k * tau)
        });
        TestFunction {
            cauchy: vec![CauchyTerm {
                coeff: 1.0,
                tau,
                eta,
                part: CauchyPart::Im,
            }],
            ..t
        }
    }

    /// `x -> f(a x)` for `a > 0`.
    pub fn scaled(&self, a: f64) -> Self {
        assert!(a > 0.0, "scale must be positive");
        let (f, df) = (self.f.clone(), self.df.clone());
        let fourier = self.fourier.clone().map(|g| -> FourierFn {
            Arc::new(move |k: f64| g(k / a) / a)
        });
        TestFunction {
            name: format!("{}(x*{a})", self.name),
            f: Arc::new(move |x| f(a * x)),
            df: Arc::new(move |x| a * df(a * x)),
            holder: self.holder,
            decay: self.decay,
            fourier,
            support: self.support.map(|(l, r)| (l / a, r / a)),
            kinks: self.kinks.iter().map(|k| k / a).collect(),
            cauchy: self
                .cauchy
                .iter()
                .map(|c| CauchyTerm {
                    coeff: c.coeff / a,
                    tau: c.tau / a,
                    eta: c.eta / a,
                    part: c.part,
                })
                .collect(),
        }
    }

    /// `x -> f(-x)`.
    pub fn reflected(&self) -> Self {
        let (f, df) = (self.f.clone(), self.df.clone());
        let fourier = self
            .fourier
            .clone()
            .map(|g| -> FourierFn { Arc::new(move |k: f64| g(-k)) });
        TestFunction {
            name: format!("{}(-x)", self.name),
            f: Arc::new(move |x| f(-x)),
            df: Arc::new(move |x| -df(-x)),
            holder: self.holder,
            decay: self.decay,
            fourier,
            support: self.support.map(|(l, r)| (-r, -l)),
            kinks: self.kinks.iter().map(|k| -k).collect(),
            cauchy: self
                .cauchy
                .iter()
                .map(|c| CauchyTerm {
                    // Re r(-x) = -Re r'(x), Im r(-x) = Im r'(x) with r' centered at -tau.
                    coeff: match c.part {
                        CauchyPart::Re => -c.coeff,
                        CauchyPart::Im => c.coeff,
                    },
                    tau: -c.tau,
                    ..*c
                })
                .collect(),
        }
    }

    /// Pointwise sum.
    pub fn plus(&self, other: &TestFunction) -> Self {
        let (f1, f2) = (self.f.clone(), other.f.clone());
        let (d1, d2) = (self.df.clone(), other.df.clone());
        let fourier = match (&self.fourier, &other.fourier) {
            (Some(a), Some(b)) => {
                let (a, b) = (a.clone(), b.clone());
                Some(Arc::new(move |k: f64| a(k) + b(k)) as FourierFn)
            }
            _ => None,
        };
        let support = match (self.support, other.support) {
            (Some((a, b)), Some((c, d))) => Some((a.min(c), b.max(d))),
            _ => None,
        };
        let mut kinks = self.kinks.clone();
        kinks.extend(&other.kinks);
        let cauchy = if self.cauchy.is_empty() || other.cauchy.is_empty() {
            Vec::new()
        } else {
            self.cauchy.iter().chain(&other.cauchy).copied().collect()
        };
        TestFunction {
            name: format!("{}+{}", self.name, other.name),
            f: Arc::new(move |x| f1(x) + f2(x)),
            df: Arc::new(move |x| d1(x) + d2(x)),
            holder: self.holder.min(other.holder),
            decay: self.decay.min(other.decay),
            fourier,
            support,
            kinks,
            cauchy,
        }
    }

    /// Compact bumps used by the Helffer-Sjostrand checks.
    pub fn compact_corpus() -> Vec<TestFunction> {
        vec![
            TestFunction::bump_c2(0.0, 1.0),
            TestFunction::bump_c2(0.5, 2.0),
            TestFunction::bump_smooth(-0.3, 1.5),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn central_diff(f: &TestFunction, x: f64) -> f64 {
        let h = 1e-6;
        (f.value(x + h) - f.value(x - h)) / (2.0 * h)
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let corpus = vec![
            TestFunction::gaussian(),
            TestFunction::bump_c2(0.2, 1.3),
            TestFunction::bump_holder(0.0, 1.0),
            TestFunction::bump_smooth(0.0, 2.0),
            TestFunction::cauchy_real(0.3, 0.7),
            TestFunction::cauchy_imag(-1.0, 2.0),
            TestFunction::gaussian().scaled(2.0),
            TestFunction::cauchy_real(0.3, 0.7).reflected(),
        ];
        for f in &corpus {
            for x in [-1.7, -0.55, 0.0, 0.31, 0.9, 2.4] {
                let fd = central_diff(f, x);
                assert!((fd - f.derivative(x)).abs() < 1e-6, "{} at {x}", f.name());
            }
        }
    }

    #[test]
    fn cauchy_terms_reproduce_values() {
        for f in [
            TestFunction::cauchy_real(0.4, 0.8),
            TestFunction::cauchy_imag(-0.2, 1.5).scaled(0.5),
            TestFunction::cauchy_real(1.0, 1.0).reflected(),
        ] {
            for x in [-3.0, 0.1, 2.0] {
                let v: f64 = f
                    .cauchy
                    .iter()
                    .map(|c| {
                        let r = Complex64::new(x - c.tau, -c.eta).inv();
                        c.coeff * if c.part == CauchyPart::Re { r.re } else { r.im }
                    })
                    .sum();
                assert!((v - f.value(x)).abs() < 1e-14, "{}", f.name());
            }
        }
    }

    #[test]
    fn support_is_respected() {
        let f = TestFunction::bump_c2(1.0, 0.5);
        assert_eq!(f.support, Some((0.5, 1.5)));
        assert_eq!(f.value(0.49), 0.0);
        assert_eq!(f.value(1.51), 0.0);
        assert_eq!(f.value(1.0), 1.0);
        let g = f.scaled(2.0);
        assert_eq!(g.support, Some((0.25, 0.75)));
    }
}
