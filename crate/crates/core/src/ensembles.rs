//! Wigner ensembles: entry laws, matrix sampling and dense eigensolves.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use faer::linalg::evd::{self, ComputeEigenvectors};
use faer::{Mat, MatRef, Par};
use faer::dyn_stack::{MemBuffer, MemStack};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rng::{CounterRng, Domain};

/// Off-diagonal entry law.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EnsembleKind {
    /// Standard complex Gaussian, `E|W|^4 = 2`.
    #[serde(rename = "GUE")]
    Gue,
    /// Uniform on `{1, i, -1, -i}`, `E|W|^4 = 1`.
    FourPhase,
    /// Uniform on the centered disk of radius `sqrt(2)`, `E|W|^4 = 4/3`.
    ComplexUniformDisk,
}

impl EnsembleKind {
    pub const ALL: [EnsembleKind; 3] = [
        EnsembleKind::Gue,
        EnsembleKind::FourPhase,
        EnsembleKind::ComplexUniformDisk,
    ];

    /// `E(|W|^2 - 1)^2` of the off-diagonal law.
    pub fn fourth_moment_excess(self) -> f64 {
        match self {
            EnsembleKind::Gue => 1.0,
            EnsembleKind::FourPhase => 0.0,
            EnsembleKind::ComplexUniformDisk => 1.0 / 3.0,
        }
    }

    /// `E|W|^4` of the off-diagonal law.
    pub fn fourth_moment(self) -> f64 {
        1.0 + self.fourth_moment_excess()
    }

    pub fn name(self) -> &'static str {
        match self {
            EnsembleKind::Gue => "GUE",
            EnsembleKind::FourPhase => "FourPhase",
            EnsembleKind::ComplexUniformDisk => "ComplexUniformDisk",
        }
    }

    fn domain(self) -> Domain {
        match self {
            EnsembleKind::Gue => Domain::MatrixGue,
            EnsembleKind::FourPhase => Domain::MatrixFourPhase,
            EnsembleKind::ComplexUniformDisk => Domain::MatrixDisk,
        }
    }
}

impl fmt::Display for EnsembleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for EnsembleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gue" => Ok(EnsembleKind::Gue),
            "fourphase" | "four-phase" | "four_phase" => Ok(EnsembleKind::FourPhase),
            "complexuniformdisk" | "disk" | "uniform-disk" => Ok(EnsembleKind::ComplexUniformDisk),
            other => Err(invalid("kind", format!("unknown ensemble `{other}`"))),
        }
    }
}

/// Identifies one matrix draw.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    pub n: usize,
    pub seed: u64,
    pub sample_index: u64,
}

impl EnsembleSpec {
    pub fn new(kind: EnsembleKind, n: usize, seed: u64) -> Self {
        EnsembleSpec {
            kind,
            n,
            seed,
            sample_index: 0,
        }
    }

    pub fn with_sample(self, sample_index: u64) -> Self {
        EnsembleSpec {
            sample_index,
            ..self
        }
    }

    /// File stem `{kind}_n{n}_seed{seed}_s{sample_index}`.
    pub fn file_stem(&self) -> String {
        format!(
            "{}_n{}_seed{}_s{}",
            self.kind, self.n, self.seed, self.sample_index
        )
    }
}

/// Draw one off-diagonal entry. Consumes exactly two 64-bit words.
pub fn sample_entry(kind: EnsembleKind, rng: &mut CounterRng) -> Complex64 {
    match kind {
        EnsembleKind::Gue => {
            let (a, b) = rng.normal_pair();
            Complex64::new(a, b) * std::f64::consts::FRAC_1_SQRT_2
        }
        EnsembleKind::FourPhase => {
            let bits = rng.next_word();
            let _ = rng.next_word();
            match bits >> 62 {
                0 => Complex64::new(1.0, 0.0),
                1 => Complex64::new(0.0, 1.0),
                2 => Complex64::new(-1.0, 0.0),
                _ => Complex64::new(0.0, -1.0),
            }
        }
        EnsembleKind::ComplexUniformDisk => {
            let u = rng.open01();
            let v = rng.open01();
            let r = (2.0 * u).sqrt();
            Complex64::from_polar(r, std::f64::consts::TAU * v)
        }
    }
}

/// Draw one diagonal entry: real, mean 0, variance 1. Consumes two words.
pub fn sample_diagonal(kind: EnsembleKind, rng: &mut CounterRng) -> f64 {
    match kind {
        EnsembleKind::Gue => rng.normal_pair().0,
        EnsembleKind::FourPhase | EnsembleKind::ComplexUniformDisk => {
            let bits = rng.next_word();
            let _ = rng.next_word();
            if bits >> 63 == 0 {
                1.0
            } else {
                -1.0
            }
        }
    }
}

/// A normalized Hermitian matrix `W / sqrt(N)`.
#[derive(Clone, Debug)]
pub struct WignerSample {
    entries: Mat<Complex64>,
    pub spec: EnsembleSpec,
}

impl WignerSample {
    pub fn n(&self) -> usize {
        self.spec.n
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.entries[(i, j)]
    }

    pub fn matrix(&self) -> MatRef<'_, Complex64> {
        self.entries.as_ref()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.norm_l2()
    }
}

/// Sample `W / sqrt(N)`. Entry `(i, j)` with `i <= j` occupies words
/// `2j, 2j + 1` of stream `i` under the key `(seed, sample_index, kind)`.
pub fn sample_wigner(spec: EnsembleSpec) -> Result<WignerSample> {
    let n = spec.n;
    if n == 0 {
        return Err(invalid("n", "matrix dimension must be positive"));
    }
    let scale = 1.0 / (n as f64).sqrt();
    let mut rng = CounterRng::new(spec.seed, spec.sample_index, spec.kind.domain());
    let mut m = Mat::<Complex64>::zeros(n, n);
    for i in 0..n {
        rng.seek(i as u64, 2 * i as u64);
        m[(i, i)] = Complex64::new(sample_diagonal(spec.kind, &mut rng) * scale, 0.0);
        for j in i + 1..n {
            let w = sample_entry(spec.kind, &mut rng) * scale;
            m[(i, j)] = w;
            m[(j, i)] = w.conj();
        }
    }
    Ok(WignerSample { entries: m, spec })
}

/// Sorted real eigenvalues of one sample.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub n: usize,
    pub spec: Option<EnsembleSpec>,
}

impl Spectrum {
    /// Build from arbitrary values (sorted here).
    pub fn from_values(mut values: Vec<f64>) -> Self {
        values.sort_by(f64::total_cmp);
        Spectrum {
            n: values.len(),
            eigenvalues: values,
            spec: None,
        }
    }

    pub fn is_sorted(&self) -> bool {
        self.eigenvalues.windows(2).all(|w| w[0] <= w[1])
    }

    /// Persist as `{stem}.csv` (one eigenvalue per row) plus `{stem}.json`.
    pub fn write_to_dir(&self, dir: &Path) -> Result<PathBuf> {
        let spec = self
            .spec
            .ok_or_else(|| invalid("spectrum", "no ensemble provenance to name the file"))?;
        fs::create_dir_all(dir)?;
        let stem = spec.file_stem();
        let csv_path = dir.join(format!("{stem}.csv"));
        let mut out = std::io::BufWriter::new(fs::File::create(&csv_path)?);
        writeln!(out, "eigenvalue")?;
        for v in &self.eigenvalues {
            writeln!(out, "{v:e}")?;
        }
        out.flush()?;
        fs::write(
            dir.join(format!("{stem}.json")),
            serde_json::to_string_pretty(&spec)?,
        )?;
        Ok(csv_path)
    }

    /// Inverse of [`Spectrum::write_to_dir`].
    pub fn read_from(csv_path: &Path) -> Result<Self> {
        let text = fs::read_to_string(csv_path)?;
        let mut values = Vec::new();
        for line in text.lines().skip(1) {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let v: f64 = line
                .parse()
                .map_err(|_| invalid("csv", format!("bad eigenvalue `{line}`")))?;
            values.push(v);
        }
        let sidecar = csv_path.with_extension("json");
        let spec: EnsembleSpec = serde_json::from_str(&fs::read_to_string(sidecar)?)?;
        Ok(Spectrum {
            n: values.len(),
            eigenvalues: values,
            spec: Some(spec),
        })
    }
}

/// Eigenvalues of a dense Hermitian matrix, ascending. Only the lower
/// triangle is read.
pub fn hermitian_eigenvalues(a: MatRef<'_, Complex64>) -> std::result::Result<Vec<f64>, ()> {
    let n = a.nrows();
    let mut s = faer::diag::Diag::<Complex64>::zeros(n);
    let par = Par::Seq;
    let mut buf = MemBuffer::new(evd::self_adjoint_evd_scratch::<Complex64>(
        n,
        ComputeEigenvectors::No,
        par,
        Default::default(),
    ));
    evd::self_adjoint_evd(
        a,
        s.as_mut(),
        None,
        par,
        MemStack::new(&mut buf),
        Default::default(),
    )
    .map_err(|_| ())?;
    let mut values: Vec<f64> = s.column_vector().iter().map(|x| x.re).collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

pub fn compute_spectrum(sample: &WignerSample) -> Result<Spectrum> {
    let eigenvalues =
        hermitian_eigenvalues(sample.matrix()).map_err(|_| Error::EigenNonConvergence {
            n: sample.spec.n,
            seed: sample.spec.seed,
            sample_index: sample.spec.sample_index,
        })?;
    Ok(Spectrum {
        n: eigenvalues.len(),
        eigenvalues,
        spec: Some(sample.spec),
    })
}

/// Sample and solve in one step.
pub fn sample_spectrum(spec: EnsembleSpec) -> Result<Spectrum> {
    compute_spectrum(&sample_wigner(spec)?)
}

/// `max_j ||H v_j - lambda_j v_j||_2 / ||H||_F` from a full decomposition.
pub fn eigen_residual(sample: &WignerSample) -> f64 {
    let a = sample.matrix();
    let eig = a
        .self_adjoint_eigen(faer::Side::Lower)
        .expect("full eigendecomposition");
    let u = eig.U();
    let s = eig.S();
    let n = a.nrows();
    let av = a * u;
    let mut worst = 0.0f64;
    for j in 0..n {
        let lambda = s[j].re;
        let mut r2 = 0.0;
        for i in 0..n {
            r2 += (av[(i, j)] - u[(i, j)] * lambda).norm_sqr();
        }
        worst = worst.max(r2.sqrt());
    }
    worst / sample.frobenius_norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stream() -> CounterRng {
        CounterRng::new(2024, 0, Domain::Synthetic)
    }

    #[test]
    fn four_phase_support_is_exact() {
        let mut rng = stream();
        for _ in 0..1000 {
            let w = sample_entry(EnsembleKind::FourPhase, &mut rng);
            let ok = [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)]
                .iter()
                .any(|&(a, b)| w.re == a && w.im == b);
            assert!(ok, "{w}");
        }
    }

    #[test]
    fn entry_moments() {
        let draws = 1_000_000;
        for kind in EnsembleKind::ALL {
            let mut rng = CounterRng::new(11, 0, Domain::Synthetic);
            let mut m1 = Complex64::new(0.0, 0.0);
            let mut m2 = Complex64::new(0.0, 0.0);
            let mut abs2 = 0.0;
            let mut abs4 = 0.0;
            let mut abs8 = 0.0;
            for _ in 0..draws {
                let w = sample_entry(kind, &mut rng);
                m1 += w;
                m2 += w * w;
                let a = w.norm_sqr();
                abs2 += a;
                abs4 += a * a;
                abs8 += a * a * a * a;
            }
            let d = draws as f64;
            let (m1, m2, abs2, abs4, abs8) = (m1 / d, m2 / d, abs2 / d, abs4 / d, abs8 / d);
            // E|W|^2 has SE sqrt(var(|W|^2)/d); E W^2 components have SE <= sqrt(E|W|^4/d).
            let se_abs2 = ((abs4 - abs2 * abs2).max(1e-300) / d).sqrt();
            let se_m = (abs4 / d).sqrt();
            let se_m1 = (abs2 / d).sqrt();
            assert!((abs2 - 1.0).abs() <= 4.0 * se_abs2.max(1e-12), "{kind}: E|W|^2 = {abs2}");
            assert!(m1.re.abs() <= 4.0 * se_m1 && m1.im.abs() <= 4.0 * se_m1, "{kind}: mean {m1}");
            assert!(m2.re.abs() <= 4.0 * se_m && m2.im.abs() <= 4.0 * se_m, "{kind}: E W^2 {m2}");
            let se_abs4 = ((abs8 - abs4 * abs4).max(1e-300) / d).sqrt();
            assert!(
                (abs4 - kind.fourth_moment()).abs() <= 4.0 * se_abs4.max(1e-12),
                "{kind}: E|W|^4 = {abs4}"
            );
        }
    }

    #[test]
    fn gue_second_moment_band() {
        let mut rng = CounterRng::new(3, 0, Domain::Synthetic);
        let mean: f64 = (0..1_000_000)
            .map(|_| sample_entry(EnsembleKind::Gue, &mut rng).norm_sqr())
            .sum::<f64>()
            / 1e6;
        assert!((mean - 1.0).abs() <= 0.004, "{mean}");
    }

    #[test]
    fn four_phase_pseudo_moment_band() {
        let mut rng = CounterRng::new(4, 0, Domain::Synthetic);
        let mut m2 = Complex64::new(0.0, 0.0);
        for _ in 0..1_000_000 {
            let w = sample_entry(EnsembleKind::FourPhase, &mut rng);
            m2 += w * w;
        }
        m2 /= 1e6;
        assert!(m2.re.abs() <= 0.004 && m2.im.abs() <= 0.004, "{m2}");
    }

    #[test]
    fn n_one_is_the_diagonal_draw() {
        let spec = EnsembleSpec::new(EnsembleKind::Gue, 1, 99);
        let sample = sample_wigner(spec).unwrap();
        let spectrum = compute_spectrum(&sample).unwrap();
        assert_eq!(sample.entry(0, 0).im, 0.0);
        assert_eq!(spectrum.eigenvalues, vec![sample.entry(0, 0).re]);
    }

    #[test]
    fn rejects_empty() {
        assert!(sample_wigner(EnsembleSpec::new(EnsembleKind::Gue, 0, 1)).is_err());
    }

    #[test]
    fn hermitian_by_construction() {
        for kind in EnsembleKind::ALL {
            let s = sample_wigner(EnsembleSpec::new(kind, 17, 5)).unwrap();
            for i in 0..17 {
                assert_eq!(s.entry(i, i).im, 0.0);
                for j in 0..17 {
                    assert_eq!(s.entry(i, j), s.entry(j, i).conj());
                }
            }
        }
    }

    #[test]
    fn entries_are_position_addressed() {
        // The same (i, j) entry appears in matrices of different size.
        let small = sample_wigner(EnsembleSpec::new(EnsembleKind::Gue, 5, 8)).unwrap();
        let large = sample_wigner(EnsembleSpec::new(EnsembleKind::Gue, 9, 8)).unwrap();
        for i in 0..5 {
            for j in i..5 {
                let a = small.entry(i, j) * 5f64.sqrt();
                let b = large.entry(i, j) * 9f64.sqrt();
                assert!((a - b).norm() < 1e-12, "{i},{j}");
            }
        }
    }

    #[test]
    fn determinism() {
        let spec = EnsembleSpec::new(EnsembleKind::FourPhase, 30, 123).with_sample(4);
        let a = sample_wigner(spec).unwrap();
        let b = sample_wigner(spec).unwrap();
        for i in 0..30 {
            for j in 0..30 {
                assert_eq!(a.entry(i, j), b.entry(i, j));
            }
        }
        let sa = compute_spectrum(&a).unwrap();
        let sb = compute_spectrum(&b).unwrap();
        assert_eq!(sa.eigenvalues, sb.eigenvalues);
    }

    #[test]
    fn two_by_two_and_diagonal() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let m = Mat::from_fn(2, 2, |i, j| {
            if i == j {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(h, 0.0)
            }
        });
        let ev = hermitian_eigenvalues(m.as_ref()).unwrap();
        assert!((ev[0] + h).abs() < 1e-15 && (ev[1] - h).abs() < 1e-15);

        let d = [3.0, -1.0, 2.0];
        let m = Mat::from_fn(3, 3, |i, j| {
            if i == j {
                Complex64::new(d[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        assert_eq!(hermitian_eigenvalues(m.as_ref()).unwrap(), vec![-1.0, 2.0, 3.0]);
    }

    #[test]
    fn residual_contract() {
        for (kind, n) in [(EnsembleKind::Gue, 200), (EnsembleKind::ComplexUniformDisk, 150)] {
            let s = sample_wigner(EnsembleSpec::new(kind, n, 77)).unwrap();
            let r = eigen_residual(&s);
            assert!(r <= 1e-10, "{kind}: {r:e}");
        }
    }

    #[test]
    fn gue_support_fraction() {
        let sp = sample_spectrum(EnsembleSpec::new(EnsembleKind::Gue, 1000, 1)).unwrap();
        assert!(sp.is_sorted());
        let inside = sp.eigenvalues.iter().filter(|x| x.abs() <= 2.0).count();
        assert!(inside as f64 / 1000.0 >= 0.999, "{inside}");
    }

    #[test]
    fn csv_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let sp = sample_spectrum(EnsembleSpec::new(EnsembleKind::FourPhase, 12, 3).with_sample(2)).unwrap();
        let path = sp.write_to_dir(dir.path()).unwrap();
        assert!(path.ends_with("FourPhase_n12_seed3_s2.csv"));
        let back = Spectrum::read_from(&path).unwrap();
        assert_eq!(back, sp);
    }
}
