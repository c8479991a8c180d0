//! Report types and on-disk output.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::Result;
use crate::spectral::{MesoFrame, Regime};

use super::ExperimentConfig;

/// A closed-form prediction together with where it comes from.
#[derive(Clone, Debug, Serialize)]
pub struct Target {
    pub label: String,
    pub value: Complex64,
    pub citation: String,
}

impl Target {
    pub fn new(label: impl Into<String>, value: Complex64, citation: impl Into<String>) -> Self {
        Target {
            label: label.into(),
            value,
            citation: citation.into(),
        }
    }

    pub fn real(label: impl Into<String>, value: f64, citation: impl Into<String>) -> Self {
        Self::new(label, Complex64::new(value, 0.0), citation)
    }
}

/// How the z-scores of several targets combine into a verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Gate {
    /// Every target must be within the bound.
    All,
    /// At least one target must be; used when conventions compete.
    Any,
}

/// A Monte Carlo estimate with its standard error and targets.
#[derive(Clone, Debug, Serialize)]
pub struct Estimate {
    pub name: String,
    pub value: Complex64,
    pub standard_error: f64,
    pub targets: Vec<Target>,
    /// `|value - target| / standard_error`, one per target.
    pub z_scores: Vec<f64>,
    pub bound: f64,
    pub gate: Gate,
    pub pass: bool,
    /// Label of the closest target.
    pub closest: Option<String>,
    /// Exploratory estimates are reported but do not affect the exit status.
    pub exploratory: bool,
}

pub fn z_score(value: Complex64, target: Complex64, se: f64) -> f64 {
    let diff = (value - target).norm();
    if diff == 0.0 {
        0.0
    } else {
        diff / se
    }
}

impl Estimate {
    pub fn new(name: impl Into<String>, value: Complex64, se: f64, targets: Vec<Target>, bound: f64, gate: Gate) -> Self {
        let z_scores: Vec<f64> = targets.iter().map(|t| z_score(value, t.value, se)).collect();
        let ok = |z: &f64| *z <= bound;
        let pass = match gate {
            Gate::All => z_scores.iter().all(ok),
            Gate::Any => z_scores.iter().any(ok),
        };
        let closest = z_scores
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| targets[i].label.clone());
        Estimate {
            name: name.into(),
            value,
            standard_error: se,
            targets,
            z_scores,
            bound,
            gate,
            pass,
            closest,
            exploratory: false,
        }
    }

    pub fn real(name: impl Into<String>, value: f64, se: f64, targets: Vec<Target>, bound: f64) -> Self {
        Self::new(name, Complex64::new(value, 0.0), se, targets, bound, Gate::All)
    }

    pub fn exploratory(mut self) -> Self {
        self.exploratory = true;
        self
    }

    pub fn max_z(&self) -> f64 {
        self.z_scores.iter().copied().fold(0.0, f64::max)
    }
}

/// A deterministic pass/fail check that is not a z-score.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub pass: bool,
    /// Exploratory checks are reported but do not affect the exit status.
    pub exploratory: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Check {
            name: name.into(),
            value,
            limit,
            pass: value <= limit,
            exploratory: false,
        }
    }

    pub fn at_least(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Check {
            name: name.into(),
            value,
            limit,
            pass: value >= limit,
            exploratory: false,
        }
    }

    pub fn exploratory(mut self) -> Self {
        self.exploratory = true;
        self
    }
}

/// Wall-clock accounting, kept apart from the reproducible content.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Timing {
    pub total_seconds: f64,
    pub per_sample_seconds: Vec<f64>,
}

/// Simple numeric table for `data.csv` and `plotdata_*.csv`.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(out, "{}", self.header.join(","))?;
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(|v| format!("{v:e}")).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Result of one experiment run.
#[derive(Clone, Debug, Serialize)]
pub struct EstimateReport {
    pub config: ExperimentConfig,
    /// The frame actually used, with the realized `d_N`.
    pub frame: Option<MesoFrame>,
    pub regime: Option<Regime>,
    pub parameters: BTreeMap<String, f64>,
    pub estimates: Vec<Estimate>,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
    pub flags: Vec<String>,
    #[serde(skip)]
    pub data: Table,
    #[serde(skip)]
    pub plots: Vec<(String, Table)>,
    pub timing: Timing,
}

impl EstimateReport {
    pub fn new(config: ExperimentConfig, frame: Option<MesoFrame>) -> Self {
        EstimateReport {
            config,
            regime: frame.map(|f| f.regime()),
            frame,
            parameters: BTreeMap::new(),
            estimates: Vec::new(),
            checks: Vec::new(),
            notes: Vec::new(),
            flags: Vec::new(),
            data: Table::default(),
            plots: Vec::new(),
            timing: Timing::default(),
        }
    }

    /// True when every estimate and every non-exploratory check passes.
    pub fn passed(&self) -> bool {
        self.estimates.iter().all(|e| e.pass || e.exploratory) && self.checks.iter().all(|c| c.pass || c.exploratory)
    }

    /// Process exit status: 0 when [`passed`](Self::passed), 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            2
        }
    }

    pub fn estimate(&self, name: &str) -> Option<&Estimate> {
        self.estimates.iter().find(|e| e.name == name)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Canonical JSON of everything except timing, plus the raw data.
    pub fn fingerprint(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if let Some(obj) = v.as_object_mut() {
            obj.remove("timing");
            if let Some(cfg) = obj.get_mut("config").and_then(|c| c.as_object_mut()) {
                cfg.remove("workers");
            }
            obj.insert("data".into(), serde_json::to_value(&self.data).unwrap());
            obj.insert("plots".into(), serde_json::to_value(&self.plots).unwrap());
        }
        v.to_string()
    }

    /// Writes `report.json`, `data.csv` and one `plotdata_{name}.csv` per plot.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("report.json"), serde_json::to_string_pretty(self)?)?;
        self.data.write_csv(&dir.join("data.csv"))?;
        for (name, t) in &self.plots {
            t.write_csv(&dir.join(format!("plotdata_{name}.csv")))?;
        }
        Ok(())
    }

    /// One line per estimate and check.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        for e in &self.estimates {
            let zs: Vec<String> = e.z_scores.iter().map(|z| format!("{z:.2}")).collect();
            s.push_str(&format!(
                "{:<5} {:<28} {:>+.5}{:+.5}i  se {:.5}  z [{}]\n",
                if e.pass { "ok" } else if e.exploratory { "note" } else { "FAIL" },
                e.name,
                e.value.re,
                e.value.im,
                e.standard_error,
                zs.join(", ")
            ));
        }
        for c in &self.checks {
            s.push_str(&format!(
                "{:<5} {:<28} {:.6e} (limit {:.3e}){}\n",
                if c.pass { "ok" } else if c.exploratory { "note" } else { "FAIL" },
                c.name,
                c.value,
                c.limit,
                if c.exploratory { " exploratory" } else { "" }
            ));
        }
        for f in &self.flags {
            s.push_str(&format!("flag  {f}\n"));
        }
        for n in &self.notes {
            s.push_str(&format!("note  {n}\n"));
        }
        s
    }
}
