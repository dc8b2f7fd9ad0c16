//! Seeded Monte-Carlo campaigns.
//!
//! An [`ExperimentSpec`] is validated up front, then every `(series, x)` point runs its
//! trials on independent substreams keyed by `(seed, point, trial)`, so output is
//! bit-identical for a given document regardless of thread count.

pub mod ci;
mod config;
mod runner;

pub use config::{
    Axis, ChannelConfig, DetectorSection, ExperimentKind, ExperimentSpec, FreqPolicy, HistogramSection,
    JammerConfig, JammerPlan, JammerType, PmdMode, PointSetup, Sweep, SymbolConfig, SymbolPolicyKind,
    DEFAULT_PMD_TRIALS, DEFAULT_SER_TRIALS,
};
pub use runner::{draw_trial_frame, TrialFrame};

use crate::Result;

/// One `(x, metric, CI)` row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub x: f64,
    pub metric: f64,
    pub ci_halfwidth: f64,
    pub trials_effective: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Empty,
}

impl Cell {
    pub fn render(&self) -> String {
        match self {
            Cell::Num(v) if v.is_finite() => format!("{v}"),
            Cell::Num(_) | Cell::Empty => String::new(),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(v) => Some(*v),
            Cell::Int(v) => Some(*v as f64),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveRow {
    /// Value of the series axis, when the document has one.
    pub series: Option<f64>,
    pub point: CurvePoint,
    pub extras: Vec<(&'static str, Cell)>,
}

impl CurveRow {
    pub fn extra(&self, name: &str) -> Option<&Cell> {
        self.extras.iter().find(|(k, _)| *k == name).map(|(_, v)| v)
    }
}

/// Noise-free spectrum with the symbol's peak.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumRow {
    pub n: usize,
    pub magnitude: f64,
    pub interference: crate::Complex,
}

/// Statistic densities on a shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct HistogramRow {
    pub t: f64,
    pub density_h0: f64,
    pub density_h1: f64,
    pub pdf_h0: f64,
    pub pdf_h1: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum OutputBody {
    Curve(Vec<CurveRow>),
    Spectrum(Vec<SpectrumRow>),
    Histogram(Vec<HistogramRow>),
}

/// Header plus rendered rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub kind: ExperimentKind,
    pub series_axis: Option<Axis>,
    pub body: OutputBody,
    /// Scalar facts about the run (thresholds, KS distances, extremal symbols, ...).
    pub summary: Vec<(String, Cell)>,
}

impl ExperimentOutput {
    pub fn curve(&self) -> Option<&[CurveRow]> {
        match &self.body {
            OutputBody::Curve(c) => Some(c),
            _ => None,
        }
    }

    pub fn summary_value(&self, key: &str) -> Option<&Cell> {
        self.summary.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    /// Simulated trials behind each row (empty for noise-free tables).
    pub fn trials_per_point(&self) -> Vec<u64> {
        match &self.body {
            OutputBody::Curve(rows) => rows.iter().map(|r| r.point.trials_effective).collect(),
            _ => Vec::new(),
        }
    }

    pub fn table(&self) -> Table {
        match &self.body {
            OutputBody::Curve(rows) => {
                let mut header: Vec<String> = ["x", "metric", "ci_halfwidth", "trials_effective"]
                    .iter()
                    .map(|s| s.to_string())
                    .collect();
                if let Some(axis) = self.series_axis {
                    header.push(axis.name().to_string());
                }
                if let Some(first) = rows.first() {
                    header.extend(first.extras.iter().map(|(k, _)| k.to_string()));
                }
                let rows = rows
                    .iter()
                    .map(|r| {
                        let p = &r.point;
                        let mut line = vec![
                            Cell::Num(p.x).render(),
                            Cell::Num(p.metric).render(),
                            Cell::Num(p.ci_halfwidth).render(),
                            p.trials_effective.to_string(),
                        ];
                        if self.series_axis.is_some() {
                            line.push(r.series.map(|v| Cell::Num(v).render()).unwrap_or_default());
                        }
                        line.extend(r.extras.iter().map(|(_, v)| v.render()));
                        line
                    })
                    .collect();
                Table { header, rows }
            }
            OutputBody::Spectrum(rows) => Table {
                header: ["n", "magnitude", "interference_re", "interference_im", "interference_mag"]
                    .iter()
                    .map(|s| s.to_string())
                    .collect(),
                rows: rows
                    .iter()
                    .map(|r| {
                        vec![
                            r.n.to_string(),
                            Cell::Num(r.magnitude).render(),
                            Cell::Num(r.interference.re).render(),
                            Cell::Num(r.interference.im).render(),
                            Cell::Num(r.interference.norm()).render(),
                        ]
                    })
                    .collect(),
            },
            OutputBody::Histogram(rows) => Table {
                header: ["t", "density_h0", "density_h1", "pdf_h0", "pdf_h1"]
                    .iter()
                    .map(|s| s.to_string())
                    .collect(),
                rows: rows
                    .iter()
                    .map(|r| {
                        [r.t, r.density_h0, r.density_h1, r.pdf_h0, r.pdf_h1]
                            .iter()
                            .map(|&v| Cell::Num(v).render())
                            .collect()
                    })
                    .collect(),
            },
        }
    }
}

/// Validates `spec` and runs it.
pub fn run(spec: &ExperimentSpec) -> Result<ExperimentOutput> {
    spec.validate()?;
    use ExperimentKind::*;
    match spec.kind {
        SerVsSjr | SerVsRho => runner::run_ser_experiment(spec),
        PmdVsL | PmdVsNjr | PmdTheoryVsSim | FapVsL => runner::run_pmd_experiment(spec),
        DftIllustration => runner::run_dft_illustration(spec),
        StatisticHistogram => runner::run_statistic_histogram(spec),
    }
}
