//! CSV tables, run manifests and the console summary.

use std::io;
use std::path::{Path, PathBuf};

use jamlab::harness::{Cell, ExperimentOutput, ExperimentSpec};
use serde::Serialize;
use serde_json::{Map, Value};

/// Everything needed to reproduce a run bit-for-bit.
#[derive(Debug, Serialize)]
pub struct RunRecord {
    pub tool: &'static str,
    pub version: &'static str,
    /// File stem: the document's `name`, else its kind.
    pub name: String,
    pub kind: &'static str,
    pub seed: u64,
    /// Scale-down factor already folded into `config`.
    pub fast: Option<u64>,
    pub trials_per_point: Vec<u64>,
    pub summary: Map<String, Value>,
    /// Fully resolved document, accepted as-is by `--config`.
    pub config: String,
}

impl RunRecord {
    pub fn new(spec: &ExperimentSpec, out: &ExperimentOutput, fast: Option<u64>) -> Self {
        RunRecord {
            tool: "jamlab",
            version: env!("CARGO_PKG_VERSION"),
            name: spec.name.clone().unwrap_or_else(|| spec.kind.name().to_string()),
            kind: spec.kind.name(),
            seed: spec.seed,
            fast,
            trials_per_point: out.trials_per_point(),
            summary: out.summary.iter().map(|(k, v)| (k.clone(), json(v))).collect(),
            config: spec.to_toml_string(),
        }
    }
}

fn json(c: &Cell) -> Value {
    match c {
        Cell::Num(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
        Cell::Int(v) => Value::from(*v),
        Cell::Text(s) => Value::from(s.as_str()),
        Cell::Empty => Value::Null,
    }
}

/// Writes `<name>.csv` and `<name>.manifest.json` into `dir`.
pub fn write_outputs(dir: &Path, record: &RunRecord, out: &ExperimentOutput) -> io::Result<Vec<PathBuf>> {
    let csv_path = dir.join(format!("{}.csv", record.name));
    let table = out.table();
    let mut w = csv::Writer::from_path(&csv_path)?;
    w.write_record(&table.header)?;
    for row in &table.rows {
        w.write_record(row)?;
    }
    w.flush()?;

    let manifest_path = dir.join(format!("{}.manifest.json", record.name));
    let mut text = serde_json::to_string_pretty(record).map_err(io::Error::other)?;
    text.push('\n');
    std::fs::write(&manifest_path, text)?;
    Ok(vec![csv_path, manifest_path])
}

pub fn print_summary(spec: &ExperimentSpec, out: &ExperimentOutput) {
    println!("{} (seed {})", spec.kind.name(), spec.seed);
    for (k, v) in &out.summary {
        println!("  {k:<22} {}", v.render());
    }
    if let Some(rows) = out.curve() {
        let series = out.series_axis.map(|a| a.name()).unwrap_or("");
        println!("  {:>10} {:>12} {:>12} {:>10} {series}", "x", "metric", "ci95", "trials");
        for r in rows {
            let p = &r.point;
            let s = r.series.map(|v| format!("{v}")).unwrap_or_default();
            println!(
                "  {:>10} {:>12.4e} {:>12.2e} {:>10} {s}",
                p.x, p.metric, p.ci_halfwidth, p.trials_effective
            );
        }
    }
}
