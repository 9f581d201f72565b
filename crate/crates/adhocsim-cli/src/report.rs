//! Result tables and their deterministic on-disk formats.

use crate::config::{ExperimentConfig, ExperimentKind};
use std::io::Write;
use std::path::{Path, PathBuf};

/// One experiment's result table. All cells are numeric; the column set is
/// fixed per experiment kind.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricsReport {
    pub kind: ExperimentKind,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl MetricsReport {
    pub fn new(kind: ExperimentKind, columns: Vec<&'static str>) -> Self {
        MetricsReport {
            kind,
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// All values of a named column, in row order.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|&c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    /// Value of a named column in one row.
    pub fn value(&self, row: usize, name: &str) -> Option<f64> {
        let idx = self.columns.iter().position(|&c| c == name)?;
        self.rows.get(row).map(|r| r[idx])
    }

    /// Rows matching a predicate on named columns.
    pub fn select(&self, mut pred: impl FnMut(&dyn Fn(&str) -> f64) -> bool) -> Vec<usize> {
        (0..self.rows.len())
            .filter(|&i| {
                let get = |name: &str| self.value(i, name).unwrap_or(f64::NAN);
                pred(&get)
            })
            .collect()
    }

    /// Render the table as CSV with deterministic number formatting.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let mut first = true;
            for &v in row {
                if !first {
                    out.push(',');
                }
                out.push_str(&fmt_sig9(v));
                first = false;
            }
            out.push('\n');
        }
        out
    }
}

/// Format a float with 9 significant digits in fixed decimal notation
/// (scientific only for extreme magnitudes), so equal values always render
/// as identical bytes. Integers render without a fractional part.
pub fn fmt_sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == x.trunc() && x.abs() < 1e15 {
        return format!("{}", x as i64);
    }
    let mag = x.abs().log10().floor() as i32;
    if (-4..9).contains(&mag) {
        let decimals = (8 - mag).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.8e}")
    }
}

/// Write `<kind>.csv` and `<kind>.meta.json` under `out_dir`; returns both
/// paths. The meta sidecar records the exact config, seed, code version,
/// wall time, and any supplied fit summaries.
pub fn persist(
    report: &MetricsReport,
    cfg: &ExperimentConfig,
    fits: serde_json::Value,
    wall_time_secs: f64,
) -> std::io::Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(&cfg.out_dir)?;
    let csv_path = cfg.out_dir.join(format!("{}.csv", report.kind.as_str()));
    let meta_path = cfg
        .out_dir
        .join(format!("{}.meta.json", report.kind.as_str()));

    write_atomically(&csv_path, report.to_csv().as_bytes())?;

    let meta = serde_json::json!({
        "kind": report.kind.as_str(),
        "config": cfg,
        "base_seed": cfg.base_seed,
        "version": env!("CARGO_PKG_VERSION"),
        "wall_time_secs": wall_time_secs,
        "rows": report.rows.len(),
        "columns": report.columns,
        "fits": fits,
    });
    write_atomically(
        &meta_path,
        serde_json::to_string_pretty(&meta)
            .expect("meta serializes")
            .as_bytes(),
    )?;
    Ok((csv_path, meta_path))
}

fn write_atomically(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)
}
