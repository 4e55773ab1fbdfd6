use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde_json::{json, Value};

/// Everything a subcommand produces.
pub struct Report {
    pub command: &'static str,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
    pub summary: Value,
    pub plot: Option<Plot>,
    /// Set when the table was produced but some cell failed.
    pub failure: Option<laa_core::Error>,
}

impl Report {
    pub fn new(command: &'static str, header: &[&str]) -> Self {
        Report {
            command,
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            summary: Value::Null,
            plot: None,
            failure: None,
        }
    }

    pub fn row<const N: usize>(&mut self, cells: [String; N]) {
        self.rows.push(cells.to_vec());
    }

    pub fn csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        Ok(w.into_inner()?)
    }

    pub fn summary_json(&self) -> Value {
        let mut s = json!({ "command": self.command, "rows": self.rows.len(), "ok": self.failure.is_none() });
        if let (Value::Object(dst), Value::Object(src)) = (&mut s, &self.summary) {
            dst.extend(src.clone());
        }
        s
    }

    pub fn emit(&self, out: Option<&Path>, plot: Option<&Path>) -> Result<()> {
        let csv = self.csv()?;
        let summary = serde_json::to_string_pretty(&self.summary_json())?;
        match out {
            Some(dir) => {
                std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
                let path = dir.join(format!("{}.csv", self.command));
                std::fs::write(&path, csv).with_context(|| format!("writing {}", path.display()))?;
                let path = dir.join(format!("{}.summary.json", self.command));
                std::fs::write(&path, summary + "\n").with_context(|| format!("writing {}", path.display()))?;
            }
            None => {
                std::io::stdout().write_all(&csv)?;
                eprintln!("{summary}");
            }
        }
        if let (Some(path), Some(p)) = (plot, &self.plot) {
            std::fs::write(path, p.render()).with_context(|| format!("writing {}", path.display()))?;
        }
        Ok(())
    }
}

/// Voltage profiles for gnuplot: one `bus v` block per series, blocks
/// separated by two blank lines so `index` selects them.
pub struct Plot {
    pub series: Vec<(String, Vec<f64>)>,
}

impl Plot {
    pub fn single(name: &str, v: &[f64]) -> Self {
        Plot {
            series: vec![(name.to_string(), v.to_vec())],
        }
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for (i, (name, v)) in self.series.iter().enumerate() {
            if i > 0 {
                s.push_str("\n\n");
            }
            let _ = writeln!(s, "# {name}");
            let _ = writeln!(s, "# bus v_pu");
            for (b, x) in v.iter().enumerate() {
                let _ = writeln!(s, "{} {}", b + 1, x);
            }
        }
        s
    }
}

/// Error payload written to stderr.
pub fn error_json(err: &anyhow::Error) -> Value {
    let (kind, message) = match err.downcast_ref::<laa_core::Error>() {
        Some(e) => (e.kind(), e.to_string()),
        None => ("Io", format!("{err:#}")),
    };
    json!({ "error": { "kind": kind, "message": message } })
}
