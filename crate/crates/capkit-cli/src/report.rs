//! Report assembly: machine-readable JSON, flat CSV tables, and a summary
//! with pass/fail lines, all written atomically (temp file + rename).

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::Value;

#[derive(Debug, Clone)]
pub struct GateLine {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    /// true: value must be <= threshold; false: >= threshold.
    pub upper: bool,
    pub pass: bool,
}

#[derive(Debug, Default)]
pub struct Report {
    pub kind: String,
    pub json: serde_json::Map<String, Value>,
    pub gates: Vec<GateLine>,
    pub csv: Vec<(String, String)>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(kind: &str) -> Self {
        Report { kind: kind.to_string(), ..Default::default() }
    }

    pub fn insert(&mut self, key: &str, value: Value) {
        self.json.insert(key.to_string(), value);
    }

    pub fn insert_f64(&mut self, key: &str, value: f64) {
        self.insert(key, serde_json::json!(value));
    }

    pub fn gate_upper(&mut self, name: &str, value: f64, threshold: f64) {
        let pass = value.is_finite() && value <= threshold;
        self.gates.push(GateLine {
            name: name.to_string(),
            value,
            threshold,
            upper: true,
            pass,
        });
    }

    pub fn gate_lower(&mut self, name: &str, value: f64, threshold: f64) {
        let pass = value.is_finite() && value >= threshold;
        self.gates.push(GateLine {
            name: name.to_string(),
            value,
            threshold,
            upper: false,
            pass,
        });
    }

    pub fn gate_bool(&mut self, name: &str, ok: bool) {
        self.gates.push(GateLine {
            name: name.to_string(),
            value: if ok { 1.0 } else { 0.0 },
            threshold: 1.0,
            upper: false,
            pass: ok,
        });
    }

    pub fn add_csv(&mut self, name: &str, content: String) {
        self.csv.push((name.to_string(), content));
    }

    pub fn note(&mut self, line: String) {
        self.notes.push(line);
    }

    pub fn all_pass(&self) -> bool {
        self.gates.iter().all(|g| g.pass)
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "capkit {} report", self.kind);
        let _ = writeln!(out, "================{}", "=".repeat(self.kind.len()));
        for g in &self.gates {
            let rel = if g.upper { "<=" } else { ">=" };
            let _ = writeln!(
                out,
                "[{}] {}: {} {} {}",
                if g.pass { "PASS" } else { "FAIL" },
                g.name,
                g.value,
                rel,
                g.threshold
            );
        }
        for n in &self.notes {
            let _ = writeln!(out, "note: {n}");
        }
        let _ = writeln!(
            out,
            "overall: {}",
            if self.all_pass() { "PASS" } else { "FAIL" }
        );
        out
    }

    /// Write report.json, CSV tables and summary.txt into `dir`.
    pub fn write_to(&self, dir: &Path) -> std::io::Result<PathBuf> {
        fs::create_dir_all(dir)?;
        let mut body = self.json.clone();
        body.insert("kind".into(), Value::String(self.kind.clone()));
        let gates: Vec<Value> = self
            .gates
            .iter()
            .map(|g| {
                serde_json::json!({
                    "name": g.name,
                    "value": g.value,
                    "threshold": g.threshold,
                    "relation": if g.upper { "<=" } else { ">=" },
                    "pass": g.pass,
                })
            })
            .collect();
        body.insert("gates".into(), Value::Array(gates));
        body.insert("pass".into(), Value::Bool(self.all_pass()));
        body.insert("notes".into(), serde_json::json!(self.notes));
        let json_path = dir.join("report.json");
        atomic_write(&json_path, &serde_json::to_string_pretty(&body)?)?;
        for (name, content) in &self.csv {
            atomic_write(&dir.join(name), content)?;
        }
        atomic_write(&dir.join("summary.txt"), &self.summary())?;
        Ok(json_path)
    }
}

pub fn atomic_write(path: &Path, content: &str) -> std::io::Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    fs::create_dir_all(dir)?;
    let tmp = dir.join(format!(
        ".{}.tmp.{}",
        path.file_name().and_then(|s| s.to_str()).unwrap_or("out"),
        std::process::id()
    ));
    fs::write(&tmp, content)?;
    fs::rename(&tmp, path)
}
