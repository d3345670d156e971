//! Rendering of command results as CSV (with `# ` metadata lines) or JSON.

use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug)]
pub enum Body {
    Table { headers: Vec<String>, rows: Vec<Vec<String>> },
    Record(Value),
}

/// A finished command: metadata, payload and the process exit code.
#[derive(Clone, Debug)]
pub struct Report {
    pub command: &'static str,
    pub meta: Map<String, Value>,
    pub summary: Map<String, Value>,
    pub body: Body,
    pub exit_code: i32,
    pub default_format: Format,
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, out);
            }
        }
        other => out.push((prefix.to_string(), scalar_text(other))),
    }
}

impl Report {
    pub fn render(&self, format: Option<Format>) -> String {
        match format.unwrap_or(self.default_format) {
            Format::Csv => self.render_csv(),
            Format::Json => self.render_json(),
        }
    }

    fn render_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# command: {}\n", self.command));
        for (k, v) in self.meta.iter().chain(&self.summary) {
            out.push_str(&format!("# {k}: {}\n", if v.is_string() { scalar_text(v) } else { v.to_string() }));
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        match &self.body {
            Body::Table { headers, rows } => {
                let _ = w.write_record(headers);
                for r in rows {
                    let _ = w.write_record(r);
                }
            }
            Body::Record(v) => {
                let mut pairs = Vec::new();
                flatten("", v, &mut pairs);
                let _ = w.write_record(["field", "value"]);
                for (k, x) in pairs {
                    let _ = w.write_record([k, x]);
                }
            }
        }
        let bytes = w.into_inner().unwrap_or_default();
        out.push_str(&String::from_utf8_lossy(&bytes));
        out
    }

    fn render_json(&self) -> String {
        let mut doc = Map::new();
        doc.insert("command".into(), Value::String(self.command.into()));
        doc.extend(self.meta.clone());
        if !self.summary.is_empty() {
            doc.insert("summary".into(), Value::Object(self.summary.clone()));
        }
        match &self.body {
            Body::Table { headers, rows } => {
                let rows = rows
                    .iter()
                    .map(|r| Value::Object(headers.iter().cloned().zip(r.iter().map(|x| Value::String(x.clone()))).collect()))
                    .collect();
                doc.insert("rows".into(), Value::Array(rows));
            }
            Body::Record(v) => {
                doc.insert("result".into(), v.clone());
            }
        }
        let mut s = serde_json::to_string_pretty(&Value::Object(doc)).unwrap_or_default();
        s.push('\n');
        s
    }
}
