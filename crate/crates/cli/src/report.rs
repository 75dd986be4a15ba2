//! Run reports, rendered as text or as deterministic JSON.

use serde::Serialize;
use serde_json::Value;

#[derive(Serialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Unknown,
    Skip,
}

#[derive(Serialize, Debug, Clone)]
pub struct CheckResult {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deviation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl CheckResult {
    pub fn new(name: impl Into<String>, status: Status) -> Self {
        CheckResult { name: name.into(), status, deviation: None, witness: None }
    }

    pub fn pass_if(name: impl Into<String>, ok: bool) -> Self {
        Self::new(name, if ok { Status::Pass } else { Status::Fail })
    }

    pub fn deviation(mut self, d: f64) -> Self {
        self.deviation = Some(d);
        self
    }

    pub fn witness(mut self, w: impl Into<String>) -> Self {
        self.witness = Some(w.into());
        self
    }
}

#[derive(Serialize, Debug, Clone)]
pub struct Report {
    pub command: String,
    pub config: Value,
    pub results: Vec<CheckResult>,
    /// Listings produced by the command (paths, families, matrices).
    #[serde(skip_serializing_if = "Value::is_null")]
    pub output: Value,
    pub seed: u64,
}

impl Report {
    /// Unknown verdicts count as failures: nothing was shown to hold.
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| matches!(r.status, Status::Pass | Status::Skip))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports always serialise");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.results {
            let tag = match r.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Unknown => "UNKNOWN",
                Status::Skip => "SKIP",
            };
            out.push_str(&format!("{tag:<8}{}", r.name));
            if let Some(d) = r.deviation {
                out.push_str(&format!("  deviation={d:e}"));
            }
            if let Some(w) = &r.witness {
                out.push_str(&format!("  witness={w}"));
            }
            out.push('\n');
        }
        render_value(&self.output, 0, &mut out);
        out
    }
}

fn render_value(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Null => {}
        Value::Array(items) => {
            for item in items {
                match item {
                    Value::Array(_) | Value::Object(_) => render_value(item, indent, out),
                    other => out.push_str(&format!("{pad}{}\n", scalar(other))),
                }
            }
        }
        Value::Object(map) => {
            for (k, item) in map {
                match item {
                    Value::Array(_) | Value::Object(_) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render_value(item, indent + 1, out);
                    }
                    other => out.push_str(&format!("{pad}{k}: {}\n", scalar(other))),
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
