use std::collections::BTreeMap;
use std::path::Path;

use serde_json::{Map, Value};

use super::{HarnessError, CONVENTIONS};

/// 17 significant digits; non-finite values become `null`.
pub fn float_value(v: f64) -> Value {
    if !v.is_finite() {
        return Value::Null;
    }
    serde_json::from_str(&format!("{v:.16e}")).expect("formatted float is valid JSON")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub p: u32,
    pub value: f64,
    pub extra: BTreeMap<String, Value>,
}

impl Row {
    pub fn new(p: u32, value: f64) -> Self {
        Self { p, value, extra: BTreeMap::new() }
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.extra.insert(key.to_string(), value.into());
        self
    }

    pub fn with_float(self, key: &str, value: f64) -> Self {
        self.with(key, float_value(value))
    }
}

/// Everything an experiment produced.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub experiment: String,
    pub params: BTreeMap<String, Value>,
    pub rows: Vec<Row>,
    pub fit: BTreeMap<String, Value>,
    /// Oracle comparisons; present only when requested.
    pub oracle: Option<Vec<Value>>,
    pub pass: bool,
    /// Human-readable descriptions of failed checks.
    pub failures: Vec<String>,
    /// Lines for standard output.
    pub report: Vec<String>,
}

impl Outcome {
    pub fn to_json(&self) -> Value {
        let mut root = Map::new();
        root.insert("experiment".into(), Value::from(self.experiment.clone()));
        root.insert("conventions".into(), Value::from(CONVENTIONS));
        root.insert("params".into(), Value::Object(self.params.clone().into_iter().collect()));
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut m = Map::new();
                m.insert("p".into(), Value::from(r.p));
                m.insert("value".into(), float_value(r.value));
                m.insert("extra".into(), Value::Object(r.extra.clone().into_iter().collect()));
                Value::Object(m)
            })
            .collect();
        root.insert("rows".into(), Value::Array(rows));
        root.insert("fit".into(), Value::Object(self.fit.clone().into_iter().collect()));
        if let Some(oracle) = &self.oracle {
            root.insert("oracle".into(), Value::Array(oracle.clone()));
        }
        root.insert("pass".into(), Value::from(self.pass));
        Value::Object(root)
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("serializable");
        s.push('\n');
        s
    }

    /// One line per row; the extra columns are the union of row keys.
    pub fn to_csv(&self) -> String {
        let mut keys: Vec<&String> = self.rows.iter().flat_map(|r| r.extra.keys()).collect();
        keys.sort();
        keys.dedup();
        let mut out = String::from("experiment,conventions,p,value");
        for k in &keys {
            out.push(',');
            out.push_str(&csv_field(k));
        }
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!("{},{},{},{}", self.experiment, csv_field(CONVENTIONS), r.p, plain(&float_value(r.value))));
            for k in &keys {
                out.push(',');
                if let Some(v) = r.extra.get(*k) {
                    out.push_str(&csv_field(&plain(v)));
                }
            }
            out.push('\n');
        }
        out
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn write_artifacts(dir: &Path, outcome: &Outcome) -> Result<(), HarnessError> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| HarnessError::Io { path, source }
    };
    std::fs::create_dir_all(dir).map_err(io(dir))?;
    let json = dir.join("results.json");
    std::fs::write(&json, outcome.to_json_string()).map_err(io(&json))?;
    let csv = dir.join("results.csv");
    std::fs::write(&csv, outcome.to_csv()).map_err(io(&csv))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format() {
        assert_eq!(float_value(0.1).to_string(), "1.0000000000000001e-1");
        assert_eq!(float_value(2.0).to_string(), "2.0000000000000000e+0");
        assert_eq!(float_value(f64::NAN), Value::Null);
    }

    #[test]
    fn csv_quoting() {
        let o = Outcome {
            experiment: "t".into(),
            params: BTreeMap::new(),
            rows: vec![Row::new(8, 0.5).with("f", "x1, x2")],
            fit: BTreeMap::new(),
            oracle: None,
            pass: true,
            failures: vec![],
            report: vec![],
        };
        let csv = o.to_csv();
        let line = csv.lines().nth(1).unwrap();
        assert!(line.starts_with("t,"));
        assert!(line.ends_with(",8,5.0000000000000000e-1,\"x1, x2\""));
    }
}
