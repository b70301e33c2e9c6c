//! Report envelope shared by every subcommand.
//!
//! JSON output is the whole envelope. CSV output starts with `# ` comment
//! lines carrying the command, the resolved config, the seed and the scalar
//! summary values, followed by the table.

use anyhow::Result;
use serde::Serialize;
use serde_json::{Map, Value};

pub struct Report {
    pub command: &'static str,
    pub config: Value,
    pub seed: Option<u64>,
    pub summary: Map<String, Value>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

impl Report {
    pub fn new(command: &'static str, config: &impl Serialize, seed: Option<u64>, columns: &[&'static str]) -> Report {
        Report {
            command,
            config: serde_json::to_value(config).expect("configs serialize"),
            seed,
            summary: Map::new(),
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn summary(&mut self, key: &str, value: impl Serialize) {
        self.summary.insert(key.to_string(), serde_json::to_value(value).expect("summaries serialize"));
    }

    pub fn row(&mut self, cells: Vec<Value>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Object(self.columns.iter().map(|c| c.to_string()).zip(r.iter().cloned()).collect()))
            .collect();
        let doc = serde_json::json!({
            "command": self.command,
            "version": env!("CARGO_PKG_VERSION"),
            "config": self.config,
            "seed": self.seed,
            "summary": self.summary,
            "rows": rows,
        });
        let mut text = serde_json::to_string_pretty(&doc).expect("reports serialize");
        text.push('\n');
        text
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut out = format!("# command: {}\n# config: {}\n", self.command, self.config);
        match self.seed {
            Some(s) => out.push_str(&format!("# seed: {s}\n")),
            None => out.push_str("# seed: none\n"),
        }
        for (key, value) in &self.summary {
            if !value.is_array() && !value.is_object() {
                out.push_str(&format!("# {key}: {}\n", cell(value)));
            }
        }
        let mut wtr = csv::Writer::from_writer(Vec::new());
        wtr.write_record(&self.columns)?;
        for r in &self.rows {
            wtr.write_record(r.iter().map(cell))?;
        }
        out.push_str(&String::from_utf8(wtr.into_inner()?)?);
        Ok(out)
    }
}

/// CSV text of one value: shortest round-trip numbers, blank for null.
fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Number(n) => match (n.as_i64(), n.as_u64(), n.as_f64()) {
            (Some(i), _, _) => i.to_string(),
            (_, Some(u), _) => u.to_string(),
            (_, _, Some(f)) => f.to_string(),
            _ => n.to_string(),
        },
        other => other.to_string(),
    }
}

/// JSON number for `x` (negative zero printed as zero), or null when it is
/// not finite.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x + 0.0).map_or(Value::Null, Value::Number)
}

pub fn opt(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_comment_header_then_table() {
        let mut r = Report::new("bound", &serde_json::json!({"n": 9}), None, &["bound"]);
        r.summary("note", "x");
        r.row(vec![num(0.45)]);
        assert_eq!(r.to_csv().unwrap(), "# command: bound\n# config: {\"n\":9}\n# seed: none\n# note: x\nbound\n0.45\n");
    }

    #[test]
    fn json_rows_are_objects() {
        let mut r = Report::new("bound", &serde_json::json!({}), Some(3), &["a", "b"]);
        r.row(vec![num(1.0), Value::Null]);
        let v: Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["rows"][0]["a"], 1.0);
        assert!(v["rows"][0]["b"].is_null());
        assert_eq!(v["seed"], 3);
    }
}
