use serde::Serialize;
use serde_json::Value;

use super::SCHEMA_VERSION;

#[derive(Debug, Serialize)]
pub(super) struct Report {
    pub schema_version: &'static str,
    pub command: String,
    pub inputs: Value,
    pub results: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub passed: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seconds: Option<f64>,
}

/// CSV with a leading `# meta:` block.
pub(super) struct Csv {
    meta: Vec<(String, String)>,
    header: Vec<String>,
    rows: Vec<String>,
}

impl Csv {
    pub fn new(command: &str, header: &[&str]) -> Self {
        let meta = vec![("schema_version".into(), SCHEMA_VERSION.into()), ("command".into(), command.into())];
        Csv { meta, header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn meta(&mut self, key: &str, value: impl Into<String>) {
        self.meta.push((key.into(), value.into()));
    }

    pub fn row(&mut self, fields: &[String]) {
        debug_assert_eq!(fields.len(), self.header.len());
        self.rows.push(fields.join(","));
    }

    pub fn finish(self) -> String {
        let mut s = String::new();
        for (k, v) in &self.meta {
            s.push_str(&format!("# meta: {k}={v}\n"));
        }
        s.push_str(&self.header.join(","));
        s.push('\n');
        for r in &self.rows {
            s.push_str(r);
            s.push('\n');
        }
        s
    }
}
