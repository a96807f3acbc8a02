//! Deterministic CSV/JSON tables with an embedded configuration header.

use std::io::Write;
use std::path::Path;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

/// Header shared by both formats.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Meta {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub config_hash: String,
    pub config: Value,
}

impl Meta {
    /// `config_hash` is the SHA-256 of the compact JSON of `config`, which
    /// holds every resolved parameter that can influence the numbers.
    pub fn new(command: &str, seed: u64, config: &impl Serialize) -> Self {
        let config = serde_json::to_value(config).expect("configs serialize");
        let hash = Sha256::digest(config.to_string().as_bytes());
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            seed,
            config_hash: hash.iter().map(|b| format!("{b:02x}")).collect(),
            config,
        }
    }
}

/// One grid file: header, column names and rows of JSON scalars.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub meta: Meta,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(meta: Meta, columns: Vec<&'static str>) -> Self {
        Self {
            meta,
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let m = &self.meta;
        let mut out = format!(
            "# tool: {} {}\n# command: {}\n# seed: {}\n# config_hash: {}\n# config: {}\n",
            m.tool, m.version, m.command, m.seed, m.config_hash, m.config
        );
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|v| match v {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                })
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Object(self.columns.iter().map(|c| c.to_string()).zip(r.iter().cloned()).collect()))
            .collect();
        let doc = json!({ "meta": self.meta, "columns": self.columns, "rows": rows });
        serde_json::to_string_pretty(&doc).expect("tables serialize") + "\n"
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    /// Writes to `path`, or stdout when `None`.
    pub fn write(&self, format: Format, path: Option<&Path>) -> std::io::Result<()> {
        let text = self.render(format);
        match path {
            Some(p) => std::fs::write(p, text),
            None => std::io::stdout().lock().write_all(text.as_bytes()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_and_json_mirror_each_other() {
        let meta = Meta::new("demo", 7, &json!({"v": 1.0}));
        let mut t = Table::new(meta, vec!["d", "b_max", "backend", "converged"]);
        t.push(vec![json!(0.5), json!(2.25), json!("analytic"), json!(true)]);
        let csv = t.to_csv();
        assert!(csv.starts_with("# tool: coarse-bell"));
        assert!(csv.contains("# seed: 7\n"));
        assert!(csv.ends_with("d,b_max,backend,converged\n0.5,2.25,analytic,true\n"));
        let doc: Value = serde_json::from_str(&t.to_json()).unwrap();
        assert_eq!(doc["meta"]["config_hash"], json!(t.meta.config_hash));
        assert_eq!(doc["rows"][0]["b_max"], json!(2.25));
        // the hash depends on the config only
        assert_eq!(Meta::new("x", 1, &json!({"v": 1.0})).config_hash, t.meta.config_hash);
        assert_ne!(Meta::new("x", 1, &json!({"v": 2.0})).config_hash, t.meta.config_hash);
    }
}
