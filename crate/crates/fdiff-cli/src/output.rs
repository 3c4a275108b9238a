//! Command output in text, JSON and CSV forms. JSON uses ordered maps
//! throughout, so output is byte-stable across runs with the same seed.

use std::collections::BTreeMap;

use fdiff_core::{Report, Status};
use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Serialize)]
pub struct CmdOutput {
    pub command: String,
    pub params: BTreeMap<String, String>,
    pub rows: Vec<BTreeMap<String, Value>>,
    pub report: Option<Report>,
}

impl CmdOutput {
    pub fn new(command: &str) -> Self {
        CmdOutput {
            command: command.to_string(),
            params: BTreeMap::new(),
            rows: Vec::new(),
            report: None,
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn row(&mut self, entries: Vec<(&str, Value)>) {
        self.rows
            .push(entries.into_iter().map(|(k, v)| (k.to_string(), v)).collect());
    }

    pub fn set_report(&mut self, report: Report) {
        match &mut self.report {
            None => self.report = Some(report),
            Some(existing) => existing.absorb(report),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match &self.report {
            Some(r) if r.status == Status::Fail => 1,
            _ => 0,
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(self).expect("serializable"),
            Format::Csv => self.render_csv(),
            Format::Text => self.render_text(),
        }
    }

    fn render_csv(&self) -> String {
        let mut keys: Vec<String> = Vec::new();
        for row in &self.rows {
            for k in row.keys() {
                if !keys.contains(k) {
                    keys.push(k.clone());
                }
            }
        }
        keys.sort();
        let mut out = String::new();
        out.push_str(&keys.join(","));
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = keys
                .iter()
                .map(|k| match row.get(k) {
                    Some(Value::String(s)) => {
                        if s.contains(',') || s.contains('"') {
                            format!("\"{}\"", s.replace('"', "\"\""))
                        } else {
                            s.clone()
                        }
                    }
                    Some(v) => v.to_string(),
                    None => String::new(),
                })
                .collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# {}\n", self.command));
        for (k, v) in &self.params {
            out.push_str(&format!("{k} = {v}\n"));
        }
        if !self.rows.is_empty() {
            let mut keys: Vec<String> = Vec::new();
            for row in &self.rows {
                for k in row.keys() {
                    if !keys.contains(k) {
                        keys.push(k.clone());
                    }
                }
            }
            keys.sort();
            out.push_str(&keys.join("\t"));
            out.push('\n');
            for row in &self.rows {
                let line: Vec<String> = keys
                    .iter()
                    .map(|k| match row.get(k) {
                        Some(Value::String(s)) => s.clone(),
                        Some(v) => v.to_string(),
                        None => String::new(),
                    })
                    .collect();
                out.push_str(&line.join("\t"));
                out.push('\n');
            }
        }
        if let Some(report) = &self.report {
            out.push_str(&format!("{report}\n"));
        }
        out
    }
}
