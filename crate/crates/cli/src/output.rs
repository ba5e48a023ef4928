//! Output records and their text/json/csv renderings.
//!
//! Every value is carried as an exact decimal string; rationals are
//! rendered as `num/den`.

use std::fmt::Write as _;

use clap::ValueEnum;
use indexmap::IndexMap;
use kary_core::ReductionTrace;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iterations: String,
    pub loop_avoided: String,
    pub path: String,
    pub quotients: Vec<String>,
}

impl From<&ReductionTrace> for TraceRecord {
    fn from(t: &ReductionTrace) -> Self {
        TraceRecord {
            iterations: t.iterations.to_string(),
            loop_avoided: t.loop_avoided.to_string(),
            path: t.path.to_string(),
            quotients: t.quotients.iter().map(u64::to_string).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<I, S>(columns: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Table {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push<I, S>(&mut self, row: I)
    where
        I: IntoIterator<Item = S>,
        S: ToString,
    {
        self.rows.push(row.into_iter().map(|v| v.to_string()).collect());
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub command: String,
    pub inputs: IndexMap<String, String>,
    pub results: IndexMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<TraceRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Table>,
}

impl OutputRecord {
    pub fn new(command: impl Into<String>) -> Self {
        OutputRecord {
            command: command.into(),
            inputs: IndexMap::new(),
            results: IndexMap::new(),
            trace: None,
            table: None,
        }
    }

    pub fn input(mut self, key: &str, value: impl ToString) -> Self {
        self.inputs.insert(key.to_owned(), value.to_string());
        self
    }

    pub fn result(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.results.insert(key.to_owned(), value.to_string());
        self
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.render_text(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("records serialize");
                s.push('\n');
                s
            }
            Format::Csv => self.render_csv(),
        }
    }

    fn render_text(&self) -> String {
        let mut out = String::new();
        let line: Vec<String> = self.results.iter().map(|(k, v)| format!("{k}={v}")).collect();
        if !line.is_empty() {
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        if let Some(t) = &self.trace {
            let _ = writeln!(
                out,
                "trace: iterations={} loop_avoided={} path={} quotients=[{}]",
                t.iterations,
                t.loop_avoided,
                t.path,
                t.quotients.join(",")
            );
        }
        if let Some(table) = &self.table {
            out.push_str(&table.columns.join("\t"));
            out.push('\n');
            for row in &table.rows {
                out.push_str(&row.join("\t"));
                out.push('\n');
            }
        }
        out
    }

    /// Tables take precedence; otherwise one header row of result keys and
    /// one row of values.
    fn render_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
        match &self.table {
            Some(table) => {
                w.write_record(&table.columns).expect("in-memory write");
                for row in &table.rows {
                    w.write_record(row).expect("in-memory write");
                }
            }
            None => {
                w.write_record(self.results.keys()).expect("in-memory write");
                w.write_record(self.results.values()).expect("in-memory write");
            }
        }
        String::from_utf8(w.into_inner().expect("flush to Vec")).expect("csv output is utf-8")
    }
}
