use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};

use starmeasure::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Columns of equal length, written one row per index.
pub struct Table {
    pub header: Vec<&'static str>,
    pub columns: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>, columns: Vec<Vec<f64>>) -> Self {
        debug_assert_eq!(header.len(), columns.len());
        Self { header, columns }
    }
}

pub struct Report {
    pub json: Value,
    pub table: Option<Table>,
    /// Whether the scientific verdict passed; decides exit code 0 or 1.
    pub passed: bool,
}

impl Report {
    pub fn new<T: Serialize>(body: &T, passed: bool) -> Result<Self> {
        let json = serde_json::to_value(body).map_err(|e| Error::InvalidInput(format!("cannot serialize report: {e}")))?;
        Ok(Self {
            json,
            table: None,
            passed,
        })
    }

    pub fn with_table(mut self, table: Table) -> Self {
        self.table = Some(table);
        self
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("json values serialize");
                s.push('\n');
                s
            }
            Format::Csv => match &self.table {
                Some(t) => render_table(t),
                None => render_scalars(&self.json),
            },
        }
    }
}

fn csv_string<F: FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>>(write: F) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    write(&mut w).expect("writing to memory");
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8 records")
}

fn render_table(t: &Table) -> String {
    let rows = t.columns.iter().map(Vec::len).min().unwrap_or(0);
    csv_string(|w| {
        w.write_record(&t.header)?;
        for i in 0..rows {
            w.write_record(t.columns.iter().map(|c| format!("{:?}", c[i])))?;
        }
        Ok(())
    })
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => flatten_map(prefix, map, out),
        Value::Array(_) => {}
        Value::String(s) => out.push((prefix.to_owned(), s.clone())),
        other => out.push((prefix.to_owned(), other.to_string())),
    }
}

fn flatten_map(prefix: &str, map: &Map<String, Value>, out: &mut Vec<(String, String)>) {
    for (k, v) in map {
        let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
        flatten(&key, v, out);
    }
}

fn render_scalars(v: &Value) -> String {
    let mut pairs = Vec::new();
    flatten("", v, &mut pairs);
    csv_string(|w| {
        w.write_record(["key", "value"])?;
        for (k, v) in &pairs {
            w.write_record([k, v])?;
        }
        Ok(())
    })
}

pub fn emit(text: &str, output: Option<&Path>) -> Result<()> {
    match output {
        Some(path) => {
            let mut f = File::create(path)?;
            f.write_all(text.as_bytes())?;
        }
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn table_rows_round_trip_floats() {
        let r = Report::new(&json!({"a": 1}), true)
            .unwrap()
            .with_table(Table::new(vec!["x", "y"], vec![vec![0.1, 2.0], vec![1e-300, -3.5]]));
        assert_eq!(r.render(Format::Csv), "x,y\n0.1,1e-300\n2.0,-3.5\n");
    }

    #[test]
    fn scalars_flatten_and_quote() {
        let body = json!({"config": {"command": "x", "z": [1, 2], "name": "a,b"}, "ks": 0.5, "ok": true});
        let csv = Report::new(&body, true).unwrap().render(Format::Csv);
        assert_eq!(csv, "key,value\nconfig.command,x\nconfig.name,\"a,b\"\nks,0.5\nok,true\n");
    }

    #[test]
    fn json_is_sorted_and_newline_terminated() {
        let text = Report::new(&json!({"b": 1, "a": 2}), false).unwrap().render(Format::Json);
        assert!(text.ends_with('\n'));
        assert!(text.find("\"a\"").unwrap() < text.find("\"b\"").unwrap());
    }
}
