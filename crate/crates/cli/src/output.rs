//! Records and their CSV / JSON rendering.

use std::io::Write;

use serde_json::{Map, Number, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Num(f64),
    Int(u64),
    Text(String),
    Flag(bool),
    Missing,
}

impl Field {
    fn csv(&self) -> String {
        match self {
            Field::Num(v) if v.is_finite() => format!("{v:.16e}"),
            Field::Num(v) => v.to_string(),
            Field::Int(v) => v.to_string(),
            Field::Text(s) => s.clone(),
            Field::Flag(b) => b.to_string(),
            Field::Missing => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Field::Num(v) => Number::from_f64(*v).map(Value::Number).unwrap_or(Value::Null),
            Field::Int(v) => Value::from(*v),
            Field::Text(s) => Value::from(s.as_str()),
            Field::Flag(b) => Value::from(*b),
            Field::Missing => Value::Null,
        }
    }
}

/// One output row: named fields in a fixed order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Record(Vec<(&'static str, Field)>);

impl Record {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num(mut self, key: &'static str, v: f64) -> Self {
        self.0.push((key, Field::Num(v)));
        self
    }

    pub fn int(mut self, key: &'static str, v: u64) -> Self {
        self.0.push((key, Field::Int(v)));
        self
    }

    pub fn text(mut self, key: &'static str, v: impl Into<String>) -> Self {
        self.0.push((key, Field::Text(v.into())));
        self
    }

    pub fn flag(mut self, key: &'static str, v: bool) -> Self {
        self.0.push((key, Field::Flag(v)));
        self
    }

    pub fn missing(mut self, key: &'static str) -> Self {
        self.0.push((key, Field::Missing));
        self
    }

    /// The `pass` field, for check reports.
    pub fn passed(&self) -> bool {
        self.0.iter().any(|(k, v)| *k == "pass" && *v == Field::Flag(true))
    }

    fn to_json(&self) -> Value {
        let mut m = Map::new();
        for (k, v) in &self.0 {
            m.insert((*k).to_string(), v.json());
        }
        Value::Object(m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Writes records to stdout: CSV with a header from the first record, or JSON (an object
/// for a single record, an array otherwise).
pub fn emit(records: &[Record], format: Format) -> std::io::Result<()> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut out);
            if let Some(first) = records.first() {
                w.write_record(first.0.iter().map(|(k, _)| *k))?;
            }
            for r in records {
                w.write_record(r.0.iter().map(|(_, v)| v.csv()))?;
            }
            w.flush()?;
        }
        Format::Json => {
            let v = match records {
                [one] => one.to_json(),
                many => Value::Array(many.iter().map(Record::to_json).collect()),
            };
            serde_json::to_writer_pretty(&mut out, &v)?;
            writeln!(out)?;
        }
    }
    Ok(())
}
