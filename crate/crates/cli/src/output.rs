use std::io::Write;

use anyhow::Result;
use clap::ValueEnum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// One output cell.
#[derive(Debug, Clone)]
pub enum Value {
    Num(f64),
    Int(i64),
    /// Exact integers too large for JSON numbers.
    Big(String),
    Text(String),
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Num(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_owned())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Text(v)
    }
}

impl From<u32> for Value {
    fn from(v: u32) -> Self {
        Value::Int(v.into())
    }
}

impl From<u64> for Value {
    fn from(v: u64) -> Self {
        Value::Int(v as i64)
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Int(v as i64)
    }
}

impl From<&apuf_core::BigUint> for Value {
    fn from(v: &apuf_core::BigUint) -> Self {
        Value::Big(v.to_string())
    }
}

impl From<apuf_core::Response> for Value {
    fn from(v: apuf_core::Response) -> Self {
        Value::Int(v.value().into())
    }
}

/// Writes rows with a fixed header as CSV or JSON lines.
pub struct Table<W: Write> {
    format: Format,
    full_precision: bool,
    header: Vec<&'static str>,
    csv: Option<csv::Writer<W>>,
    raw: Option<W>,
}

impl<W: Write> Table<W> {
    pub fn new(out: W, format: Format, full_precision: bool, header: &[&'static str]) -> Result<Self> {
        let header = header.to_vec();
        let (csv, raw) = match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(&header)?;
                (Some(w), None)
            }
            Format::Json => (None, Some(out)),
        };
        Ok(Self { format, full_precision, header, csv, raw })
    }

    pub fn row(&mut self, values: Vec<Value>) -> Result<()> {
        assert_eq!(values.len(), self.header.len(), "row does not match header");
        match self.format {
            Format::Csv => {
                let cells: Vec<String> = values.iter().map(|v| self.text(v)).collect();
                self.csv.as_mut().expect("csv writer").write_record(&cells)?;
            }
            Format::Json => {
                let mut map = Vec::with_capacity(values.len());
                for (k, v) in self.header.iter().zip(&values) {
                    map.push(format!("{}:{}", serde_json::to_string(k)?, self.json(v)?));
                }
                let out = self.raw.as_mut().expect("json writer");
                writeln!(out, "{{{}}}", map.join(","))?;
            }
        }
        Ok(())
    }

    pub fn finish(self) -> Result<()> {
        if let Some(mut w) = self.csv {
            w.flush()?;
        }
        if let Some(mut w) = self.raw {
            w.flush()?;
        }
        Ok(())
    }

    fn number(&self, x: f64) -> f64 {
        if self.full_precision || !x.is_finite() {
            x
        } else {
            format!("{x:.5e}").parse().expect("formatted float parses")
        }
    }

    fn text(&self, v: &Value) -> String {
        match v {
            Value::Num(x) => self.number(*x).to_string(),
            Value::Int(i) => i.to_string(),
            Value::Big(s) | Value::Text(s) => s.clone(),
        }
    }

    fn json(&self, v: &Value) -> Result<String> {
        Ok(match v {
            Value::Num(x) => {
                let x = self.number(*x);
                if x.is_finite() {
                    x.to_string()
                } else {
                    serde_json::to_string(&x.to_string())?
                }
            }
            Value::Int(i) => i.to_string(),
            Value::Big(s) | Value::Text(s) => serde_json::to_string(s)?,
        })
    }
}
