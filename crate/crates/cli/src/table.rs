//! Result tables and their CSV / structured renderings.

use std::io::Write;
use std::path::Path;

use serde_json::{Map, Value as Json};

use crate::{Format, RunError};

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Str(String),
    Int(u128),
    Float(f64),
    Bool(bool),
}

impl Value {
    fn render(&self) -> String {
        match self {
            Value::Str(s) => s.clone(),
            Value::Int(i) => i.to_string(),
            Value::Float(x) => x.to_string(),
            Value::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Json {
        match self {
            Value::Str(s) => Json::String(s.clone()),
            Value::Int(i) => u64::try_from(*i).map_or_else(|_| Json::String(i.to_string()), Json::from),
            Value::Float(x) => {
                serde_json::Number::from_f64(*x).map_or_else(|| Json::String(x.to_string()), Json::Number)
            }
            Value::Bool(b) => Json::Bool(*b),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Float(x) => Some(*x),
            Value::Int(i) => Some(*i as f64),
            _ => None,
        }
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Str(s.to_string())
    }
}

impl From<String> for Value {
    fn from(s: String) -> Self {
        Value::Str(s)
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Float(x)
    }
}

impl From<usize> for Value {
    fn from(i: usize) -> Self {
        Value::Int(i as u128)
    }
}

impl From<u128> for Value {
    fn from(i: u128) -> Self {
        Value::Int(i)
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

/// Rows with a fixed column order.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<impl Iterator<Item = &Value> + '_> {
        let i = self.columns.iter().position(|c| *c == name)?;
        Some(self.rows.iter().map(move |r| &r[i]))
    }

    pub fn floats(&self, name: &str) -> Vec<f64> {
        self.column(name)
            .map(|c| c.filter_map(Value::as_f64).collect())
            .unwrap_or_default()
    }

    pub fn render(&self, format: Format) -> Result<Vec<u8>, RunError> {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.columns).map_err(io_error)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(Value::render)).map_err(io_error)?;
                }
                w.into_inner().map_err(|e| RunError::Io(e.to_string()))
            }
            Format::Structured => {
                let rows: Vec<Json> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let obj: Map<String, Json> = self
                            .columns
                            .iter()
                            .zip(row)
                            .map(|(c, v)| (c.to_string(), v.json()))
                            .collect();
                        Json::Object(obj)
                    })
                    .collect();
                let mut out = serde_json::to_vec_pretty(&rows).map_err(|e| RunError::Io(e.to_string()))?;
                out.push(b'\n');
                Ok(out)
            }
        }
    }
}

fn io_error(e: csv::Error) -> RunError {
    RunError::Io(e.to_string())
}

/// Writes `bytes` to `out`, or to stdout when `out` is `None`. Files are
/// written to a sibling temporary and renamed into place.
pub fn emit(bytes: &[u8], out: Option<&Path>) -> Result<(), RunError> {
    match out {
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes).map_err(|e| RunError::Io(e.to_string()))?;
            stdout.flush().map_err(|e| RunError::Io(e.to_string()))
        }
        Some(path) => {
            let dir = match path.parent() {
                Some(p) if !p.as_os_str().is_empty() => p,
                _ => Path::new("."),
            };
            let mut tmp =
                tempfile::NamedTempFile::new_in(dir).map_err(|e| RunError::Io(format!("{}: {e}", dir.display())))?;
            tmp.write_all(bytes).map_err(|e| RunError::Io(e.to_string()))?;
            tmp.persist(path)
                .map_err(|e| RunError::Io(format!("{}: {}", path.display(), e.error)))?;
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new(&["id", "n", "x", "ok"]);
        t.push(vec!["a".into(), 2usize.into(), 0.25.into(), true.into()]);
        t.push(vec!["b,c".into(), 4usize.into(), 1.0.into(), false.into()]);
        t
    }

    #[test]
    fn csv_rendering() {
        let text = String::from_utf8(sample().render(Format::Csv).unwrap()).unwrap();
        assert_eq!(text, "id,n,x,ok\na,2,0.25,true\n\"b,c\",4,1,false\n");
    }

    #[test]
    fn structured_keeps_column_order() {
        let text = String::from_utf8(sample().render(Format::Structured).unwrap()).unwrap();
        let v: Json = serde_json::from_str(&text).unwrap();
        let keys: Vec<&String> = v[0].as_object().unwrap().keys().collect();
        assert_eq!(keys, ["id", "n", "x", "ok"]);
        assert_eq!(v[1]["x"], 1.0);
    }

    #[test]
    fn atomic_write() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        emit(b"x\n1\n", Some(&path)).unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), b"x\n1\n");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
        assert_eq!(sample().floats("x"), vec![0.25, 1.0]);
    }
}
