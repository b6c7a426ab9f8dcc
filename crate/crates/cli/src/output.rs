//! Tables for CSV output and the JSON rendering of records.

use serde::Serialize;
use serde_json::Value;

use crate::args::Format;
use crate::Failure;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    /// Floats carry 17 significant digits so that they parse back exactly.
    pub fn render(&self) -> String {
        match self {
            Cell::Num(v) if v.is_finite() => format!("{v:.16e}"),
            Cell::Num(v) => v.to_string(),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Num)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(headers: &[&str]) -> Self {
        Table { headers: headers.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    /// Two columns, one row per leaf of the record's JSON form (dotted paths).
    pub fn from_record<T: Serialize>(record: &T) -> Result<Self, Failure> {
        let value = serde_json::to_value(record).map_err(|e| Failure::Internal(e.to_string()))?;
        let mut t = Table::new(&["field", "value [-]"]);
        flatten("", &value, &mut t);
        Ok(t)
    }

    pub fn to_csv(&self) -> Result<String, Failure> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Failure::Internal(e.to_string());
        w.write_record(&self.headers).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Failure::Internal(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Failure::Internal(e.to_string()))
    }
}

fn flatten(prefix: &str, v: &Value, t: &mut Table) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(map) => {
            for (k, inner) in map {
                flatten(&key(k), inner, t);
            }
        }
        Value::Array(items) => {
            for (i, inner) in items.iter().enumerate() {
                flatten(&key(&i.to_string()), inner, t);
            }
        }
        Value::Number(n) => {
            let cell = match (n.as_i64(), n.as_f64()) {
                (Some(i), _) if !n.is_f64() => Cell::Int(i),
                (_, Some(f)) => Cell::Num(f),
                _ => Cell::Text(n.to_string()),
            };
            t.push(vec![Cell::Text(prefix.to_string()), cell]);
        }
        Value::Bool(b) => t.push(vec![Cell::Text(prefix.to_string()), Cell::Bool(*b)]),
        Value::String(s) => t.push(vec![Cell::Text(prefix.to_string()), Cell::Text(s.clone())]),
        Value::Null => t.push(vec![Cell::Text(prefix.to_string()), Cell::Empty]),
    }
}

/// A command's result in both renderings, plus warnings that make
/// `--strict` fail.
#[derive(Debug, Clone)]
pub struct Emission {
    pub json: String,
    pub table: Table,
    pub warnings: Vec<String>,
}

impl Emission {
    pub fn new<T: Serialize>(record: &T, table: Table) -> Result<Self, Failure> {
        let json = serde_json::to_string_pretty(record).map_err(|e| Failure::Internal(e.to_string()))?;
        Ok(Emission { json: json + "\n", table, warnings: Vec::new() })
    }

    /// Uses the flattened record as the CSV table.
    pub fn record<T: Serialize>(record: &T) -> Result<Self, Failure> {
        Emission::new(record, Table::from_record(record)?)
    }

    pub fn warn_if(mut self, cond: bool, msg: impl Into<String>) -> Self {
        if cond {
            self.warnings.push(msg.into());
        }
        self
    }

    pub fn render(&self, format: Format) -> Result<String, Failure> {
        match format {
            Format::Json => Ok(self.json.clone()),
            Format::Csv => self.table.to_csv(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_through_csv() {
        for v in [0.1, 1.0 / 3.0, 2.220446049250313e-16, 12345.678901234567, -7.0] {
            let s = Cell::Num(v).render();
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
        }
    }

    #[test]
    fn flattening() {
        #[derive(Serialize)]
        struct R {
            a: f64,
            b: Vec<(u32, bool)>,
            c: Option<f64>,
        }
        let t = Table::from_record(&R { a: 0.5, b: vec![(3, true)], c: None }).unwrap();
        let keys: Vec<&str> = t
            .rows
            .iter()
            .map(|r| match &r[0] {
                Cell::Text(s) => s.as_str(),
                _ => "",
            })
            .collect();
        assert_eq!(keys, ["a", "b.0.0", "b.0.1", "c"]);
        assert_eq!(t.rows[1][1], Cell::Int(3));
        let csv = t.to_csv().unwrap();
        assert!(csv.starts_with("field,value [-]\n"));
    }
}
