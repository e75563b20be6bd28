//! Tabular output: CSV with a header row, or JSON `{metadata, records}`.

use std::io::Write;

use gnp_core::exact::{format_rational, rational_to_f64};
use gnp_core::rug::{Integer, Rational};
use serde_json::{json, Map, Value};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug)]
pub enum Cell {
    Empty,
    Text(String),
    Int(i64),
    Big(Integer),
    Float(f64),
    Ratio(Rational),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Empty => String::new(),
            Cell::Text(s) => s.clone(),
            Cell::Int(v) => v.to_string(),
            Cell::Big(v) => v.to_string(),
            Cell::Float(v) => format_float(*v),
            Cell::Ratio(r) => format_rational(r),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Empty => Value::Null,
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Int(v) => json!(v),
            // counts can exceed 64 bits
            Cell::Big(v) => Value::String(v.to_string()),
            Cell::Float(v) => serde_json::Number::from_f64(*v).map_or_else(|| Value::String(format_float(*v)), Value::Number),
            Cell::Ratio(r) => Value::String(format_rational(r)),
            Cell::Bool(b) => Value::Bool(*b),
        }
    }
}

/// Shortest round-trip decimal; scientific outside `[1e-4, 1e15)`.
pub fn format_float(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || !v.is_finite() || (1e-4..1e15).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

/// A rational and its nearest double, the pair every exact value is printed as.
pub fn exact_cells(r: &Rational) -> [Cell; 2] {
    [Cell::Ratio(r.clone()), Cell::Float(rational_to_f64(r))]
}

#[derive(Clone, Debug)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub metadata: Map<String, Value>,
}

impl Table {
    pub fn new<S: Into<String>>(command: &str, mode: &str, columns: impl IntoIterator<Item = S>) -> Self {
        let columns = columns.into_iter().map(Into::into).collect();
        let mut metadata = Map::new();
        metadata.insert("tool".into(), json!("gnp"));
        metadata.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
        metadata.insert("schema".into(), json!(SCHEMA_VERSION));
        metadata.insert("command".into(), json!(command));
        metadata.insert("mode".into(), json!(mode));
        Self { columns, rows: Vec::new(), metadata }
    }

    pub fn meta(&mut self, key: &str, value: Value) {
        self.metadata.insert(key.into(), value);
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_csv(&self, out: impl Write) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let records: Vec<Value> = self
            .rows
            .iter()
            .map(|row| Value::Object(self.columns.iter().zip(row).map(|(c, v)| (c.clone(), v.json())).collect()))
            .collect();
        json!({ "metadata": self.metadata, "records": records })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_round_trips() {
        for v in [0.0, 0.59375, 1e-5, 123.25, 1e15, 3.0e-300, -2.5e-7, 1.0 / 3.0] {
            let s = format_float(v);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits(), "{s}");
        }
        assert_eq!(format_float(1e-5), "1e-5");
        assert_eq!(format_float(0.25), "0.25");
    }

    #[test]
    fn csv_and_json_shapes() {
        let mut t = Table::new("test", "exact", ["a", "b", "c"]);
        let [r, f] = exact_cells(&Rational::from((19, 32)));
        t.push(vec![r, f, Cell::Empty]);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "a,b,c\n19/32,0.59375,\n");
        let j = t.to_json();
        assert_eq!(j["records"][0]["a"], "19/32");
        assert_eq!(j["records"][0]["b"], 0.59375);
        assert!(j["records"][0]["c"].is_null());
        assert_eq!(j["metadata"]["mode"], "exact");
    }
}
