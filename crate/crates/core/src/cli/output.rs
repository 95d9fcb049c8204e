//! Result tables and their CSV / JSON encodings.

use serde_json::{json, Map, Value};

use super::config::Format;
use crate::{Error, Result};

/// Significant digits written for every real number.
pub const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Real(f64),
    Int(u64),
    Text(String),
    Missing,
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Real(x) => Some(*x),
            Cell::Int(n) => Some(*n as f64),
            _ => None,
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Real(x) if x.is_finite() => json!(round_sig(*x)),
            Cell::Real(_) | Cell::Missing => Value::Null,
            Cell::Int(n) => json!(n),
            Cell::Text(s) => json!(s),
        }
    }

    fn to_csv(&self) -> String {
        match self {
            // `Debug` is the shortest round-trip form and switches to an
            // exponent for very small or large magnitudes
            Cell::Real(x) if x.is_finite() => format!("{:?}", round_sig(*x)),
            Cell::Real(x) => format!("{x}"),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Missing => String::new(),
        }
    }
}

/// Rounds to [`SIGNIFICANT_DIGITS`]; the shortest representation of the
/// result is what gets printed.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .unwrap_or(x)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let written = w.write_record(&self.columns).and_then(|_| {
            self.rows
                .iter()
                .try_for_each(|row| w.write_record(row.iter().map(Cell::to_csv)))
        });
        written.expect("writing to memory cannot fail");
        let bytes = w.into_inner().expect("flushing to memory cannot fail");
        String::from_utf8(bytes).expect("cells are UTF-8")
    }

    /// `{"config": <echo>, "rows": [{column: value, ...}, ...]}`.
    pub fn to_json(&self, config: &Value) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .cloned()
                    .zip(row.iter().map(Cell::to_json))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let doc = json!({ "columns": self.columns, "config": config, "rows": rows });
        let mut s = serde_json::to_string_pretty(&doc).expect("tables serialize");
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format, config: &Value) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(config),
        }
    }

    pub fn parse_csv(text: &str) -> Result<Table> {
        let bad = |e: csv::Error| Error::InvalidInput(format!("bad CSV table: {e}"));
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let columns: Vec<String> = reader
            .headers()
            .map_err(bad)?
            .iter()
            .map(String::from)
            .collect();
        if columns.iter().all(String::is_empty) {
            return Err(Error::InvalidInput("empty table".into()));
        }
        let rows = reader
            .records()
            .map(|rec| rec.map(|r| r.iter().map(parse_cell).collect()).map_err(bad))
            .collect::<Result<Vec<Vec<Cell>>>>()?;
        Ok(Table { columns, rows })
    }

    pub fn parse_json(text: &str) -> Result<Table> {
        let doc: Value = serde_json::from_str(text)
            .map_err(|e| Error::InvalidInput(format!("bad JSON table: {e}")))?;
        let columns: Vec<String> = doc["columns"]
            .as_array()
            .ok_or_else(|| Error::InvalidInput("JSON table lacks 'columns'".into()))?
            .iter()
            .map(|c| c.as_str().unwrap_or_default().to_string())
            .collect();
        let rows = doc["rows"]
            .as_array()
            .ok_or_else(|| Error::InvalidInput("JSON table lacks 'rows'".into()))?
            .iter()
            .map(|row| {
                columns
                    .iter()
                    .map(|c| match &row[c.as_str()] {
                        Value::Number(n) if n.is_u64() => Cell::Int(n.as_u64().unwrap_or_default()),
                        Value::Number(n) => Cell::Real(n.as_f64().unwrap_or(f64::NAN)),
                        Value::String(s) => Cell::Text(s.clone()),
                        _ => Cell::Missing,
                    })
                    .collect()
            })
            .collect();
        Ok(Table { columns, rows })
    }

    /// JSON if the text starts with `{`, CSV otherwise.
    pub fn parse(text: &str) -> Result<Table> {
        if text.trim_start().starts_with('{') {
            Self::parse_json(text)
        } else {
            Self::parse_csv(text)
        }
    }
}

fn parse_cell(raw: &str) -> Cell {
    let s = raw.trim();
    if s.is_empty() {
        return Cell::Missing;
    }
    if let Ok(n) = s.parse::<u64>() {
        return Cell::Int(n);
    }
    match s.parse::<f64>() {
        Ok(x) => Cell::Real(x),
        Err(_) => Cell::Text(s.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new(&["t", "n_atoms", "negativity", "status"]);
        t.push(vec![
            Cell::Real(0.1),
            Cell::Int(3),
            Cell::Real(1.0 / 3.0),
            Cell::Text("ok".into()),
        ]);
        t.push(vec![
            Cell::Real(2.5),
            Cell::Int(9),
            Cell::Missing,
            Cell::Text("failed".into()),
        ]);
        t
    }

    #[test]
    fn rounding_keeps_twelve_digits() {
        assert_eq!(round_sig(1.0 / 3.0), 0.333333333333);
        assert_eq!(round_sig(-2.0e-300 / 3.0), -6.66666666667e-301);
        assert_eq!(round_sig(0.0), 0.0);
    }

    #[test]
    fn csv_layout_and_reload() {
        let t = sample();
        let csv = t.to_csv();
        assert_eq!(
            csv,
            "t,n_atoms,negativity,status\n0.1,3,0.333333333333,ok\n2.5,9,,failed\n"
        );
        let mut tiny = Table::new(&["x"]);
        tiny.push(vec![Cell::Real(3.067767583719e-7)]);
        assert_eq!(tiny.to_csv(), "x\n3.06776758372e-7\n");
        let back = Table::parse(&csv).unwrap();
        assert_eq!(back.columns, t.columns);
        assert_eq!(back.rows[0][2], Cell::Real(0.333333333333));
        assert_eq!(back.rows[1][2], Cell::Missing);
    }

    #[test]
    fn json_reload() {
        let t = sample();
        let text = t.to_json(&json!({"experiment": "x"}));
        let back = Table::parse(&text).unwrap();
        assert_eq!(back.columns, t.columns);
        assert_eq!(back.rows[0][1], Cell::Int(3));
        assert_eq!(back.rows[1][2], Cell::Missing);
        assert_eq!(back.rows[1][3], Cell::Text("failed".into()));
    }

    #[test]
    fn ragged_csv_rejected() {
        assert!(Table::parse_csv("a,b\n1\n").is_err());
        assert!(Table::parse_csv("").is_err());
    }
}
