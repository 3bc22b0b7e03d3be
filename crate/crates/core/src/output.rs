//! CSV and JSON tables. Floats are written in scientific notation with 17
//! significant digits so they round-trip exactly.

use serde_json::{Map, Value};
use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

/// `1.2345678901234567e-3`; non-finite values as `inf`, `-inf`, `nan`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match header");
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(csv_cell).collect();
            let _ = writeln!(s, "{}", cells.join(","));
        }
        s
    }

    /// Array of objects keyed by column name. Numbers are emitted as the
    /// same strings the CSV uses, so JSON and CSV carry identical digits.
    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut m = Map::new();
                for (k, c) in self.columns.iter().zip(row) {
                    let v = match c {
                        Cell::Num(x) => Value::String(fmt_f64(*x)),
                        Cell::Int(i) => Value::from(*i),
                        Cell::Text(t) => Value::String(t.clone()),
                    };
                    m.insert(k.clone(), v);
                }
                Value::Object(m)
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&Value::Array(rows)).expect("serializable");
        s.push('\n');
        s
    }
}

fn csv_cell(c: &Cell) -> String {
    match c {
        Cell::Num(x) => fmt_f64(*x),
        Cell::Int(i) => i.to_string(),
        Cell::Text(t) if t.contains([',', '"', '\n']) => format!("\"{}\"", t.replace('"', "\"\"")),
        Cell::Text(t) => t.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn layout() {
        let mut t = Table::new(&["t", "value", "route"]);
        t.push(vec![1.0.into(), 0.1.into(), "exact, h3".into()]);
        assert_eq!(
            t.to_csv(),
            "t,value,route\n1.0000000000000000e0,1.0000000000000001e-1,\"exact, h3\"\n"
        );
        assert!(t.to_json().contains("\"value\": \"1.0000000000000001e-1\""));
        assert_eq!(fmt_f64(f64::INFINITY), "inf");
    }

    proptest! {
        #[test]
        fn floats_round_trip(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
            let s = fmt_f64(x);
            prop_assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits());
            let mant = s.split('e').next().unwrap().trim_start_matches('-').replace('.', "");
            prop_assert_eq!(mant.len(), 17);
        }
    }
}
