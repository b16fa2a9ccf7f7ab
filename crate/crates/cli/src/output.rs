//! CSV and JSON emission of result tables.

use std::io::Write;

use serde_json::{json, Map, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            // 17 significant digits round-trip every f64
            Cell::Float(v) if v.is_finite() => format!("{v:.16e}"),
            Cell::Float(_) => "NaN".into(),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Float(v) => json!(v),
            Cell::Int(v) => json!(v),
            Cell::Text(s) => json!(s),
            Cell::Empty => Value::Null,
        }
    }
}

/// One output row, or the error that prevented computing it.
pub type Row = Result<Vec<Cell>, String>;

#[derive(Debug, Clone)]
pub struct Table {
    pub command: &'static str,
    pub header: Vec<&'static str>,
    /// Leading input columns of each row; a failed row shows these and NaN
    /// for the rest.
    pub inputs: Vec<Vec<Cell>>,
    pub rows: Vec<Row>,
}

impl Table {
    fn filled(&self, i: usize) -> Vec<Cell> {
        match &self.rows[i] {
            Ok(cells) => cells.clone(),
            Err(_) => {
                let mut cells = self.inputs[i].clone();
                cells.resize(self.header.len(), Cell::Float(f64::NAN));
                cells
            }
        }
    }

    pub fn errors(&self) -> Vec<(usize, &str)> {
        self.rows
            .iter()
            .enumerate()
            .filter_map(|(i, r)| r.as_ref().err().map(|e| (i, e.as_str())))
            .collect()
    }

    pub fn write_csv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "{}", self.header.join(","))?;
        for i in 0..self.rows.len() {
            let line: Vec<String> = self.filled(i).iter().map(Cell::csv).collect();
            writeln!(out, "{}", line.join(","))?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = (0..self.rows.len())
            .map(|i| {
                let mut obj = Map::new();
                for (name, cell) in self.header.iter().zip(self.filled(i)) {
                    obj.insert(name.to_string(), cell.json());
                }
                if let Err(e) = &self.rows[i] {
                    obj.insert("error".into(), json!(e));
                }
                Value::Object(obj)
            })
            .collect();
        json!({ "command": self.command, "rows": rows })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_through_csv() {
        for v in [0.1, 1.0 / 3.0, 6.02214076e23, 5e-324, -2.5] {
            let text = Cell::Float(v).csv();
            assert_eq!(text.parse::<f64>().unwrap(), v, "{text}");
        }
        assert_eq!(Cell::Float(1.0).csv(), "1.0000000000000000e0");
    }

    #[test]
    fn failed_rows_keep_inputs() {
        let table = Table {
            command: "demo",
            header: vec!["a", "b"],
            inputs: vec![vec![Cell::Int(1)], vec![Cell::Int(2)]],
            rows: vec![Ok(vec![Cell::Int(1), Cell::Float(0.5)]), Err("boom".into())],
        };
        let mut buf = Vec::new();
        table.write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "a,b\n1,5.0000000000000000e-1\n2,NaN\n"
        );
        let v = table.to_json();
        assert_eq!(v["rows"][1]["error"], "boom");
        assert!(v["rows"][1]["b"].is_null());
        assert_eq!(table.errors(), vec![(1, "boom")]);
    }
}
