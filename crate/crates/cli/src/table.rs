//! Deterministic tabular reports. One `Table` renders to CSV or to JSON with
//! identical numeric payloads: every float is rounded to the configured
//! number of significant digits before either rendering, so parsing a CSV
//! cell and the matching JSON field yields the same double.

use num_complex::Complex64;
use serde_json::{Map, Number, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Bool(bool),
    Str(String),
    Null,
}

#[derive(Debug)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Command metadata; emitted under `meta` in JSON and as trailing `#`
    /// comment lines in CSV.
    pub meta: Map<String, Value>,
}

/// Renders `x` with `precision` significant digits in scientific notation.
/// Non-finite values render empty (JSON: null); both renderings stay in sync.
pub fn sig(x: f64, precision: usize) -> String {
    if !x.is_finite() {
        return String::new();
    }
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{:.*e}", precision.saturating_sub(1), x)
}

/// The JSON number corresponding to [`sig`]'s rendering of `x`.
pub fn json_num(x: f64, precision: usize) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let rounded: f64 = sig(x, precision).parse().expect("sig emits valid floats");
    Number::from_f64(rounded).map(Value::Number).unwrap_or(Value::Null)
}

pub fn json_complex(z: Complex64, precision: usize) -> Value {
    let mut m = Map::new();
    m.insert("re".into(), json_num(z.re, precision));
    m.insert("im".into(), json_num(z.im, precision));
    Value::Object(m)
}

/// `re+imi` with both parts in [`sig`] form, e.g. `1.50e0+-2.25e-1i`.
pub fn complex_str(z: Complex64, precision: usize) -> String {
    format!("{}+{}i", sig(z.re, precision), sig(z.im, precision))
}

fn csv_escape(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl Cell {
    fn render_csv(&self, precision: usize) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Num(v) => sig(*v, precision),
            Cell::Bool(v) => v.to_string(),
            Cell::Str(s) => csv_escape(s),
            Cell::Null => String::new(),
        }
    }

    fn render_json(&self, precision: usize) -> Value {
        match self {
            Cell::Int(v) => Value::Number((*v).into()),
            Cell::Num(v) => json_num(*v, precision),
            Cell::Bool(v) => Value::Bool(*v),
            Cell::Str(s) => Value::String(s.clone()),
            Cell::Null => Value::Null,
        }
    }
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Table {
        Table {
            columns,
            rows: Vec::new(),
            meta: Map::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format, precision: usize) -> String {
        match format {
            Format::Csv => self.render_csv(precision),
            Format::Json => self.render_json(precision),
        }
    }

    fn render_csv(&self, precision: usize) -> String {
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|c| c.render_csv(precision)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        for (key, value) in &self.meta {
            out.push_str(&format!("# {key} = {value}\n"));
        }
        out
    }

    fn render_json(&self, precision: usize) -> String {
        let results: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = Map::new();
                for (col, cell) in self.columns.iter().zip(row) {
                    obj.insert((*col).to_string(), cell.render_json(precision));
                }
                Value::Object(obj)
            })
            .collect();
        let mut top = Map::new();
        top.insert("meta".into(), Value::Object(self.meta.clone()));
        top.insert("results".into(), Value::Array(results));
        let mut text =
            serde_json::to_string_pretty(&Value::Object(top)).expect("tables serialize");
        text.push('\n');
        text
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig_is_round_trip_stable() {
        for &x in &[0.0, -0.0, 1.0, -2.5e-7, 1.949969572937683e-1, 6.0] {
            let s = sig(x, 12);
            let parsed: f64 = s.parse().unwrap();
            assert_eq!(sig(parsed, 12), s, "rendering must be a fixed point");
        }
        assert_eq!(sig(f64::NAN, 12), "");
        assert_eq!(sig(-0.0, 12), sig(0.0, 12));
    }

    #[test]
    fn csv_and_json_carry_the_same_numbers() {
        let mut t = Table::new(vec!["a", "b"]);
        t.push_row(vec![Cell::Num(1.0 / 3.0), Cell::Int(7)]);
        let csv = t.render(Format::Csv, 12);
        let json = t.render(Format::Json, 12);
        let cell = csv.lines().nth(1).unwrap().split(',').next().unwrap();
        let parsed: Value = serde_json::from_str(&json).unwrap();
        let from_json = parsed["results"][0]["a"].as_f64().unwrap();
        assert_eq!(cell.parse::<f64>().unwrap(), from_json);
    }

    #[test]
    fn csv_quotes_commas() {
        let mut t = Table::new(vec!["s"]);
        t.push_row(vec![Cell::Str("{r, p_r}".into())]);
        let csv = t.render(Format::Csv, 12);
        assert!(csv.contains("\"{r, p_r}\""));
    }
}
