//! Bit-stable JSON and CSV output.
//!
//! JSON objects have sorted keys, floats are written with 17 significant
//! digits (`{:.16e}`), integers stay integers, and non-finite floats become
//! `null`. CSV tables have a fixed header per row type.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::validation::{BoundRecord, SeriesRecord, ValidationRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(Error::InvalidParameter(format!("unknown format '{s}' (json or csv)"))),
        }
    }
}

/// Float with 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_number(n: &serde_json::Number, out: &mut String) {
    if let Some(i) = n.as_i64() {
        let _ = write!(out, "{i}");
    } else if let Some(u) = n.as_u64() {
        let _ = write!(out, "{u}");
    } else {
        let f = n.as_f64().unwrap_or(f64::NAN);
        if f.is_finite() {
            out.push_str(&fmt_float(f));
        } else {
            out.push_str("null");
        }
    }
}

fn write_string(s: &str, out: &mut String) {
    out.push_str(&serde_json::to_string(s).expect("string serialization cannot fail"));
}

fn write_value(v: &Value, indent: usize, out: &mut String) {
    let pad = |n: usize, out: &mut String| out.extend(std::iter::repeat(' ').take(n));
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => write_number(n, out),
        Value::String(s) => write_string(s, out),
        Value::Array(a) if a.is_empty() => out.push_str("[]"),
        Value::Array(a) => {
            out.push_str("[\n");
            for (i, item) in a.iter().enumerate() {
                pad(indent + 2, out);
                write_value(item, indent + 2, out);
                if i + 1 < a.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            pad(indent, out);
            out.push(']');
        }
        Value::Object(m) if m.is_empty() => out.push_str("{}"),
        Value::Object(m) => {
            let mut keys: Vec<&String> = m.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (i, k) in keys.iter().enumerate() {
                pad(indent + 2, out);
                write_string(k, out);
                out.push_str(": ");
                write_value(&m[k.as_str()], indent + 2, out);
                if i + 1 < keys.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            pad(indent, out);
            out.push('}');
        }
    }
}

/// Single-line canonical form, used for JSON cells inside CSV.
fn write_compact(v: &Value, out: &mut String) {
    match v {
        Value::Array(a) => {
            out.push('[');
            for (i, item) in a.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_compact(item, out);
            }
            out.push(']');
        }
        Value::Object(m) => {
            let mut keys: Vec<&String> = m.keys().collect();
            keys.sort();
            out.push('{');
            for (i, k) in keys.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_string(k, out);
                out.push(':');
                write_compact(&m[k.as_str()], out);
            }
            out.push('}');
        }
        other => write_value(other, 0, out),
    }
}

/// Canonical pretty JSON of any serializable value, newline-terminated.
pub fn to_canonical_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value).map_err(|e| Error::Io(format!("serialization failed: {e}")))?;
    let mut out = String::new();
    write_value(&v, 0, &mut out);
    out.push('\n');
    Ok(out)
}

pub fn compact_json(v: &Value) -> String {
    let mut out = String::new();
    write_compact(v, &mut out);
    out
}

/// A row type with a fixed CSV header.
pub trait CsvRow {
    fn header() -> &'static [&'static str];
    fn fields(&self) -> Vec<String>;
}

/// CSV cell for a float; empty when not finite.
pub fn float_cell(x: f64) -> String {
    if x.is_finite() {
        fmt_float(x)
    } else {
        String::new()
    }
}

pub fn to_csv<T: CsvRow>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(format!("csv: {e}"));
    w.write_record(T::header()).map_err(io)?;
    for r in rows {
        w.write_record(r.fields()).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(format!("csv: {e}")))
}

/// Render `rows` in `format`.
pub fn render<T: CsvRow + Serialize>(rows: &[T], format: Format) -> Result<String> {
    match format {
        Format::Json => to_canonical_json(rows),
        Format::Csv => to_csv(rows),
    }
}

/// Write a rendered report to `path`, or to `stdout` when no path is given.
pub fn emit_report(text: &str, path: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("cannot write {}: {e}", p.display()))),
        None => stdout.write_all(text.as_bytes()).map_err(Error::from),
    }
}

impl CsvRow for ValidationRecord {
    fn header() -> &'static [&'static str] {
        &[
            "formula",
            "quantity",
            "params",
            "paper_value",
            "oracle_value",
            "abs_dev",
            "rel_dev",
            "stable",
            "flagged",
            "oracle",
            "tolerance",
            "note",
        ]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.formula.to_string(),
            self.quantity.clone(),
            compact_json(&self.params),
            float_cell(self.paper_value),
            float_cell(self.oracle_value),
            float_cell(self.abs_dev),
            float_cell(self.rel_dev),
            self.stable.to_string(),
            self.flagged.to_string(),
            self.oracle.clone(),
            float_cell(self.tolerance),
            self.note.clone(),
        ]
    }
}

impl CsvRow for SeriesRecord {
    fn header() -> &'static [&'static str] {
        &["name", "quantity", "params", "fit_value", "analytic_value", "abs_dev", "rel_dev", "agrees", "printed", "residual", "condition", "reliable"]
    }

    fn fields(&self) -> Vec<String> {
        let printed = serde_json::to_value(&self.printed).unwrap_or(Value::Null);
        vec![
            self.name.clone(),
            self.quantity.clone(),
            compact_json(&self.params),
            float_cell(self.fit_value),
            float_cell(self.analytic_value),
            float_cell(self.abs_dev),
            float_cell(self.rel_dev),
            self.agrees.to_string(),
            compact_json(&printed),
            float_cell(self.residual),
            float_cell(self.condition),
            self.reliable.to_string(),
        ]
    }
}

impl CsvRow for BoundRecord {
    fn header() -> &'static [&'static str] {
        &["model", "family", "functional", "variational_energy", "reference_energy", "fd_energy", "gap", "holds"]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            compact_json(&serde_json::to_value(self.model).unwrap_or(Value::Null)),
            self.family.clone(),
            self.functional.as_str().into(),
            float_cell(self.variational_energy),
            float_cell(self.reference_energy),
            float_cell(self.fd_energy),
            float_cell(self.gap),
            self.holds.to_string(),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn canonical_json_examples() {
        let empty: Vec<u8> = vec![];
        assert_eq!(to_canonical_json(&empty).unwrap(), "[]\n");
        let v = json!({"b": 1, "a": [0.5, null, true], "c": {"z": -2.5e-300, "y": "q\""}});
        let s = to_canonical_json(&v).unwrap();
        let want = "{\n  \"a\": [\n    5.0000000000000000e-1,\n    null,\n    true\n  ],\n  \"b\": 1,\n  \"c\": {\n    \"y\": \"q\\\"\",\n    \"z\": -2.5000000000000000e-300\n  }\n}\n";
        assert_eq!(s, want);
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["c"]["z"], -2.5e-300);
        assert_eq!(to_canonical_json(&f64::NAN).unwrap(), "null\n");
    }

    #[test]
    fn floats_round_trip_exactly() {
        for x in [0.1, 1.0 / 3.0, 1.2211966861810777, -7.0e-17, 6.02e23, f64::MIN_POSITIVE] {
            assert_eq!(fmt_float(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn csv_header_only_when_empty() {
        let rows: Vec<BoundRecord> = vec![];
        assert_eq!(to_csv(&rows).unwrap(), "model,family,functional,variational_energy,reference_energy,fd_energy,gap,holds\n");
        let r = BoundRecord {
            model: crate::models::ModelSpec::harmonic(),
            family: "g".into(),
            functional: crate::optimize::Functional::Moments,
            variational_energy: 0.5,
            reference_energy: 0.5,
            fd_energy: f64::NAN,
            gap: 0.0,
            holds: false,
        };
        let s = to_csv(&[r]).unwrap();
        assert_eq!(
            s.lines().nth(1).unwrap(),
            "\"{\"\"d\"\":1,\"\"family\"\":\"\"harmonic\"\",\"\"lambda\"\":0.0000000000000000e0,\"\"mu\"\":0.0000000000000000e0,\"\"n\"\":null}\",g,moments,5.0000000000000000e-1,5.0000000000000000e-1,,0.0000000000000000e0,false"
        );
    }

    #[test]
    fn format_parse() {
        assert_eq!("CSV".parse::<Format>().unwrap(), Format::Csv);
        assert!("xml".parse::<Format>().is_err());
    }

    #[test]
    fn emit_to_writer_and_file() {
        let mut buf = Vec::new();
        emit_report("x\n", None, &mut buf).unwrap();
        assert_eq!(buf, b"x\n");
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.json");
        emit_report("[]\n", Some(&p), &mut buf).unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "[]\n");
        assert!(emit_report("x", Some(&dir.path().join("no/such/dir/f")), &mut buf).is_err());
    }
}
