//! Deterministic report emission: JSON with every float printed at 17
//! significant digits (scientific notation) so equal inputs produce
//! byte-identical files and every value survives a read-back, plus the CSV
//! layout for region scans.

use crate::inverse::{ScanRow, ScanTable};
use serde::Serialize;
use serde_json::ser::{CompactFormatter, Formatter, PrettyFormatter};
use std::io::{self, Write};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("serialization failed: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv emission failed: {0}")]
    Csv(#[from] csv::Error),
    #[error("cannot write output: {0}")]
    Io(#[from] io::Error),
}

/// Fixed-width scientific float rendering: 17 significant digits round-trip
/// `f64` exactly and do not depend on the shortest-representation search.
pub fn fmt_f64(value: f64) -> String {
    format!("{value:.16e}")
}

struct SciFormatter<F> {
    inner: F,
}

impl<F: Formatter> Formatter for SciFormatter<F> {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(fmt_f64(value).as_bytes())
    }

    fn begin_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_array(writer)
    }

    fn end_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + Write>(
        &mut self,
        writer: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.inner.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_object(writer)
    }

    fn end_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + Write>(
        &mut self,
        writer: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.inner.begin_object_key(writer, first)
    }

    fn end_object_key<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_object_key(writer)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_object_value(writer)
    }
}

/// Pretty-printed JSON with deterministic float rendering, newline-terminated.
pub fn json_string<T: Serialize>(value: &T) -> Result<String, ReportError> {
    let mut buf = Vec::new();
    let formatter = SciFormatter { inner: PrettyFormatter::new() };
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, formatter);
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serializer emits UTF-8"))
}

/// Single-line JSON with deterministic float rendering.
pub fn json_line<T: Serialize>(value: &T) -> Result<String, ReportError> {
    let mut buf = Vec::new();
    let formatter = SciFormatter { inner: CompactFormatter };
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, formatter);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(buf).expect("serializer emits UTF-8"))
}

fn scan_headers(example: u8) -> [&'static str; 7] {
    let second = if example == 1 { "Q" } else { "B" };
    ["A", second, "condition", "condition_sign", "real_count", "verdict", "agree"]
}

fn scan_record(row: &ScanRow) -> Vec<String> {
    vec![
        fmt_f64(row.a),
        fmt_f64(row.second),
        fmt_f64(row.condition),
        row.condition_sign.to_string(),
        row.real_count.to_string(),
        row.verdict.to_string(),
        row.agree.to_string(),
    ]
}

/// Scan table as CSV text; an empty table still carries the header line.
pub fn scan_csv(table: &ScanTable) -> Result<String, ReportError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(scan_headers(table.example))?;
    for row in &table.rows {
        writer.write_record(scan_record(row))?;
    }
    let bytes = writer.into_inner().map_err(|e| ReportError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv emits UTF-8"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inverse::Verdict;
    use serde_json::Value;

    #[test]
    fn float_rendering_round_trips_awkward_values() {
        for v in [0.1 + 0.2, -0.1105, 1.0 / 3.0, 6.02e23, 5e-324, 0.0, -2.5] {
            let s = fmt_f64(v);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), v.to_bits(), "{s}");
        }
    }

    #[test]
    fn json_floats_survive_read_back() {
        #[derive(Serialize)]
        struct Payload {
            xs: Vec<f64>,
        }
        let xs = vec![0.30000000000000004, -0.1105, 1e-300];
        let text = json_string(&Payload { xs: xs.clone() }).unwrap();
        let value: Value = serde_json::from_str(&text).unwrap();
        for (i, x) in xs.iter().enumerate() {
            assert_eq!(value["xs"][i].as_f64().unwrap().to_bits(), x.to_bits());
        }
    }

    #[test]
    fn equal_inputs_produce_identical_bytes() {
        #[derive(Serialize)]
        struct Payload {
            a: f64,
            b: Vec<f64>,
        }
        let p = Payload { a: 1.0 / 7.0, b: vec![2.0f64.sqrt(), -1.0] };
        let q = Payload { a: 1.0 / 7.0, b: vec![2.0f64.sqrt(), -1.0] };
        assert_eq!(json_string(&p).unwrap(), json_string(&q).unwrap());
        assert_eq!(json_line(&p).unwrap(), json_line(&q).unwrap());
    }

    #[test]
    fn empty_scan_is_header_only() {
        let table = ScanTable { example: 2, rows: vec![], disagreements: 0, banded: 0 };
        let csv = scan_csv(&table).unwrap();
        assert_eq!(csv, "A,B,condition,condition_sign,real_count,verdict,agree\n");
    }

    #[test]
    fn scan_rows_render_one_line_each() {
        let table = ScanTable {
            example: 1,
            rows: vec![ScanRow {
                a: 1.0,
                second: -1.0,
                condition: 0.0,
                condition_sign: 0,
                real_count: 2,
                verdict: Verdict::Real,
                agree: true,
            }],
            disagreements: 0,
            banded: 1,
        };
        let csv = scan_csv(&table).unwrap();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "A,Q,condition,condition_sign,real_count,verdict,agree"
        );
        let row = lines.next().unwrap();
        assert!(row.starts_with("1.0000000000000000e0,-1.0000000000000000e0,"));
        assert!(row.ends_with(",0,2,real,true"));
        assert!(lines.next().is_none());
    }
}
