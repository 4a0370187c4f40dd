//! Output writers: compact JSON with fixed-width floats, and the text table.

use std::io::{self, Write};

use lroof::graphs::TableEntry;
use serde::Serialize;
use serde_json::ser::Formatter;

/// Compact JSON that writes every float as `{:.16e}`, so output round-trips
/// exactly and is byte-stable across runs.
struct FixedFloat;

impl Formatter for FixedFloat {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        write!(writer, "{:.16e}", f64::from(value))
    }
}

pub fn to_json_line<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedFloat);
    value.serialize(&mut ser).expect("output types serialize");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json writes UTF-8")
}

const HEADER: [&str; 8] = ["l1", "l2", "l3", "l4", "Q1", "Q2", "C", "F"];

pub fn text_table(entries: &[TableEntry]) -> String {
    let cell = |v: f64| format!("{:>11.6}", v + 0.0);
    let mut out = String::new();
    let head: Vec<String> = HEADER.iter().map(|h| format!("{h:>11}")).collect();
    out.push_str(&format!(
        "{} |{} |{} | {:>6}\n",
        head[..4].concat(),
        head[4..6].concat(),
        head[6..].concat(),
        "graphs"
    ));
    for e in entries {
        let t: Vec<String> = e.report.tuple().iter().map(|&v| cell(v)).collect();
        out.push_str(&format!(
            "{} |{} |{} | {:>6}\n",
            t[..4].concat(),
            t[4..6].concat(),
            t[6..].concat(),
            e.graphs
        ));
    }
    out
}
