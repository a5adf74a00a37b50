use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::{json, Map, Value};

use super::ScenarioResult;
use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

/// Scientific notation with 17 significant digits, e.g. `5.0000000000000000e-1`.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Pretty printer that writes every float through [`format_float`].
struct FixedFloats<'a>(PrettyFormatter<'a>);

impl Formatter for FixedFloats<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_float(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_array(writer)
    }

    fn end_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object(writer)
    }

    fn end_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object_value(writer)
    }
}

fn result_value(result: &ScenarioResult) -> Value {
    let pmfs: Vec<Value> = result
        .pmfs
        .iter()
        .map(|p| {
            let outcomes: Vec<Value> =
                p.pmf.entries().iter().map(|(o, prob)| json!({ "label": o.to_string(), "p": prob })).collect();
            json!({ "label": p.label, "outcomes": outcomes, "no_detection": p.pmf.no_detection() })
        })
        .collect();
    let weak_values: Vec<Value> = result
        .weak_values
        .iter()
        .map(|v| {
            let values: Vec<Value> =
                v.values.iter().map(|(o, z)| json!({ "outcome": o.to_string(), "re": z.re, "im": z.im })).collect();
            json!({ "label": v.label, "values": values })
        })
        .collect();
    let identities: Vec<Value> = result
        .identities
        .iter()
        .map(|i| json!({ "name": i.name, "residual": i.residual, "tol": i.tol, "pass": i.pass }))
        .collect();
    let mut metadata: Map<String, Value> = result.metadata.clone().into_iter().collect();
    if !result.histograms.is_empty() {
        let histograms: Vec<Value> = result
            .histograms
            .iter()
            .map(|h| {
                let counts: Vec<Value> = h.counts.iter().map(|(bin, c)| json!({ "bin": bin, "count": c })).collect();
                json!({ "label": h.label, "counts": counts })
            })
            .collect();
        metadata.insert("histograms".into(), Value::Array(histograms));
    }
    json!({
        "scenario": result.scenario,
        "parameters": result.parameters,
        "pmfs": pmfs,
        "weak_values": weak_values,
        "identities": identities,
        "metadata": metadata,
    })
}

/// The JSON document for a result, newline-terminated.
pub fn to_json(result: &ScenarioResult) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedFloats(PrettyFormatter::with_indent(b"  ")));
    result_value(result).serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

fn file_stem(label: &str) -> String {
    let stem: String = label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' { c.to_ascii_lowercase() } else { '_' })
        .collect();
    stem.trim_matches('_').to_string()
}

/// One `bin,probability` file per pmf (no-detection as a final `none` row)
/// and one `bin,count` file per histogram, as `(file name, contents)`.
pub fn to_csv_files(result: &ScenarioResult) -> Vec<(String, String)> {
    let mut files = Vec::new();
    for p in &result.pmfs {
        let mut body = String::from("bin,probability\n");
        for (o, prob) in p.pmf.entries() {
            body.push_str(&format!("{},{}\n", csv_field(&o.to_string()), format_float(*prob)));
        }
        body.push_str(&format!("none,{}\n", format_float(p.pmf.no_detection())));
        files.push((format!("{}.csv", file_stem(&p.label)), body));
    }
    for h in &result.histograms {
        let mut body = String::from("bin,count\n");
        for (bin, count) in &h.counts {
            body.push_str(&format!("{},{count}\n", csv_field(bin)));
        }
        files.push((format!("{}.hist.csv", file_stem(&h.label)), body));
    }
    files
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Writes `result` to `path`: a single file for JSON, a directory of CSV
/// files for CSV.
pub fn emit(result: &ScenarioResult, format: Format, path: &Path) -> Result<()> {
    match format {
        Format::Json => fs::write(path, to_json(result)?)?,
        Format::Csv => {
            fs::create_dir_all(path)?;
            for (name, body) in to_csv_files(result) {
                fs::write(path.join(name), body)?;
            }
        }
    }
    Ok(())
}
