//! JSON documents for pmfs and channels, and CSV artifacts.
//!
//! A pmf is `{"axes": [[labels]...], "mass": nested}` with `mass` nested
//! row-major over the axes. A channel is
//! `{"inputs": [[labels]...], "outputs": [[labels]...], "table": nested}`
//! with the table nested over the input axes, then the output axes.

use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use coordcap_core::{Alphabet, Channel, Pmf};
use serde_json::{json, Value};

use crate::error::{CliError, Context, Result};

fn labels(key: &str, v: &Value) -> Result<Vec<Alphabet>> {
    let axes = v
        .as_array()
        .ok_or_else(|| CliError::malformed(key, "axes must be a list of label lists"))?;
    axes.iter()
        .map(|a| {
            let ls = a
                .as_array()
                .ok_or_else(|| CliError::malformed(key, "each axis must be a list of labels"))?;
            let ls = ls
                .iter()
                .map(|l| match l {
                    Value::String(s) => Ok(s.clone()),
                    Value::Number(n) => Ok(n.to_string()),
                    _ => Err(CliError::malformed(
                        key,
                        format!("label {l} is not a string or number"),
                    )),
                })
                .collect::<Result<Vec<_>>>()?;
            Alphabet::new(ls).context(key)
        })
        .collect()
}

/// Flattens a nested array whose shape must be exactly `dims`.
fn flatten(key: &str, v: &Value, dims: &[usize], out: &mut Vec<f64>) -> Result<()> {
    match dims.split_first() {
        None => {
            let x = v
                .as_f64()
                .ok_or_else(|| CliError::malformed(key, format!("{v} is not a number")))?;
            out.push(x);
            Ok(())
        }
        Some((&d, rest)) => {
            let items = v.as_array().ok_or_else(|| {
                CliError::malformed(key, format!("expected a list of {d} entries, found {v}"))
            })?;
            if items.len() != d {
                return Err(CliError::malformed(
                    key,
                    format!("ragged array: expected {d} entries, found {}", items.len()),
                ));
            }
            items.iter().try_for_each(|it| flatten(key, it, rest, out))
        }
    }
}

fn nest(values: &[f64], dims: &[usize]) -> Value {
    match dims.split_first() {
        None => json!(values[0]),
        Some((&d, rest)) => {
            let stride: usize = rest.iter().product();
            Value::Array(
                (0..d)
                    .map(|i| nest(&values[i * stride..(i + 1) * stride], rest))
                    .collect(),
            )
        }
    }
}

fn field<'a>(key: &str, doc: &'a Value, name: &str) -> Result<&'a Value> {
    doc.get(name)
        .ok_or_else(|| CliError::malformed(key, format!("missing field {name:?}")))
}

fn check_fields(key: &str, doc: &Value, names: &[&str]) -> Result<()> {
    let obj = doc
        .as_object()
        .ok_or_else(|| CliError::malformed(key, "expected a JSON object"))?;
    match obj.keys().find(|k| !names.contains(&k.as_str())) {
        Some(k) => Err(CliError::malformed(key, format!("unexpected field {k:?}"))),
        None => Ok(()),
    }
}

pub fn pmf_from_json(key: &str, doc: &Value) -> Result<Pmf> {
    check_fields(key, doc, &["axes", "mass"])?;
    let axes = labels(key, field(key, doc, "axes")?)?;
    let dims: Vec<usize> = axes.iter().map(Alphabet::len).collect();
    let mut mass = Vec::new();
    flatten(key, field(key, doc, "mass")?, &dims, &mut mass)?;
    Pmf::new(axes, mass).context(key)
}

pub fn channel_from_json(key: &str, doc: &Value) -> Result<Channel> {
    check_fields(key, doc, &["inputs", "outputs", "table"])?;
    let inputs = labels(key, field(key, doc, "inputs")?)?;
    let outputs = labels(key, field(key, doc, "outputs")?)?;
    let dims: Vec<usize> = inputs.iter().chain(&outputs).map(Alphabet::len).collect();
    let mut table = Vec::new();
    flatten(key, field(key, doc, "table")?, &dims, &mut table)?;
    Channel::new(inputs, outputs, table).context(key)
}

fn axes_json(axes: &[Alphabet]) -> Value {
    Value::Array(axes.iter().map(|a| json!(a.labels())).collect())
}

pub fn pmf_to_json(p: &Pmf) -> Value {
    json!({ "axes": axes_json(p.axes()), "mass": nest(p.mass(), &p.dims()) })
}

pub fn channel_to_json(c: &Channel) -> Value {
    let dims: Vec<usize> = c
        .input_axes()
        .iter()
        .chain(c.output_axes())
        .map(Alphabet::len)
        .collect();
    json!({
        "inputs": axes_json(c.input_axes()),
        "outputs": axes_json(c.output_axes()),
        "table": nest(c.table(), &dims),
    })
}

fn read_json(key: &str, path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path.display(), e))?;
    serde_json::from_str(&text).map_err(|e| CliError::malformed(key, e))
}

pub fn read_pmf(key: &str, path: &Path) -> Result<Pmf> {
    pmf_from_json(key, &read_json(key, path)?)
}

pub fn read_channel(key: &str, path: &Path) -> Result<Channel> {
    channel_from_json(key, &read_json(key, path)?)
}

/// A CSV artifact: one `#` comment line with the command and a timestamp,
/// then a header row and records. Everything after the comment line depends
/// only on the inputs.
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn body(&self) -> Vec<u8> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        w.into_inner().expect("in-memory flush")
    }

    pub fn write(&self, path: &Path, command: &str) -> Result<()> {
        let stamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let mut f = std::fs::File::create(path).map_err(|e| CliError::io(path.display(), e))?;
        writeln!(f, "# coordcap {command} {stamp}")
            .and_then(|_| f.write_all(&self.body()))
            .map_err(|e| CliError::io(path.display(), e))
    }
}

/// Reads a CSV artifact back: skips the comment line and returns the header
/// and records.
pub fn read_table(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| CliError::malformed("csv", e))?;
    let header = r
        .headers()
        .map_err(|e| CliError::malformed("csv", e))?
        .iter()
        .map(String::from)
        .collect();
    let rows = r
        .records()
        .map(|rec| rec.map(|r| r.iter().map(String::from).collect()))
        .collect::<std::result::Result<Vec<Vec<String>>, _>>()
        .map_err(|e| CliError::malformed("csv", e))?;
    Ok((header, rows))
}

/// Shortest round-tripping decimal form.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

/// Path next to `out` with `suffix` replacing the extension, e.g.
/// `runs/a.csv` → `runs/a.summary.csv`.
pub fn sibling(out: &Path, suffix: &str) -> std::path::PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    out.with_file_name(format!("{stem}.{suffix}"))
}
