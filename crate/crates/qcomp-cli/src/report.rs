//! Report assembly and JSON/CSV rendering.
//!
//! Every report carries the command, crate version, seed and resolved parameters. Floats are
//! rounded to 12 significant digits so that output is reproducible across platforms.

use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::ValueEnum;
use serde_json::{Map, Value};

use crate::error::CliError;

/// Significant digits kept for every float in a report.
pub const SIGNIFICANT_DIGITS: usize = 12;

/// Output encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Settings shared by every subcommand.
#[derive(Debug, Clone)]
pub struct Context {
    pub seed: u64,
    pub format: Format,
    pub timestamp: bool,
}

/// Outcome of one command before rendering.
#[derive(Debug, Clone)]
pub struct Report {
    pub command: String,
    pub parameters: Map<String, Value>,
    pub result: Value,
    /// Per-item rows; CSV output renders these when present.
    pub rows: Option<Vec<Map<String, Value>>>,
}

impl Report {
    pub fn new(command: &str, parameters: Value, result: Value) -> Self {
        let parameters = match parameters {
            Value::Object(m) => m,
            _ => Map::new(),
        };
        Self {
            command: command.into(),
            parameters,
            result,
            rows: None,
        }
    }

    pub fn with_rows(mut self, rows: Vec<Map<String, Value>>) -> Self {
        self.rows = Some(rows);
        self
    }
}

/// Rounds `x` to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .unwrap_or(x)
}

fn rounded(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => n
            .as_f64()
            .and_then(|x| serde_json::Number::from_f64(round_sig(x)))
            .map_or(Value::Null, Value::Number),
        Value::Array(a) => Value::Array(a.into_iter().map(rounded).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, rounded(v))).collect()),
        other => other,
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn render_json(report: &Report, ctx: &Context) -> Result<Vec<u8>, CliError> {
    let mut doc = Map::new();
    doc.insert("command".into(), report.command.clone().into());
    doc.insert("version".into(), env!("CARGO_PKG_VERSION").into());
    doc.insert("seed".into(), ctx.seed.into());
    doc.insert(
        "parameters".into(),
        Value::Object(report.parameters.clone()),
    );
    if ctx.timestamp {
        let secs = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
        doc.insert("timestamp_unix".into(), secs.into());
    }
    doc.insert("result".into(), report.result.clone());
    if let Some(rows) = &report.rows {
        doc.insert(
            "rows".into(),
            Value::Array(rows.iter().cloned().map(Value::Object).collect()),
        );
    }
    let mut out = serde_json::to_vec_pretty(&rounded(Value::Object(doc)))?;
    out.push(b'\n');
    Ok(out)
}

/// CSV: one line per row, or a single line of parameters and flattened result fields.
/// The leading columns are always `command`, `version` and `seed`.
fn render_csv(report: &Report, ctx: &Context) -> Result<Vec<u8>, CliError> {
    let rows: Vec<Map<String, Value>> = match &report.rows {
        Some(rows) => rows.clone(),
        None => {
            let mut flat = report.parameters.clone();
            match &report.result {
                Value::Object(m) => flat.extend(m.clone()),
                other => {
                    flat.insert("result".into(), other.clone());
                }
            }
            vec![flat]
        }
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    let keys: Vec<String> = rows
        .first()
        .map_or(Vec::new(), |r| r.keys().cloned().collect());
    let mut header = vec!["command".to_string(), "version".into(), "seed".into()];
    header.extend(keys.iter().cloned());
    w.write_record(&header)?;
    for row in &rows {
        let mut rec = vec![
            report.command.clone(),
            env!("CARGO_PKG_VERSION").to_string(),
            ctx.seed.to_string(),
        ];
        rec.extend(keys.iter().map(|k| {
            row.get(k)
                .map_or(String::new(), |v| cell(&rounded(v.clone())))
        }));
        w.write_record(&rec)?;
    }
    w.into_inner().map_err(|e| CliError::Write(e.into_error()))
}

/// Renders `report` and writes it once, to `out` or standard output.
pub fn emit(report: &Report, ctx: &Context, out: Option<&Path>) -> Result<(), CliError> {
    let bytes = match ctx.format {
        Format::Json => render_json(report, ctx)?,
        Format::Csv => render_csv(report, ctx)?,
    };
    match out {
        Some(path) => std::fs::write(path, bytes)?,
        None => std::io::stdout().lock().write_all(&bytes)?,
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_keeps_twelve_digits() {
        assert_eq!(round_sig(0.1234567890123456), 0.123456789012);
        assert_eq!(round_sig(-2.0 / 3.0), -0.666666666667);
        assert_eq!(round_sig(0.0), 0.0);
        assert_eq!(round_sig(1e-300), 1e-300);
    }

    #[test]
    fn csv_flattens_parameters_and_result() {
        let r = Report::new(
            "t",
            serde_json::json!({"a": 1}),
            serde_json::json!({"x": 1.0 / 3.0}),
        );
        let ctx = Context {
            seed: 5,
            format: Format::Csv,
            timestamp: false,
        };
        let s = String::from_utf8(render_csv(&r, &ctx).unwrap()).unwrap();
        assert_eq!(
            s,
            format!(
                "command,version,seed,a,x\nt,{},5,1,0.333333333333\n",
                env!("CARGO_PKG_VERSION")
            )
        );
    }
}
