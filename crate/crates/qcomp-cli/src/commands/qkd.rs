//! `qkd`: key rates, thresholds, preprocessing optimization and rate sweeps.

use qcomp::qkdrate::{
    optimize_preprocessing, optimized_threshold, rate, threshold, KeyRateModel, Protocol,
};
use serde_json::{json, Map, Value};

use crate::error::CliError;
use crate::report::Report;

/// Protocol, preprocessing noise and block length shared by every `qkd` subcommand.
#[derive(Debug, Clone, Copy)]
pub struct ModelArgs {
    pub protocol: Protocol,
    pub q: f64,
    pub m: usize,
}

impl ModelArgs {
    fn model(&self) -> Result<KeyRateModel, CliError> {
        Ok(KeyRateModel::new(self.protocol, self.q, self.m)?)
    }

    fn json(&self) -> Map<String, Value> {
        let mut m = Map::new();
        m.insert("protocol".into(), self.protocol.name().into());
        m.insert("q".into(), self.q.into());
        m.insert("m".into(), self.m.into());
        m
    }
}

fn params(model: &ModelArgs, extra: Value) -> Value {
    let mut m = model.json();
    if let Value::Object(e) = extra {
        m.extend(e);
    }
    Value::Object(m)
}

pub fn rate_at(args: &ModelArgs, delta: f64) -> Result<Report, CliError> {
    let r = rate(&args.model()?, delta)?;
    Ok(Report::new(
        "qkd rate",
        params(args, json!({"delta": delta})),
        json!({"rate": r}),
    ))
}

pub fn threshold_at(args: &ModelArgs, tol: f64) -> Result<Report, CliError> {
    let t = threshold(&args.model()?, tol)?;
    Ok(Report::new(
        "qkd threshold",
        params(args, json!({"tol": tol})),
        serde_json::to_value(t)?,
    ))
}

/// With `delta`, the best `q` at that error rate; without, the optimized threshold.
pub fn optimize(args: &ModelArgs, delta: Option<f64>, tol: f64) -> Result<Report, CliError> {
    let model = args.model()?;
    let mut p = Map::new();
    p.insert("protocol".into(), args.protocol.name().into());
    p.insert("m".into(), args.m.into());
    match delta {
        Some(d) => {
            p.insert("delta".into(), d.into());
            let o = optimize_preprocessing(&model, d)?;
            Ok(Report::new(
                "qkd optimize",
                Value::Object(p),
                serde_json::to_value(o)?,
            ))
        }
        None => {
            p.insert("tol".into(), tol.into());
            let t = optimized_threshold(&model, tol)?;
            Ok(Report::new(
                "qkd optimize",
                Value::Object(p),
                serde_json::to_value(t)?,
            ))
        }
    }
}

/// Rates on `steps` evenly spaced error rates from `from` to `to` inclusive.
pub fn sweep(args: &ModelArgs, from: f64, to: f64, steps: usize) -> Result<Report, CliError> {
    if steps < 2 || from.is_nan() || to.is_nan() || from > to {
        return Err(CliError::Argument(format!(
            "sweep needs from ≤ to and steps ≥ 2, got {from}, {to}, {steps}"
        )));
    }
    let model = args.model()?;
    let mut rows = Vec::with_capacity(steps);
    for i in 0..steps {
        let delta = from + (to - from) * i as f64 / (steps - 1) as f64;
        let mut row = Map::new();
        row.insert("protocol".into(), args.protocol.name().into());
        row.insert("delta".into(), delta.into());
        row.insert("q".into(), args.q.into());
        row.insert("m".into(), args.m.into());
        row.insert("rate".into(), rate(&model, delta)?.into());
        rows.push(row);
    }
    Ok(Report::new(
        "qkd sweep",
        params(args, json!({"from": from, "to": to, "steps": steps})),
        json!({"points": steps}),
    )
    .with_rows(rows))
}
