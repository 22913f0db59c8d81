//! `uncertainty`: slack of the entropic uncertainty relations over files or random states.

use std::path::Path;

use clap::ValueEnum;
use qcomp::distill::trial_rng;
use qcomp::qstate::{DensityMatrix, StateRecord, SystemLabel};
use qcomp::uncert::{
    check_berta, check_maassen_uffink, check_tripartite, ObservablePair, UncertaintyReport,
    SLACK_TOL,
};
use serde_json::{json, Map, Value};

use crate::error::CliError;
use crate::report::Report;

/// Relation to check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Relation {
    /// Single system: H(X) + H(Z) ≥ log₂(1/c).
    Mu,
    /// With quantum memory B: H(X|B) + H(Z|B) ≥ log₂(1/c) + H(A|B).
    Berta,
    /// Tripartite: H(X|B) + H(Z|C) ≥ log₂(1/c).
    Tri,
}

impl Relation {
    fn name(self) -> &'static str {
        match self {
            Self::Mu => "mu",
            Self::Berta => "berta",
            Self::Tri => "tri",
        }
    }
}

/// Where the states come from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Source {
    /// A JSON state record, or an array of records.
    File(String),
    /// `count` random states drawn from `seed`.
    Random { count: u64, seed: u64 },
}

impl Source {
    /// Parses `random:N[:seed]` (seed defaults to `default_seed`) or a file path.
    pub fn parse(s: &str, default_seed: u64) -> Result<Self, CliError> {
        let Some(spec) = s.strip_prefix("random:") else {
            return Ok(Self::File(s.into()));
        };
        let bad = || CliError::Argument(format!("expected random:N[:seed], got {s}"));
        let mut parts = spec.split(':');
        let count = parts.next().and_then(|c| c.parse().ok()).ok_or_else(bad)?;
        let seed = match parts.next() {
            Some(t) => t.parse().map_err(|_| bad())?,
            None => default_seed,
        };
        if parts.next().is_some() {
            return Err(bad());
        }
        Ok(Self::Random { count, seed })
    }
}

fn load_states(path: &str) -> Result<Vec<DensityMatrix>, CliError> {
    let text = std::fs::read_to_string(Path::new(path)).map_err(|source| CliError::Read {
        path: path.into(),
        source,
    })?;
    let malformed = |source| CliError::StateFile {
        path: path.into(),
        source,
    };
    let value: Value = serde_json::from_str(&text).map_err(malformed)?;
    let records: Vec<StateRecord> = match value {
        Value::Array(_) => serde_json::from_value(value).map_err(malformed)?,
        other => vec![serde_json::from_value(other).map_err(malformed)?],
    };
    records
        .iter()
        .map(|r| Ok(r.to_state()?.density()))
        .collect()
}

/// Random state number `i`. Dimensions and ranks cycle with `i` so that every run of the
/// same length covers the same shapes. Tripartite states are pure, as the relation requires.
fn random_state(relation: Relation, seed: u64, i: u64) -> Result<DensityMatrix, CliError> {
    let mut rng = trial_rng(seed, i);
    let i = i as usize;
    let (labels, rank) = match relation {
        Relation::Mu => {
            let d = 2 + i % 3;
            (vec![SystemLabel::new("A", d)?], 1 + (i / 3) % d)
        }
        Relation::Berta => {
            let (da, db) = (2 + i % 2, 1 + (i / 2) % 3);
            let labels = vec![SystemLabel::new("A", da)?, SystemLabel::new("B", db)?];
            (labels, 1 + (i / 6) % 4)
        }
        Relation::Tri => {
            let labels = vec![
                SystemLabel::new("A", 2 + i % 2)?,
                SystemLabel::new("B", 2)?,
                SystemLabel::new("C", 2)?,
            ];
            (labels, 1)
        }
    };
    Ok(DensityMatrix::random(labels, rank, &mut rng)?)
}

/// Checks `relation` on `rho`. The first factor is A; for `tri` the next two are B and C.
fn check(relation: Relation, rho: &DensityMatrix) -> Result<UncertaintyReport, CliError> {
    let names: Vec<String> = rho.names().into_iter().map(String::from).collect();
    let a = &names[0];
    let pair = ObservablePair::weyl(rho.labels()[0].dim)?;
    Ok(match relation {
        Relation::Mu => check_maassen_uffink(rho, &pair)?,
        Relation::Berta => check_berta(rho, a, &pair)?,
        Relation::Tri => {
            if names.len() != 3 {
                return Err(CliError::Argument(format!(
                    "tri needs three factors, got {}",
                    names.len()
                )));
            }
            check_tripartite(rho, a, &names[1], &names[2], &pair)?
        }
    })
}

/// Runs the check on every state and reports one row per state. The returned count is the
/// number of states whose slack is below `-SLACK_TOL`.
pub fn run(relation: Relation, source: &Source) -> Result<(Report, usize), CliError> {
    let states: Box<dyn Iterator<Item = Result<DensityMatrix, CliError>>> = match source {
        Source::File(path) => Box::new(load_states(path)?.into_iter().map(Ok)),
        Source::Random { count, seed } => {
            let (count, seed) = (*count, *seed);
            Box::new((0..count).map(move |i| random_state(relation, seed, i)))
        }
    };
    let mut rows = Vec::new();
    let mut violations = 0;
    let mut min_slack = f64::INFINITY;
    for (id, rho) in states.enumerate() {
        let rho = rho?;
        let r = check(relation, &rho)?;
        violations += usize::from(!r.holds());
        min_slack = min_slack.min(r.slack);
        let dims: Vec<String> = rho.labels().iter().map(|l| l.dim.to_string()).collect();
        let mut row = Map::new();
        row.insert("state_id".into(), id.into());
        row.insert("dims".into(), dims.join("x").into());
        row.insert("h1".into(), r.h1.into());
        row.insert("h2".into(), r.h2.into());
        row.insert("bound".into(), r.bound.into());
        row.insert("extra".into(), r.extra.into());
        row.insert("slack".into(), r.slack.into());
        rows.push(row);
    }
    let parameters = match source {
        Source::File(path) => json!({"relation": relation.name(), "states": path}),
        Source::Random { count, seed } => {
            json!({"relation": relation.name(), "random_count": count, "random_seed": seed})
        }
    };
    let result = json!({
        "states": rows.len(),
        "min_slack": if rows.is_empty() { Value::Null } else { min_slack.into() },
        "violations": violations,
        "tolerance": SLACK_TOL,
    });
    Ok((
        Report::new("uncertainty", parameters, result).with_rows(rows),
        violations,
    ))
}
