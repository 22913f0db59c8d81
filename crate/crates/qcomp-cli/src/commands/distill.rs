//! `distill`: hashing rates, Monte-Carlo distillation and the hash-based channel code.

use qcomp::distill::{
    channel_code_from_ir, hashing_rate, simulate_distillation, BellDiagonalParams,
};
use qcomp::{binary_entropy, shannon_entropy};
use serde_json::{json, Value};

use crate::error::CliError;
use crate::report::Report;

/// Parses `p00,p01,p10,p11`.
pub fn parse_params(s: &str) -> Result<BellDiagonalParams, CliError> {
    let ps: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| {
            CliError::Argument(format!("expected four comma-separated numbers, got {s}"))
        })?;
    match ps[..] {
        [a, b, c, d] => Ok(BellDiagonalParams::new(a, b, c, d)?),
        _ => Err(CliError::Argument(format!(
            "expected four probabilities, got {}",
            ps.len()
        ))),
    }
}

fn params_json(p: &BellDiagonalParams) -> Value {
    json!([p.p00, p.p01, p.p10, p.p11])
}

/// Entropy of the Bell label and of its phase part given its amplitude part.
fn entropies(p: &BellDiagonalParams) -> (f64, f64) {
    let total = shannon_entropy(&p.as_array());
    (total, total - binary_entropy(p.p10 + p.p11))
}

/// `−H(A|B)` of the Bell-diagonal state, which equals `1 − H(p)`.
pub fn hashing(p: &BellDiagonalParams) -> Result<Report, CliError> {
    let rate = hashing_rate(&p.state("A", "B")?)?;
    Ok(Report::new(
        "distill hashing",
        json!({"p": params_json(p)}),
        json!({"hashing_rate": rate}),
    ))
}

/// Arguments of `distill sim` after defaults are resolved.
#[derive(Debug, Clone, Copy)]
pub struct SimArgs {
    pub n: usize,
    pub n_z: Option<usize>,
    pub n_x: Option<usize>,
    /// Gap below the hashing bound used when the check counts are not given.
    pub margin: f64,
    pub trials: u64,
}

/// Check counts at rate `1 − H(p) − margin`: `n_X = round(n·H(Z|X))` and `n_Z` takes the rest.
pub fn default_checks(p: &BellDiagonalParams, n: usize, margin: f64) -> (usize, usize) {
    let (total, phase) = entropies(p);
    let checks = ((n as f64) * (total + margin)).round().max(0.0) as usize;
    let n_x = (((n as f64) * phase).round() as usize).min(checks);
    (checks - n_x, n_x)
}

pub fn sim(p: &BellDiagonalParams, args: SimArgs, seed: u64) -> Result<Report, CliError> {
    let (dz, dx) = default_checks(p, args.n, args.margin);
    let n_z = args.n_z.unwrap_or(dz);
    let n_x = args.n_x.unwrap_or(dx);
    let run = simulate_distillation(p, args.n, n_z, n_x, args.trials, seed)?;
    let mut result = serde_json::to_value(run)?;
    if let Value::Object(m) = &mut result {
        m.insert("hashing_rate".into(), (1.0 - entropies(p).0).into());
    }
    Ok(Report::new(
        "distill sim",
        json!({
            "p": params_json(p),
            "n": args.n,
            "n_z": n_z,
            "n_x": n_x,
            "margin": args.margin,
            "trials": args.trials,
        }),
        result,
    ))
}

/// Block error of a hash-derived code at rate `1 − h(p_flip) − gap` over a BSC.
pub fn channel(
    p_flip: f64,
    n: usize,
    gap: f64,
    trials: u64,
    seed: u64,
) -> Result<Report, CliError> {
    let capacity = 1.0 - binary_entropy(p_flip);
    let k = ((n as f64) * (capacity - gap)).round().max(0.0) as usize;
    let n_syndrome = n.saturating_sub(k);
    let block_error = channel_code_from_ir(p_flip, n, n_syndrome, trials, seed)?;
    Ok(Report::new(
        "distill channel",
        json!({"p_flip": p_flip, "n": n, "gap": gap, "trials": trials}),
        json!({
            "capacity": capacity,
            "k": n - n_syndrome,
            "n_syndrome": n_syndrome,
            "rate": (n - n_syndrome) as f64 / n as f64,
            "block_error": block_error,
        }),
    ))
}
