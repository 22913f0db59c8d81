//! `codes`: syndrome tables, virtual-qubit listings and exhaustive single-error decoding.

use std::collections::BTreeMap;

use qcomp::distill::BellDiagonalParams;
use qcomp::pauli::{
    code_by_name, decode_ml, label, syndromes_of, virtual_basis, CssCode, PauliOp, VirtualRole,
    DEFAULT_N_MAX,
};
use serde_json::{json, Map, Value};

use crate::error::CliError;
use crate::report::Report;

/// Per-qubit error probability of each Pauli in the decode demo.
pub const DEMO_EPSILON: f64 = 0.01;

fn row(value: Value) -> Map<String, Value> {
    match value {
        Value::Object(m) => m,
        _ => Map::new(),
    }
}

fn role_name(role: VirtualRole) -> String {
    match role {
        VirtualRole::AmplitudeCheck(i) => format!("amplitude-check {i}"),
        VirtualRole::PhaseCheck(i) => format!("phase-check {i}"),
        VirtualRole::Encoded(i) => format!("encoded {i}"),
    }
}

/// Bit string of the X-type logical of a code with no X-type checks, if it has exactly one.
fn classical_flip(code: &CssCode) -> Option<qcomp::gf2::F2Vec> {
    if code.h_x().n_rows() > 0 || code.logicals().len() != 1 {
        return None;
    }
    Some(code.logicals()[0].1.x_bits().clone())
}

/// Syndromes of no error, every single X error and, when X-type checks exist, every single Z
/// error. Codes without X-type checks also list the `(0̄, 1̄)` bit-string pair of each row.
pub fn table(name: &str) -> Result<Report, CliError> {
    let code = code_by_name(name)?;
    let n = code.n();
    let mut errors = vec![("none".to_string(), PauliOp::identity(n))];
    errors.extend((0..n).map(|i| (format!("X{}", i + 1), PauliOp::x_on(n, i))));
    if code.h_x().n_rows() > 0 {
        errors.extend((0..n).map(|i| (format!("Z{}", i + 1), PauliOp::z_on(n, i))));
    }
    let flip = classical_flip(&code);
    let mut rows = Vec::with_capacity(errors.len());
    for (name, e) in &errors {
        let (s_z, s_x) = syndromes_of(&code, e)?;
        let mut r = Map::new();
        if let Some(f) = &flip {
            r.insert(
                "bitstrings".into(),
                format!("({},{})", e.x_bits(), e.x_bits().xor(f)).into(),
            );
        }
        r.insert("error".into(), name.clone().into());
        r.insert("s_z".into(), s_z.to_string().into());
        r.insert("s_x".into(), s_x.to_string().into());
        rows.push(r);
    }
    let vb = virtual_basis(&code)?;
    let virtual_qubits: Vec<Value> = vb
        .pairs
        .iter()
        .zip(&vb.roles)
        .map(|((a, p), role)| {
            json!({"role": role_name(*role), "amplitude": label(a), "phase": label(p)})
        })
        .collect();
    let result = json!({
        "n": n,
        "k": code.k(),
        "stabilizers": code.stabilizers().iter().map(label).collect::<Vec<_>>(),
        "logicals": code.logicals().iter().map(|(z, x)| json!([label(z), label(x)])).collect::<Vec<_>>(),
        "virtual_qubits": virtual_qubits,
    });
    Ok(Report::new("codes table", json!({"code": name}), result).with_rows(rows))
}

/// Decodes every single-qubit Pauli error with [`decode_ml`] under i.i.d. noise with
/// probability [`DEMO_EPSILON`] for each of X, Y and Z. A correction succeeds when
/// correction·error is in the stabilizer group. Errors sharing a correction are grouped.
pub fn decode_demo(name: &str) -> Result<Report, CliError> {
    let code = code_by_name(name)?;
    let n = code.n();
    let e = DEMO_EPSILON;
    let noise = BellDiagonalParams::new(1.0 - 3.0 * e, e, e, e)?;
    let mut rows = Vec::with_capacity(3 * n);
    let mut corrected = 0usize;
    let mut classes: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for i in 0..n {
        for (kind, err) in [
            ("X", PauliOp::x_on(n, i)),
            ("Y", PauliOp::y_on(n, i)),
            ("Z", PauliOp::z_on(n, i)),
        ] {
            let name = format!("{kind}{}", i + 1);
            let (s_z, s_x) = syndromes_of(&code, &err)?;
            let c = decode_ml(&code, &s_z, &s_x, &noise, DEFAULT_N_MAX)?;
            let ok = code.in_stabilizer_group(&c.compose(&err));
            corrected += usize::from(ok);
            classes.entry(label(&c)).or_default().push(name.clone());
            rows.push(row(json!({
                "error": name,
                "s_z": s_z.to_string(),
                "s_x": s_x.to_string(),
                "correction": label(&c),
                "corrected": ok,
            })));
        }
    }
    let shared: Vec<Value> = classes
        .into_iter()
        .filter(|(_, errs)| errs.len() > 1)
        .map(|(c, errs)| json!({"correction": c, "errors": errs}))
        .collect();
    let result = json!({
        "corrected": corrected,
        "total": 3 * n,
        "shared_corrections": shared,
    });
    Ok(Report::new(
        "codes decode-demo",
        json!({"code": name, "epsilon": e}),
        result,
    )
    .with_rows(rows))
}
