//! Symplectic Pauli algebra, CSS codes, virtual-qubit bases and maximum-likelihood decoding.
//!
//! A [`PauliOp`] with bits `(x, z)` and phase exponent `t` is `i^t · X^{x} Z^{z}`, the
//! tensor product taken qubit by qubit with `X` to the left of `Z`. Hence `Y = i·XZ`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::distill::BellDiagonalParams;
use crate::gf2::{F2Mat, F2Vec};
use crate::{Error, Result};

/// An `n`-qubit Pauli operator in symplectic form.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliOp {
    x: F2Vec,
    z: F2Vec,
    phase: u8,
}

impl PauliOp {
    /// Builds `i^phase · X^x Z^z`.
    pub fn new(x: F2Vec, z: F2Vec, phase: u8) -> Result<Self> {
        if x.len() != z.len() {
            return Err(Error::Dimension(format!(
                "x part has {} qubits, z part has {}",
                x.len(),
                z.len()
            )));
        }
        Ok(Self {
            x,
            z,
            phase: phase % 4,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            x: F2Vec::zeros(n),
            z: F2Vec::zeros(n),
            phase: 0,
        }
    }

    /// Pure X-type operator `X^x`.
    pub fn x_type(x: F2Vec) -> Self {
        let n = x.len();
        Self {
            x,
            z: F2Vec::zeros(n),
            phase: 0,
        }
    }

    /// Pure Z-type operator `Z^z`.
    pub fn z_type(z: F2Vec) -> Self {
        let n = z.len();
        Self {
            x: F2Vec::zeros(n),
            z,
            phase: 0,
        }
    }

    /// Single-qubit `X` on qubit `i` (0-based).
    pub fn x_on(n: usize, i: usize) -> Self {
        let mut x = F2Vec::zeros(n);
        x.set(i, true);
        Self::x_type(x)
    }

    /// Single-qubit `Z` on qubit `i` (0-based).
    pub fn z_on(n: usize, i: usize) -> Self {
        let mut z = F2Vec::zeros(n);
        z.set(i, true);
        Self::z_type(z)
    }

    /// Single-qubit `Y = iXZ` on qubit `i` (0-based).
    pub fn y_on(n: usize, i: usize) -> Self {
        let mut p = Self::x_on(n, i).compose(&Self::z_on(n, i));
        p.phase = (p.phase + 1) % 4;
        p
    }

    /// Parses a label such as `"XIZY"`, optionally prefixed by `+`, `-`, `i`, `+i` or `-i`.
    pub fn parse(s: &str) -> Result<Self> {
        let (prefix, body) = match s.find(['I', 'X', 'Y', 'Z']) {
            Some(k) => s.split_at(k),
            None => (s, ""),
        };
        let mut phase: u8 = match prefix {
            "" | "+" => 0,
            "i" | "+i" => 1,
            "-" => 2,
            "-i" => 3,
            _ => {
                return Err(Error::InvalidInput(format!(
                    "bad Pauli phase prefix {prefix:?}"
                )))
            }
        };
        let n = body.chars().count();
        let mut x = F2Vec::zeros(n);
        let mut z = F2Vec::zeros(n);
        for (i, c) in body.chars().enumerate() {
            match c {
                'I' => {}
                'X' => x.set(i, true),
                'Z' => z.set(i, true),
                'Y' => {
                    x.set(i, true);
                    z.set(i, true);
                    // Y = i·XZ
                    phase += 1;
                }
                _ => return Err(Error::InvalidInput(format!("bad Pauli character {c:?}"))),
            }
        }
        Ok(Self {
            x,
            z,
            phase: phase % 4,
        })
    }

    /// Parses the `"X:mask;Z:mask"` form, with phase zero.
    pub fn parse_masks(s: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("expected \"X:mask;Z:mask\", got {s:?}"));
        let (xs, zs) = s.split_once(';').ok_or_else(bad)?;
        let x = F2Vec::parse(xs.trim().strip_prefix("X:").ok_or_else(bad)?)?;
        let z = F2Vec::parse(zs.trim().strip_prefix("Z:").ok_or_else(bad)?)?;
        Self::new(x, z, 0)
    }

    /// The `"X:mask;Z:mask"` form; the phase is dropped.
    pub fn to_masks(&self) -> String {
        format!("X:{};Z:{}", self.x, self.z)
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn x_bits(&self) -> &F2Vec {
        &self.x
    }

    pub fn z_bits(&self) -> &F2Vec {
        &self.z
    }

    pub fn phase_exp(&self) -> u8 {
        self.phase
    }

    /// Number of qubits acted on nontrivially.
    pub fn weight(&self) -> usize {
        (0..self.n())
            .filter(|&i| self.x.get(i) || self.z.get(i))
            .count()
    }

    pub fn is_identity_up_to_phase(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    /// Product `self · other` with exact phase bookkeeping.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.n(), other.n(), "qubit count mismatch in composition");
        // Z^b X^c = (-1)^{b·c} X^c Z^b
        let swap = if self.z.dot(&other.x) { 2 } else { 0 };
        Self {
            x: self.x.xor(&other.x),
            z: self.z.xor(&other.z),
            phase: (self.phase + other.phase + swap) % 4,
        }
    }

    /// Equality ignoring the global phase.
    pub fn eq_up_to_phase(&self, other: &Self) -> bool {
        self.x == other.x && self.z == other.z
    }

    /// Lexicographic order on `(x_bits, z_bits)`.
    pub fn lex_cmp(&self, other: &Self) -> Ordering {
        self.x
            .lex_cmp(&other.x)
            .then_with(|| self.z.lex_cmp(&other.z))
    }
}

impl fmt::Display for PauliOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Y contributes one factor of i relative to the XZ product.
        let ys = (0..self.n())
            .filter(|&i| self.x.get(i) && self.z.get(i))
            .count();
        let shown = (self.phase as usize + 4 - ys % 4) % 4;
        f.write_str(["+", "+i", "-", "-i"][shown])?;
        for i in 0..self.n() {
            let c = match (self.x.get(i), self.z.get(i)) {
                (false, false) => 'I',
                (true, false) => 'X',
                (false, true) => 'Z',
                (true, true) => 'Y',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliOp({self})")
    }
}

/// Whether two Pauli operators commute (symplectic form `x_P·z_Q ⊕ z_P·x_Q = 0`).
pub fn commutes(p: &PauliOp, q: &PauliOp) -> Result<bool> {
    if p.n() != q.n() {
        return Err(Error::Dimension(format!("{} vs {} qubits", p.n(), q.n())));
    }
    Ok(p.x.dot(&q.z) == p.z.dot(&q.x))
}

/// A CSS code: Z-type checks `H_Z`, X-type checks `H_X`, and paired logical operators.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CssCode {
    n: usize,
    h_z: F2Mat,
    h_x: F2Mat,
    logicals: Vec<(PauliOp, PauliOp)>,
}

impl fmt::Debug for CssCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CssCode")
            .field("n", &self.n)
            .field("h_z", &self.h_z)
            .field("h_x", &self.h_x)
            .field("logicals", &self.logicals)
            .finish()
    }
}

impl CssCode {
    /// Validates checks and logicals against the CSS invariants.
    pub fn new(h_z: F2Mat, h_x: F2Mat, logicals: Vec<(PauliOp, PauliOp)>) -> Result<Self> {
        let n = h_z.n_cols();
        if h_x.n_cols() != n {
            return Err(Error::Dimension(
                "H_Z and H_X have different column counts".into(),
            ));
        }
        let bad = |m: String| Err(Error::Construction(m));
        if !h_z.mul(&h_x.transpose())?.is_zero() {
            return bad("H_Z · H_Xᵀ is not zero".into());
        }
        let k = n - h_z.rank() - h_x.rank();
        if logicals.len() != k {
            return bad(format!(
                "expected {k} logical pairs, got {}",
                logicals.len()
            ));
        }
        for (i, (zb, xb)) in logicals.iter().enumerate() {
            if zb.n() != n || xb.n() != n {
                return Err(Error::Dimension(
                    "logical operator size differs from code length".into(),
                ));
            }
            if !zb.x.is_zero() || !xb.z.is_zero() {
                return bad(format!("logical pair {i} is not (Z-type, X-type)"));
            }
            if !h_x.mul_vec(&zb.z)?.is_zero() || !h_z.mul_vec(&xb.x)?.is_zero() {
                return bad(format!(
                    "logical pair {i} does not commute with the stabilizers"
                ));
            }
            for (j, (zb2, xb2)) in logicals.iter().enumerate() {
                if zb.z.dot(&xb2.x) != (i == j) || zb2.z.dot(&xb.x) != (i == j) {
                    return bad(format!("logical pairs {i},{j} have the wrong commutation"));
                }
            }
        }
        Ok(Self {
            n,
            h_z,
            h_x,
            logicals,
        })
    }

    /// Builds a code from its checks and derives a canonical set of logical pairs.
    pub fn from_checks(h_z: F2Mat, h_x: F2Mat) -> Result<Self> {
        let n = h_z.n_cols();
        if h_x.n_cols() != n {
            return Err(Error::Dimension(
                "H_Z and H_X have different column counts".into(),
            ));
        }
        if !h_z.mul(&h_x.transpose())?.is_zero() {
            return Err(Error::Construction("H_Z · H_Xᵀ is not zero".into()));
        }
        let zs = complement_in_kernel(&h_x, &h_z);
        let xs = complement_in_kernel(&h_z, &h_x);
        let k = zs.len();
        if xs.len() != k {
            return Err(Error::Construction(
                "logical spaces have different dimensions".into(),
            ));
        }
        // Dualize the X representatives so that z_i · x_j = δ_ij.
        let gram = F2Mat::new(
            zs.iter()
                .map(|z| F2Vec::from_bits(&xs.iter().map(|x| z.dot(x) as u8).collect::<Vec<_>>()))
                .collect(),
            k,
        )?;
        let inv = gram
            .inverse()?
            .ok_or_else(|| Error::Construction("logical pairing is degenerate".into()))?;
        let logicals = (0..k)
            .map(|j| {
                let mut x = F2Vec::zeros(n);
                for (l, xl) in xs.iter().enumerate() {
                    if inv.get(l, j) {
                        x.xor_assign(xl);
                    }
                }
                (PauliOp::z_type(zs[j].clone()), PauliOp::x_type(x))
            })
            .collect();
        Self::new(h_z, h_x, logicals)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of encoded qubits.
    pub fn k(&self) -> usize {
        self.logicals.len()
    }

    pub fn h_z(&self) -> &F2Mat {
        &self.h_z
    }

    pub fn h_x(&self) -> &F2Mat {
        &self.h_x
    }

    pub fn logicals(&self) -> &[(PauliOp, PauliOp)] {
        &self.logicals
    }

    /// Stabilizer generators: Z-type rows first, then X-type rows.
    pub fn stabilizers(&self) -> Vec<PauliOp> {
        let mut s: Vec<PauliOp> = self
            .h_z
            .rows()
            .iter()
            .cloned()
            .map(PauliOp::z_type)
            .collect();
        s.extend(self.h_x.rows().iter().cloned().map(PauliOp::x_type));
        s
    }

    /// Whether `p` is, up to phase, an element of the stabilizer group.
    pub fn in_stabilizer_group(&self, p: &PauliOp) -> bool {
        self.h_x.row_space_contains(&p.x) && self.h_z.row_space_contains(&p.z)
    }

    /// Whether `p` anticommutes with at least one logical operator.
    pub fn acts_on_logicals(&self, p: &PauliOp) -> bool {
        self.logicals
            .iter()
            .any(|(zb, xb)| p.x.dot(&zb.z) || p.z.dot(&xb.x))
    }

    /// Serializes as two gf2 text blocks followed by one `"X:mask;Z:mask"` line per logical.
    pub fn to_text(&self) -> String {
        let mut s = self.h_z.to_text();
        s.push_str(&self.h_x.to_text());
        s.push_str(&format!("{}\n", self.logicals.len()));
        for (zb, xb) in &self.logicals {
            s.push_str(&format!("{}\n{}\n", zb.to_masks(), xb.to_masks()));
        }
        s
    }

    /// Parses the format produced by [`CssCode::to_text`].
    pub fn from_text(text: &str) -> Result<Self> {
        let lines: Vec<&str> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .collect();
        let block = |start: usize| -> Result<(F2Mat, usize)> {
            let header = lines
                .get(start)
                .ok_or_else(|| Error::InvalidInput("code text ended early".into()))?;
            let rows: usize = header
                .split_whitespace()
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::InvalidInput(format!("bad matrix header {header:?}")))?;
            let end = start + 1 + rows;
            if end > lines.len() {
                return Err(Error::InvalidInput("code text ended early".into()));
            }
            let m = F2Mat::from_text(&lines[start..end].join("\n"))?;
            Ok((m, end))
        };
        let (h_z, next) = block(0)?;
        let (h_x, next) = block(next)?;
        let k: usize = lines
            .get(next)
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::InvalidInput("missing logical count".into()))?;
        if lines.len() != next + 1 + 2 * k {
            return Err(Error::InvalidInput(
                "logical operator lines do not match the count".into(),
            ));
        }
        let logicals = (0..k)
            .map(|i| {
                let zb = PauliOp::parse_masks(lines[next + 1 + 2 * i])?;
                let xb = PauliOp::parse_masks(lines[next + 2 + 2 * i])?;
                Ok((zb, xb))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(h_z, h_x, logicals)
    }
}

/// Basis of `ker(a)` modulo `rowspace(b)`, chosen greedily from the canonical kernel basis.
fn complement_in_kernel(a: &F2Mat, b: &F2Mat) -> Vec<F2Vec> {
    let mut span = b.rref();
    let mut out = Vec::new();
    for v in a.kernel_basis() {
        if !span.row_space_contains(&v) {
            span.push_row(v.clone())
                .expect("kernel vectors have the code length");
            out.push(v);
        }
    }
    out
}

fn mat(rows: &[&str]) -> F2Mat {
    let n = rows[0].len();
    F2Mat::from_rows_str(rows, n).expect("static code tables are well formed")
}

fn ones(n: usize) -> F2Vec {
    F2Vec::from_bits(&alloc::vec![1u8; n])
}

/// Three-qubit amplitude repetition code with checks `Z₁Z₃`, `Z₂Z₃` and logicals `ZZZ`, `XXX`.
pub fn repetition3() -> CssCode {
    CssCode::new(
        mat(&["101", "011"]),
        F2Mat::empty(3),
        alloc::vec![(PauliOp::z_type(ones(3)), PauliOp::x_type(ones(3)))],
    )
    .expect("repetition code is a valid CSS code")
}

/// Nine-qubit Shor code: six Z-type checks within blocks, two X-type block checks.
pub fn shor9() -> CssCode {
    CssCode::new(
        mat(&[
            "101000000",
            "011000000",
            "000101000",
            "000011000",
            "000000101",
            "000000011",
        ]),
        mat(&["000111111", "111000111"]),
        alloc::vec![(PauliOp::z_type(ones(9)), PauliOp::x_type(ones(9)))],
    )
    .expect("Shor code is a valid CSS code")
}

/// Looks up a built-in code by name (`rep3` or `shor9`).
pub fn code_by_name(name: &str) -> Result<CssCode> {
    match name {
        "rep3" => Ok(repetition3()),
        "shor9" => Ok(shor9()),
        _ => Err(Error::InvalidInput(format!("unknown code {name:?}"))),
    }
}

/// Role of a virtual qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VirtualRole {
    /// Amplitude operator is the Z-type check with this row index.
    AmplitudeCheck(usize),
    /// Phase operator is the X-type check with this row index.
    PhaseCheck(usize),
    /// Logical pair with this index.
    Encoded(usize),
}

/// A complete set of `n` (amplitude, phase) operator pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VirtualBasis {
    pub pairs: Vec<(PauliOp, PauliOp)>,
    pub roles: Vec<VirtualRole>,
}

impl VirtualBasis {
    /// Checks that same-index pairs anticommute and all cross-index operators commute.
    pub fn validate(pairs: &[(PauliOp, PauliOp)]) -> Result<()> {
        let n = pairs.len();
        for (i, (a, p)) in pairs.iter().enumerate() {
            if a.n() != n || p.n() != n {
                return Err(Error::Dimension(
                    "virtual basis needs n pairs on n qubits".into(),
                ));
            }
            if commutes(a, p)? {
                return Err(Error::Construction(format!("pair {i} commutes")));
            }
            for (j, (b, q)) in pairs.iter().enumerate().skip(i + 1) {
                if !(commutes(a, b)? && commutes(a, q)? && commutes(p, b)? && commutes(p, q)?) {
                    return Err(Error::Construction(format!(
                        "pairs {i} and {j} do not commute"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Completes the checks and logicals of `code` to a full virtual-qubit basis.
///
/// Z-type checks are paired with X-type partners, X-type checks with Z-type partners, and the
/// encoded qubits with the code's logical pairs. Partners are the dual basis, so the result is
/// unique given the code's generators and logicals.
pub fn virtual_basis(code: &CssCode) -> Result<VirtualBasis> {
    let n = code.n;
    let gz: Vec<F2Vec> = independent_rows(&code.h_z);
    let hx: Vec<F2Vec> = independent_rows(&code.h_x);
    if gz.len() != code.h_z.n_rows() || hx.len() != code.h_x.n_rows() {
        return Err(Error::Construction(
            "check matrices must have independent rows".into(),
        ));
    }
    // Z-type partners e_j: e_j · h_l = δ_jl and e_j · xbar = 0.
    let mut constraints = hx.clone();
    constraints.extend(code.logicals.iter().map(|(_, xb)| xb.x.clone()));
    let cmat = F2Mat::new(constraints, n)?;
    let mut zrows = gz.clone();
    for j in 0..hx.len() {
        let mut rhs = F2Vec::zeros(cmat.n_rows());
        rhs.set(j, true);
        let e = cmat.solve(&rhs)?.ok_or_else(|| {
            Error::Construction("no amplitude partner for an X-type check".into())
        })?;
        zrows.push(e);
    }
    zrows.extend(code.logicals.iter().map(|(zb, _)| zb.z.clone()));
    let zmat = F2Mat::new(zrows.clone(), n)?;
    let xmat = zmat
        .inverse()?
        .ok_or_else(|| Error::Construction("amplitude operators are dependent".into()))?
        .transpose();
    let mut pairs = Vec::with_capacity(n);
    let mut roles = Vec::with_capacity(n);
    for (i, z) in zrows.into_iter().enumerate() {
        let x = xmat.row(i).clone();
        pairs.push((PauliOp::z_type(z), PauliOp::x_type(x)));
        roles.push(if i < gz.len() {
            VirtualRole::AmplitudeCheck(i)
        } else if i < gz.len() + hx.len() {
            VirtualRole::PhaseCheck(i - gz.len())
        } else {
            VirtualRole::Encoded(i - gz.len() - hx.len())
        });
    }
    VirtualBasis::validate(&pairs)?;
    Ok(VirtualBasis { pairs, roles })
}

fn independent_rows(m: &F2Mat) -> Vec<F2Vec> {
    let mut acc = F2Mat::empty(m.n_cols());
    let mut out = Vec::new();
    for r in m.rows() {
        if !r.is_zero() && !acc.row_space_contains(r) {
            acc.push_row(r.clone()).expect("row length matches");
            out.push(r.clone());
        }
    }
    out
}

/// Syndromes of `e`: `sZ[i] = 1` iff `e` anticommutes with the i-th Z-type check, likewise `sX`.
pub fn syndromes_of(code: &CssCode, e: &PauliOp) -> Result<(F2Vec, F2Vec)> {
    if e.n() != code.n {
        return Err(Error::Dimension(format!(
            "{}-qubit error on a {}-qubit code",
            e.n(),
            code.n
        )));
    }
    Ok((code.h_z.mul_vec(&e.x)?, code.h_x.mul_vec(&e.z)?))
}

/// Default cap on the code length accepted by [`decode_ml`].
pub const DEFAULT_N_MAX: usize = 20;
/// Largest number of candidate errors enumerated by [`decode_ml`].
pub const MAX_CANDIDATES_LOG2: usize = 26;

/// Enumerates a coset `x0 + span(basis)` of bit masks in Gray-code order.
pub(crate) struct Coset {
    pub(crate) base: u64,
    pub(crate) gens: Vec<u64>,
}

impl Coset {
    /// Solutions of `h · v = s` as masks, or `None` if the syndrome is not attainable.
    pub(crate) fn of(h: &F2Mat, s: &F2Vec) -> Result<Option<Self>> {
        let Some(base) = h.solve(s)? else {
            return Ok(None);
        };
        let gens = h.kernel_basis().iter().map(F2Vec::to_mask).collect();
        Ok(Some(Self {
            base: base.to_mask(),
            gens,
        }))
    }

    pub(crate) fn for_each(&self, mut f: impl FnMut(u64)) {
        let mut v = self.base;
        f(v);
        let total: u64 = 1u64 << self.gens.len();
        for step in 1..total {
            v ^= self.gens[step.trailing_zeros() as usize];
            f(v);
        }
    }
}

/// Per-qubit log-probabilities `ln p_jk` indexed by `2j + k`; `None` encodes probability zero.
pub(crate) fn log_table(p: &BellDiagonalParams) -> [Option<f64>; 4] {
    let f = |v: f64| {
        if v > 0.0 {
            Some(crate::math::ln(v))
        } else {
            None
        }
    };
    [f(p.p00), f(p.p01), f(p.p10), f(p.p11)]
}

/// Log-likelihood of error `(x, z)` under i.i.d. Bell-diagonal noise on `n` qubits.
pub(crate) fn log_likelihood(x: u64, z: u64, n: usize, table: &[Option<f64>; 4]) -> Option<f64> {
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let c11 = (x & z).count_ones();
    let c10 = (x & !z & full).count_ones();
    let c01 = (!x & z & full).count_ones();
    let c00 = n as u32 - c11 - c10 - c01;
    let mut total = 0.0;
    for (count, entry) in [
        (c00, table[0]),
        (c01, table[1]),
        (c10, table[2]),
        (c11, table[3]),
    ] {
        if count > 0 {
            total += count as f64 * entry?;
        }
    }
    Some(total)
}

/// Lexicographic order on masks, entry 0 first.
pub(crate) fn mask_lex_cmp(a: u64, b: u64) -> Ordering {
    if a == b {
        return Ordering::Equal;
    }
    let i = (a ^ b).trailing_zeros();
    ((a >> i) & 1).cmp(&((b >> i) & 1))
}

/// Running maximum with lexicographic tie-breaking on `(x, z)`.
#[derive(Clone, Copy)]
pub(crate) struct Best {
    pub(crate) score: f64,
    pub(crate) x: u64,
    pub(crate) z: u64,
    found: bool,
}

impl Best {
    pub(crate) fn new() -> Self {
        Self {
            score: f64::NEG_INFINITY,
            x: 0,
            z: 0,
            found: false,
        }
    }

    pub(crate) fn offer(&mut self, score: Option<f64>, x: u64, z: u64) {
        let Some(score) = score else { return };
        let tol = 1e-12 * crate::math::abs(self.score).max(1.0);
        let better = !self.found
            || score > self.score + tol
            || (crate::math::abs(score - self.score) <= tol
                && mask_lex_cmp(x, self.x).then_with(|| mask_lex_cmp(z, self.z)) == Ordering::Less);
        if better {
            self.score = score;
            self.x = x;
            self.z = z;
            self.found = true;
        }
    }

    pub(crate) fn found(&self) -> bool {
        self.found
    }
}

/// Most probable Pauli error consistent with both syndromes under i.i.d. Bell-diagonal noise.
///
/// Ties are broken toward the lexicographically smallest `(x_bits, z_bits)`. Codes longer
/// than `n_max` qubits, or whose candidate set exceeds `2^26`, are rejected.
pub fn decode_ml(
    code: &CssCode,
    s_z: &F2Vec,
    s_x: &F2Vec,
    noise: &BellDiagonalParams,
    n_max: usize,
) -> Result<PauliOp> {
    let n = code.n;
    if n > n_max || n > 63 {
        return Err(Error::Capability(format!(
            "ML decoding limited to n ≤ {n_max}, got {n}"
        )));
    }
    let unreachable = || Error::InvalidInput("syndrome is not attainable for this code".into());
    let cx = Coset::of(&code.h_z, s_z)?.ok_or_else(unreachable)?;
    let cz = Coset::of(&code.h_x, s_x)?.ok_or_else(unreachable)?;
    if cx.gens.len() + cz.gens.len() > MAX_CANDIDATES_LOG2 {
        return Err(Error::Capability(format!(
            "2^{} candidate errors exceed the enumeration cap",
            cx.gens.len() + cz.gens.len()
        )));
    }
    let table = log_table(noise);
    let mut best = Best::new();
    cx.for_each(|x| cz.for_each(|z| best.offer(log_likelihood(x, z, n, &table), x, z)));
    if !best.found() {
        return Err(Error::InvalidInput(
            "no error with nonzero probability matches the syndrome".into(),
        ));
    }
    PauliOp::new(F2Vec::from_mask(best.x, n), F2Vec::from_mask(best.z, n), 0)
}

/// Human-readable operator label without the sign, e.g. `"ZZI"`.
pub fn label(p: &PauliOp) -> String {
    let s = p.to_string();
    s.trim_start_matches(['+', '-', 'i']).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PauliOp {
        PauliOp::parse(s).unwrap()
    }

    #[test]
    fn commutation_examples() {
        assert!(!commutes(&p("X"), &p("Z")).unwrap());
        assert!(commutes(&p("ZZI"), &p("IZZ")).unwrap());
        assert!(commutes(&p("XXX"), &p("ZZZ")).is_ok_and(|c| !c));
        assert!(commutes(&p("XX"), &p("ZZ")).unwrap());
        assert!(commutes(&p("X"), &p("XX")).is_err());
    }

    #[test]
    fn y_is_i_xz() {
        let y = p("Y");
        assert_eq!(y.phase_exp(), 1);
        assert_eq!(y.to_string(), "+Y");
        // XZ = -iY
        assert_eq!(p("X").compose(&p("Z")).to_string(), "-iY");
        // Y·Y = I
        assert_eq!(y.compose(&y).to_string(), "+I");
        // ZX = iY
        assert_eq!(p("Z").compose(&p("X")).to_string(), "+iY");
    }

    #[test]
    fn repetition_table() {
        let c = repetition3();
        let rows: Vec<String> = (0..3)
            .map(|i| {
                syndromes_of(&c, &PauliOp::x_on(3, i))
                    .unwrap()
                    .0
                    .to_string()
            })
            .collect();
        assert_eq!(rows, ["10", "01", "11"]);
        assert!(syndromes_of(&c, &PauliOp::identity(3)).unwrap().0.is_zero());
        let table22 = mat(&["110", "011"]);
        assert!(c.h_z().same_row_space(&table22));
    }

    #[test]
    fn shor_syndromes() {
        let c = shor9();
        let (_, sx) = syndromes_of(&c, &PauliOp::z_on(9, 3)).unwrap();
        assert_eq!(sx.to_string(), "10");
        let e = PauliOp::x_on(9, 3).compose(&PauliOp::z_on(9, 3));
        let (sz, sx) = syndromes_of(&c, &e).unwrap();
        assert_eq!(sz.to_string(), "001000");
        assert_eq!(sx.to_string(), "10");
        assert_eq!(c.h_z().row(2).to_string(), "000101000");
        assert_eq!(c.h_x().row(0).to_string(), "000111111");
    }

    #[test]
    fn table22_listing_is_a_virtual_basis() {
        let pairs = alloc::vec![
            (p("ZZI"), p("IXX")),
            (p("IZZ"), p("XXI")),
            (p("ZZZ"), p("XXX"))
        ];
        VirtualBasis::validate(&pairs).unwrap();
    }

    #[test]
    fn derived_virtual_bases() {
        for c in [repetition3(), shor9()] {
            let vb = virtual_basis(&c).unwrap();
            assert_eq!(vb.pairs.len(), c.n());
            assert_eq!(vb.pairs.last().unwrap(), &c.logicals()[0]);
        }
        let trivial = CssCode::from_checks(F2Mat::empty(1), F2Mat::empty(1)).unwrap();
        let vb = virtual_basis(&trivial).unwrap();
        assert_eq!(vb.pairs, alloc::vec![(p("Z"), p("X"))]);
    }

    #[test]
    fn code_text_round_trip() {
        let c = shor9();
        assert_eq!(CssCode::from_text(&c.to_text()).unwrap(), c);
        assert!(CssCode::from_text("1 3\n101\n0 3\n0\n").is_err());
    }

    #[test]
    fn from_checks_reproduces_logical_count() {
        let c = CssCode::from_checks(shor9().h_z().clone(), shor9().h_x().clone()).unwrap();
        assert_eq!(c.k(), 1);
        assert!(!c.acts_on_logicals(&PauliOp::z_on(9, 0).compose(&PauliOp::z_on(9, 1))));
        assert!(c.acts_on_logicals(
            &PauliOp::x_on(9, 0)
                .compose(&PauliOp::x_on(9, 3))
                .compose(&PauliOp::x_on(9, 6))
        ));
    }

    #[test]
    fn decode_capability_cap() {
        let c = CssCode::from_checks(F2Mat::empty(21), F2Mat::empty(21)).unwrap();
        let noise = BellDiagonalParams::new(0.9, 0.05, 0.05, 0.0).unwrap();
        let r = decode_ml(
            &c,
            &F2Vec::zeros(0),
            &F2Vec::zeros(0),
            &noise,
            DEFAULT_N_MAX,
        );
        assert!(matches!(r, Err(Error::Capability(_))));
    }
}
