//! Asymptotic key rates of BB84, six-state and tetrahedral QKD with noisy preprocessing and
//! repetition-block preprocessing, their thresholds and the optimal preprocessing noise.
//!
//! A channel with bit error rate `δ` is modeled by the Bell-diagonal state fixed by the
//! protocol; Eve holds its purification. Alice flips each raw key bit with probability `q`,
//! then announces the `m - 1` amplitude syndromes `S_i = Z_1 ⊕ Z_i` of a repetition block and
//! keeps `Z̄ = Z_1`. The rate per signal is `(1/m)[H(Z̄|E,S) - H(Z̄|B,S)]`.
//!
//! Conditional on Eve's amplitude-error pattern, her state per pair is
//! `ρ^(j) = (1-q)|φ_j(0)⟩⟨φ_j(0)| + q|φ_j(1)⟩⟨φ_j(1)|` with
//! `|φ_j(b)⟩ = Σ_k √(p_jk/p_j) (-1)^{kb} |k⟩`. Permutation symmetry within each error class
//! reduces the `2^m`-dimensional entropies to blocks indexed by pairs of total spins.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::distill::BellDiagonalParams;
use crate::math::{log2, powi, sqrt};
use crate::qstate::{cr, eigvalsh, CMat, DensityMatrix, StateVector, SystemLabel};
use crate::{binary_entropy, Error, Result};

/// The three prepare-and-measure protocols.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Protocol {
    Bb84,
    SixState,
    Tetrahedral,
}

impl Protocol {
    pub const ALL: [Protocol; 3] = [Protocol::Bb84, Protocol::SixState, Protocol::Tetrahedral];

    /// Lowercase identifier: `bb84`, `sixstate` or `tetrahedral`.
    pub fn name(&self) -> &'static str {
        match self {
            Protocol::Bb84 => "bb84",
            Protocol::SixState => "sixstate",
            Protocol::Tetrahedral => "tetrahedral",
        }
    }

    /// Parses the identifiers of [`Protocol::name`], ignoring case, `-` and `_`.
    pub fn parse(s: &str) -> Result<Self> {
        let key: alloc::string::String = s
            .chars()
            .filter(|c| *c != '-' && *c != '_')
            .flat_map(char::to_lowercase)
            .collect();
        match key.as_str() {
            "bb84" => Ok(Protocol::Bb84),
            "sixstate" | "6state" => Ok(Protocol::SixState),
            "tetrahedral" | "tetra" => Ok(Protocol::Tetrahedral),
            _ => Err(Error::InvalidInput(format!("unknown protocol {s:?}"))),
        }
    }
}

/// Largest repetition block accepted by [`rate`].
pub const DEFAULT_MAX_BLOCK: usize = 12;
/// Largest repetition block accepted by [`oracle_rate_smallm`].
pub const ORACLE_MAX_BLOCK: usize = 4;
/// Upper end of the threshold bracket.
pub const BRACKET_HI: f64 = 0.25;
/// Default bisection tolerance for thresholds.
pub const THRESHOLD_TOL: f64 = 1e-5;
/// Golden-section tolerance on `q`.
pub const Q_TOL: f64 = 1e-4;
/// Rates within this of each other are ties in the preprocessing optimizer.
pub const RATE_TIE: f64 = 1e-9;
/// Rates at or below this count as zero; `q = 1/2` gives an exact zero up to roundoff.
pub const MIN_POSITIVE_RATE: f64 = 1e-12;
/// Grid points seeding the preprocessing optimizer.
pub const Q_GRID: usize = 21;

/// Protocol, preprocessing flip probability `q ∈ [0, 1/2]` and block length `m ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KeyRateModel {
    pub protocol: Protocol,
    pub q: f64,
    pub m: usize,
}

impl KeyRateModel {
    pub fn new(protocol: Protocol, q: f64, m: usize) -> Result<Self> {
        if !(0.0..=0.5).contains(&q) {
            return Err(Error::InvalidInput(format!(
                "flip probability {q} outside [0, 1/2]"
            )));
        }
        if m == 0 {
            return Err(Error::InvalidInput(
                "block length must be at least 1".into(),
            ));
        }
        Ok(Self { protocol, q, m })
    }

    /// The plain protocol: no flips, no blocks.
    pub fn plain(protocol: Protocol) -> Self {
        Self {
            protocol,
            q: 0.0,
            m: 1,
        }
    }

    fn with_q(&self, q: f64) -> Self {
        Self { q, ..*self }
    }
}

/// Bell-diagonal channel state of `protocol` at bit error rate `δ ∈ [0, 1/2)`.
pub fn bell_params(protocol: Protocol, delta: f64) -> Result<BellDiagonalParams> {
    if !(0.0..0.5).contains(&delta) {
        return Err(Error::InvalidInput(format!(
            "bit error rate {delta} outside [0, 1/2)"
        )));
    }
    let d = delta;
    let p = match protocol {
        Protocol::Bb84 => [(1.0 - d) * (1.0 - d), d * (1.0 - d), d * (1.0 - d), d * d],
        Protocol::SixState => [1.0 - 1.5 * d, d / 2.0, d / 2.0, d / 2.0],
        Protocol::Tetrahedral => [1.0 - 5.0 * d / 3.0, 2.0 * d / 3.0, d / 3.0, 2.0 * d / 3.0],
    };
    BellDiagonalParams::new(p[0], p[1], p[2], p[3])
}

/// Unnormalized entropy `Σ -x log₂ x` over positive `x`, without a cutoff.
fn spectral_entropy(vals: impl IntoIterator<Item = f64>) -> f64 {
    vals.into_iter()
        .filter(|&x| x > 0.0)
        .map(|x| -x * log2(x))
        .sum()
}

/// Closed-form rate for `q = 0`, `m = 1`.
pub fn closed_form_rate(protocol: Protocol, delta: f64) -> Result<f64> {
    bell_params(protocol, delta)?;
    let d = delta;
    let h = binary_entropy;
    Ok(match protocol {
        Protocol::Bb84 => 1.0 - 2.0 * h(d),
        Protocol::SixState => 1.0 - h(d) - (1.0 - d) * h(d / (2.0 * (1.0 - d))) - d,
        Protocol::Tetrahedral => {
            1.0 - h(d) - d * h(1.0 / 3.0) - (1.0 - d) * h(2.0 * d / (3.0 * (1.0 - d)))
        }
    })
}

/// Key bits per signal for `model` at bit error rate `δ`, with blocks up to
/// [`DEFAULT_MAX_BLOCK`].
pub fn rate(model: &KeyRateModel, delta: f64) -> Result<f64> {
    rate_capped(model, delta, DEFAULT_MAX_BLOCK)
}

/// [`rate`] with an explicit block-length cap.
///
/// `q = 0, m = 1` uses the closed forms, `q > 0, m = 1` the explicit four-system state and
/// `m > 1` the sector decomposition.
pub fn rate_capped(model: &KeyRateModel, delta: f64, max_block: usize) -> Result<f64> {
    let model = KeyRateModel::new(model.protocol, model.q, model.m)?;
    if model.m > max_block {
        return Err(Error::Capability(format!(
            "block length {} exceeds the cap {max_block}",
            model.m
        )));
    }
    match (model.m, model.q == 0.0) {
        (1, true) => closed_form_rate(model.protocol, delta),
        (1, false) => explicit_rate_single(&model, delta),
        _ => sector_rate(&model, delta),
    }
}

/// One signal pair `A_K A' B E` after Alice's flip: `CNOT_{A'→A_K}` applied to
/// `Σ_jk √p_jk |β_jk⟩^{A_K B} |jk⟩^E ⊗ (√(1-q)|0⟩ + √q|1⟩)^{A'}`.
///
/// Entry `[a][f][b][e]` with `e = 2j + k`.
fn signal_amplitudes(p: &BellDiagonalParams, q: f64) -> [[[[f64; 4]; 2]; 2]; 2] {
    let probs = p.as_array();
    let anc = [sqrt(1.0 - q), sqrt(q)];
    let mut t = [[[[0.0; 4]; 2]; 2]; 2];
    for (e, &pjk) in probs.iter().enumerate() {
        let (j, k) = (e >> 1, e & 1);
        // β_jk(a0, b) = (-1)^{k b} [a0 ⊕ j = b] / √2.
        for a0 in 0..2 {
            let b = a0 ^ j;
            let sign = if k * b == 1 { -1.0 } else { 1.0 };
            for f in 0..2 {
                t[a0 ^ f][f][b][e] += sqrt(pjk) * anc[f] * sign * core::f64::consts::FRAC_1_SQRT_2;
            }
        }
    }
    t
}

/// Signal state of [`signal_amplitudes`] on factors `A_K, A', B, E`.
pub fn signal_state(model: &KeyRateModel, delta: f64) -> Result<StateVector> {
    let t = signal_amplitudes(&bell_params(model.protocol, delta)?, model.q);
    let flat: Vec<f64> = t.iter().flatten().flatten().flatten().copied().collect();
    let labels = vec![
        SystemLabel::qubit("A_K"),
        SystemLabel::qubit("A'"),
        SystemLabel::qubit("B"),
        SystemLabel::new("E", 4)?,
    ];
    StateVector::from_real(labels, &flat)
}

/// `H(Z^{A_K}|E) - H(Z^{A_K}|B)` evaluated on the explicit signal state.
fn explicit_rate_single(model: &KeyRateModel, delta: f64) -> Result<f64> {
    let psi = signal_state(model, delta)?;
    let z = crate::qstate::computational_basis(2);
    let dephased =
        |keep: &[&str]| -> Result<DensityMatrix> { psi.marginal(keep)?.dephase("A_K", &z) };
    let h_e = dephased(&["A_K", "E"])?.cond_entropy(&["A_K"], &["E"])?;
    let h_b = dephased(&["A_K", "B"])?.cond_entropy(&["A_K"], &["B"])?;
    Ok(h_e - h_b)
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `H(Z̄|B,S)`: Bob knows `Z̄` up to a global flip of the error pattern `e` of weight `w`.
fn bob_entropy(delta_eff: f64, m: usize) -> f64 {
    let mut total = 0.0;
    for w in 0..=m {
        let a = powi(delta_eff, w as i32) * powi(1.0 - delta_eff, (m - w) as i32);
        let b = powi(delta_eff, (m - w) as i32) * powi(1.0 - delta_eff, w as i32);
        if a > 0.0 {
            total += binomial(m, w) * a * binary_entropy(a / (a + b));
        }
    }
    total
}

/// Eve's state `ρ^(j)` for key bit 0 in error class `j`, or `None` if `p_j = 0`.
fn eve_letter(p: &BellDiagonalParams, j: usize, q: f64) -> Option<[[f64; 2]; 2]> {
    let ps = p.as_array();
    let pj = ps[2 * j] + ps[2 * j + 1];
    if pj <= 0.0 {
        return None;
    }
    let (u, v) = (ps[2 * j] / pj, ps[2 * j + 1] / pj);
    let off = (1.0 - 2.0 * q) * sqrt(u * v);
    Some([[u, off], [off, v]])
}

/// Coefficients `c[d]` of `(a x + b y)^n`, `c[d]` multiplying `x^{n-d} y^d`.
fn binomial_poly(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..=n)
        .map(|d| binomial(n, d) * powi(a, (n - d) as i32) * powi(b, d as i32))
        .collect()
}

/// Matrix of `A^{⊗n}` restricted to the symmetric subspace, in the Dicke basis.
pub fn symmetric_power(a: &[[f64; 2]; 2], n: usize) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(n + 1, n + 1);
    for l in 0..=n {
        // Columns: image of the unnormalized symmetric tensor with l ones.
        let p0 = binomial_poly(a[0][0], a[1][0], n - l);
        let p1 = binomial_poly(a[0][1], a[1][1], l);
        for (i, c0) in p0.iter().enumerate() {
            for (k, c1) in p1.iter().enumerate() {
                out[(i + k, l)] += c0 * c1;
            }
        }
        for k in 0..=n {
            out[(k, l)] *= sqrt(binomial(n, l) / binomial(n, k));
        }
    }
    out
}

/// `(2J, multiplicity)` of each total spin `J` in `r` qubits.
fn spin_sectors(r: usize) -> Vec<(usize, f64)> {
    (0..=r / 2)
        .map(|t| {
            (
                r - 2 * t,
                binomial(r, t) - if t == 0 { 0.0 } else { binomial(r, t - 1) },
            )
        })
        .collect()
}

/// Irrep image of a 2×2 matrix on spin `n/2` inside `r` qubits: `det^{(r-n)/2} Sym^n`.
fn irrep(a: &[[f64; 2]; 2], r: usize, n: usize) -> DMatrix<f64> {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    symmetric_power(a, n) * powi(det, ((r - n) / 2) as i32)
}

/// `S(½(ρ + ZρZ))` for `ρ = ρ0^{⊗r} ⊗ ρ1^{⊗w}` and `Z = Z^{⊗(r+w)}`.
///
/// Both tensor powers decompose into spin blocks with multiplicities; `Z^{⊗n}` is diagonal
/// with signs `(-1)^k` in each Dicke basis, so the twirl keeps entries of even total parity.
fn parity_twirled_entropy(rho0: &[[f64; 2]; 2], r: usize, rho1: &[[f64; 2]; 2], w: usize) -> f64 {
    let mut total = 0.0;
    for (n1, mult1) in spin_sectors(r) {
        let b1 = irrep(rho0, r, n1);
        for (n2, mult2) in spin_sectors(w) {
            let b2 = irrep(rho1, w, n2);
            let big = b1.kronecker(&b2);
            let parity = |i: usize| (i / (n2 + 1) + i % (n2 + 1)) % 2;
            for par in 0..2 {
                let idx: Vec<usize> = (0..big.nrows()).filter(|&i| parity(i) == par).collect();
                if idx.is_empty() {
                    continue;
                }
                let block = big.select_rows(&idx).select_columns(&idx);
                let vals = nalgebra::SymmetricEigen::new(block).eigenvalues;
                total += mult1 * mult2 * spectral_entropy(vals.iter().copied());
            }
        }
    }
    total
}

fn letter_entropy(a: &[[f64; 2]; 2]) -> f64 {
    let m = DMatrix::from_row_slice(2, 2, &[a[0][0], a[0][1], a[1][0], a[1][1]]);
    spectral_entropy(nalgebra::SymmetricEigen::new(m).eigenvalues.iter().copied())
}

/// `H(Z̄|E,S)` summed over Eve's amplitude-error weight `w`.
fn eve_entropy(p: &BellDiagonalParams, q: f64, m: usize) -> f64 {
    let delta = p.p10 + p.p11;
    let rho = [eve_letter(p, 0, q), eve_letter(p, 1, q)];
    let mut total = 0.0;
    for w in 0..=m {
        let weight = binomial(m, w) * powi(delta, w as i32) * powi(1.0 - delta, (m - w) as i32);
        if weight <= 0.0 {
            continue;
        }
        let zero = [[1.0, 0.0], [0.0, 0.0]];
        let r0 = rho[0].unwrap_or(zero);
        let r1 = rho[1].unwrap_or(zero);
        let h = 1.0 + (m - w) as f64 * letter_entropy(&r0) + w as f64 * letter_entropy(&r1)
            - parity_twirled_entropy(&r0, m - w, &r1, w);
        total += weight * h;
    }
    total
}

/// `(1/m)[H(Z̄|E,S) - H(Z̄|B,S)]` via the sector decomposition; valid for every `m ≥ 1`.
pub fn sector_rate(model: &KeyRateModel, delta: f64) -> Result<f64> {
    let p = bell_params(model.protocol, delta)?;
    let m = model.m;
    let q = model.q;
    let delta_eff = delta * (1.0 - q) + q * (1.0 - delta);
    Ok((eve_entropy(&p, q, m) - bob_entropy(delta_eff, m)) / m as f64)
}

/// Brute-force rate for `m ≤ 4` from the purified state of `m` signal pairs.
///
/// For every key string `c` the unnormalized conditional states of `E^m` and `B^m` are formed
/// from explicit amplitudes; `H(Z̄|X,S) = Σ_c S(σ_c^X) - Σ_s S(σ_{0,s}^X + σ_{1,s}^X)`.
pub fn oracle_rate_smallm(model: &KeyRateModel, delta: f64) -> Result<f64> {
    let model = KeyRateModel::new(model.protocol, model.q, model.m)?;
    let m = model.m;
    if m > ORACLE_MAX_BLOCK {
        return Err(Error::Capability(format!(
            "oracle limited to m ≤ {ORACLE_MAX_BLOCK}, got {m}"
        )));
    }
    let t = signal_amplitudes(&bell_params(model.protocol, delta)?, model.q);
    let (de, db, df) = (1usize << (2 * m), 1usize << m, 1usize << m);
    let digit = |v: usize, i: usize, base: usize| (v / base.pow((m - 1 - i) as u32)) % base;
    let mut sig_e = Vec::with_capacity(1 << m);
    let mut sig_b = Vec::with_capacity(1 << m);
    for c in 0..(1usize << m) {
        // Rows: E^m; columns: (A'^m, B^m).
        let amp = CMat::from_fn(de, df * db, |e, col| {
            let (f, b) = (col / db, col % db);
            let mut x = 1.0;
            for i in 0..m {
                x *= t[digit(c, i, 2)][digit(f, i, 2)][digit(b, i, 2)][digit(e, i, 4)];
            }
            cr(x)
        });
        sig_e.push(&amp * amp.adjoint());
        let mut sb = CMat::zeros(db, db);
        for f in 0..df {
            let cols = amp.columns(f * db, db);
            sb += cols.transpose() * cols.map(|x| x.conj());
        }
        sig_b.push(sb);
    }
    let cond = |sig: &[CMat]| -> f64 {
        let joint: f64 = sig.iter().map(|s| spectral_entropy(eigvalsh(s))).sum();
        // Key strings with first bit 0 and syndrome s pair with their complement.
        let half = 1usize << (m - 1);
        let marg: f64 = (0..half)
            .map(|c| spectral_entropy(eigvalsh(&(&sig[c] + &sig[c ^ ((1 << m) - 1)]))))
            .sum();
        joint - marg
    };
    Ok((cond(&sig_e) - cond(&sig_b)) / m as f64)
}

/// Outcome of a threshold search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdResult {
    pub delta_star: f64,
    pub q_used: f64,
    pub m_used: usize,
    pub solver_evals: usize,
    /// Final bracket `(lo, hi)` with a positive rate at `lo` and none at `hi`.
    pub bracket: (f64, f64),
}

/// Bisection on `[0, BRACKET_HI]` for the largest `δ` with `positive(δ)`.
fn bisect(mut positive: impl FnMut(f64) -> Result<bool>, tol: f64) -> Result<((f64, f64), usize)> {
    let (mut lo, mut hi) = (0.0, BRACKET_HI);
    let mut evals = 2;
    if !positive(lo)? {
        return Err(Error::Solver("rate is not positive at δ = 0".into()));
    }
    if positive(hi)? {
        return Err(Error::Solver(format!(
            "rate is still positive at δ = {BRACKET_HI}"
        )));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        evals += 1;
        if positive(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(((lo, hi), evals))
}

/// Threshold of `model` at its fixed `q` and `m`.
pub fn threshold(model: &KeyRateModel, tol: f64) -> Result<ThresholdResult> {
    let ((lo, hi), evals) = bisect(|d| Ok(rate(model, d)? > MIN_POSITIVE_RATE), tol)?;
    Ok(ThresholdResult {
        delta_star: 0.5 * (lo + hi),
        q_used: model.q,
        m_used: model.m,
        solver_evals: evals,
        bracket: (lo, hi),
    })
}

/// Best preprocessing at one error rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PreprocessingOptimum {
    pub q_star: f64,
    pub rate_star: f64,
    pub evals: usize,
}

/// Maximizes `rate` over `q ∈ [0, 1/2]` at fixed `δ` and `m`: a grid scan of [`Q_GRID`]
/// points, then golden-section search to [`Q_TOL`] on the cells adjacent to the best point.
/// Rates within [`RATE_TIE`] are ties, resolved toward smaller `q`.
pub fn optimize_preprocessing(model: &KeyRateModel, delta: f64) -> Result<PreprocessingOptimum> {
    let mut evals = 0;
    let mut f = |q: f64| -> Result<f64> {
        evals += 1;
        rate(&model.with_q(q), delta)
    };
    let step = 0.5 / (Q_GRID - 1) as f64;
    let mut best = (0.0, f(0.0)?);
    let consider = |best: &mut (f64, f64), q: f64, r: f64| {
        if r > best.1 + RATE_TIE || (r >= best.1 - RATE_TIE && q < best.0) {
            *best = (q, r);
        }
    };
    for i in 1..Q_GRID {
        let q = i as f64 * step;
        let r = f(q)?;
        consider(&mut best, q, r);
    }
    let (mut a, mut b) = ((best.0 - step).max(0.0), (best.0 + step).min(0.5));
    let phi = 0.5 * (sqrt(5.0) - 1.0);
    let mut x1 = b - phi * (b - a);
    let mut x2 = a + phi * (b - a);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    while b - a > Q_TOL {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = f(x2)?;
        }
    }
    for (q, r) in [(x1, f1), (x2, f2)] {
        consider(&mut best, q, r);
    }
    Ok(PreprocessingOptimum {
        q_star: best.0,
        rate_star: best.1,
        evals,
    })
}

/// Threshold of `max_q rate(q, δ)` for the protocol and block length of `model`; `q_used` is
/// the optimal `q` at the lower bracket end.
pub fn optimized_threshold(model: &KeyRateModel, tol: f64) -> Result<ThresholdResult> {
    let mut inner = 0;
    let mut q_at_lo = 0.0;
    let ((lo, hi), _) = bisect(
        |d| {
            let o = optimize_preprocessing(model, d)?;
            inner += o.evals;
            let pos = o.rate_star > MIN_POSITIVE_RATE;
            if pos {
                q_at_lo = o.q_star;
            }
            Ok(pos)
        },
        tol,
    )?;
    Ok(ThresholdResult {
        delta_star: 0.5 * (lo + hi),
        q_used: q_at_lo,
        m_used: model.m,
        solver_evals: inner,
        bracket: (lo, hi),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_param_examples() {
        let p = bell_params(Protocol::Bb84, 0.0).unwrap();
        assert_eq!(p.as_array(), [1.0, 0.0, 0.0, 0.0]);
        let t = bell_params(Protocol::Tetrahedral, 0.12).unwrap();
        assert!(
            (t.p01 - 0.08).abs() < 1e-15
                && (t.p11 - 0.08).abs() < 1e-15
                && (t.p10 - 0.04).abs() < 1e-15
        );
        assert_eq!(t.p01, 2.0 * t.p10);
        let s = bell_params(Protocol::SixState, 0.1).unwrap().as_array();
        for (x, y) in s.iter().zip([0.85, 0.05, 0.05, 0.05]) {
            assert!((x - y).abs() < 1e-15);
        }
        assert!(bell_params(Protocol::Bb84, 0.5).is_err());
        assert!(bell_params(Protocol::Bb84, -0.1).is_err());
    }

    #[test]
    fn protocol_names_round_trip() {
        for p in Protocol::ALL {
            assert_eq!(Protocol::parse(p.name()).unwrap(), p);
        }
        assert_eq!(Protocol::parse("Six-State").unwrap(), Protocol::SixState);
        assert!(Protocol::parse("b92").is_err());
    }

    #[test]
    fn bb84_closed_form_value() {
        // 1 - 2 h₂(0.05) with h₂(0.05) = 0.286396957115956.
        let r = rate(&KeyRateModel::plain(Protocol::Bb84), 0.05).unwrap();
        assert!((r - 0.427_206_085_768_087_55).abs() < 1e-12);
    }

    #[test]
    fn noiseless_rate_is_one() {
        for p in Protocol::ALL {
            for (q, m) in [(0.0, 1), (0.0, 3), (0.2, 1), (0.2, 3)] {
                let model = KeyRateModel::new(p, q, m).unwrap();
                let r = rate(&model, 0.0).unwrap();
                // Eve learns nothing, so only Bob's flip-induced uncertainty is paid, once per block.
                let expect = (1.0 - bob_entropy(q, m)) / m as f64;
                assert!((r - expect).abs() < 1e-10, "{p:?} q={q} m={m}: {r}");
            }
        }
    }

    #[test]
    fn sector_matches_closed_forms_and_explicit_state() {
        for p in Protocol::ALL {
            for d in [0.01, 0.05, 0.1, 0.13] {
                let plain = KeyRateModel::plain(p);
                assert!(
                    (sector_rate(&plain, d).unwrap() - closed_form_rate(p, d).unwrap()).abs()
                        < 1e-12
                );
                let noisy = KeyRateModel::new(p, 0.17, 1).unwrap();
                let a = sector_rate(&noisy, d).unwrap();
                let b = explicit_rate_single(&noisy, d).unwrap();
                assert!((a - b).abs() < 1e-10, "{p:?} δ={d}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn symmetric_power_matches_tensor_power() {
        let a = [[0.7, 0.2], [0.2, 0.3]];
        let n = 3;
        let s = symmetric_power(&a, n);
        // Dicke states |D_k⟩ as explicit vectors in (C²)^{⊗3}.
        let dicke = |k: usize| {
            let norm = 1.0 / sqrt(binomial(n, k));
            DMatrix::from_fn(8, 1, |i, _| {
                if (i as u32).count_ones() as usize == k {
                    norm
                } else {
                    0.0
                }
            })
        };
        let m = DMatrix::from_row_slice(2, 2, &[a[0][0], a[0][1], a[1][0], a[1][1]]);
        let full = m.kronecker(&m).kronecker(&m);
        for k in 0..=n {
            for l in 0..=n {
                let v = (dicke(k).transpose() * &full * dicke(l))[(0, 0)];
                assert!((v - s[(k, l)]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn twirled_entropy_matches_dense_computation() {
        let r0 = [[0.8, 0.3], [0.3, 0.2]];
        let r1 = [[0.4, -0.1], [-0.1, 0.6]];
        for (r, w) in [(2, 1), (3, 2), (0, 4), (5, 0)] {
            let m0 = DMatrix::from_row_slice(2, 2, &[r0[0][0], r0[0][1], r0[1][0], r0[1][1]]);
            let m1 = DMatrix::from_row_slice(2, 2, &[r1[0][0], r1[0][1], r1[1][0], r1[1][1]]);
            let mut rho = DMatrix::from_element(1, 1, 1.0);
            for _ in 0..r {
                rho = rho.kronecker(&m0);
            }
            for _ in 0..w {
                rho = rho.kronecker(&m1);
            }
            let d = rho.nrows();
            let twirl = DMatrix::from_fn(d, d, |i, j| {
                if (i as u32).count_ones() % 2 == (j as u32).count_ones() % 2 {
                    rho[(i, j)]
                } else {
                    0.0
                }
            });
            let dense = spectral_entropy(
                nalgebra::SymmetricEigen::new(twirl)
                    .eigenvalues
                    .iter()
                    .copied(),
            );
            let fast = parity_twirled_entropy(&r0, r, &r1, w);
            assert!(
                (dense - fast).abs() < 1e-12,
                "r={r} w={w}: {dense} vs {fast}"
            );
        }
    }

    #[test]
    fn oracle_agrees_with_sector_rate() {
        for (p, q, m, d) in [
            (Protocol::Bb84, 0.0, 1, 0.07),
            (Protocol::Bb84, 0.0, 2, 0.1),
            (Protocol::SixState, 0.2, 3, 0.1),
            (Protocol::Tetrahedral, 0.1, 2, 0.12),
        ] {
            let model = KeyRateModel::new(p, q, m).unwrap();
            let a = oracle_rate_smallm(&model, d).unwrap();
            let b = rate(&model, d).unwrap();
            assert!((a - b).abs() < 1e-8, "{p:?} q={q} m={m}: {a} vs {b}");
        }
    }

    #[test]
    fn caps() {
        let big = KeyRateModel::new(Protocol::Bb84, 0.0, 13).unwrap();
        assert!(matches!(rate(&big, 0.1), Err(Error::Capability(_))));
        let five = KeyRateModel::new(Protocol::Bb84, 0.0, 5).unwrap();
        assert!(matches!(
            oracle_rate_smallm(&five, 0.1),
            Err(Error::Capability(_))
        ));
        assert!(KeyRateModel::new(Protocol::Bb84, 0.6, 1).is_err());
        assert!(KeyRateModel::new(Protocol::Bb84, 0.1, 0).is_err());
    }

    #[test]
    fn plain_thresholds() {
        for (p, expect, tol) in [
            (Protocol::Bb84, 0.11003, 1e-4),
            (Protocol::Tetrahedral, 0.1156, 2e-4),
            (Protocol::SixState, 0.126, 5e-4),
        ] {
            let t = threshold(&KeyRateModel::plain(p), THRESHOLD_TOL).unwrap();
            assert!((t.delta_star - expect).abs() < tol, "{p:?}: {t:?}");
            assert!(rate(&KeyRateModel::plain(p), t.bracket.0).unwrap() > 0.0);
            assert!(rate(&KeyRateModel::plain(p), t.bracket.1).unwrap() <= 0.0);
        }
    }

    #[test]
    fn threshold_without_positive_rate_is_a_solver_error() {
        let useless = KeyRateModel::new(Protocol::Bb84, 0.5, 1).unwrap();
        assert!(matches!(threshold(&useless, 1e-5), Err(Error::Solver(_))));
    }

    #[test]
    fn noiseless_optimum_uses_no_flips() {
        let o = optimize_preprocessing(&KeyRateModel::plain(Protocol::Bb84), 0.0).unwrap();
        assert_eq!(o.q_star, 0.0);
        assert!((o.rate_star - 1.0).abs() < 1e-12);
    }
}
