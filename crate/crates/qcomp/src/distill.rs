//! Hashing-bound entanglement distillation, information reconciliation, privacy
//! amplification, their duality, state-merging rates and a hash-based channel code.
//!
//! Bell-diagonal distillation is simulated classically: an i.i.d. Pauli error string acts on
//! Alice's halves of `n` EPR pairs and the protocol only ever sees its CSS syndromes. Hash
//! outputs and bit strings are stored as `u64` masks with entry `i` in bit `i`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::gf2::{sample_css_hash_with, seeded_rng, F2Mat, F2Vec};
use crate::math::sqrt;
use crate::pauli::{log_likelihood, log_table, Best, Coset, DEFAULT_N_MAX};
use crate::qstate::{
    cr, eye, kron, p_secure_blocks, psd_inv_sqrt, purify, trace_product, CMat, DensityMatrix,
    StateVector, SystemLabel, CQ_TOL, MAX_DIM, PINV_CUTOFF,
};
use crate::recovery::bell_state;
use crate::{Error, Result};

/// Probabilities of the four Bell states `|β_jk⟩ = (X^j Z^k ⊗ I)|Φ⟩`, `j` the X power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BellDiagonalParams {
    pub p00: f64,
    pub p01: f64,
    pub p10: f64,
    pub p11: f64,
}

impl BellDiagonalParams {
    /// Validates nonnegativity and normalization within 1e-12.
    pub fn new(p00: f64, p01: f64, p10: f64, p11: f64) -> Result<Self> {
        let ps = [p00, p01, p10, p11];
        if ps.iter().any(|p| !p.is_finite() || *p < 0.0)
            || crate::math::abs(ps.iter().sum::<f64>() - 1.0) > 1e-12
        {
            return Err(Error::InvalidInput(format!(
                "not a probability vector: {ps:?}"
            )));
        }
        Ok(Self { p00, p01, p10, p11 })
    }

    /// Probabilities indexed by `2j + k`.
    pub fn as_array(&self) -> [f64; 4] {
        [self.p00, self.p01, self.p10, self.p11]
    }

    /// The state `Σ p_jk β_jk` on qubits named `a` and `b`.
    pub fn state(&self, a: &str, b: &str) -> Result<DensityMatrix> {
        let mut m = CMat::zeros(4, 4);
        for (i, p) in self.as_array().into_iter().enumerate() {
            let v = bell_state(i / 2, i % 2);
            m += &v * v.adjoint() * cr(p);
        }
        DensityMatrix::new(vec![SystemLabel::new(a, 2)?, SystemLabel::new(b, 2)?], m)
    }
}

/// Generator for Monte-Carlo trial `trial`: stream `trial` of the ChaCha8 key derived from `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn two_factors(rho: &DensityMatrix) -> Result<(&str, &str)> {
    match rho.names()[..] {
        [a, b] => Ok((a, b)),
        _ => Err(Error::InvalidInput(format!(
            "expected a bipartite state, got factors {:?}",
            rho.names()
        ))),
    }
}

/// `-H(A|B)` for a bipartite state, `A` its first factor.
pub fn hashing_rate(rho: &DensityMatrix) -> Result<f64> {
    let (a, b) = two_factors(rho)?;
    Ok(-rho.cond_entropy(&[a], &[b])?)
}

/// Outcome of [`simulate_distillation`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistillationRun {
    pub n: usize,
    pub n_z: usize,
    pub n_x: usize,
    pub trials: u64,
    pub seed: u64,
    pub failures: u64,
    pub logical_error_rate: f64,
    /// `(n - n_Z - n_X) / n`.
    pub rate: f64,
}

/// Samples one Pauli error `(x, z)` with per-qubit law `p`.
pub fn sample_pauli_error<R: Rng + ?Sized>(
    p: &BellDiagonalParams,
    n: usize,
    rng: &mut R,
) -> (u64, u64) {
    let (mut x, mut z) = (0u64, 0u64);
    for i in 0..n {
        let u: f64 = rng.random();
        let cls = if u < p.p00 {
            0
        } else if u < p.p00 + p.p01 {
            1
        } else if u < p.p00 + p.p01 + p.p10 {
            2
        } else {
            3
        };
        x |= ((cls >> 1) as u64) << i;
        z |= ((cls & 1) as u64) << i;
    }
    (x, z)
}

/// Highest-scoring element of `{v : h·v = s}` (a `None` score is probability zero), ties
/// toward the lexicographically smallest mask.
fn ml_in_coset(h: &F2Mat, s: &F2Vec, score: impl Fn(u64) -> Option<f64>) -> Result<Option<u64>> {
    let Some(coset) = Coset::of(h, s)? else {
        return Ok(None);
    };
    let mut best = Best::new();
    coset.for_each(|v| best.offer(score(v), v, 0));
    Ok(best.found().then_some(best.x))
}

/// Per-position argmax of a separable score given by `(weight of 0, weight of 1)` per entry.
fn ml_unconstrained(
    n: usize,
    mut logp: impl FnMut(usize) -> (Option<f64>, Option<f64>),
) -> Option<u64> {
    let mut v = 0u64;
    for i in 0..n {
        match logp(i) {
            (None, None) => return None,
            (Some(a), Some(b)) if b > a => v |= 1 << i,
            (None, Some(_)) => v |= 1 << i,
            _ => {}
        }
    }
    Some(v)
}

/// Decodes `(sZ, sX)` in two stages: the amplitude error maximizes the marginal likelihood
/// `Π p(x_i)`, then the phase error maximizes `Π p(z_i | x̂_i)` given the decoded amplitude.
pub fn decode_conditional(
    h_z: &F2Mat,
    h_x: &F2Mat,
    s_z: &F2Vec,
    s_x: &F2Vec,
    p: &BellDiagonalParams,
) -> Result<Option<(u64, u64)>> {
    let n = h_z.n_cols();
    let table = log_table(p);
    let marginal = log_table(&BellDiagonalParams {
        p00: p.p00 + p.p01,
        p01: 0.0,
        p10: p.p10 + p.p11,
        p11: 0.0,
    });
    let x_hat = if h_z.n_rows() == 0 {
        ml_unconstrained(n, |_| (marginal[0], marginal[2]))
    } else {
        ml_in_coset(h_z, s_z, |x| log_likelihood(x, 0, n, &marginal))?
    };
    let Some(x_hat) = x_hat else { return Ok(None) };
    let z_hat = if h_x.n_rows() == 0 {
        ml_unconstrained(n, |i| {
            let j = 2 * ((x_hat >> i) & 1) as usize;
            (table[j], table[j + 1])
        })
    } else {
        ml_in_coset(h_x, s_x, |z| log_likelihood(x_hat, z, n, &table))?
    };
    Ok(z_hat.map(|z| (x_hat, z)))
}

/// Monte-Carlo estimate of the logical failure rate of one-way hashing distillation.
///
/// Each trial draws a fresh CSS hash with `n_Z` Z-type and `n_X` X-type checks and an error
/// string from `p`, then decodes with [`decode_conditional`]. A trial fails when the residual
/// error lies outside the stabilizer group, so degenerate corrections count as successes.
pub fn simulate_distillation(
    p: &BellDiagonalParams,
    n: usize,
    n_z: usize,
    n_x: usize,
    trials: u64,
    seed: u64,
) -> Result<DistillationRun> {
    if n > DEFAULT_N_MAX {
        return Err(Error::Capability(format!(
            "ML decoding limited to n ≤ {DEFAULT_N_MAX}, got {n}"
        )));
    }
    if n == 0 || n_z + n_x >= n {
        return Err(Error::InvalidInput(format!(
            "need n_Z + n_X < n, got {n_z} + {n_x} with n = {n}"
        )));
    }
    let mut failures = 0;
    for t in 0..trials {
        let mut rng = trial_rng(seed, t);
        let (h_z, h_x) = sample_css_hash_with(n, n_z, n_x, &mut rng)?;
        let (x, z) = sample_pauli_error(p, n, &mut rng);
        let s_z = h_z.mul_vec(&F2Vec::from_mask(x, n))?;
        let s_x = h_x.mul_vec(&F2Vec::from_mask(z, n))?;
        let ok = match decode_conditional(&h_z, &h_x, &s_z, &s_x, p)? {
            Some((xh, zh)) => {
                h_x.row_space_contains(&F2Vec::from_mask(x ^ xh, n))
                    && h_z.row_space_contains(&F2Vec::from_mask(z ^ zh, n))
            }
            None => false,
        };
        if !ok {
            failures += 1;
        }
    }
    Ok(DistillationRun {
        n,
        n_z,
        n_x,
        trials,
        seed,
        failures,
        logical_error_rate: if trials == 0 {
            0.0
        } else {
            failures as f64 / trials as f64
        },
        rate: (n - n_z - n_x) as f64 / n as f64,
    })
}

/// State-merging resources of a bipartite state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MergingRates {
    /// `H(A|B)`: quantum communication cost, negative when entanglement is gained.
    pub q_cost: f64,
    /// `I(A:E)` on a purification: classical communication cost.
    pub c_cost: f64,
    /// `-H(A|B)`: one-way distillation rate.
    pub distill_rate: f64,
}

/// Reference factor name used when purifying in [`merging_rates`].
pub const MERGING_REFERENCE: &str = "E";

/// Merging costs for a bipartite state, `A` its first factor.
pub fn merging_rates(rho: &DensityMatrix) -> Result<MergingRates> {
    let (a, b) = two_factors(rho)?;
    let h = rho.cond_entropy(&[a], &[b])?;
    let psi = purify(rho, MERGING_REFERENCE)?;
    Ok(MergingRates {
        q_cost: h,
        c_cost: mutual_info_pure(&psi, a, MERGING_REFERENCE)?,
        distill_rate: -h,
    })
}

/// `I(A:E) = H(A) + H(E) - H(AE)` on a pure state.
pub fn mutual_info_pure(psi: &StateVector, a: &str, e: &str) -> Result<f64> {
    Ok(psi.entropy_of(&[a])? + psi.entropy_of(&[e])? - psi.entropy_of(&[a, e])?)
}

/// Samples `count` linearly independent rows of length `n` in order; any prefix of the result
/// is the matrix that a smaller `count` would have produced from the same generator state.
pub fn sample_nested_hash<R: Rng + ?Sized>(n: usize, count: usize, rng: &mut R) -> Result<F2Mat> {
    if count > n {
        return Err(Error::InvalidInput(format!(
            "{count} independent rows do not fit in {n} bits"
        )));
    }
    let mut h = F2Mat::empty(n);
    while h.n_rows() < count {
        let v = F2Vec::random(n, rng);
        if !v.is_zero() && !h.row_space_contains(&v) {
            h.push_row(v)?;
        }
    }
    Ok(h)
}

/// Mean error of reconciling a binary `Z` with side information `B^n`.
///
/// Each trial draws `z` from the priors of `ensemble`, then a random full-rank hash with `n_Z`
/// rows (nested across `n_Z` for the same seed). Bob applies the pretty-good measurement to the
/// candidates consistent with the hash value; the trial's error is the exact probability that it
/// misidentifies `z`.
pub fn reconcile(
    ensemble: &[(f64, DensityMatrix)],
    n: usize,
    n_z: usize,
    trials: u64,
    seed: u64,
) -> Result<f64> {
    let [(p0, r0), (p1, r1)] = ensemble else {
        return Err(Error::InvalidInput(format!(
            "hashing needs a binary ensemble, got {} states",
            ensemble.len()
        )));
    };
    if *p0 < 0.0 || *p1 < 0.0 || crate::math::abs(p0 + p1 - 1.0) > 1e-9 {
        return Err(Error::InvalidInput(
            "ensemble priors must be a probability vector".into(),
        ));
    }
    if r0.labels() != r1.labels() {
        return Err(Error::Dimension(
            "ensemble states live on different systems".into(),
        ));
    }
    let d = r0.dim();
    let total = (0..n).try_fold(1usize, |acc, _| {
        acc.checked_mul(d).filter(|t| *t <= MAX_DIM)
    });
    if n == 0 || n > 63 || total.is_none() {
        return Err(Error::Capability(format!(
            "B^{n} with dim({d})^{n} exceeds the {MAX_DIM} cap"
        )));
    }
    let letters = [r0.matrix(), r1.matrix()];
    let priors = [*p0, *p1];
    let mut error = 0.0;
    for t in 0..trials {
        let mut rng = trial_rng(seed, t);
        let mut z = 0u64;
        for i in 0..n {
            if rng.random::<f64>() >= priors[0] {
                z |= 1 << i;
            }
        }
        let h = sample_nested_hash(n, n_z, &mut rng)?;
        let s = h.mul_vec(&F2Vec::from_mask(z, n))?;
        let coset = Coset::of(&h, &s)?.expect("z solves its own syndrome");
        let string_state = |v: u64| {
            let mut m = eye(1);
            let mut p = 1.0;
            for i in 0..n {
                let b = ((v >> i) & 1) as usize;
                m = kron(&m, letters[b]);
                p *= priors[b];
            }
            (p, m)
        };
        let (pz, rho_z) = string_state(z);
        let mut avg = CMat::zeros(rho_z.nrows(), rho_z.nrows());
        coset.for_each(|v| {
            let (p, m) = string_state(v);
            if p > 0.0 {
                avg += m * cr(p);
            }
        });
        let isq = psd_inv_sqrt(&avg, PINV_CUTOFF);
        let lambda = &isq * &rho_z * &isq * cr(pz);
        error += 1.0 - trace_product(&lambda, &rho_z).re.clamp(0.0, 1.0);
    }
    Ok(if trials == 0 {
        0.0
    } else {
        error / trials as f64
    })
}

/// Conditional blocks `σ_z = ⟨z|ρ|z⟩` on the remaining factors, for `z` over the computational
/// basis of the qubits `a_names` (entry `i` of `z` on `a_names[i]`).
///
/// Fails with [`Error::Contract`] if any off-diagonal block exceeds `CQ_TOL`.
pub fn cq_blocks(rho: &DensityMatrix, a_names: &[&str]) -> Result<Vec<CMat>> {
    for a in a_names {
        let dim = rho
            .labels()
            .iter()
            .find(|l| l.name == *a)
            .ok_or_else(|| Error::UnknownLabel((*a).into()))?
            .dim;
        if dim != 2 {
            return Err(Error::Dimension(format!("factor {a:?} is not a qubit")));
        }
    }
    let mut order: Vec<&str> = a_names.to_vec();
    order.extend(rho.names().into_iter().filter(|n| !a_names.contains(n)));
    let mat = rho.reorder(&order)?.matrix().clone();
    let n = a_names.len();
    let de = mat.nrows() >> n;
    let mut off = 0.0f64;
    for r in 0..(1usize << n) {
        for c in 0..(1usize << n) {
            if r != c {
                off = off.max(crate::qstate::max_abs(
                    &mat.view((r * de, c * de), (de, de)).into_owned(),
                ));
            }
        }
    }
    if off > CQ_TOL {
        return Err(Error::Contract(format!(
            "state is not classical on {a_names:?} (off-diagonal {off:e})"
        )));
    }
    // Row index r has the first listed qubit as its most significant bit.
    let mut blocks = vec![CMat::zeros(de, de); 1 << n];
    for r in 0..(1usize << n) {
        let mask = (0..n).fold(0usize, |m, i| m | (((r >> (n - 1 - i)) & 1) << i));
        blocks[mask] = mat.view((r * de, r * de), (de, de)).into_owned();
    }
    Ok(blocks)
}

/// Exact `p_secure` of the hashed key `k = H_X z` given the conditional blocks `σ_z` on `E`,
/// indexed by the mask of `z`. A hash with no rows has a single, vacuously secure output.
pub fn privacy_amplify(blocks: &[CMat], h_x: &F2Mat) -> Result<f64> {
    let n = h_x.n_cols();
    if n > 20 || blocks.len() != 1 << n {
        return Err(Error::Dimension(format!(
            "{} blocks for a hash on {n} bits",
            blocks.len()
        )));
    }
    let de = blocks[0].nrows();
    let mut keyed = vec![CMat::zeros(de, de); 1 << h_x.n_rows()];
    for (z, b) in blocks.iter().enumerate() {
        let k = h_x.mul_vec(&F2Vec::from_mask(z as u64, n))?.to_mask() as usize;
        keyed[k] += b;
    }
    Ok(p_secure_blocks(&keyed))
}

/// Outcome of [`duality_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualityReport {
    /// `1 - p_guess(Z̄ | Â B)` with the pretty-good measurement on `B` per syndrome value.
    pub ir_error: f64,
    /// `p_secure(X̄ | E)`, exact.
    pub phase_security: f64,
    /// `phase_security ≥ 1 - √(2 ir_error) - 1e-8`.
    pub bound_holds: bool,
}

/// Complements the independent rows of `h` by unit vectors to an invertible matrix.
fn encoded_rows(h: &F2Mat) -> Result<F2Mat> {
    let n = h.n_cols();
    if h.rank() != h.n_rows() {
        return Err(Error::InvalidInput(
            "hash rows must be linearly independent".into(),
        ));
    }
    let mut all = h.clone();
    let mut g = F2Mat::empty(n);
    for i in 0..n {
        let e = F2Vec::from_mask(1 << i, n);
        if !all.row_space_contains(&e) {
            all.push_row(e.clone())?;
            g.push_row(e)?;
        }
    }
    Ok(g)
}

/// Checks the reconciliation-to-privacy duality on `ψ^{ABE}`.
///
/// `A` is the qubits `a_names` (at most 6), `B` the factors `b_names` and `E` every other
/// factor. The rows of `h_z` are the amplitude stabilizers `Ẑ`; unit vectors completing them to
/// a basis define the encoded amplitude `Z̄`, and `X̄` is its conjugate phase.
pub fn duality_check(
    psi: &StateVector,
    a_names: &[&str],
    b_names: &[&str],
    h_z: &F2Mat,
) -> Result<DualityReport> {
    let n = a_names.len();
    if n > 6 || h_z.n_cols() != n {
        return Err(Error::Dimension(format!(
            "hash on {} bits for {n} qubits (at most 6)",
            h_z.n_cols()
        )));
    }
    for a in a_names {
        if psi.dim_of(a)? != 2 {
            return Err(Error::Dimension(format!("factor {a:?} is not a qubit")));
        }
    }
    let g = encoded_rows(h_z)?;
    let (k, m) = (g.n_rows(), h_z.n_rows());
    let mut order: Vec<&str> = a_names.to_vec();
    order.extend_from_slice(b_names);
    let e_names: Vec<&str> = psi
        .labels()
        .iter()
        .map(|l| l.name.as_str())
        .filter(|x| !order.contains(x))
        .collect();
    order.extend_from_slice(&e_names);
    let v = psi.reorder(&order)?;
    let db: usize = b_names
        .iter()
        .map(|b| psi.dim_of(b))
        .product::<Result<usize>>()?;
    let de = v.dim() >> n;
    let de = de / db;
    // amp[zbar][zhat] is the (db × de) matrix of amplitudes on B, E.
    let mut amp = vec![vec![CMat::zeros(db, de); 1 << m]; 1 << k];
    for r in 0..(1usize << n) {
        let mask = (0..n).fold(0u64, |acc, i| {
            acc | ((((r >> (n - 1 - i)) & 1) as u64) << i)
        });
        let zv = F2Vec::from_mask(mask, n);
        let zbar = g.mul_vec(&zv)?.to_mask() as usize;
        let zhat = h_z.mul_vec(&zv)?.to_mask() as usize;
        let block = &mut amp[zbar][zhat];
        for bi in 0..db {
            for ei in 0..de {
                block[(bi, ei)] = v.amplitudes()[(r * db + bi) * de + ei];
            }
        }
    }
    let mut guess = 0.0;
    for zhat in 0..(1usize << m) {
        let sigmas: Vec<CMat> = (0..(1usize << k))
            .map(|zb| &amp[zb][zhat] * amp[zb][zhat].adjoint())
            .collect();
        let mut avg = CMat::zeros(db, db);
        for s in &sigmas {
            avg += s;
        }
        let isq = psd_inv_sqrt(&avg, PINV_CUTOFF);
        for s in &sigmas {
            guess += trace_product(&(&isq * s * &isq), s).re;
        }
    }
    let ir_error = (1.0 - guess).max(0.0);
    let scale = 1.0 / sqrt((1u64 << k) as f64);
    let mut phase_blocks = Vec::with_capacity(1 << k);
    for xbar in 0..(1usize << k) {
        let mut tau = CMat::zeros(de, de);
        for zhat in 0..(1usize << m) {
            let mut w = CMat::zeros(db, de);
            for (zbar, row) in amp.iter().enumerate() {
                let sign = if (xbar & zbar).count_ones() % 2 == 0 {
                    scale
                } else {
                    -scale
                };
                w += &row[zhat] * cr(sign);
            }
            tau += w.transpose() * w.map(|x| x.conj());
        }
        phase_blocks.push(tau);
    }
    let phase_security = p_secure_blocks(&phase_blocks);
    Ok(DualityReport {
        ir_error,
        phase_security,
        bound_holds: phase_security >= 1.0 - sqrt(2.0 * ir_error) - 1e-8,
    })
}

/// Block error rate of a linear code built from a reconciliation hash over a binary
/// symmetric channel.
///
/// One hash with `n_syndrome` independent rows is drawn from `seed`; the code is its kernel
/// (syndrome value 0) carrying `n - n_syndrome` message bits. Each trial sends a uniformly
/// random codeword and decodes by maximum likelihood over the coset of the received syndrome.
pub fn channel_code_from_ir(
    p_flip: f64,
    n: usize,
    n_syndrome: usize,
    trials: u64,
    seed: u64,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&p_flip) {
        return Err(Error::InvalidInput(format!(
            "flip probability {p_flip} outside [0, 1]"
        )));
    }
    if n == 0 || n > DEFAULT_N_MAX || n_syndrome > n {
        return Err(Error::InvalidInput(format!(
            "need n_syndrome ≤ n ≤ {DEFAULT_N_MAX}, got {n_syndrome}, {n}"
        )));
    }
    let h = sample_nested_hash(n, n_syndrome, &mut seeded_rng(seed))?;
    let codewords = h.kernel_basis();
    let noise = BellDiagonalParams {
        p00: 1.0 - p_flip,
        p01: 0.0,
        p10: p_flip,
        p11: 0.0,
    };
    let table = log_table(&noise);
    let mut errors = 0u64;
    for t in 0..trials {
        let mut rng = trial_rng(seed, t);
        let mut c = F2Vec::zeros(n);
        for b in &codewords {
            if rng.random::<bool>() {
                c.xor_assign(b);
            }
        }
        let (e, _) = sample_pauli_error(&noise, n, &mut rng);
        let y = c.xor(&F2Vec::from_mask(e, n));
        let s = h.mul_vec(&y)?;
        let e_hat = ml_in_coset(&h, &s, |v| log_likelihood(v, 0, n, &table))?;
        if e_hat != Some(e) {
            errors += 1;
        }
    }
    Ok(if trials == 0 {
        0.0
    } else {
        errors as f64 / trials as f64
    })
}
