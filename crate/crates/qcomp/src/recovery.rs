//! Entanglement recovery from amplitude and phase information, private states and the
//! teleportation and superdense-coding circuits.
//!
//! Recovery inputs are pure states on factors named `A`, `B`, `E` with `A` of prime dimension.
//! Outputs are ordered `A, C_Z, C_X, B, E`; the ideal output is `|Φ⟩^{A C_Z} |ψ⟩^{C_X B E}`.
//! The phase basis of `A` and of the `C_X` register is [`fourier_basis`], so for qubits it is
//! `{|+⟩, |-⟩}`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::math::sqrt;
use crate::qstate::{
    computational_basis, eye, fidelity, fourier_basis, kron, max_abs, p_guess, p_secure_measured,
    projector, psd_sqrt, trace_distance, uhlmann_isometry, weyl_observables, CMat, CVec,
    DensityMatrix, Isometry, Povm, StateRecord, StateVector, SystemLabel, C64,
};
use crate::{Error, Result};

/// Alice's factor.
pub const A: &str = "A";
/// Bob's factor.
pub const B: &str = "B";
/// The environment.
pub const E: &str = "E";
/// Register receiving the amplitude guess.
pub const C_Z: &str = "C_Z";
/// Register receiving the phase guess.
pub const C_X: &str = "C_X";
/// Alice's shield.
pub const A_SHIELD: &str = "A'";
/// Bob's shield.
pub const B_SHIELD: &str = "B'";
/// Margin below 1/2 that `ε₁`, `ε₂` need for a report to count as certified.
pub const CERTIFY_MARGIN: f64 = 1e-12;
/// Reconstruction tolerance (trace distance) for private states.
pub const PRIVATE_TOL: f64 = 1e-8;

fn is_prime(d: usize) -> bool {
    d >= 2 && (2..d).take_while(|k| k * k <= d).all(|k| d % k != 0)
}

fn key_dim(labels: &[SystemLabel], name: &str) -> Result<usize> {
    let d = labels
        .iter()
        .find(|l| l.name == name)
        .ok_or_else(|| Error::UnknownLabel(name.into()))?
        .dim;
    if !is_prime(d) {
        return Err(Error::Capability(format!(
            "system {name:?} has non-prime dimension {d}"
        )));
    }
    Ok(d)
}

fn label(name: &str, dim: usize) -> SystemLabel {
    SystemLabel {
        name: name.into(),
        dim,
    }
}

/// `(1/√d) Σ_k |k⟩|k⟩` on factors `a`, `b`.
pub fn max_entangled(d: usize, a: &str, b: &str) -> Result<StateVector> {
    let mut amps = vec![0.0; d * d];
    for k in 0..d {
        amps[k * d + k] = 1.0;
    }
    StateVector::from_real(
        vec![SystemLabel::new(a, d)?, SystemLabel::new(b, d)?],
        &amps,
    )
}

/// Controlled addition `|c⟩|t⟩ ↦ |c⟩|t + c mod d⟩`; the CNOT for `d = 2`.
pub fn controlled_add(d: usize) -> CMat {
    CMat::from_fn(d * d, d * d, |row, col| {
        let (c, t) = (col / d, col % d);
        if row == c * d + (t + c) % d {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// `Σ_c |e_c⟩^C ⊗ √Λ_c`, storing the outcome of `m` in `register` along `basis`.
pub fn coherent_isometry_in_basis(
    m: &Povm,
    register: SystemLabel,
    basis: &[CVec],
) -> Result<Isometry> {
    if basis.len() != m.len() || basis.iter().any(|e| e.len() != register.dim) {
        return Err(Error::Dimension(format!(
            "register {:?} cannot hold {} outcomes",
            register.name,
            m.len()
        )));
    }
    let d = m.elements()[0].nrows();
    let mut mat = CMat::zeros(register.dim * d, d);
    for (e, l) in basis.iter().zip(m.elements()) {
        let col = CMat::from_column_slice(register.dim, 1, e.as_slice());
        mat += kron(&col, &psd_sqrt(l));
    }
    let mut out = vec![register];
    out.extend(m.labels().iter().cloned());
    Isometry::new(m.labels().to_vec(), out, mat)
}

/// `Σ_c |c⟩^C ⊗ √Λ_c`, the coherent implementation of `m`; `register.dim ≥ |m|`.
pub fn coherent_isometry(m: &Povm, register: SystemLabel) -> Result<Isometry> {
    if register.dim < m.len() {
        return Err(Error::Dimension(format!(
            "register of dimension {} cannot hold {} outcomes",
            register.dim,
            m.len()
        )));
    }
    let basis: Vec<CVec> = computational_basis(register.dim)
        .into_iter()
        .take(m.len())
        .collect();
    coherent_isometry_in_basis(m, register, &basis)
}

/// Copies the amplitude of `from` into a new factor: `|z⟩ ↦ |z⟩^{from} |z⟩^{to}`.
fn amplitude_copy(from: &str, to: &str, d: usize) -> Result<Isometry> {
    let mat = CMat::from_fn(d * d, d, |row, col| {
        if row == col * d + col {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    Isometry::new(
        vec![label(from, d)],
        vec![label(from, d), label(to, d)],
        mat,
    )
}

/// Outcome of one recovery construction.
#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryReport {
    /// `U ψ`, ordered `A, C_Z, C_X, B, E`.
    pub output_state: StateVector,
    /// `⟨Φ|ρ^{A C_Z}|Φ⟩` of the output.
    pub epr_fidelity: f64,
    /// `√(2ε₁) + √(2ε₂)`.
    pub bound: f64,
    /// `½‖Φ^{A C_Z} ⊗ ψ^{C_X B E} - U ψ‖₁`.
    pub trace_dist: f64,
    /// `½‖ρ^{C_X B E} - ψ^{ABE}‖₁` with `A` renamed to `C_X`.
    pub transfer_dist: f64,
    pub eps1: f64,
    pub eps2: f64,
    /// `ε₁, ε₂ < 1/2` by at least [`CERTIFY_MARGIN`]; the bound is only asserted for certified
    /// reports.
    pub certified: bool,
}

/// Serializable summary of a [`RecoveryReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryRecord {
    pub epr_fidelity: f64,
    pub bound: f64,
    pub trace_dist: f64,
    pub transfer_dist: f64,
    pub eps1: f64,
    pub eps2: f64,
    pub certified: bool,
    pub output_state: StateRecord,
}

impl RecoveryReport {
    pub fn record(&self) -> RecoveryRecord {
        RecoveryRecord {
            epr_fidelity: self.epr_fidelity,
            bound: self.bound,
            trace_dist: self.trace_dist,
            transfer_dist: self.transfer_dist,
            eps1: self.eps1,
            eps2: self.eps2,
            certified: self.certified,
            output_state: StateRecord::from_vector(&self.output_state),
        }
    }

    /// Whether the trace-distance bound holds within `tol`.
    pub fn within_bound(&self, tol: f64) -> bool {
        self.trace_dist <= self.bound + tol
    }
}

/// Recovery input normalized to the order `A, B, E`.
struct Input {
    psi: StateVector,
    d: usize,
    db: usize,
}

fn input(psi: &StateVector) -> Result<Input> {
    if psi.labels().len() != 3 {
        return Err(Error::InvalidInput(
            "recovery expects exactly the systems A, B and E".into(),
        ));
    }
    let psi = psi.reorder(&[A, B, E])?;
    let d = key_dim(psi.labels(), A)?;
    let db = psi.labels()[1].dim;
    Ok(Input { psi, d, db })
}

fn epr_overlap(rho: &DensityMatrix, d: usize, a: &str, b: &str) -> Result<f64> {
    let phi = max_entangled(d, a, b)?;
    let r = rho.partial_trace(&[a, b])?;
    Ok((phi.amplitudes().adjoint() * r.matrix() * phi.amplitudes())[(0, 0)].re)
}

impl Input {
    /// `Σ_z √p_z |z⟩^A |z⟩^{C_Z} |φ_z⟩^{BE}`, ordered `A, C_Z, B, E`.
    fn psi_z(&self) -> Result<StateVector> {
        self.psi
            .apply(&amplitude_copy(A, C_Z, self.d)?)?
            .reorder(&[A, C_Z, B, E])
    }

    /// `|Φ⟩^{A C_Z} |ψ⟩^{C_X B E}`.
    fn target(&self) -> Result<StateVector> {
        let phi = max_entangled(self.d, A, C_Z)?;
        phi.tensor(&self.psi.rename(A, C_X)?)?
            .reorder(&[A, C_Z, C_X, B, E])
    }

    fn rho_ab(&self) -> Result<DensityMatrix> {
        self.psi.marginal(&[A, B])
    }

    fn check_povm(&self, m: &Povm) -> Result<()> {
        if m.names() != [B] || m.len() != self.d {
            return Err(Error::Dimension(format!(
                "measurement must act on B with {} outcomes",
                self.d
            )));
        }
        Ok(())
    }

    fn eps_guess(&self, basis: &[CVec], m: &Povm) -> Result<f64> {
        Ok(1.0 - p_guess(&self.rho_ab()?, A, basis, m)?)
    }

    /// `1 - p_secure(Z^A|E)_ψ`.
    fn eps_secure_z(&self) -> Result<f64> {
        Ok(1.0
            - p_secure_measured(
                &self.psi.marginal(&[A, E])?,
                A,
                &computational_basis(self.d),
            )?)
    }

    /// `U₂` from Uhlmann's theorem between `ψ_Z` and the target, on `C_Z B → C_Z C_X B`.
    fn uhlmann_u2(&self) -> Result<Isometry> {
        uhlmann_isometry(&self.psi_z()?, &self.target()?, &[C_Z, B], &[C_Z, C_X, B])
    }

    fn finish(&self, u1: &Isometry, u2: &Isometry, eps1: f64, eps2: f64) -> Result<RecoveryReport> {
        let out = self
            .psi
            .apply(u1)?
            .apply(u2)?
            .reorder(&[A, C_Z, C_X, B, E])?;
        let overlap = out.inner(&self.target()?)?.norm();
        let trace_dist = sqrt((1.0 - overlap * overlap).max(0.0));
        let rho = out.density();
        let transfer = trace_distance(
            &out.marginal(&[C_X, B, E])?,
            &self.psi.rename(A, C_X)?.density(),
        )?;
        let eps1 = eps1.max(0.0);
        let eps2 = eps2.max(0.0);
        Ok(RecoveryReport {
            epr_fidelity: epr_overlap(&rho, self.d, A, C_Z)?,
            bound: sqrt(2.0 * eps1) + sqrt(2.0 * eps2),
            trace_dist,
            transfer_dist: transfer,
            eps1,
            eps2,
            certified: eps1 < 0.5 - CERTIFY_MARGIN && eps2 < 0.5 - CERTIFY_MARGIN,
            output_state: out,
        })
    }
}

/// Recovery from measurements `M_Z`, `M_X` on `B` predicting Alice's amplitude and phase:
/// coherent `M_Z` into `C_Z`, coherent `M_X` into `C_X` (phase basis), then controlled
/// addition from `C_Z` onto `C_X`.
pub fn recover_theorem1(psi: &StateVector, m_z: &Povm, m_x: &Povm) -> Result<RecoveryReport> {
    let inp = input(psi)?;
    inp.check_povm(m_z)?;
    inp.check_povm(m_x)?;
    let d = inp.d;
    let eps1 = inp.eps_guess(&computational_basis(d), m_z)?;
    let eps2 = inp.eps_guess(&fourier_basis(d), m_x)?;
    let u1 = coherent_isometry(m_z, label(C_Z, d))?;
    let v = coherent_isometry_in_basis(m_x, label(C_X, d), &fourier_basis(d))?;
    let mat = kron(&controlled_add(d), &eye(inp.db)) * kron(&eye(d), &v.matrix);
    let u2 = Isometry::new(
        vec![label(C_Z, d), label(B, inp.db)],
        vec![label(C_Z, d), label(C_X, d), label(B, inp.db)],
        mat,
    )?;
    inp.finish(&u1, &u2, eps1, eps2)
}

/// Recovery when `M_Z` on `B` predicts the amplitude and `E` is ignorant of it; the second
/// isometry comes from Uhlmann's theorem.
pub fn recover_theorem2(psi: &StateVector, m_z: &Povm) -> Result<RecoveryReport> {
    let inp = input(psi)?;
    inp.check_povm(m_z)?;
    let eps1 = inp.eps_guess(&computational_basis(inp.d), m_z)?;
    let eps2 = inp.eps_secure_z()?;
    let u1 = coherent_isometry(m_z, label(C_Z, inp.d))?;
    inp.finish(&u1, &inp.uhlmann_u2()?, eps1, eps2)
}

/// Recovery when `E` is ignorant of the amplitude and, even holding `C_Z`, of the phase. Both
/// isometries come from Uhlmann's theorem.
pub fn recover_theorem3(psi: &StateVector) -> Result<RecoveryReport> {
    let inp = input(psi)?;
    let psi_z = inp.psi_z()?;
    let eps1 = 1.0 - p_secure_measured(&psi_z.marginal(&[A, C_Z, E])?, A, &fourier_basis(inp.d))?;
    let eps2 = inp.eps_secure_z()?;
    let u1 = uhlmann_isometry(&inp.psi, &psi_z, &[B], &[C_Z, B])?;
    inp.finish(&u1, &inp.uhlmann_u2()?, eps1, eps2)
}

/// Outcome of [`verify_private_state`].
#[derive(Debug, Clone, PartialEq)]
pub struct PrivateStateCheck {
    pub is_private: bool,
    /// `Σ_z P_z^A ⊗ V_z` on factors ordered `A, A', B'`, with `V_0 = I`; present when private.
    pub twisting: Option<CMat>,
    /// The unitaries `V_z` on `A' B'`.
    pub shield_unitaries: Vec<CMat>,
    /// `ξ^{A'B'}`.
    pub shield_state: CMat,
    /// Trace distance between the input and `U (Φ ⊗ ξ) U†`.
    pub reconstruction_dist: f64,
}

/// Decides whether a state on `A, A', B, B'` is private: `ψ = U(Φ^{AB} ⊗ ξ^{A'B'})U†` for a
/// twisting `U = Σ_z P_z^A ⊗ V_z^{A'B'}`.
///
/// With `V_0 = I` the blocks `⟨zz|ψ|00⟩ = V_z ξ / d` fix `ξ = d⟨00|ψ|00⟩` and `V_z` as the polar
/// part of the block on the support of `ξ`; the state is private iff the reconstruction matches.
pub fn verify_private_state(rho: &DensityMatrix) -> Result<PrivateStateCheck> {
    if rho.labels().len() != 4 {
        return Err(Error::InvalidInput(
            "private states live on A, A', B, B'".into(),
        ));
    }
    let r = rho.reorder(&[A, B, A_SHIELD, B_SHIELD])?;
    let d = r.labels()[0].dim;
    if r.labels()[1].dim != d {
        return Err(Error::Dimension(
            "key systems A and B differ in dimension".into(),
        ));
    }
    let (da, dbs) = (r.labels()[2].dim, r.labels()[3].dim);
    let s = da * dbs;
    let block = |z: usize, w: usize| {
        r.matrix()
            .view(((z * d + z) * s, (w * d + w) * s), (s, s))
            .into_owned()
    };
    let xi = block(0, 0) * C64::new(d as f64, 0.0);
    let mut vs = vec![eye(s)];
    for z in 1..d {
        let svd = nalgebra::SVD::new(block(z, 0), true, true);
        let (u, vt) = match (svd.u, svd.v_t) {
            (Some(u), Some(vt)) => (u, vt),
            _ => return Err(Error::Solver("SVD failed".into())),
        };
        vs.push(u * vt);
    }
    // Reconstruct in the order A, B, A', B'.
    let phi = max_entangled(d, A, B)?;
    let mut twist_abs = CMat::zeros(d * d * s, d * d * s);
    for z in 0..d {
        for b in 0..d {
            let mut pz = CMat::zeros(d * d, d * d);
            pz[(z * d + b, z * d + b)] = C64::new(1.0, 0.0);
            twist_abs += kron(&pz, &vs[z]);
        }
    }
    let ideal = kron(&projector(phi.amplitudes()), &xi);
    let recon = &twist_abs * ideal * twist_abs.adjoint();
    let labels = r.labels().to_vec();
    let dist = match DensityMatrix::new(labels.clone(), recon.clone()) {
        Ok(rec) => trace_distance(&r, &rec)?,
        Err(_) => 1.0f64.max(max_abs(&(recon - r.matrix()))),
    };
    let is_private = dist <= PRIVATE_TOL;
    let twisting = is_private.then(|| {
        let mut t = CMat::zeros(d * s, d * s);
        for (z, v) in vs.iter().enumerate() {
            let mut pz = CMat::zeros(d, d);
            pz[(z, z)] = C64::new(1.0, 0.0);
            t += kron(&pz, v);
        }
        t
    });
    Ok(PrivateStateCheck {
        is_private,
        twisting,
        shield_unitaries: vs,
        shield_state: xi,
        reconstruction_dist: dist,
    })
}

/// Outcome of the untwisting circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct UntwistReport {
    /// `1 - p_guess(Z^A|Z^B)`.
    pub eps1: f64,
    /// `1 - p_guess(X^A|M_X^{A'BB'})`.
    pub eps2: f64,
    /// `ε₁ + √(2ε₂)`.
    pub bound: f64,
    /// `½‖ψ^{Z^A Z^B E} - (1/d) Σ_z P_z ⊗ P_z ⊗ ψ^E‖₁`.
    pub key_distance: f64,
    /// `⟨Φ|ρ^{AB}|Φ⟩` after untwisting.
    pub epr_fidelity: f64,
    /// Circuit output ordered `A, B, A', B', E, C_Z, C_X`.
    pub output_state: StateVector,
}

impl UntwistReport {
    /// Whether the key distance respects the bound within `tol`.
    pub fn within_bound(&self, tol: f64) -> bool {
        self.key_distance <= self.bound + tol
    }
}

/// Runs the untwisting circuit on `ψ^{A A' B B' E}`: copy `B` into `C_Z`, coherently apply
/// `M_X` (given on `A', B, B'`) with `C_Z` in place of `B`, storing the phase in `C_X`, then add
/// `B` onto `C_X`.
pub fn untwist_theorem7(psi: &StateVector, m_x: &Povm) -> Result<UntwistReport> {
    if psi.labels().len() != 5 {
        return Err(Error::InvalidInput(
            "expected the systems A, A', B, B', E".into(),
        ));
    }
    let psi = psi.reorder(&[A, B, A_SHIELD, B_SHIELD, E])?;
    let d = key_dim(psi.labels(), A)?;
    if key_dim(psi.labels(), B)? != d {
        return Err(Error::Dimension(
            "key systems A and B differ in dimension".into(),
        ));
    }
    let mut names = m_x.names();
    names.sort_unstable();
    let mut expect = vec![A_SHIELD, B, B_SHIELD];
    expect.sort_unstable();
    if names != expect || m_x.len() != d {
        return Err(Error::Dimension(format!(
            "M_X must act on A', B, B' with {d} outcomes"
        )));
    }
    let z = computational_basis(d);
    let x = fourier_basis(d);
    let rho_ab = psi.marginal(&[A, B])?;
    let zb = Povm::projective(label(B, d), &z)?;
    let eps1 = (1.0 - p_guess(&rho_ab, A, &z, &zb)?).max(0.0);
    let eps2 = (1.0 - p_guess(&psi.marginal(&[A, A_SHIELD, B, B_SHIELD])?, A, &x, m_x)?).max(0.0);

    let measured = psi.marginal(&[A, B, E])?.dephase(A, &z)?.dephase(B, &z)?;
    let rho_e = psi.marginal(&[E])?;
    let mut ideal_key = CMat::zeros(d * d, d * d);
    for k in 0..d {
        ideal_key[(k * d + k, k * d + k)] = C64::new(1.0 / d as f64, 0.0);
    }
    let ideal = DensityMatrix::new(vec![label(A, d), label(B, d)], ideal_key)?.tensor(&rho_e)?;
    let key_distance = trace_distance(&measured, &ideal)?;

    let copy = amplitude_copy(B, C_Z, d)?;
    let v = coherent_isometry_in_basis(&m_x.rename(B, C_Z)?, label(C_X, d), &x)?;
    let out = psi
        .apply(&copy)?
        .apply(&v)?
        .apply_unitary(&controlled_add(d), &[B, C_X])?;
    let out = out.reorder(&[A, B, A_SHIELD, B_SHIELD, E, C_Z, C_X])?;
    Ok(UntwistReport {
        eps1,
        eps2,
        bound: eps1 + sqrt(2.0 * eps2),
        key_distance,
        epr_fidelity: epr_overlap(&out.density(), d, A, B)?,
        output_state: out,
    })
}

/// `|β_jk⟩ = (X^j Z^k ⊗ I)|Φ⟩` on two qubits.
pub fn bell_state(j: usize, k: usize) -> CVec {
    let (x, z) = weyl_observables(2).expect("d = 2");
    let op = pauli_power(&x, j) * pauli_power(&z, k);
    let phi = max_entangled(2, "0", "1").expect("valid labels");
    kron(&op, &eye(2)) * phi.amplitudes()
}

fn pauli_power(p: &CMat, e: usize) -> CMat {
    if e % 2 == 1 {
        p.clone()
    } else {
        eye(p.nrows())
    }
}

/// One Bell-measurement branch of teleportation.
#[derive(Debug, Clone, PartialEq)]
pub struct TeleportBranch {
    pub j: usize,
    pub k: usize,
    pub probability: f64,
    /// Bob's state after the correction `X^j Z^k`.
    pub output: CVec,
}

/// All four branches of teleporting the qubit `chi` through `|Φ⟩^{AB}`.
pub fn teleport_branches(chi: &CVec) -> Result<Vec<TeleportBranch>> {
    let input = StateVector::from_unnormalized(vec![label("S", 2)], chi.clone())?;
    let state = input.tensor(&max_entangled(2, A, B)?)?;
    let (x, z) = weyl_observables(2)?;
    let mut out = Vec::with_capacity(4);
    for j in 0..2 {
        for k in 0..2 {
            let (_, v) = state.project(&["S", A], &bell_state(j, k))?;
            let probability = v.norm_squared();
            let corrected = pauli_power(&x, j) * pauli_power(&z, k) * v;
            let output = &corrected / C64::new(corrected.norm(), 0.0);
            out.push(TeleportBranch {
                j,
                k,
                probability,
                output,
            });
        }
    }
    Ok(out)
}

/// Teleports `chi`, sampling the Bell outcome with `rng`; returns `(j, k, output)`.
pub fn teleport<R: Rng + ?Sized>(chi: &CVec, rng: &mut R) -> Result<TeleportBranch> {
    let branches = teleport_branches(chi)?;
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for b in &branches {
        acc += b.probability;
        if u < acc {
            return Ok(b.clone());
        }
    }
    Ok(branches[3].clone())
}

/// Encodes two bits by `X^j Z^k` on Alice's half of `|Φ⟩` and decodes them with Bob's Bell
/// measurement.
pub fn superdense(j: usize, k: usize) -> Result<(usize, usize)> {
    if j > 1 || k > 1 {
        return Err(Error::InvalidInput(format!("bits ({j}, {k}) out of range")));
    }
    let (x, z) = weyl_observables(2)?;
    let op = pauli_power(&x, j) * pauli_power(&z, k);
    let sent = max_entangled(2, A, B)?.apply_unitary(&op, &[A])?;
    let mut best = (0, 0, -1.0f64);
    for jj in 0..2 {
        for kk in 0..2 {
            let p = bell_state(jj, kk).dotc(sent.amplitudes()).norm_sqr();
            if p > best.2 {
                best = (jj, kk, p);
            }
        }
    }
    if best.2 < 1.0 - 1e-10 {
        return Err(Error::Solver(format!(
            "Bell measurement is not deterministic (p = {})",
            best.2
        )));
    }
    Ok((best.0, best.1))
}

/// Fidelity `|⟨a|b⟩|` between normalized vectors.
pub fn vector_fidelity(a: &CVec, b: &CVec) -> f64 {
    a.dotc(b).norm() / (a.norm() * b.norm())
}

/// Root fidelity of a recovered `C_X B E` marginal and the original state.
pub fn transfer_fidelity(report: &RecoveryReport, original: &StateVector) -> Result<f64> {
    let orig = original.reorder(&[A, B, E])?.rename(A, C_X)?.density();
    fidelity(&report.output_state.marginal(&[C_X, B, E])?, &orig)
}

/// Names used by the recovery circuits, for callers that build inputs.
pub fn recovery_labels(db: usize, de: usize) -> Vec<SystemLabel> {
    vec![label(A, 2), label(B, db), label(E, de)]
}
