//! Entropic uncertainty relations and the relative-entropy security bound.
//!
//! Every check returns a slack `lhs - rhs`; a valid relation has slack `≥ -SLACK_TOL`.
//! Conditional entropies of measured observables are taken on the dephased state
//! `Σ_z (P_z ⊗ I) ρ (P_z ⊗ I)`.

use alloc::format;
use alloc::vec::Vec;

use crate::math::{log2, sqrt};
use crate::qstate::{
    computational_basis, fourier_basis, p_secure, trace_product, weyl_observables, CVec,
    DensityMatrix, StateVector, STATE_TOL,
};
use crate::{shannon_entropy, Error, Result};

/// Absolute tolerance on slacks.
pub const SLACK_TOL: f64 = 1e-9;

/// Two orthonormal bases of one system.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservablePair {
    basis1: Vec<CVec>,
    basis2: Vec<CVec>,
}

impl ObservablePair {
    /// Validates that both bases are orthonormal of the same dimension.
    pub fn new(basis1: Vec<CVec>, basis2: Vec<CVec>) -> Result<Self> {
        let d = basis1.len();
        for b in [&basis1, &basis2] {
            if b.len() != d || b.iter().any(|v| v.len() != d) {
                return Err(Error::Dimension(format!(
                    "bases must hold {d} vectors of dimension {d}"
                )));
            }
            for (i, u) in b.iter().enumerate() {
                for (j, v) in b.iter().enumerate() {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    if (u.dotc(v).re - expect).abs() > STATE_TOL || u.dotc(v).im.abs() > STATE_TOL {
                        return Err(Error::InvalidInput("basis is not orthonormal".into()));
                    }
                }
            }
        }
        Ok(Self { basis1, basis2 })
    }

    /// Clock (computational) and shift (Fourier) eigenbases in dimension `d`; Z and X for qubits.
    pub fn weyl(d: usize) -> Result<Self> {
        weyl_observables(d)?;
        Self::new(computational_basis(d), fourier_basis(d))
    }

    pub fn basis1(&self) -> &[CVec] {
        &self.basis1
    }

    pub fn basis2(&self) -> &[CVec] {
        &self.basis2
    }

    pub fn dim(&self) -> usize {
        self.basis1.len()
    }

    /// The pair with the two bases exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            basis1: self.basis2.clone(),
            basis2: self.basis1.clone(),
        }
    }
}

/// `c = max_{j,k} |⟨ψ_j|φ_k⟩|²`, between `1/d` and 1.
pub fn overlap_c(pair: &ObservablePair) -> f64 {
    let mut c = 0.0f64;
    for u in &pair.basis1 {
        for v in &pair.basis2 {
            c = c.max(u.dotc(v).norm_sqr());
        }
    }
    c
}

/// `log₂(1/c)` for the pair.
pub fn overlap_bound(pair: &ObservablePair) -> f64 {
    -log2(overlap_c(pair))
}

/// Terms of one uncertainty check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UncertaintyReport {
    /// Entropy of the first observable (conditioned as the relation prescribes).
    pub h1: f64,
    /// Entropy of the second observable (conditioned as the relation prescribes).
    pub h2: f64,
    /// `log₂(1/c)`.
    pub bound: f64,
    /// Additional right-hand term: `H(A|B)` for the bipartite relation, zero otherwise.
    pub extra: f64,
    /// `h1 + h2 - bound - extra`.
    pub slack: f64,
}

impl UncertaintyReport {
    fn new(h1: f64, h2: f64, bound: f64, extra: f64) -> Self {
        Self {
            h1,
            h2,
            bound,
            extra,
            slack: h1 + h2 - bound - extra,
        }
    }

    /// Whether the relation holds within [`SLACK_TOL`].
    pub fn holds(&self) -> bool {
        self.slack >= -SLACK_TOL
    }
}

fn single_system(rho: &DensityMatrix, pair: &ObservablePair) -> Result<()> {
    if rho.labels().len() != 1 {
        return Err(Error::InvalidInput("expected a single-system state".into()));
    }
    if rho.dim() != pair.dim() {
        return Err(Error::Dimension(
            "observables do not act on the state's system".into(),
        ));
    }
    Ok(())
}

fn outcome_entropy(rho: &DensityMatrix, basis: &[CVec]) -> f64 {
    let probs: Vec<f64> = basis
        .iter()
        .map(|b| (b.adjoint() * rho.matrix() * b)[(0, 0)].re)
        .collect();
    shannon_entropy(&probs)
}

/// `H(Z) + H(X) - log₂(1/c)` for a single-system state.
pub fn check_maassen_uffink(
    rho: &DensityMatrix,
    pair: &ObservablePair,
) -> Result<UncertaintyReport> {
    single_system(rho, pair)?;
    Ok(UncertaintyReport::new(
        outcome_entropy(rho, &pair.basis1),
        outcome_entropy(rho, &pair.basis2),
        overlap_bound(pair),
        0.0,
    ))
}

fn others<'a>(rho: &'a DensityMatrix, skip: &[&str]) -> Vec<&'a str> {
    rho.labels()
        .iter()
        .map(|l| l.name.as_str())
        .filter(|n| !skip.contains(n))
        .collect()
}

fn measured_cond(rho: &DensityMatrix, a: &str, basis: &[CVec], given: &[&str]) -> Result<f64> {
    rho.dephase(a, basis)?.cond_entropy(&[a], given)
}

fn check_pair_dim(rho: &DensityMatrix, a: &str, pair: &ObservablePair) -> Result<()> {
    let la = rho
        .labels()
        .iter()
        .find(|l| l.name == a)
        .ok_or_else(|| Error::UnknownLabel(a.into()))?;
    if la.dim != pair.dim() {
        return Err(Error::Dimension(format!(
            "observables do not act on system {a:?}"
        )));
    }
    Ok(())
}

/// `H(X^A|B) + H(Z^A|B) - log₂(1/c) - H(A|B)`, with `B` every factor other than `a`.
pub fn check_berta(
    rho: &DensityMatrix,
    a: &str,
    pair: &ObservablePair,
) -> Result<UncertaintyReport> {
    check_pair_dim(rho, a, pair)?;
    let b = others(rho, &[a]);
    Ok(UncertaintyReport::new(
        measured_cond(rho, a, &pair.basis1, &b)?,
        measured_cond(rho, a, &pair.basis2, &b)?,
        overlap_bound(pair),
        rho.cond_entropy(&[a], &b)?,
    ))
}

/// Purity defect `1 - Tr ρ²` above which a state is rejected as mixed.
pub const PURITY_TOL: f64 = 1e-9;

/// `H(basis2^A|B) + H(basis1^A|C) - log₂(1/c)` for a pure state on `a`, `b`, `c` (each may be
/// a single named factor; any further factors are rejected).
pub fn check_tripartite(
    rho: &DensityMatrix,
    a: &str,
    b: &str,
    c: &str,
    pair: &ObservablePair,
) -> Result<UncertaintyReport> {
    check_pair_dim(rho, a, pair)?;
    if rho.labels().len() != 3 || !others(rho, &[a, b, c]).is_empty() {
        return Err(Error::InvalidInput(
            "expected exactly the systems A, B and C".into(),
        ));
    }
    let purity = trace_product(rho.matrix(), rho.matrix()).re;
    if 1.0 - purity > PURITY_TOL {
        return Err(Error::InvalidInput(format!(
            "tripartite state is not pure (purity {purity})"
        )));
    }
    Ok(UncertaintyReport::new(
        measured_cond(rho, a, &pair.basis2, &[b])?,
        measured_cond(rho, a, &pair.basis1, &[c])?,
        overlap_bound(pair),
        0.0,
    ))
}

/// [`check_tripartite`] for a state vector.
pub fn check_tripartite_pure(
    psi: &StateVector,
    a: &str,
    b: &str,
    c: &str,
    pair: &ObservablePair,
) -> Result<UncertaintyReport> {
    check_tripartite(&psi.density(), a, b, c, pair)
}

/// Both sides of the relative-entropy security bound for a classical-quantum state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PinskerReport {
    /// `H(Z^A|E)`.
    pub entropy: f64,
    /// `ε = √(log₂ d - H(Z^A|E))`, so that `H(Z^A|E) = log₂ d - ε²`.
    pub epsilon: f64,
    /// `1 - ε`.
    pub p_secure_bound: f64,
    /// Exact `p_secure(Z^A|E)`.
    pub p_secure: f64,
    /// Whether `p_secure ≥ 1 - ε` within [`SLACK_TOL`].
    pub consistent: bool,
}

/// Checks that `H(Z^A|E) ≥ log₂ d - ε²` implies `p_secure ≥ 1 - ε` on a CQ state.
pub fn pinsker_secure(rho: &DensityMatrix, a: &str, basis: &[CVec]) -> Result<PinskerReport> {
    let e = others(rho, &[a]);
    let entropy = rho.cond_entropy(&[a], &e)?;
    let ps = p_secure(rho, a, basis)?;
    let epsilon = sqrt((log2(basis.len() as f64) - entropy).max(0.0));
    let bound = 1.0 - epsilon;
    Ok(PinskerReport {
        entropy,
        epsilon,
        p_secure_bound: bound,
        p_secure: ps,
        consistent: ps >= bound - SLACK_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{qubits, SystemLabel};

    fn zx() -> ObservablePair {
        ObservablePair::weyl(2).unwrap()
    }

    #[test]
    fn overlaps() {
        assert!((overlap_c(&zx()) - 0.5).abs() < 1e-15);
        assert!((overlap_bound(&zx()) - 1.0).abs() < 1e-15);
        let z = computational_basis(2);
        assert_eq!(overlap_c(&ObservablePair::new(z.clone(), z).unwrap()), 1.0);
        assert!((overlap_c(&ObservablePair::weyl(3).unwrap()) - 1.0 / 3.0).abs() < 1e-14);
        assert_eq!(overlap_c(&zx()), overlap_c(&zx().swapped()));
    }

    #[test]
    fn maassen_uffink_examples() {
        let zero = StateVector::from_real(qubits(&["A"]), &[1.0, 0.0])
            .unwrap()
            .density();
        assert!(check_maassen_uffink(&zero, &zx()).unwrap().slack.abs() < 1e-12);
        let amps = CVec::from_vec(alloc::vec![
            crate::qstate::C64::new(1.0, 0.0),
            crate::qstate::C64::new(0.0, 1.0)
        ]);
        let yplus = StateVector::from_unnormalized(qubits(&["A"]), amps)
            .unwrap()
            .density();
        let r = check_maassen_uffink(&yplus, &zx()).unwrap();
        assert!((r.h1 - 1.0).abs() < 1e-12 && (r.h2 - 1.0).abs() < 1e-12);
        assert!((r.slack - 1.0).abs() < 1e-12);
    }

    #[test]
    fn berta_examples() {
        let epr = StateVector::from_real(qubits(&["A", "B"]), &[1.0, 0.0, 0.0, 1.0])
            .unwrap()
            .density();
        let r = check_berta(&epr, "A", &zx()).unwrap();
        assert!(r.h1.abs() < 1e-12 && r.h2.abs() < 1e-12);
        assert!((r.extra + 1.0).abs() < 1e-12);
        assert!(r.slack.abs() < 1e-12);
        let mut rng = crate::gf2::seeded_rng(2);
        let sigma = DensityMatrix::random(qubits(&["B"]), 2, &mut rng).unwrap();
        let prod = DensityMatrix::maximally_mixed(qubits(&["A"]))
            .unwrap()
            .tensor(&sigma)
            .unwrap();
        assert!(check_berta(&prod, "A", &zx()).unwrap().slack.abs() < 1e-12);
    }

    #[test]
    fn berta_with_trivial_b_matches_maassen_uffink() {
        let mut rng = crate::gf2::seeded_rng(8);
        // Pure A: with trivial B the extra term H(A|B) = H(A) vanishes only then.
        let rho_a = StateVector::random(qubits(&["A"]), &mut rng)
            .unwrap()
            .density();
        let rho = rho_a
            .tensor(
                &DensityMatrix::maximally_mixed(alloc::vec![SystemLabel::new("B", 1).unwrap()])
                    .unwrap(),
            )
            .unwrap();
        let b = check_berta(&rho, "A", &zx()).unwrap().slack;
        let m = check_maassen_uffink(&rho_a, &zx()).unwrap().slack;
        assert!((b - m).abs() < 1e-12);
    }

    #[test]
    fn berta_with_trivial_b_on_mixed_state_loses_entropy_of_a() {
        let mut rng = crate::gf2::seeded_rng(18);
        let rho_a = DensityMatrix::random(qubits(&["A"]), 2, &mut rng).unwrap();
        let one =
            DensityMatrix::maximally_mixed(alloc::vec![SystemLabel::new("B", 1).unwrap()]).unwrap();
        let b = check_berta(&rho_a.tensor(&one).unwrap(), "A", &zx())
            .unwrap()
            .slack;
        let m = check_maassen_uffink(&rho_a, &zx()).unwrap().slack;
        assert!((m - b - rho_a.entropy()).abs() < 1e-12);
    }

    #[test]
    fn tripartite_examples() {
        let epr_c = StateVector::from_real(
            qubits(&["A", "B", "C"]),
            &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0],
        )
        .unwrap();
        let r = check_tripartite_pure(&epr_c, "A", "B", "C", &zx()).unwrap();
        assert!(r.h1.abs() < 1e-12 && (r.h2 - 1.0).abs() < 1e-12 && r.slack.abs() < 1e-12);
        let ghz = StateVector::from_real(
            qubits(&["A", "B", "C"]),
            &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0],
        )
        .unwrap();
        let r = check_tripartite_pure(&ghz, "A", "B", "C", &zx()).unwrap();
        assert!((r.h1 - 1.0).abs() < 1e-12 && r.h2.abs() < 1e-12 && r.slack.abs() < 1e-12);
        let mixed = DensityMatrix::maximally_mixed(qubits(&["A", "B", "C"])).unwrap();
        assert!(matches!(
            check_tripartite(&mixed, "A", "B", "C", &zx()),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn pinsker_extremes() {
        let z = computational_basis(2);
        let ideal = DensityMatrix::maximally_mixed(qubits(&["A", "E"])).unwrap();
        let r = pinsker_secure(&ideal, "A", &z).unwrap();
        assert!(
            (r.entropy - 1.0).abs() < 1e-12 && (r.p_secure - 1.0).abs() < 1e-12 && r.consistent
        );
        let copied = StateVector::from_real(qubits(&["A", "E"]), &[1.0, 0.0, 0.0, 1.0])
            .unwrap()
            .density()
            .dephase("A", &z)
            .unwrap();
        let r = pinsker_secure(&copied, "A", &z).unwrap();
        assert!(r.entropy.abs() < 1e-12 && (r.epsilon - 1.0).abs() < 1e-12 && r.consistent);
    }
}
