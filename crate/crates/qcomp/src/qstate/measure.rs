//! Measured entropies, qubit measurement searches and two reference ensembles.

use alloc::vec;
use alloc::vec::Vec;

use super::*;
use crate::math::{acos, cos, sin, sqrt};
use crate::shannon_entropy;

/// Joint distribution `P(z, m) = Tr[(P_z ⊗ Λ_m) ρ]` for basis `basis` on `a` and a POVM on the
/// remaining factors. Rows are indexed by `z`.
pub fn joint_distribution(
    rho: &DensityMatrix,
    a: &str,
    basis: &[CVec],
    m: &Povm,
) -> Result<Vec<Vec<f64>>> {
    let blocks = rho.conditional_blocks(a, basis, &m.names())?;
    Ok(blocks
        .iter()
        .map(|s| {
            m.elements()
                .iter()
                .map(|l| trace_product(l, s).re.max(0.0))
                .collect()
        })
        .collect())
}

/// `H(Z^A | M)` in bits for the classical pair produced by measuring `a` in `basis` and the
/// other factors with `m`.
pub fn measured_cond_entropy(
    rho: &DensityMatrix,
    a: &str,
    basis: &[CVec],
    m: &Povm,
) -> Result<f64> {
    let joint = joint_distribution(rho, a, basis, m)?;
    Ok(classical_cond_entropy(&joint))
}

/// `H(Z|M) = H(Z, M) - H(M)` for a joint table indexed `[z][m]`.
pub fn classical_cond_entropy(joint: &[Vec<f64>]) -> f64 {
    let flat: Vec<f64> = joint.iter().flatten().copied().collect();
    let cols = joint.first().map_or(0, Vec::len);
    let marg: Vec<f64> = (0..cols)
        .map(|j| joint.iter().map(|r| r[j]).sum())
        .collect();
    shannon_entropy(&flat) - shannon_entropy(&marg)
}

/// Qubit state with Bloch angles `(θ, φ)`: `cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩`.
pub fn bloch_ket(theta: f64, phi: f64) -> CVec {
    CVec::from_vec(vec![
        cr(cos(theta / 2.0)),
        c(cos(phi), sin(phi)) * cr(sin(theta / 2.0)),
    ])
}

/// Projective qubit basis `{|n⟩, |-n⟩}` along the Bloch direction `(θ, φ)`.
pub fn bloch_basis(theta: f64, phi: f64) -> [CVec; 2] {
    let up = bloch_ket(theta, phi);
    let down = CVec::from_vec(vec![-up[1].conj(), up[0].conj()]);
    [up, down]
}

/// Result of a search over Bloch directions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereOptimum {
    pub theta: f64,
    pub phi: f64,
    pub value: f64,
}

/// Minimizes `f(θ, φ)` over the Bloch sphere: a Fibonacci grid of `grid` points, then a compass
/// search from the best grid point with step halving down to `1e-10` radians.
pub fn minimize_on_sphere(
    grid: usize,
    mut f: impl FnMut(f64, f64) -> Result<f64>,
) -> Result<SphereOptimum> {
    let n = grid.max(1);
    let golden = core::f64::consts::PI * (3.0 - sqrt(5.0));
    let mut best = SphereOptimum {
        theta: 0.0,
        phi: 0.0,
        value: f64::INFINITY,
    };
    for i in 0..n {
        let zc = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
        let theta = acos(zc.clamp(-1.0, 1.0));
        let phi = (golden * i as f64) % (2.0 * core::f64::consts::PI);
        let v = f(theta, phi)?;
        if v < best.value {
            best = SphereOptimum {
                theta,
                phi,
                value: v,
            };
        }
    }
    let mut step = 2.0 * core::f64::consts::PI / sqrt(n as f64);
    while step > 1e-10 {
        let mut moved = false;
        for (dt, dp) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
            let (t, p) = (best.theta + dt, best.phi + dp);
            let v = f(t, p)?;
            if v < best.value {
                best = SphereOptimum {
                    theta: t,
                    phi: p,
                    value: v,
                };
                moved = true;
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    Ok(best)
}

/// `|ψ⟩^{AB} = ½ Σ_t |t⟩^A |φ_t⟩^B` with `φ = (|0⟩, |1⟩, |+⟩, |-⟩)`; `A` has dimension 4.
pub fn holevo_locking_state() -> StateVector {
    let r = core::f64::consts::FRAC_1_SQRT_2;
    let phis = [[1.0, 0.0], [0.0, 1.0], [r, r], [r, -r]];
    let mut amps = Vec::with_capacity(8);
    for p in phis {
        amps.push(0.5 * p[0]);
        amps.push(0.5 * p[1]);
    }
    let labels = vec![
        SystemLabel {
            name: "A".into(),
            dim: 4,
        },
        SystemLabel::qubit("B"),
    ];
    StateVector::from_real(labels, &amps).expect("normalized by construction")
}

/// Outcome of the locking search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LockingReport {
    /// `H(Z^A | B)` with `A` dephased and `B` unmeasured.
    pub quantum_cond_entropy: f64,
    /// Minimum of `H(Z^A | M)` over projective qubit measurements `M` on `B`.
    pub min_measured_cond_entropy: f64,
    /// `H(Z^A) - min H(Z^A|M)`: accessible information of the ensemble.
    pub accessible_information: f64,
    pub optimum: SphereOptimum,
}

/// Searches projective measurements on `B` of [`holevo_locking_state`] for the smallest
/// measured conditional entropy of `Z^A`.
pub fn locking_search(grid: usize) -> Result<LockingReport> {
    let rho = holevo_locking_state().density();
    let z = computational_basis(4);
    let quantum = rho.dephase("A", &z)?.cond_entropy(&["A"], &["B"])?;
    let b = SystemLabel::qubit("B");
    let optimum = minimize_on_sphere(grid, |t, p| {
        let m = Povm::projective(b.clone(), &bloch_basis(t, p))?;
        measured_cond_entropy(&rho, "A", &z, &m)
    })?;
    Ok(LockingReport {
        quantum_cond_entropy: quantum,
        min_measured_cond_entropy: optimum.value,
        accessible_information: 2.0 - optimum.value,
        optimum,
    })
}

/// Probability that a qubit prepared in `psi` yields `+1` for an observable chosen uniformly
/// from `Z` and `X`.
pub fn guessing_game_value(psi: &CVec) -> f64 {
    let z = computational_basis(2);
    let x = fourier_basis(2);
    let pz = psi.dotc(&z[0]).norm_sqr();
    let px = psi.dotc(&x[0]).norm_sqr();
    0.5 * (pz + px) / psi.norm_squared()
}

/// Best value of [`guessing_game_value`] over pure qubit states.
pub fn guessing_game_best(grid: usize) -> Result<SphereOptimum> {
    let o = minimize_on_sphere(grid, |t, p| Ok(-guessing_game_value(&bloch_ket(t, p))))?;
    Ok(SphereOptimum {
        value: -o.value,
        ..o
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bloch_basis_is_orthonormal() {
        let [u, d] = bloch_basis(1.1, 2.3);
        assert!(u.dotc(&d).norm() < 1e-15);
        assert!((d.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn quantum_locking_entropy_is_one() {
        let rho = holevo_locking_state()
            .density()
            .dephase("A", &computational_basis(4))
            .unwrap();
        assert!((rho.cond_entropy(&["A"], &["B"]).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn z_measurement_on_locking_state() {
        // Z outcome 0 arises from t=0 always and from t=2,3 half the time: H(T|M) = 1.5.
        let rho = holevo_locking_state().density();
        let m = Povm::projective(SystemLabel::qubit("B"), &computational_basis(2)).unwrap();
        let h = measured_cond_entropy(&rho, "A", &computational_basis(4), &m).unwrap();
        assert!((h - 1.5).abs() < 1e-12);
    }

    #[test]
    fn guessing_game_at_pi_over_8() {
        let psi = bloch_ket(core::f64::consts::FRAC_PI_4, 0.0);
        let expect = 0.5 + 0.5 * core::f64::consts::FRAC_1_SQRT_2;
        assert!((guessing_game_value(&psi) - expect).abs() < 1e-14);
    }
}
