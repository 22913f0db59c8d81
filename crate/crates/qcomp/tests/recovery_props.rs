//! Property tests for entanglement recovery and teleportation.

use proptest::prelude::*;
use qcomp::gf2::seeded_rng;
use qcomp::qstate::{
    computational_basis, fourier_basis, CVec, Povm, StateVector, SystemLabel, C64,
};
use qcomp::recovery::{
    recover_theorem1, recover_theorem2, recover_theorem3, recovery_labels, teleport_branches,
    vector_fidelity, B,
};

/// `|Φ⟩^{AB}|0⟩^E + t·v` for a random `v` on `A B E`, normalized.
fn noisy_epr(seed: u64, t: f64, de: usize) -> StateVector {
    let labels = recovery_labels(2, de);
    let mut rng = seeded_rng(seed);
    let v = StateVector::random(labels.clone(), &mut rng).unwrap();
    let mut amps = v.amplitudes() * C64::new(t, 0.0);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    amps[0] += C64::new(r, 0.0);
    amps[3 * de] += C64::new(r, 0.0);
    StateVector::from_unnormalized(labels, amps).unwrap()
}

fn proj(basis: &[CVec]) -> Povm {
    Povm::projective(SystemLabel::new(B, 2).unwrap(), basis).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn recovery_respects_the_bound(seed in any::<u64>(), t in 0.0f64..0.6, de in 1usize..3) {
        let psi = noisy_epr(seed, t, de);
        let reports = [
            recover_theorem1(&psi, &proj(&computational_basis(2)), &proj(&fourier_basis(2))).unwrap(),
            recover_theorem2(&psi, &proj(&computational_basis(2))).unwrap(),
            recover_theorem3(&psi).unwrap(),
        ];
        for r in &reports {
            if r.certified {
                prop_assert!(r.within_bound(1e-8), "{} > {}", r.trace_dist, r.bound);
                prop_assert!(r.transfer_dist <= r.bound + 1e-8);
            }
        }
    }

    #[test]
    fn teleportation_is_exact_on_every_branch(seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        let chi = StateVector::random(vec![SystemLabel::qubit("S")], &mut rng).unwrap();
        for b in teleport_branches(chi.amplitudes()).unwrap() {
            prop_assert!((b.probability - 0.25).abs() < 1e-12);
            prop_assert!((vector_fidelity(&b.output, chi.amplitudes()) - 1.0).abs() < 1e-10);
        }
    }
}
