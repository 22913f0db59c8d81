//! Property tests for the entropic uncertainty relations.

use proptest::prelude::*;
use qcomp::gf2::seeded_rng;
use qcomp::qstate::{eigh, entropy, CVec, DensityMatrix, StateVector, SystemLabel};
use qcomp::uncert::{
    check_berta, check_maassen_uffink, check_tripartite_pure, overlap_c, ObservablePair,
};

fn a(d: usize) -> SystemLabel {
    SystemLabel::new("A", d).unwrap()
}

/// Eigenbasis of a random Hermitian matrix, used as a generic second observable.
fn random_basis(d: usize, seed: u64) -> Vec<CVec> {
    let mut rng = seeded_rng(seed);
    let h = DensityMatrix::random(vec![a(d)], d, &mut rng).unwrap();
    let (_, vecs) = eigh(h.matrix());
    (0..d).map(|i| vecs.column(i).into_owned()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn maassen_uffink_holds(seed in any::<u64>(), d in 2usize..5, rank in 1usize..5, generic: bool) {
        let mut rng = seeded_rng(seed);
        let rho = DensityMatrix::random(vec![a(d)], rank, &mut rng).unwrap();
        let w = ObservablePair::weyl(d).unwrap();
        let pair = if generic {
            ObservablePair::new(w.basis1().to_vec(), random_basis(d, seed ^ 1)).unwrap()
        } else {
            w
        };
        prop_assert!(check_maassen_uffink(&rho, &pair).unwrap().holds());
    }

    #[test]
    fn berta_holds(seed in any::<u64>(), d in 2usize..4, db in 1usize..4, rank in 1usize..5) {
        let mut rng = seeded_rng(seed);
        let rho = DensityMatrix::random(vec![a(d), SystemLabel::new("B", db).unwrap()], rank, &mut rng)
            .unwrap();
        let pair = ObservablePair::weyl(d).unwrap();
        prop_assert!(check_berta(&rho, "A", &pair).unwrap().holds());
    }

    #[test]
    fn tripartite_holds(seed in any::<u64>(), d in 2usize..4, db in 1usize..4, dc in 1usize..4) {
        let mut rng = seeded_rng(seed);
        let labels = vec![a(d), SystemLabel::new("B", db).unwrap(), SystemLabel::new("C", dc).unwrap()];
        let psi = StateVector::random(labels, &mut rng).unwrap();
        let pair = ObservablePair::weyl(d).unwrap();
        prop_assert!(check_tripartite_pure(&psi, "A", "B", "C", &pair).unwrap().holds());
    }

    #[test]
    fn trivial_memory_reduces_berta_to_maassen_uffink(seed in any::<u64>(), d in 2usize..5, rank in 1usize..4) {
        let mut rng = seeded_rng(seed);
        let pair = ObservablePair::weyl(d).unwrap();
        let rho_a = DensityMatrix::random(vec![a(d)], rank, &mut rng).unwrap();
        let one = DensityMatrix::random(vec![SystemLabel::new("B", 1).unwrap()], 1, &mut rng).unwrap();
        let mu = check_maassen_uffink(&rho_a, &pair).unwrap();
        let berta = check_berta(&rho_a.tensor(&one).unwrap(), "A", &pair).unwrap();
        // Equal for pure A; for mixed A the Berta bound is larger by H(A).
        prop_assert!((mu.slack - berta.slack - entropy(&rho_a)).abs() < 1e-9);
    }

    #[test]
    fn overlap_is_symmetric(seed in any::<u64>(), d in 2usize..5) {
        let pair = ObservablePair::new(random_basis(d, seed), random_basis(d, seed ^ 7)).unwrap();
        prop_assert!((overlap_c(&pair) - overlap_c(&pair.swapped())).abs() < 1e-15);
        let c = overlap_c(&pair);
        prop_assert!(c >= 1.0 / d as f64 - 1e-12 && c <= 1.0 + 1e-12);
    }
}
