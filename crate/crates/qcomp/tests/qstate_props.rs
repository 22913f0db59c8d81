//! Property tests for states, distances, entropies and measurements.

use proptest::prelude::*;
use qcomp::gf2::seeded_rng;
use qcomp::qstate::{
    bloch_basis, computational_basis, cond_entropy, entropy, eye, max_abs, p_guess, p_secure,
    partial_trace, pgm, trace_distance, DensityMatrix, Povm, SystemLabel,
};

fn labels(da: usize, db: usize) -> Vec<SystemLabel> {
    vec![
        SystemLabel::new("A", da).unwrap(),
        SystemLabel::new("B", db).unwrap(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn trace_distance_contracts(seed in any::<u64>(), da in 2usize..4, db in 1usize..4, rank in 1usize..5) {
        let mut rng = seeded_rng(seed);
        let rho = DensityMatrix::random(labels(da, db), rank, &mut rng).unwrap();
        let sigma = DensityMatrix::random(labels(da, db), rank, &mut rng).unwrap();
        let full = trace_distance(&rho, &sigma).unwrap();
        let part = trace_distance(
            &partial_trace(&rho, &["A"]).unwrap(),
            &partial_trace(&sigma, &["A"]).unwrap(),
        )
        .unwrap();
        prop_assert!(part <= full + 1e-12);
        let z = computational_basis(da);
        let measured = trace_distance(
            &rho.dephase("A", &z).unwrap(),
            &sigma.dephase("A", &z).unwrap(),
        )
        .unwrap();
        prop_assert!(measured <= full + 1e-12);
    }

    #[test]
    fn entropy_is_additive_and_conditional_entropy_bounded(
        seed in any::<u64>(), da in 2usize..4, db in 1usize..4, ra in 1usize..4, rb in 1usize..4,
    ) {
        let mut rng = seeded_rng(seed);
        let a = DensityMatrix::random(vec![SystemLabel::new("A", da).unwrap()], ra, &mut rng).unwrap();
        let b = DensityMatrix::random(vec![SystemLabel::new("B", db).unwrap()], rb, &mut rng).unwrap();
        let ab = a.tensor(&b).unwrap();
        prop_assert!((entropy(&ab) - entropy(&a) - entropy(&b)).abs() < 1e-9);
        let rho = DensityMatrix::random(labels(da, db), ra * rb, &mut rng).unwrap();
        let h = cond_entropy(&rho, &["A"], &["B"]).unwrap();
        let log_da = (da as f64).log2();
        prop_assert!(h >= -log_da - 1e-9 && h <= log_da + 1e-9);
    }

    #[test]
    fn pgm_is_complete(seed in any::<u64>(), d in 2usize..5, k in 2usize..5, rank in 1usize..4) {
        let mut rng = seeded_rng(seed);
        let lab = vec![SystemLabel::new("B", d).unwrap()];
        let w: Vec<f64> = (0..k).map(|i| 1.0 + i as f64).collect();
        let total: f64 = w.iter().sum();
        let ens: Vec<(f64, DensityMatrix)> = w
            .iter()
            .map(|x| (x / total, DensityMatrix::random(lab.clone(), rank, &mut rng).unwrap()))
            .collect();
        let m = pgm(&ens).unwrap();
        let mut sum = qcomp::qstate::CMat::zeros(d, d);
        for e in m.elements() {
            sum += e;
        }
        prop_assert!(max_abs(&(sum - eye(d))) < 1e-9);
    }

    #[test]
    fn security_limits_every_guess(seed in any::<u64>(), theta in 0.0f64..3.2, phi in 0.0f64..6.3) {
        // Classical A in Z, quantum E: p_secure ≥ 1 - ε bounds every guess by 1/2 + 2ε.
        let mut rng = seeded_rng(seed);
        let z = computational_basis(2);
        let rho = DensityMatrix::random(
            vec![SystemLabel::qubit("A"), SystemLabel::qubit("E")],
            3,
            &mut rng,
        )
        .unwrap()
        .dephase("A", &z)
        .unwrap();
        let eps = 1.0 - p_secure(&rho, "A", &z).unwrap();
        let m = Povm::projective(SystemLabel::qubit("E"), &bloch_basis(theta, phi)).unwrap();
        let g = p_guess(&rho, "A", &z, &m).unwrap();
        prop_assert!(g <= 0.5 + 2.0 * eps + 1e-9, "guess {} with ε {}", g, eps);
    }
}
