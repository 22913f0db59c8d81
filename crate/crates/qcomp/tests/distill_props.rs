//! Property tests for merging rates, reconciliation, duality and distillation.

use proptest::prelude::*;
use qcomp::distill::{
    duality_check, merging_rates, mutual_info_pure, reconcile, simulate_distillation,
    BellDiagonalParams,
};
use qcomp::gf2::{sample_css_hash, seeded_rng};
use qcomp::qstate::{DensityMatrix, StateVector, SystemLabel, C64};

fn qubit_labels(prefix: &str, n: usize) -> Vec<SystemLabel> {
    (0..n)
        .map(|i| SystemLabel::qubit(&format!("{prefix}{i}")))
        .collect()
}

/// Binary-symmetric ensemble: z uniform, B holds z flipped with probability `f`.
fn flip_ensemble(f: f64) -> Vec<(f64, DensityMatrix)> {
    let b = vec![SystemLabel::qubit("B")];
    let diag = |p0: f64| {
        let mut m = qcomp::qstate::CMat::zeros(2, 2);
        m[(0, 0)] = C64::new(p0, 0.0);
        m[(1, 1)] = C64::new(1.0 - p0, 0.0);
        DensityMatrix::new(b.clone(), m).unwrap()
    };
    vec![(0.5, diag(1.0 - f)), (0.5, diag(f))]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn merging_costs_are_purification_invariant(seed in any::<u64>(), da in 2usize..4, db in 1usize..4, de in 1usize..4) {
        let mut rng = seeded_rng(seed);
        let labels = vec![
            SystemLabel::new("A", da).unwrap(),
            SystemLabel::new("B", db).unwrap(),
            SystemLabel::new("R", de).unwrap(),
        ];
        let psi = StateVector::random(labels, &mut rng).unwrap();
        let rates = merging_rates(&psi.marginal(&["A", "B"]).unwrap()).unwrap();
        prop_assert!((rates.q_cost + rates.distill_rate).abs() < 1e-12);
        // Same I(A:E) from an independently chosen purification.
        prop_assert!((rates.c_cost - mutual_info_pure(&psi, "A", "R").unwrap()).abs() < 1e-8);
    }

    #[test]
    fn reconcile_error_does_not_grow_with_nested_hashes(seed in any::<u64>(), f in 0.02f64..0.3) {
        let ens = flip_ensemble(f);
        let n = 6;
        let errs: Vec<f64> = (0..=n).map(|k| reconcile(&ens, n, k, 20, seed).unwrap()).collect();
        for w in errs.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-9, "{:?}", errs);
        }
    }

    #[test]
    fn duality_bound_holds(seed in any::<u64>(), n in 1usize..4, db in 1usize..3, de in 1usize..3, rows in 0usize..3) {
        let rows = rows.min(n);
        let mut labels = qubit_labels("A", n);
        labels.push(SystemLabel::new("B", db).unwrap());
        labels.push(SystemLabel::new("E", de).unwrap());
        let mut rng = seeded_rng(seed);
        let psi = StateVector::random(labels, &mut rng).unwrap();
        let (h_z, _) = sample_css_hash(n, rows, 0, seed).unwrap();
        let names: Vec<String> = (0..n).map(|i| format!("A{i}")).collect();
        let a: Vec<&str> = names.iter().map(String::as_str).collect();
        let r = duality_check(&psi, &a, &["B"], &h_z).unwrap();
        prop_assert!(r.phase_security >= 1.0 - (2.0 * r.ir_error).sqrt() - 1e-8, "{:?}", r);
        prop_assert!(r.bound_holds);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn distillation_failure_falls_with_block_length(seed in 0u64..1_000_000) {
        // Rate fixed 0.2 below the hashing bound of (0.9, 0, 0.1, 0), averaged over 4 seeds.
        let p = BellDiagonalParams::new(0.9, 0.0, 0.1, 0.0).unwrap();
        let h = qcomp::binary_entropy(0.1);
        let mean = |n: usize| {
            let n_z = ((n as f64) * (h + 0.2)).round() as usize;
            (0..4)
                .map(|s| simulate_distillation(&p, n, n_z, 0, 400, seed * 4 + s).unwrap().logical_error_rate)
                .sum::<f64>()
                / 4.0
        };
        let (e6, e18) = (mean(6), mean(18));
        prop_assert!(e18 < e6, "{} !< {}", e18, e6);
    }
}
