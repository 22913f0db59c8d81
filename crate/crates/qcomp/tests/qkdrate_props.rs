//! Property tests for key rates and thresholds.

use proptest::prelude::*;
use qcomp::binary_entropy;
use qcomp::qkdrate::{
    bell_params, optimized_threshold, oracle_rate_smallm, rate, threshold, KeyRateModel, Protocol,
    THRESHOLD_TOL,
};

fn protocol() -> impl Strategy<Value = Protocol> {
    prop_oneof![
        Just(Protocol::Bb84),
        Just(Protocol::SixState),
        Just(Protocol::Tetrahedral)
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn amplitude_error_equals_delta(p in protocol(), delta in 0.0f64..0.5) {
        let b = bell_params(p, delta).unwrap();
        prop_assert!((b.p10 + b.p11 - delta).abs() < 1e-15);
    }

    #[test]
    fn plain_rate_decreases_up_to_past_threshold(p in protocol(), u in 0.0f64..1.0, v in 0.0f64..1.0) {
        let model = KeyRateModel::plain(p);
        let hi = threshold(&model, THRESHOLD_TOL).unwrap().delta_star + 0.05;
        let (d1, d2) = (u.min(v) * hi, u.max(v) * hi);
        prop_assume!(d2 - d1 > 1e-6);
        prop_assert!(rate(&model, d1).unwrap() > rate(&model, d2).unwrap());
    }

    #[test]
    fn preprocessed_rate_is_at_most_one(p in protocol(), q in 0.0f64..0.5, delta in 0.0f64..0.2) {
        let model = KeyRateModel::new(p, q, 1).unwrap();
        prop_assert!(rate(&model, delta).unwrap() <= 1.0 + 1e-12);
        // With no channel noise Eve learns nothing; Bob's loss is h(q).
        prop_assert!((rate(&model, 0.0).unwrap() - (1.0 - binary_entropy(q))).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn sector_rate_matches_the_oracle(p in protocol(), q in 0.0f64..0.5, delta in 0.0f64..0.2, m in 1usize..4) {
        let model = KeyRateModel::new(p, q, m).unwrap();
        let fast = rate(&model, delta).unwrap();
        let slow = oracle_rate_smallm(&model, delta).unwrap();
        prop_assert!((fast - slow).abs() < 1e-8, "{} vs {}", fast, slow);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn blocks_never_lower_the_optimized_threshold(m in 2usize..7) {
        let base = optimized_threshold(&KeyRateModel::plain(Protocol::Bb84), THRESHOLD_TOL).unwrap();
        let model = KeyRateModel::new(Protocol::Bb84, 0.0, m).unwrap();
        let t = optimized_threshold(&model, THRESHOLD_TOL).unwrap();
        prop_assert!(t.delta_star >= base.delta_star - 1e-4);
    }
}
