//! Property tests for stabilizer codes and maximum-likelihood decoding.

use proptest::prelude::*;
use qcomp::distill::BellDiagonalParams;
use qcomp::gf2::F2Vec;
use qcomp::pauli::{
    code_by_name, commutes, decode_ml, syndromes_of, CssCode, PauliOp, DEFAULT_N_MAX,
};

fn code() -> impl Strategy<Value = CssCode> {
    prop_oneof![Just("rep3"), Just("shor9")].prop_map(|n| code_by_name(n).unwrap())
}

fn subset_product(code: &CssCode, mask: u32) -> PauliOp {
    code.stabilizers()
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .fold(PauliOp::identity(code.n()), |acc, (_, s)| acc.compose(s))
}

fn noise() -> impl Strategy<Value = BellDiagonalParams> {
    proptest::array::uniform4(0.01f64..1.0).prop_map(|w| {
        let t: f64 = w.iter().sum();
        let (a, b, c) = (w[0] / t, w[1] / t, w[2] / t);
        BellDiagonalParams::new(a, b, c, 1.0 - a - b - c).unwrap()
    })
}

proptest! {
    #[test]
    fn stabilizer_group_elements_have_zero_syndrome(c in code(), mask in any::<u32>()) {
        let s = subset_product(&c, mask);
        let (s_z, s_x) = syndromes_of(&c, &s).unwrap();
        prop_assert!(s_z.is_zero() && s_x.is_zero());
        prop_assert!(c.in_stabilizer_group(&s));
    }

    #[test]
    fn logicals_commute_with_stabilizers(c in code(), mask in any::<u32>()) {
        let s = subset_product(&c, mask);
        for (zb, xb) in c.logicals() {
            prop_assert!(commutes(zb, &s).unwrap());
            prop_assert!(commutes(xb, &s).unwrap());
            prop_assert!(!commutes(zb, xb).unwrap());
        }
    }

    #[test]
    fn decode_ml_matches_the_syndrome(
        c in code(),
        xm in any::<u64>(),
        zm in any::<u64>(),
        p in noise(),
    ) {
        let n = c.n();
        let mask = (1u64 << n) - 1;
        let e = PauliOp::new(F2Vec::from_mask(xm & mask, n), F2Vec::from_mask(zm & mask, n), 0)
            .unwrap();
        let (s_z, s_x) = syndromes_of(&c, &e).unwrap();
        let r = decode_ml(&c, &s_z, &s_x, &p, DEFAULT_N_MAX).unwrap();
        prop_assert_eq!(syndromes_of(&c, &r).unwrap(), (s_z, s_x));
    }
}
