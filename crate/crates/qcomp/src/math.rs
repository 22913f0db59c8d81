//! Scalar helpers shared across modules. Logarithms are base 2.

use num_traits::Float;

/// Eigenvalues or probabilities at or below this are treated as zero in `x log x`.
pub(crate) const ZERO_CUTOFF: f64 = 1e-12;

/// `-x log₂ x`, zero at and below the cutoff.
pub(crate) fn neg_xlog2x(x: f64) -> f64 {
    if x <= ZERO_CUTOFF {
        0.0
    } else {
        -x * Float::log2(x)
    }
}

/// Binary entropy `h₂(p)` in bits.
pub fn binary_entropy(p: f64) -> f64 {
    neg_xlog2x(p) + neg_xlog2x(1.0 - p)
}

/// Shannon entropy in bits of a (not necessarily normalized) weight vector's entries.
pub fn shannon_entropy(p: &[f64]) -> f64 {
    p.iter().map(|&x| neg_xlog2x(x)).sum()
}

pub(crate) fn sqrt(x: f64) -> f64 {
    Float::sqrt(x)
}

pub(crate) fn ln(x: f64) -> f64 {
    Float::ln(x)
}

pub(crate) fn abs(x: f64) -> f64 {
    Float::abs(x)
}

pub(crate) fn cos(x: f64) -> f64 {
    Float::cos(x)
}

pub(crate) fn sin(x: f64) -> f64 {
    Float::sin(x)
}

pub(crate) fn acos(x: f64) -> f64 {
    Float::acos(x)
}

pub(crate) fn log2(x: f64) -> f64 {
    Float::log2(x)
}

pub(crate) fn powi(x: f64, n: i32) -> f64 {
    Float::powi(x, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_entropy_values() {
        assert_eq!(binary_entropy(0.0), 0.0);
        assert!((binary_entropy(0.5) - 1.0).abs() < 1e-15);
        assert!((binary_entropy(0.11) - 0.4999_6).abs() < 1e-4);
    }
}
