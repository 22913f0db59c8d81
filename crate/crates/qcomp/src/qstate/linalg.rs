//! Dense complex matrix helpers built on `nalgebra`.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::math::{neg_xlog2x, sqrt};

/// Complex double.
pub type C64 = Complex<f64>;
/// Dense complex matrix.
pub type CMat = DMatrix<C64>;
/// Dense complex column vector.
pub type CVec = DVector<C64>;

pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub(crate) fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Conjugate transpose.
pub fn dagger(m: &CMat) -> CMat {
    m.adjoint()
}

/// `(m + m†)/2`.
pub fn hermitize(m: &CMat) -> CMat {
    (m + m.adjoint()) * cr(0.5)
}

/// Largest entrywise modulus of `m - m†`.
pub fn hermiticity_defect(m: &CMat) -> f64 {
    let d = m - m.adjoint();
    d.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Eigenvalues of the Hermitian part of `m`, unsorted.
pub fn eigvalsh(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    hermitize(m)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect()
}

/// Eigen-decomposition of the Hermitian part of `m`: values and column eigenvectors.
pub fn eigh(m: &CMat) -> (Vec<f64>, CMat) {
    let e = nalgebra::SymmetricEigen::new(hermitize(m));
    (e.eigenvalues.iter().copied().collect(), e.eigenvectors)
}

/// Applies `f` to the spectrum of the Hermitian part of `m`.
pub fn hermitian_fn(m: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let (vals, vecs) = eigh(m);
    let d = CMat::from_diagonal(&DVector::from_iterator(
        vals.len(),
        vals.iter().map(|&v| cr(f(v))),
    ));
    &vecs * d * vecs.adjoint()
}

/// Square root of a positive semidefinite matrix; negative eigenvalues are clipped to zero.
pub fn psd_sqrt(m: &CMat) -> CMat {
    hermitian_fn(m, |v| if v > 0.0 { sqrt(v) } else { 0.0 })
}

/// Pseudo-inverse square root with eigenvalue cutoff.
pub fn psd_inv_sqrt(m: &CMat, cutoff: f64) -> CMat {
    hermitian_fn(m, |v| if v > cutoff { 1.0 / sqrt(v) } else { 0.0 })
}

/// Projector onto the span of eigenvectors with eigenvalue above `cutoff`.
pub fn support_projector(m: &CMat, cutoff: f64) -> CMat {
    hermitian_fn(m, |v| if v > cutoff { 1.0 } else { 0.0 })
}

/// Von Neumann entropy in bits of the spectrum of `m` (need not have unit trace).
pub fn entropy_of(m: &CMat) -> f64 {
    eigvalsh(m).into_iter().map(neg_xlog2x).sum()
}

/// Trace norm of the Hermitian part of `m`.
pub fn trace_norm_hermitian(m: &CMat) -> f64 {
    eigvalsh(m).into_iter().map(f64::abs).sum()
}

/// Real part of the trace.
pub fn trace_re(m: &CMat) -> f64 {
    m.trace().re
}

/// `Tr[a b]` without forming the product.
pub fn trace_product(a: &CMat, b: &CMat) -> C64 {
    let mut t = C64::new(0.0, 0.0);
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            t += a[(i, k)] * b[(k, i)];
        }
    }
    t
}

/// Kronecker product.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Identity of dimension `d`.
pub fn eye(d: usize) -> CMat {
    CMat::identity(d, d)
}

/// Rank-one projector `|v⟩⟨v|`.
pub fn projector(v: &CVec) -> CMat {
    v * v.adjoint()
}

/// Computational basis vector `|k⟩` in dimension `d`.
pub fn ket(d: usize, k: usize) -> CVec {
    let mut v = CVec::zeros(d);
    v[k] = cr(1.0);
    v
}

/// Computational basis of dimension `d`.
pub fn computational_basis(d: usize) -> Vec<CVec> {
    (0..d).map(|k| ket(d, k)).collect()
}

/// Fourier basis `|k̃⟩ = d^{-1/2} Σ_j e^{2πijk/d}|j⟩`, eigenbasis of the shift operator.
pub fn fourier_basis(d: usize) -> Vec<CVec> {
    let norm = 1.0 / sqrt(d as f64);
    (0..d)
        .map(|k| {
            CVec::from_iterator(
                d,
                (0..d).map(|j| {
                    let theta = 2.0 * core::f64::consts::PI * ((j * k) % d) as f64 / d as f64;
                    c(
                        norm * crate::math::cos(theta),
                        norm * crate::math::sin(theta),
                    )
                }),
            )
        })
        .collect()
}

/// Smallest eigenvalue of the Hermitian part, or 0 for an empty matrix.
pub fn min_eigenvalue(m: &CMat) -> f64 {
    let v = eigvalsh(m);
    if v.is_empty() {
        return 0.0;
    }
    v.into_iter().fold(f64::INFINITY, f64::min)
}

/// Largest entrywise modulus.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Orthonormal columns completing `cols` (orthonormal, `d × r`) to a basis of dimension `d`.
pub fn orthonormal_complement(cols: &CMat, d: usize) -> CMat {
    let mut basis: Vec<CVec> = (0..cols.ncols())
        .map(|j| cols.column(j).into_owned())
        .collect();
    let start = basis.len();
    for k in 0..d {
        if basis.len() == d {
            break;
        }
        let mut v = ket(d, k);
        for _ in 0..2 {
            for b in &basis {
                let ov = b.dotc(&v);
                v -= b * ov;
            }
        }
        let nrm = v.norm();
        if nrm > 1e-8 {
            basis.push(v / cr(nrm));
        }
    }
    let extra = &basis[start..];
    CMat::from_fn(d, extra.len(), |i, j| extra[j][i])
}
