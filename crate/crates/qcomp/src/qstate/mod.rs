//! Exact dense states on labeled tensor factors.
//!
//! Composite indices are row-major: the first label is the most significant digit. Every
//! operation addresses systems by name, so callers never permute tensor factors by hand.
//! Entropies are in bits.

mod linalg;
mod measure;

pub use linalg::*;
pub use measure::*;

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::math::sqrt;
use crate::{Error, Result};

/// Largest total Hilbert-space dimension accepted by [`StateVector`] and [`DensityMatrix`].
pub const MAX_DIM: usize = 4096;
/// Tolerance on `‖ρ - ρ†‖`, negative eigenvalues, trace and vector norms.
pub const STATE_TOL: f64 = 1e-10;
/// Tolerance on POVM completeness and isometry columns.
pub const OPERATOR_TOL: f64 = 1e-9;
/// Eigenvalue cutoff for pseudo-inverses.
pub const PINV_CUTOFF: f64 = 1e-12;

/// A named tensor factor.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SystemLabel {
    pub name: String,
    pub dim: usize,
}

impl SystemLabel {
    /// A factor of dimension `dim ≥ 1`.
    pub fn new(name: &str, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput(format!(
                "system {name:?} has dimension 0"
            )));
        }
        Ok(Self {
            name: name.to_string(),
            dim,
        })
    }

    /// A qubit factor.
    pub fn qubit(name: &str) -> Self {
        Self {
            name: name.to_string(),
            dim: 2,
        }
    }
}

/// Shorthand for a list of qubit labels.
pub fn qubits(names: &[&str]) -> Vec<SystemLabel> {
    names.iter().map(|n| SystemLabel::qubit(n)).collect()
}

fn check_labels(labels: &[SystemLabel]) -> Result<usize> {
    let mut total: usize = 1;
    for (i, l) in labels.iter().enumerate() {
        if l.dim == 0 {
            return Err(Error::InvalidInput(format!(
                "system {:?} has dimension 0",
                l.name
            )));
        }
        if labels[..i].iter().any(|m| m.name == l.name) {
            return Err(Error::InvalidInput(format!(
                "duplicate system label {:?}",
                l.name
            )));
        }
        total = total
            .checked_mul(l.dim)
            .filter(|&t| t <= MAX_DIM)
            .ok_or_else(|| Error::Capability(format!("total dimension exceeds {MAX_DIM}")))?;
    }
    Ok(total)
}

fn dims_of(labels: &[SystemLabel]) -> Vec<usize> {
    labels.iter().map(|l| l.dim).collect()
}

fn product(dims: &[usize]) -> usize {
    dims.iter().product()
}

fn position(labels: &[SystemLabel], name: &str) -> Result<usize> {
    labels
        .iter()
        .position(|l| l.name == name)
        .ok_or_else(|| Error::UnknownLabel(name.to_string()))
}

fn positions(labels: &[SystemLabel], names: &[&str]) -> Result<Vec<usize>> {
    let mut out = Vec::with_capacity(names.len());
    for n in names {
        let p = position(labels, n)?;
        if out.contains(&p) {
            return Err(Error::InvalidInput(format!("system {n:?} listed twice")));
        }
        out.push(p);
    }
    Ok(out)
}

/// Flat-index map for a permutation: `map[new] = old` where `order[k]` is the old position of
/// the new k-th factor.
fn permutation_map(dims: &[usize], order: &[usize]) -> Vec<usize> {
    let n = dims.len();
    let mut old_stride = vec![1usize; n];
    for k in (0..n.saturating_sub(1)).rev() {
        old_stride[k] = old_stride[k + 1] * dims[k + 1];
    }
    let new_dims: Vec<usize> = order.iter().map(|&o| dims[o]).collect();
    let total = product(dims);
    let mut map = Vec::with_capacity(total);
    let mut digits = vec![0usize; n];
    for _ in 0..total {
        map.push(
            digits
                .iter()
                .zip(order)
                .map(|(&d, &o)| d * old_stride[o])
                .sum(),
        );
        for k in (0..n).rev() {
            digits[k] += 1;
            if digits[k] < new_dims[k] {
                break;
            }
            digits[k] = 0;
        }
    }
    map
}

/// Order that moves `front` factors first (in the given order) and keeps the rest in place.
fn front_order(n: usize, front: &[usize]) -> Vec<usize> {
    let mut order = front.to_vec();
    order.extend((0..n).filter(|i| !front.contains(i)));
    order
}

/// A normalized pure state on labeled factors.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    labels: Vec<SystemLabel>,
    amps: CVec,
}

impl StateVector {
    /// Validates length and unit norm within [`STATE_TOL`].
    pub fn new(labels: Vec<SystemLabel>, amps: CVec) -> Result<Self> {
        let d = check_labels(&labels)?;
        if amps.len() != d {
            return Err(Error::Dimension(format!(
                "{} amplitudes for dimension {d}",
                amps.len()
            )));
        }
        if (amps.norm() - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidInput(format!(
                "state norm {} is not 1",
                amps.norm()
            )));
        }
        Ok(Self { labels, amps })
    }

    /// Normalizes `amps` first; fails on the zero vector.
    pub fn from_unnormalized(labels: Vec<SystemLabel>, amps: CVec) -> Result<Self> {
        let nrm = amps.norm();
        if nrm < 1e-300 {
            return Err(Error::InvalidInput(
                "cannot normalize the zero vector".into(),
            ));
        }
        Self::new(labels, amps / cr(nrm))
    }

    /// Real amplitudes, normalized.
    pub fn from_real(labels: Vec<SystemLabel>, amps: &[f64]) -> Result<Self> {
        Self::from_unnormalized(
            labels,
            CVec::from_iterator(amps.len(), amps.iter().map(|&a| cr(a))),
        )
    }

    /// Computational basis state with the given flat index.
    pub fn basis(labels: Vec<SystemLabel>, index: usize) -> Result<Self> {
        let d = check_labels(&labels)?;
        if index >= d {
            return Err(Error::InvalidInput(format!(
                "basis index {index} ≥ dimension {d}"
            )));
        }
        Ok(Self {
            labels,
            amps: ket(d, index),
        })
    }

    /// Haar-random pure state.
    pub fn random<R: Rng + ?Sized>(labels: Vec<SystemLabel>, rng: &mut R) -> Result<Self> {
        let d = check_labels(&labels)?;
        let amps = CVec::from_iterator(
            d,
            (0..d).map(|_| {
                c(
                    StandardNormal.sample(&mut *rng),
                    StandardNormal.sample(&mut *rng),
                )
            }),
        );
        Self::from_unnormalized(labels, amps)
    }

    pub fn labels(&self) -> &[SystemLabel] {
        &self.labels
    }

    pub fn amplitudes(&self) -> &CVec {
        &self.amps
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    /// Dimension of the named factor.
    pub fn dim_of(&self, name: &str) -> Result<usize> {
        Ok(self.labels[position(&self.labels, name)?].dim)
    }

    /// Tensor product; label names must stay unique.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().cloned());
        check_labels(&labels)?;
        Ok(Self {
            labels,
            amps: self.amps.kronecker(&other.amps),
        })
    }

    /// The same state with factors listed in `names` order (a permutation of all labels).
    pub fn reorder(&self, names: &[&str]) -> Result<Self> {
        if names.len() != self.labels.len() {
            return Err(Error::InvalidInput(
                "reorder needs every label exactly once".into(),
            ));
        }
        let order = positions(&self.labels, names)?;
        Ok(self.permuted(&order))
    }

    fn permuted(&self, order: &[usize]) -> Self {
        let map = permutation_map(&dims_of(&self.labels), order);
        let amps = CVec::from_iterator(map.len(), map.iter().map(|&o| self.amps[o]));
        let labels = order.iter().map(|&o| self.labels[o].clone()).collect();
        Self { labels, amps }
    }

    /// Amplitudes as a `d_front × d_rest` matrix after moving `front` factors first.
    fn split(&self, front: &[usize]) -> (Self, CMat) {
        let p = self.permuted(&front_order(self.labels.len(), front));
        let df: usize = front.iter().map(|&i| self.labels[i].dim).product();
        let dr = self.dim() / df;
        let m = CMat::from_fn(df, dr, |i, j| p.amps[i * dr + j]);
        (p, m)
    }

    /// Reduced state on `keep`, factors in the order given.
    pub fn marginal(&self, keep: &[&str]) -> Result<DensityMatrix> {
        let idx = positions(&self.labels, keep)?;
        let (_, m) = self.split(&idx);
        let labels = idx.iter().map(|&i| self.labels[i].clone()).collect();
        Ok(DensityMatrix {
            labels,
            mat: &m * m.adjoint(),
        })
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn density(&self) -> DensityMatrix {
        DensityMatrix {
            labels: self.labels.clone(),
            mat: projector(&self.amps),
        }
    }

    /// Von Neumann entropy of the reduced state on `names`.
    pub fn entropy_of(&self, names: &[&str]) -> Result<f64> {
        let idx = positions(&self.labels, names)?;
        if idx.is_empty() || idx.len() == self.labels.len() {
            return Ok(0.0);
        }
        let (_, m) = self.split(&idx);
        // Both marginals share a spectrum; diagonalize the smaller Gram matrix.
        let g = if m.nrows() <= m.ncols() {
            &m * m.adjoint()
        } else {
            m.adjoint() * &m
        };
        Ok(entropy_of(&g))
    }

    /// `H(target | given) = H(target ∪ given) - H(given)`.
    pub fn cond_entropy(&self, target: &[&str], given: &[&str]) -> Result<f64> {
        let mut both: Vec<&str> = target.to_vec();
        both.extend_from_slice(given);
        Ok(self.entropy_of(&both)? - self.entropy_of(given)?)
    }

    /// `⟨self|other⟩`, matching factors by name.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        let names: Vec<&str> = self.labels.iter().map(|l| l.name.as_str()).collect();
        let o = other.reorder(&names)?;
        if o.labels != self.labels {
            return Err(Error::Dimension("states live on different systems".into()));
        }
        Ok(self.amps.dotc(&o.amps))
    }

    /// Applies an isometry; its input factors are replaced by its output factors, appended last.
    pub fn apply(&self, iso: &Isometry) -> Result<Self> {
        let ins: Vec<&str> = iso.in_labels.iter().map(|l| l.name.as_str()).collect();
        let idx = positions(&self.labels, &ins)?;
        for (&i, l) in idx.iter().zip(&iso.in_labels) {
            if self.labels[i].dim != l.dim {
                return Err(Error::Dimension(format!(
                    "system {:?} has the wrong dimension",
                    l.name
                )));
            }
        }
        let rest: Vec<usize> = (0..self.labels.len())
            .filter(|i| !idx.contains(i))
            .collect();
        let mut order = rest.clone();
        order.extend(&idx);
        let p = self.permuted(&order);
        let din = iso.matrix.ncols();
        let dout = iso.matrix.nrows();
        let drest = self.dim() / din;
        let mut labels: Vec<SystemLabel> = rest.iter().map(|&i| self.labels[i].clone()).collect();
        labels.extend(iso.out_labels.iter().cloned());
        check_labels(&labels)?;
        let mut amps = CVec::zeros(drest * dout);
        for r in 0..drest {
            let block = p.amps.rows(r * din, din);
            let out = &iso.matrix * block;
            amps.rows_mut(r * dout, dout).copy_from(&out);
        }
        Ok(Self { labels, amps })
    }

    /// Applies a unitary on the named factors, keeping the factor order.
    pub fn apply_unitary(&self, u: &CMat, names: &[&str]) -> Result<Self> {
        let idx = positions(&self.labels, names)?;
        let labels: Vec<SystemLabel> = idx.iter().map(|&i| self.labels[i].clone()).collect();
        let iso = Isometry::new(labels.clone(), labels, u.clone())?;
        let out = self.apply(&iso)?;
        let order: Vec<&str> = self.labels.iter().map(|l| l.name.as_str()).collect();
        out.reorder(&order)
    }

    /// Unnormalized post-measurement vector `(⟨b| ⊗ I)|ψ⟩` on the remaining factors, where `b`
    /// lives on the named factors in the order given.
    pub fn project(&self, names: &[&str], b: &CVec) -> Result<(Vec<SystemLabel>, CVec)> {
        let idx = positions(&self.labels, names)?;
        let d: usize = idx.iter().map(|&i| self.labels[i].dim).product();
        if b.len() != d {
            return Err(Error::Dimension(format!(
                "vector of length {} does not fit {names:?}",
                b.len()
            )));
        }
        let (p, m) = self.split(&idx);
        let v = m.transpose() * b.conjugate();
        Ok((p.labels[idx.len()..].to_vec(), v))
    }

    /// Renames one factor.
    pub fn rename(&self, from: &str, to: &str) -> Result<Self> {
        let i = position(&self.labels, from)?;
        let mut labels = self.labels.clone();
        labels[i].name = to.to_string();
        check_labels(&labels)?;
        Ok(Self {
            labels,
            amps: self.amps.clone(),
        })
    }
}

/// A density operator on labeled factors.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    labels: Vec<SystemLabel>,
    mat: CMat,
}

impl DensityMatrix {
    /// Validates Hermiticity, positivity and unit trace within [`STATE_TOL`].
    pub fn new(labels: Vec<SystemLabel>, mat: CMat) -> Result<Self> {
        let d = check_labels(&labels)?;
        if mat.nrows() != d || mat.ncols() != d {
            return Err(Error::Dimension(format!(
                "{}x{} matrix for dimension {d}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        if hermiticity_defect(&mat) > STATE_TOL {
            return Err(Error::InvalidInput(
                "density matrix is not Hermitian".into(),
            ));
        }
        if min_eigenvalue(&mat) < -STATE_TOL {
            return Err(Error::InvalidInput(
                "density matrix is not positive semidefinite".into(),
            ));
        }
        if (trace_re(&mat) - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidInput(format!(
                "density matrix trace {} is not 1",
                trace_re(&mat)
            )));
        }
        Ok(Self { labels, mat })
    }

    /// Wraps a matrix produced by a trusted construction; only shapes are checked.
    #[allow(dead_code)]
    pub(crate) fn from_parts(labels: Vec<SystemLabel>, mat: CMat) -> Self {
        debug_assert_eq!(product(&dims_of(&labels)), mat.nrows());
        Self { labels, mat }
    }

    /// Maximally mixed state.
    pub fn maximally_mixed(labels: Vec<SystemLabel>) -> Result<Self> {
        let d = check_labels(&labels)?;
        Ok(Self {
            labels,
            mat: eye(d) * cr(1.0 / d as f64),
        })
    }

    /// Random mixed state: reduced state of a Haar-random pure state with an ancilla of `rank`.
    pub fn random<R: Rng + ?Sized>(
        labels: Vec<SystemLabel>,
        rank: usize,
        rng: &mut R,
    ) -> Result<Self> {
        let names: Vec<String> = labels.iter().map(|l| l.name.clone()).collect();
        let mut all = labels;
        let anc = unique_name(&all, "anc");
        all.push(SystemLabel::new(&anc, rank.max(1))?);
        let psi = StateVector::random(all, rng)?;
        let keep: Vec<&str> = names.iter().map(String::as_str).collect();
        psi.marginal(&keep)
    }

    /// Convex combination of states on identical labels.
    pub fn mixture(parts: &[(f64, DensityMatrix)]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidInput("empty mixture".into()))?;
        let mut mat = CMat::zeros(first.1.dim(), first.1.dim());
        for (p, rho) in parts {
            if rho.labels != first.1.labels {
                return Err(Error::Dimension(
                    "mixture components live on different systems".into(),
                ));
            }
            mat += &rho.mat * cr(*p);
        }
        Self::new(first.1.labels.clone(), mat)
    }

    pub fn labels(&self) -> &[SystemLabel] {
        &self.labels
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    /// Names of all factors in order.
    pub fn names(&self) -> Vec<&str> {
        self.labels.iter().map(|l| l.name.as_str()).collect()
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().cloned());
        check_labels(&labels)?;
        Ok(Self {
            labels,
            mat: kron(&self.mat, &other.mat),
        })
    }

    /// The same state with factors in `names` order.
    pub fn reorder(&self, names: &[&str]) -> Result<Self> {
        if names.len() != self.labels.len() {
            return Err(Error::InvalidInput(
                "reorder needs every label exactly once".into(),
            ));
        }
        let order = positions(&self.labels, names)?;
        Ok(self.permuted(&order))
    }

    fn permuted(&self, order: &[usize]) -> Self {
        let map = permutation_map(&dims_of(&self.labels), order);
        let d = map.len();
        let mat = CMat::from_fn(d, d, |i, j| self.mat[(map[i], map[j])]);
        let labels = order.iter().map(|&o| self.labels[o].clone()).collect();
        Self { labels, mat }
    }

    /// Reduced state on `keep`, factors in the order given.
    pub fn partial_trace(&self, keep: &[&str]) -> Result<Self> {
        let idx = positions(&self.labels, keep)?;
        let p = self.permuted(&front_order(self.labels.len(), &idx));
        let dk: usize = idx.iter().map(|&i| self.labels[i].dim).product();
        let dt = self.dim() / dk;
        let mut out = CMat::zeros(dk, dk);
        for i in 0..dk {
            for j in 0..dk {
                let mut s = cr(0.0);
                for t in 0..dt {
                    s += p.mat[(i * dt + t, j * dt + t)];
                }
                out[(i, j)] = s;
            }
        }
        let labels = idx.iter().map(|&i| self.labels[i].clone()).collect();
        Ok(Self { labels, mat: out })
    }

    /// Von Neumann entropy of the whole state.
    pub fn entropy(&self) -> f64 {
        entropy_of(&self.mat)
    }

    /// Entropy of the reduced state on `names`; zero for the empty set.
    pub fn entropy_of(&self, names: &[&str]) -> Result<f64> {
        if names.is_empty() {
            return Ok(0.0);
        }
        Ok(self.partial_trace(names)?.entropy())
    }

    /// `H(target | given) = H(target ∪ given) - H(given)`.
    pub fn cond_entropy(&self, target: &[&str], given: &[&str]) -> Result<f64> {
        if target.iter().any(|t| given.contains(t)) {
            return Err(Error::InvalidInput(
                "target and conditioning systems overlap".into(),
            ));
        }
        let mut both: Vec<&str> = target.to_vec();
        both.extend_from_slice(given);
        Ok(self.entropy_of(&both)? - self.entropy_of(given)?)
    }

    /// `I(a : b) = H(a) + H(b) - H(ab)`.
    pub fn mutual_info(&self, a: &[&str], b: &[&str]) -> Result<f64> {
        let mut both: Vec<&str> = a.to_vec();
        both.extend_from_slice(b);
        Ok(self.entropy_of(a)? + self.entropy_of(b)? - self.entropy_of(&both)?)
    }

    /// Conjugates by `(I ⊗ u)` with `u` acting on the named factors; factor order is kept.
    pub fn apply_unitary(&self, u: &CMat, names: &[&str]) -> Result<Self> {
        let idx = positions(&self.labels, names)?;
        let du: usize = idx.iter().map(|&i| self.labels[i].dim).product();
        if u.nrows() != du || u.ncols() != du {
            return Err(Error::Dimension(
                "unitary does not match the named systems".into(),
            ));
        }
        let order = front_order(self.labels.len(), &idx);
        let p = self.permuted(&order);
        let k = kron(u, &eye(self.dim() / du));
        let moved = Self {
            labels: p.labels,
            mat: &k * &p.mat * k.adjoint(),
        };
        let names_now: Vec<&str> = self.names();
        moved.reorder(&names_now)
    }

    /// `Σ_z (P_z ⊗ I) ρ (P_z ⊗ I)` for the projectors onto `basis` of factor `name`.
    pub fn dephase(&self, name: &str, basis: &[CVec]) -> Result<Self> {
        let i = position(&self.labels, name)?;
        check_basis(basis, self.labels[i].dim)?;
        let mut mat = CMat::zeros(self.dim(), self.dim());
        let rest = self.dim() / self.labels[i].dim;
        for b in basis {
            let pz = kron(&projector(b), &eye(rest));
            let p = self.permuted(&front_order(self.labels.len(), &[i]));
            let term = &pz * &p.mat * &pz;
            let back = Self {
                labels: p.labels,
                mat: term,
            };
            mat += back.reorder(&self.names())?.mat;
        }
        Ok(Self {
            labels: self.labels.clone(),
            mat,
        })
    }

    /// Unnormalized conditional states `(⟨b_z| ⊗ I) ρ (|b_z⟩ ⊗ I)` on the other factors, which
    /// are listed in `rest_order`.
    pub fn conditional_blocks(
        &self,
        name: &str,
        basis: &[CVec],
        rest_order: &[&str],
    ) -> Result<Vec<CMat>> {
        Ok(self.cq_blocks(name, basis, rest_order)?.0)
    }

    fn cq_blocks(
        &self,
        name: &str,
        basis: &[CVec],
        rest_order: &[&str],
    ) -> Result<(Vec<CMat>, f64)> {
        let i = position(&self.labels, name)?;
        let da = self.labels[i].dim;
        check_basis(basis, da)?;
        if rest_order.len() + 1 != self.labels.len() || rest_order.contains(&name) {
            return Err(Error::InvalidInput(
                "rest_order must list every other system once".into(),
            ));
        }
        let mut order = vec![i];
        order.extend(positions(&self.labels, rest_order)?);
        let p = self.permuted(&order);
        let dr = self.dim() / da;
        // V_z = ⟨b_z| ⊗ I as a dr × (da·dr) matrix.
        let vs: Vec<CMat> = basis
            .iter()
            .map(|b| kron(&CMat::from_fn(1, da, |_, j| b[j].conj()), &eye(dr)))
            .collect();
        let mut blocks = Vec::with_capacity(basis.len());
        let mut off = 0.0f64;
        for (z, vz) in vs.iter().enumerate() {
            let left = vz * &p.mat;
            blocks.push(&left * vz.adjoint());
            for vw in vs.iter().skip(z + 1) {
                off = off.max(max_abs(&(&left * vw.adjoint())));
            }
        }
        Ok((blocks, off))
    }

    /// Renames one factor.
    pub fn rename(&self, from: &str, to: &str) -> Result<Self> {
        let i = position(&self.labels, from)?;
        let mut labels = self.labels.clone();
        labels[i].name = to.to_string();
        check_labels(&labels)?;
        Ok(Self {
            labels,
            mat: self.mat.clone(),
        })
    }

    /// Applies an isometry to its input factors; outputs are appended after the other factors.
    pub fn apply(&self, iso: &Isometry) -> Result<Self> {
        let ins: Vec<&str> = iso.in_labels.iter().map(|l| l.name.as_str()).collect();
        let idx = positions(&self.labels, &ins)?;
        let rest: Vec<usize> = (0..self.labels.len())
            .filter(|i| !idx.contains(i))
            .collect();
        let mut order = rest.clone();
        order.extend(&idx);
        let p = self.permuted(&order);
        let drest = self.dim() / iso.matrix.ncols();
        let k = kron(&eye(drest), &iso.matrix);
        let mut labels: Vec<SystemLabel> = rest.iter().map(|&i| self.labels[i].clone()).collect();
        labels.extend(iso.out_labels.iter().cloned());
        check_labels(&labels)?;
        Ok(Self {
            labels,
            mat: &k * &p.mat * k.adjoint(),
        })
    }
}

fn unique_name(labels: &[SystemLabel], base: &str) -> String {
    let mut name = base.to_string();
    let mut k = 0;
    while labels.iter().any(|l| l.name == name) {
        k += 1;
        name = format!("{base}{k}");
    }
    name
}

fn check_basis(basis: &[CVec], d: usize) -> Result<()> {
    if basis.len() != d || basis.iter().any(|b| b.len() != d) {
        return Err(Error::Dimension(format!(
            "basis does not have {d} vectors of dimension {d}"
        )));
    }
    for (i, a) in basis.iter().enumerate() {
        for (j, b) in basis.iter().enumerate() {
            let expect = if i == j { 1.0 } else { 0.0 };
            if (a.dotc(b) - cr(expect)).norm() > STATE_TOL {
                return Err(Error::InvalidInput("basis is not orthonormal".into()));
            }
        }
    }
    Ok(())
}

/// A POVM on the named factors.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    labels: Vec<SystemLabel>,
    elements: Vec<CMat>,
}

impl Povm {
    /// Validates positivity and completeness within [`OPERATOR_TOL`].
    pub fn new(labels: Vec<SystemLabel>, elements: Vec<CMat>) -> Result<Self> {
        let d = check_labels(&labels)?;
        if elements.is_empty() {
            return Err(Error::InvalidInput("POVM has no elements".into()));
        }
        let mut sum = CMat::zeros(d, d);
        for e in &elements {
            if e.nrows() != d || e.ncols() != d {
                return Err(Error::Dimension("POVM element has the wrong size".into()));
            }
            if hermiticity_defect(e) > OPERATOR_TOL || min_eigenvalue(e) < -OPERATOR_TOL {
                return Err(Error::InvalidInput(
                    "POVM element is not positive semidefinite".into(),
                ));
            }
            sum += e;
        }
        if max_abs(&(sum - eye(d))) > OPERATOR_TOL {
            return Err(Error::InvalidInput(
                "POVM elements do not sum to the identity".into(),
            ));
        }
        Ok(Self { labels, elements })
    }

    /// Projective measurement in an orthonormal basis of a single factor.
    pub fn projective(label: SystemLabel, basis: &[CVec]) -> Result<Self> {
        check_basis(basis, label.dim)?;
        Self::new(vec![label], basis.iter().map(projector).collect())
    }

    /// The trivial measurement `{I/k, …, I/k}` with `k` outcomes.
    pub fn blind(labels: Vec<SystemLabel>, k: usize) -> Result<Self> {
        let d = check_labels(&labels)?;
        Self::new(labels, vec![eye(d) * cr(1.0 / k as f64); k])
    }

    pub fn labels(&self) -> &[SystemLabel] {
        &self.labels
    }

    pub fn elements(&self) -> &[CMat] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Names of the measured factors.
    pub fn names(&self) -> Vec<&str> {
        self.labels.iter().map(|l| l.name.as_str()).collect()
    }

    /// The same measurement on a renamed factor.
    pub fn rename(&self, from: &str, to: &str) -> Result<Self> {
        let i = position(&self.labels, from)?;
        let mut labels = self.labels.clone();
        labels[i].name = to.to_string();
        check_labels(&labels)?;
        Ok(Self {
            labels,
            elements: self.elements.clone(),
        })
    }
}

/// An isometry from `in_labels` to `out_labels`.
#[derive(Debug, Clone, PartialEq)]
pub struct Isometry {
    pub in_labels: Vec<SystemLabel>,
    pub out_labels: Vec<SystemLabel>,
    pub matrix: CMat,
}

impl Isometry {
    /// Validates `V†V = I` within [`OPERATOR_TOL`].
    pub fn new(
        in_labels: Vec<SystemLabel>,
        out_labels: Vec<SystemLabel>,
        matrix: CMat,
    ) -> Result<Self> {
        let din = product(&dims_of(&in_labels));
        let dout = product(&dims_of(&out_labels));
        if matrix.nrows() != dout || matrix.ncols() != din {
            return Err(Error::Dimension(format!(
                "{}x{} matrix for an isometry {din} → {dout}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if max_abs(&(matrix.adjoint() * &matrix - eye(din))) > OPERATOR_TOL {
            return Err(Error::InvalidInput("matrix is not an isometry".into()));
        }
        Ok(Self {
            in_labels,
            out_labels,
            matrix,
        })
    }

    /// `self` followed by `next`; the output labels of `self` must equal the inputs of `next`.
    pub fn then(&self, next: &Isometry) -> Result<Self> {
        if self.out_labels != next.in_labels {
            return Err(Error::Dimension("isometries do not compose".into()));
        }
        Self::new(
            self.in_labels.clone(),
            next.out_labels.clone(),
            &next.matrix * &self.matrix,
        )
    }

    /// Largest entry of `V†V - I`.
    pub fn isometry_defect(&self) -> f64 {
        max_abs(&(self.matrix.adjoint() * &self.matrix - eye(self.matrix.ncols())))
    }
}

/// Reduced state on `keep`.
pub fn partial_trace(rho: &DensityMatrix, keep: &[&str]) -> Result<DensityMatrix> {
    rho.partial_trace(keep)
}

/// Von Neumann entropy in bits.
pub fn entropy(rho: &DensityMatrix) -> f64 {
    rho.entropy()
}

/// `H(target | given)` in bits.
pub fn cond_entropy(rho: &DensityMatrix, target: &[&str], given: &[&str]) -> Result<f64> {
    rho.cond_entropy(target, given)
}

fn same_systems(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<DensityMatrix> {
    let s = sigma.reorder(&rho.names())?;
    if s.labels != rho.labels {
        return Err(Error::Dimension("states live on different systems".into()));
    }
    Ok(s)
}

/// `½‖ρ - σ‖₁`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    let s = same_systems(rho, sigma)?;
    Ok(0.5 * trace_norm_hermitian(&(&rho.mat - &s.mat)))
}

/// Root fidelity `‖√ρ √σ‖₁`; equals `|⟨ψ|φ⟩|` on pure states.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    let s = same_systems(rho, sigma)?;
    let r = psd_sqrt(&rho.mat);
    let inner = &r * &s.mat * &r;
    Ok(eigvalsh(&inner)
        .into_iter()
        .map(|v| if v > 0.0 { sqrt(v) } else { 0.0 })
        .sum::<f64>()
        .min(1.0))
}

/// Weyl-Heisenberg shift `X = Σ|k⊕1⟩⟨k|` and clock `Z = Σ ω^k |k⟩⟨k|`, `ω = e^{2πi/d}`.
pub fn weyl_observables(d: usize) -> Result<(CMat, CMat)> {
    if d < 2 {
        return Err(Error::InvalidInput("Weyl operators need d ≥ 2".into()));
    }
    let x = CMat::from_fn(
        d,
        d,
        |i, j| if i == (j + 1) % d { cr(1.0) } else { cr(0.0) },
    );
    let z = CMat::from_fn(d, d, |i, j| {
        if i == j {
            let th = 2.0 * core::f64::consts::PI * i as f64 / d as f64;
            c(crate::math::cos(th), crate::math::sin(th))
        } else {
            cr(0.0)
        }
    });
    Ok((x, z))
}

/// `Σ_z Tr[(P_z ⊗ Λ_z) ρ]` for target `basis` on factor `a` and a POVM on all other factors.
pub fn p_guess(rho: &DensityMatrix, a: &str, basis: &[CVec], m: &Povm) -> Result<f64> {
    if m.len() != basis.len() {
        return Err(Error::Dimension(format!(
            "{} POVM outcomes for {} basis states",
            m.len(),
            basis.len()
        )));
    }
    let blocks = rho.conditional_blocks(a, basis, &m.names())?;
    Ok(blocks
        .iter()
        .zip(&m.elements)
        .map(|(s, l)| trace_product(l, s).re)
        .sum())
}

/// Off-diagonal block size above which a state is not classical-quantum.
pub const CQ_TOL: f64 = 1e-8;

/// `1 - ½‖ρ^{Z^A E} - I/d_A ⊗ ρ^E‖₁` for a state block-diagonal in `basis` on factor `a`.
pub fn p_secure(rho: &DensityMatrix, a: &str, basis: &[CVec]) -> Result<f64> {
    let rest: Vec<&str> = rho.names().into_iter().filter(|n| *n != a).collect();
    let (blocks, off) = rho.cq_blocks(a, basis, &rest)?;
    if off > CQ_TOL {
        return Err(Error::Contract(format!(
            "state is not classical on {a:?} (off-diagonal {off:e})"
        )));
    }
    Ok(p_secure_blocks(&blocks))
}

/// [`p_secure`] of the state obtained by first measuring `a` in `basis`.
pub fn p_secure_measured(rho: &DensityMatrix, a: &str, basis: &[CVec]) -> Result<f64> {
    p_secure(&rho.dephase(a, basis)?, a, basis)
}

/// [`p_secure`] on unnormalized conditional blocks `σ_z = p_z ρ_z^E`.
pub fn p_secure_blocks(blocks: &[CMat]) -> f64 {
    let d = blocks.len() as f64;
    let mut avg = blocks[0].clone() * cr(0.0);
    for b in blocks {
        avg += b;
    }
    avg *= cr(1.0 / d);
    1.0 - 0.5
        * blocks
            .iter()
            .map(|b| trace_norm_hermitian(&(b - &avg)))
            .sum::<f64>()
}

/// Pretty-good measurement for weighted states `σ_z = p_z ρ_z` on `labels`.
///
/// `Λ_z = ρ̄^{-1/2} σ_z ρ̄^{-1/2}` with the pseudo-inverse on the support of `ρ̄ = Σσ_z`; the
/// complement `I - ΣΛ_z` is shared equally among the outcomes.
pub fn pgm_weighted(labels: Vec<SystemLabel>, weighted: &[CMat]) -> Result<Povm> {
    if weighted.is_empty() {
        return Err(Error::InvalidInput("empty ensemble".into()));
    }
    let d = check_labels(&labels)?;
    let mut avg = CMat::zeros(d, d);
    for s in weighted {
        if s.nrows() != d {
            return Err(Error::Dimension(
                "ensemble state does not match the labels".into(),
            ));
        }
        avg += s;
    }
    let isq = psd_inv_sqrt(&avg, PINV_CUTOFF);
    let mut elements: Vec<CMat> = weighted
        .iter()
        .map(|s| hermitize(&(&isq * s * &isq)))
        .collect();
    let mut rem = eye(d);
    for e in &elements {
        rem -= e;
    }
    let share = hermitize(&rem) * cr(1.0 / weighted.len() as f64);
    for e in elements.iter_mut() {
        *e += &share;
    }
    Povm::new(labels, elements)
}

/// Pretty-good measurement for an ensemble of `(p_z, ρ_z)`; priors must sum to 1.
pub fn pgm(ensemble: &[(f64, DensityMatrix)]) -> Result<Povm> {
    let first = ensemble
        .first()
        .ok_or_else(|| Error::InvalidInput("empty ensemble".into()))?;
    let total: f64 = ensemble.iter().map(|(p, _)| p).sum();
    if ensemble.iter().any(|(p, _)| *p < 0.0) || (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidInput(
            "ensemble priors must be a probability vector".into(),
        ));
    }
    let mut weighted = Vec::with_capacity(ensemble.len());
    for (p, rho) in ensemble {
        weighted.push(same_systems(&first.1, rho)?.mat * cr(*p));
    }
    pgm_weighted(first.1.labels.clone(), &weighted)
}

/// Success probability of a POVM on an ensemble (outcome `z` guesses state `z`).
pub fn success_probability(ensemble: &[(f64, DensityMatrix)], m: &Povm) -> Result<f64> {
    if ensemble.len() != m.len() {
        return Err(Error::Dimension("ensemble and POVM sizes differ".into()));
    }
    let mut s = 0.0;
    for ((p, rho), l) in ensemble.iter().zip(&m.elements) {
        s += p * trace_product(l, &rho.reorder(&m.names())?.mat).re;
    }
    Ok(s)
}

/// Optimal two-outcome measurement between `ρ` (prior `p`) and `σ` (prior `1-p`).
pub fn helstrom(p: f64, rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<(Povm, f64)> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidInput("prior outside [0, 1]".into()));
    }
    let s = same_systems(rho, sigma)?;
    let gamma = &rho.mat * cr(p) - &s.mat * cr(1.0 - p);
    let plus = hermitian_fn(&gamma, |v| if v > 0.0 { 1.0 } else { 0.0 });
    let minus = eye(rho.dim()) - &plus;
    let success = 0.5 * (1.0 + trace_norm_hermitian(&gamma));
    Ok((Povm::new(rho.labels.clone(), vec![plus, minus])?, success))
}

/// Purification `Σ_i √λ_i |e_i⟩|i⟩_R` with a reference factor named `reference` of dimension
/// equal to the rank (at least 1).
pub fn purify(rho: &DensityMatrix, reference: &str) -> Result<StateVector> {
    let (vals, vecs) = eigh(&rho.mat);
    let kept: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] > PINV_CUTOFF).collect();
    let r = kept.len().max(1);
    let mut labels = rho.labels.clone();
    labels.push(SystemLabel::new(reference, r)?);
    check_labels(&labels)?;
    let d = rho.dim();
    let mut amps = CVec::zeros(d * r);
    for (k, &i) in kept.iter().enumerate() {
        let w = sqrt(vals[i]);
        for s in 0..d {
            amps[s * r + k] += vecs[(s, i)] * cr(w);
        }
    }
    StateVector::from_unnormalized(labels, amps)
}

/// Isometry `W` on the purifying factors maximizing `|⟨ψ_σ|(I ⊗ W)|ψ_ρ⟩|`.
///
/// The non-purifying factors of both vectors must coincide. `W` comes from the polar part of
/// the overlap operator between the purifying factors, so the overlap equals the root
/// fidelity of the two reduced states.
pub fn uhlmann_isometry(
    psi_rho: &StateVector,
    psi_sigma: &StateVector,
    purifying_rho: &[&str],
    purifying_sigma: &[&str],
) -> Result<Isometry> {
    let sys: Vec<&str> = psi_rho
        .labels
        .iter()
        .map(|l| l.name.as_str())
        .filter(|n| !purifying_rho.contains(n))
        .collect();
    let sys_sigma: Vec<&str> = psi_sigma
        .labels
        .iter()
        .map(|l| l.name.as_str())
        .filter(|n| !purifying_sigma.contains(n))
        .collect();
    if sys.len() != sys_sigma.len() || sys.iter().any(|s| !sys_sigma.contains(s)) {
        return Err(Error::InvalidInput(
            "purified systems differ between the two states".into(),
        ));
    }
    let mut order_r: Vec<&str> = sys.clone();
    order_r.extend_from_slice(purifying_rho);
    let mut order_s: Vec<&str> = sys.clone();
    order_s.extend_from_slice(purifying_sigma);
    let a = psi_rho.reorder(&order_r)?;
    let b = psi_sigma.reorder(&order_s)?;
    if a.labels[..sys.len()] != b.labels[..sys.len()] {
        return Err(Error::Dimension(
            "purified systems have different dimensions".into(),
        ));
    }
    let ds: usize = a.labels[..sys.len()].iter().map(|l| l.dim).product();
    let d1 = a.dim() / ds;
    let d2 = b.dim() / ds;
    if d2 < d1 {
        return Err(Error::Capability(format!(
            "purifying factor of dimension {d2} cannot receive an isometry from dimension {d1}"
        )));
    }
    let am = CMat::from_fn(ds, d1, |s, r| a.amps[s * d1 + r]);
    let bm = CMat::from_fn(ds, d2, |s, r| b.amps[s * d2 + r]);
    let n = am.transpose() * bm.conjugate();
    let svd = nalgebra::SVD::new(n, true, true);
    let u = svd.u.ok_or_else(|| Error::Solver("SVD failed".into()))?;
    let v = svd
        .v_t
        .ok_or_else(|| Error::Solver("SVD failed".into()))?
        .adjoint();
    let w = v * u.adjoint();
    let in_labels = a.labels[sys.len()..].to_vec();
    let out_labels = b.labels[sys.len()..].to_vec();
    Isometry::new(in_labels, out_labels, w)
}

/// Overlap `|⟨ψ_σ|(I ⊗ W)|ψ_ρ⟩|` achieved by an isometry on the purifying factors.
pub fn isometry_overlap(
    psi_rho: &StateVector,
    psi_sigma: &StateVector,
    w: &Isometry,
) -> Result<f64> {
    Ok(psi_rho.apply(w)?.inner(psi_sigma)?.norm())
}

/// Whether a [`StateRecord`] holds amplitudes or a density matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Vector,
    Density,
}

/// Serializable form of a state: labels, then row-major `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateRecord {
    pub labels: Vec<SystemLabel>,
    pub kind: StateKind,
    pub data: Vec<[f64; 2]>,
    /// Validation tolerance in force when the record was written.
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

fn default_tolerance() -> f64 {
    STATE_TOL
}

/// A state of either kind.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyState {
    Vector(StateVector),
    Density(DensityMatrix),
}

impl AnyState {
    /// Density matrix of the state.
    pub fn density(&self) -> DensityMatrix {
        match self {
            Self::Vector(v) => v.density(),
            Self::Density(d) => d.clone(),
        }
    }

    pub fn labels(&self) -> &[SystemLabel] {
        match self {
            Self::Vector(v) => v.labels(),
            Self::Density(d) => d.labels(),
        }
    }
}

impl StateRecord {
    /// Validates the record; a record may loosen but not tighten the default tolerance.
    pub fn to_state(&self) -> Result<AnyState> {
        let d = check_labels(&self.labels)?;
        let entries = |n: usize| -> Result<Vec<C64>> {
            if self.data.len() != n {
                return Err(Error::Dimension(format!(
                    "{} entries, expected {n}",
                    self.data.len()
                )));
            }
            Ok(self.data.iter().map(|&[re, im]| c(re, im)).collect())
        };
        match self.kind {
            StateKind::Vector => {
                let amps = CVec::from_vec(entries(d)?);
                if (amps.norm() - 1.0).abs() > self.tolerance.max(STATE_TOL) {
                    return Err(Error::InvalidInput(format!(
                        "state norm {} is not 1",
                        amps.norm()
                    )));
                }
                Ok(AnyState::Vector(StateVector::from_unnormalized(
                    self.labels.clone(),
                    amps,
                )?))
            }
            StateKind::Density => {
                let mat = CMat::from_row_slice(d, d, &entries(d * d)?);
                Ok(AnyState::Density(DensityMatrix::new(
                    self.labels.clone(),
                    mat,
                )?))
            }
        }
    }

    pub fn from_vector(v: &StateVector) -> Self {
        Self {
            labels: v.labels.clone(),
            kind: StateKind::Vector,
            data: v.amps.iter().map(|z| [z.re, z.im]).collect(),
            tolerance: STATE_TOL,
        }
    }

    pub fn from_density(rho: &DensityMatrix) -> Self {
        let d = rho.dim();
        let data = (0..d * d)
            .map(|k| rho.mat[(k / d, k % d)])
            .map(|z| [z.re, z.im])
            .collect();
        Self {
            labels: rho.labels.clone(),
            kind: StateKind::Density,
            data,
            tolerance: STATE_TOL,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::seeded_rng;

    fn epr() -> StateVector {
        StateVector::from_real(qubits(&["A", "B"]), &[1.0, 0.0, 0.0, 1.0]).unwrap()
    }

    #[test]
    fn epr_marginal_is_mixed() {
        let rho = epr().marginal(&["A"]).unwrap();
        assert!(max_abs(&(rho.matrix() - eye(2) * cr(0.5))) < 1e-15);
        let dm = epr().density();
        assert!((dm.cond_entropy(&["A"], &["B"]).unwrap() + 1.0).abs() < 1e-12);
        assert!((epr().cond_entropy(&["A"], &["B"]).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn beta01_traced_to_b() {
        // |β01⟩ = (Z ⊗ I)|Φ⟩ = (|00⟩ - |11⟩)/√2
        let b01 = StateVector::from_real(qubits(&["A", "B"]), &[1.0, 0.0, 0.0, -1.0]).unwrap();
        let rb = b01.density().partial_trace(&["B"]).unwrap();
        assert!(max_abs(&(rb.matrix() - eye(2) * cr(0.5))) < 1e-15);
    }

    #[test]
    fn partial_trace_of_product() {
        let mut rng = seeded_rng(3);
        let s =
            DensityMatrix::random(vec![SystemLabel::new("S", 3).unwrap()], 2, &mut rng).unwrap();
        let t = DensityMatrix::random(qubits(&["T"]), 2, &mut rng).unwrap();
        let st = s.tensor(&t).unwrap();
        let back = st.partial_trace(&["S"]).unwrap();
        assert!(max_abs(&(back.matrix() - s.matrix())) < 1e-14);
        let back_t = st.partial_trace(&["T"]).unwrap();
        assert!(max_abs(&(back_t.matrix() - t.matrix())) < 1e-14);
    }

    #[test]
    fn reorder_round_trip() {
        let mut rng = seeded_rng(4);
        let labels = vec![
            SystemLabel::new("A", 2).unwrap(),
            SystemLabel::new("B", 3).unwrap(),
            SystemLabel::new("C", 2).unwrap(),
        ];
        let psi = StateVector::random(labels, &mut rng).unwrap();
        let p = psi.reorder(&["C", "A", "B"]).unwrap();
        assert!((p.inner(&psi).unwrap() - cr(1.0)).norm() < 1e-12);
        let back = p.reorder(&["A", "B", "C"]).unwrap();
        assert!((back.amplitudes() - psi.amplitudes()).norm() < 1e-15);
        let m1 = psi.marginal(&["C", "A"]).unwrap();
        let m2 = psi.density().partial_trace(&["C", "A"]).unwrap();
        assert!(max_abs(&(m1.matrix() - m2.matrix())) < 1e-14);
    }

    #[test]
    fn distances_plus_zero() {
        let zero = StateVector::from_real(qubits(&["A"]), &[1.0, 0.0])
            .unwrap()
            .density();
        let plus = StateVector::from_real(qubits(&["A"]), &[1.0, 1.0])
            .unwrap()
            .density();
        let r = core::f64::consts::FRAC_1_SQRT_2;
        assert!((trace_distance(&zero, &plus).unwrap() - r).abs() < 1e-12);
        assert!((fidelity(&zero, &plus).unwrap() - r).abs() < 1e-7);
        assert!((fidelity(&zero, &zero).unwrap() - 1.0).abs() < 1e-7);
        assert!(trace_distance(&zero, &zero).unwrap().abs() < 1e-14);
    }

    #[test]
    fn weyl_commutation() {
        let (x, z) = weyl_observables(2).unwrap();
        assert_eq!(x[(0, 1)], cr(1.0));
        assert!((z[(1, 1)] - cr(-1.0)).norm() < 1e-15);
        let (x3, z3) = weyl_observables(3).unwrap();
        assert!(max_abs(&(&x3 * &x3 * &x3 - eye(3))) < 1e-14);
        assert!(max_abs(&(&z3 * &z3 * &z3 - eye(3))) < 1e-14);
        let (x4, z4) = weyl_observables(4).unwrap();
        let lhs = &z4 * &x4;
        let rhs = &x4 * &z4 * c(0.0, 1.0);
        assert!(max_abs(&(lhs - rhs)) < 1e-14);
    }

    #[test]
    fn p_secure_examples() {
        let z = computational_basis(2);
        let copied = DensityMatrix::new(
            qubits(&["A", "E"]),
            CMat::from_diagonal(&CVec::from_vec(vec![cr(0.5), cr(0.0), cr(0.0), cr(0.5)])),
        )
        .unwrap();
        assert!((p_secure(&copied, "A", &z).unwrap() - 0.5).abs() < 1e-12);
        let uniform = DensityMatrix::maximally_mixed(qubits(&["A", "E"])).unwrap();
        assert!((p_secure(&uniform, "A", &z).unwrap() - 1.0).abs() < 1e-12);
        let measured = epr().density().dephase("A", &z).unwrap();
        assert!((p_secure(&measured, "A", &z).unwrap() - 0.5).abs() < 1e-12);
        assert!(matches!(
            p_secure(&epr().density(), "A", &z),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn pgm_and_helstrom() {
        let zero = StateVector::from_real(qubits(&["B"]), &[1.0, 0.0])
            .unwrap()
            .density();
        let one = StateVector::from_real(qubits(&["B"]), &[0.0, 1.0])
            .unwrap()
            .density();
        let plus = StateVector::from_real(qubits(&["B"]), &[1.0, 1.0])
            .unwrap()
            .density();
        let ens = vec![(0.5, zero.clone()), (0.5, one)];
        let m = pgm(&ens).unwrap();
        assert!((success_probability(&ens, &m).unwrap() - 1.0).abs() < 1e-12);
        let (_, s) = helstrom(0.5, &zero, &plus).unwrap();
        assert!((s - 0.5 * (1.0 + core::f64::consts::FRAC_1_SQRT_2)).abs() < 1e-12);
    }

    #[test]
    fn purify_and_uhlmann() {
        let mut rng = seeded_rng(9);
        let rho = DensityMatrix::random(qubits(&["A", "B"]), 4, &mut rng).unwrap();
        let sigma = DensityMatrix::random(qubits(&["A", "B"]), 4, &mut rng).unwrap();
        let pr = purify(&rho, "R").unwrap();
        let ps = purify(&sigma, "R").unwrap();
        assert!(max_abs(&(pr.marginal(&["A", "B"]).unwrap().matrix() - rho.matrix())) < 1e-12);
        let w = uhlmann_isometry(&pr, &ps, &["R"], &["R"]).unwrap();
        let ov = isometry_overlap(&pr, &ps, &w).unwrap();
        assert!((ov - fidelity(&rho, &sigma).unwrap()).abs() < 1e-8);
        let pure = epr().density();
        let pp = purify(&pure, "R").unwrap();
        assert_eq!(pp.dim_of("R").unwrap(), 1);
    }

    #[test]
    fn record_round_trip() {
        let mut rng = seeded_rng(12);
        let rho = DensityMatrix::random(qubits(&["A", "B"]), 3, &mut rng).unwrap();
        match StateRecord::from_density(&rho).to_state().unwrap() {
            AnyState::Density(back) => assert!(max_abs(&(back.matrix() - rho.matrix())) == 0.0),
            AnyState::Vector(_) => panic!("kind changed"),
        }
        let rec = StateRecord::from_vector(&epr());
        assert_eq!(rec.to_state().unwrap(), AnyState::Vector(epr()));
    }

    #[test]
    fn register_entropy_seven_eighths() {
        // Σ_z p_z P_z ⊗ φ_z with orthogonal φ_z: the register entropy is h(1/8).
        let p = [7.0 / 8.0, 1.0 / 8.0];
        let amps = [sqrt(p[0]), 0.0, 0.0, sqrt(p[1])];
        let psi = StateVector::from_real(qubits(&["Z", "F"]), &amps).unwrap();
        let rho = psi.density().dephase("Z", &computational_basis(2)).unwrap();
        let expect = 3.0 - 7.0 / 8.0 * crate::math::log2(7.0);
        assert!((rho.entropy_of(&["Z"]).unwrap() - expect).abs() < 1e-12);
        assert!((expect - 0.5436).abs() < 1e-4);
    }

    #[test]
    fn dimension_cap() {
        let labels = vec![
            SystemLabel::new("A", 64).unwrap(),
            SystemLabel::new("B", 65).unwrap(),
        ];
        assert!(matches!(
            DensityMatrix::maximally_mixed(labels),
            Err(Error::Capability(_))
        ));
    }

    #[test]
    fn isometry_application_matches_matrix() {
        let mut rng = seeded_rng(5);
        let psi = StateVector::random(qubits(&["A", "B"]), &mut rng).unwrap();
        let (x, _) = weyl_observables(2).unwrap();
        let out = psi.apply_unitary(&x, &["B"]).unwrap();
        let expect = kron(&eye(2), &x) * psi.amplitudes();
        assert!((out.amplitudes() - expect).norm() < 1e-14);
        let rho = psi.density().apply_unitary(&x, &["A"]).unwrap();
        let expect = projector(&(kron(&x, &eye(2)) * psi.amplitudes()));
        assert!(max_abs(&(rho.matrix() - expect)) < 1e-14);
    }
}
