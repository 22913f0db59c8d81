//! Quantum information as classical information about complementary observables.
//!
//! The crate is `no_std` (with `alloc`) and covers:
//!
//! - [`gf2`]: bit-packed GF(2) linear algebra and orthogonal-row CSS hash families.
//! - [`pauli`]: symplectic Pauli operators, CSS codes, virtual-qubit bases and ML decoding.
//! - [`qstate`]: dense states on labeled tensor factors, entropies, distances, measurements,
//!   pretty-good and Helstrom measurements, purification and Uhlmann isometries.
//! - [`uncert`]: entropic uncertainty relations and the Pinsker-type security bound.
//! - [`recovery`]: entanglement recovery from amplitude and phase predictability, private
//!   states and their untwisting, teleportation and superdense coding.
//! - [`distill`]: hashing-bound distillation, reconciliation, privacy amplification, their
//!   duality, state-merging rates and a hash-based channel code.
//! - [`qkdrate`]: BB84, six-state and tetrahedral key rates with noisy and repetition-block
//!   preprocessing, thresholds and preprocessing optimization.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod distill;
pub mod gf2;
mod math;
pub mod pauli;
pub mod qkdrate;
pub mod qstate;
pub mod recovery;
pub mod uncert;

pub use math::{binary_entropy, shannon_entropy};

use alloc::string::String;

/// Errors reported by every fallible operation in the crate.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// Operand sizes or dimensions do not agree.
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    /// A parameter is outside its documented domain.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// A system label is not present in the state.
    #[error("unknown system label: {0}")]
    UnknownLabel(String),
    /// The input does not satisfy a structural precondition (for example, not classical-quantum).
    #[error("contract violated: {0}")]
    Contract(String),
    /// A requested construction is infeasible.
    #[error("construction failed: {0}")]
    Construction(String),
    /// The problem exceeds a configured size cap.
    #[error("capability exceeded: {0}")]
    Capability(String),
    /// A numerical solver failed to bracket or converge.
    #[error("solver failure: {0}")]
    Solver(String),
}

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;
