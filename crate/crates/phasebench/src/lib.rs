//! Classical fidelity thresholds ("quantum benchmarks") for phase-covariant
//! state families.
//!
//! A measure-and-prepare channel reads out the input state, forwards only
//! classical data, and re-prepares an output. The largest average fidelity
//! such a channel can reach on a family of phase-rotated test states is a
//! threshold: beating it certifies genuinely quantum transmission or storage.
//! This crate computes that threshold three ways and cross-checks them:
//!
//! * a closed form for qubit families ([`qubit`]),
//! * spectral bounds for the canonical phase measurement on truncated
//!   Fock spaces ([`covariant`]),
//! * semidefinite programs with a positive-partial-transpose relaxation,
//!   for pure and mixed Gaussian families ([`sdp`]).
//!
//! [`states`] builds the test families (coherent, squeezed, displaced and
//! squeezed thermal) on a truncated Fock basis with explicit truncation
//! accounting, and [`linalg`] supplies the dense Hermitian kernels.
//! [`acceptance`] bundles the cross-method agreement checks into a runnable
//! gate suite.

pub mod acceptance;
pub mod covariant;
pub mod linalg;
pub mod qubit;
pub mod report;
pub mod sdp;
pub mod states;
