//! Structure of one- and two-qubit gates.
//!
//! * [`single_qubit`]: canonical `(θ, φ0, φ1, φ2)` parametrization of 2×2
//!   unitaries and detection of self-inverse gates.
//! * [`separability`]: decides whether a 4×4 unitary is `e^{iφ}·U1⊗U2`, with
//!   an independent realignment oracle as a cross-check.
//! * [`factorize`]: recovers `U1` and `U2` from a separable gate.
//! * [`circuit`]: a small circuit IR whose passes use the above to cut gate
//!   count, quantum cost and width.
//!
//! Every verdict is taken against an explicit [`Tolerance`].

pub mod circuit;
pub mod cli;
pub mod error;
pub mod factorize;
pub mod gen;
pub mod io;
pub mod matrix;
pub mod separability;
pub mod single_qubit;
pub mod two_qubit;

pub use error::{Error, Result};
pub use factorize::{reconstruct, FactorPair};
pub use matrix::{tensor2x2, GateMatrix2, GateMatrix4, Mat, Tolerance};
pub use separability::{analyze, separability_oracle, SeparabilityReport, Verdict};
pub use single_qubit::{classify_hermitian, CanonicalSingleQubit, Hermiticity, NamedGate};
