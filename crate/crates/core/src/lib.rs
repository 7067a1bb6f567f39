//! Polynomial invariants of quantum codes.
//!
//! Basic invariants `A'_π(M_1, ..., M_k) = Tr(T(π)(M_1 ⊗ ... ⊗ M_k))` indexed by
//! tuples of permutations, generalized shadow functionals over the group
//! algebra of `S_k^n`, symbolic reductions, and stabilizer-code fixtures.

pub mod algebra;
pub mod codes;
pub mod error;
pub mod invariant;
pub mod perm;
pub mod qspace;
pub mod reductions;
pub mod verify;

pub use algebra::AlgebraElement;
pub use codes::{fixture_442, fixture_442_projector, StabilizerCode};
pub use error::{Error, Result};
pub use invariant::{invariant, invariant_code, quadratic_enumerator, symmetrize, Evaluator};
pub use num_complex::Complex64;
pub use perm::{Perm, PermTuple};
pub use qspace::{Operator, SystemShape};
pub use reductions::{CodeFacts, InvariantExpression};
