//! Verification and classification of three-state, 33-vertex chain
//! Hamiltonians that are solvable by the nested coordinate Bethe ansatz.
//!
//! The crate is organised bottom-up:
//!
//! - [`linalg`]: dense complex linear algebra (Kronecker products, chain
//!   embeddings, non-Hermitian eigenvalues, least squares).
//! - [`hamiltonian`]: the 33-entry local Hamiltonian, its solvability
//!   constraints, the 4x4 `T` matrix and chain/sector operators.
//! - [`algebra`]: Hecke, `S_n` and `T_n` relation checks and the Hecke
//!   normalization.
//! - [`catalog`]: the known solution families and their gauge moves.
//! - [`scattering`]: the two-parameter S-matrix, Yang-Baxter checks and
//!   transfer matrices.
//! - [`bethe`]: energies, one-magnon predictions and a two-particle Bethe
//!   equation solver.
//! - [`reshetikhin`]: the difference-form Reshetikhin criterion.

pub mod algebra;
pub mod bethe;
pub mod catalog;
pub mod error;
pub mod hamiltonian;
pub mod linalg;
pub mod reshetikhin;
pub mod sample;
pub mod scattering;

pub use error::{Error, Result};
pub use linalg::{CMatrix, ResidualReport, C64};

// Book chapters run as doc-tests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/hamiltonian.md")]
    mod hamiltonian {}
    #[doc = include_str!("../../../book/src/algebras.md")]
    mod algebras {}
    #[doc = include_str!("../../../book/src/catalog.md")]
    mod catalog {}
    #[doc = include_str!("../../../book/src/scattering.md")]
    mod scattering {}
    #[doc = include_str!("../../../book/src/spectrum.md")]
    mod spectrum {}
    #[doc = include_str!("../../../book/src/reshetikhin.md")]
    mod reshetikhin {}
}
