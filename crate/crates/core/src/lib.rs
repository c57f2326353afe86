//! Orthogonal-ansatz variational quantum eigensolver.
//!
//! Excited states are located by stacking previously optimized circuits on
//! top of a new parameterized circuit that acts trivially on earlier reference
//! states. Orthogonality comes from circuit structure, so every level minimizes
//! the same energy expectation value.
//!
//! Everything runs on a dense, noiseless statevector simulator:
//!
//! - [`statevector`]: amplitudes, gate application, inner products
//! - [`pauli`]: Pauli-word algebra and the Jordan-Wigner mapping
//! - [`circuit`]: gates, circuits and the symmetrized Trotter compiler
//! - [`ansatz`]: the three self-orthogonalizing circuit families
//! - [`optimizer`]: bounded derivative-free minimization
//! - [`driver`]: the level-by-level eigensolver and its exact oracle
//! - [`models`]: tight-binding and molecular benchmark Hamiltonians
//! - [`experiments`]: band-structure, dissociation, spectrum and verify runs

pub mod ansatz;
pub mod circuit;
pub mod driver;
mod error;
pub mod experiments;
pub mod linalg;
pub mod models;
pub mod optimizer;
pub mod pauli;
pub mod statevector;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Largest qubit count for which dense matrices and statevectors are built.
pub const MAX_DENSE_QUBITS: usize = 16;
