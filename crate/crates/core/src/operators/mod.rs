//! Dense complex linear algebra and the time-dependent Hamiltonian model.
//!
//! All operator-valued quantities are carried as [`ComplexMatrix`], a dense
//! `nalgebra` matrix of `Complex64`. Target dimensions are small (at most a
//! few qubits), so every routine here is direct: full SVD for norms,
//! Padé scaling-and-squaring for the exponential.

mod expm;
mod matrix;
mod model;

pub use expm::expm;
pub use matrix::{
    commutator, identity, kron, nested_commutator, pauli, pauli_string, spectral_norm, zeros,
    BinaryTree, ComplexMatrix, MatrixProperties,
};
pub use model::{HamiltonianModel, ScalarFunction, SupNorms, Term, TimeInterval};

pub use num_complex::Complex64;
