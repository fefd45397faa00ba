//! Numerical toolkit for high-order Magnus expansions of time-dependent
//! Hamiltonian dynamics.
//!
//! The crate is organised by concern:
//!
//! * [`operators`]: dense complex matrices, matrix functions and the
//!   time-dependent Hamiltonian model `H(t) = Σ_j f_j(t) H_j`.
//! * [`magnus`]: exact Bernoulli/permutation coefficients, the discretized
//!   Magnus terms in product, commutator and recursive form, and the
//!   slice-wise propagator built from them.
//! * [`reference`]: a self-validating propagator used as ground truth.
//! * [`bounds`]: commutator norms, truncation/quadrature error bounds and the
//!   resource planner.
//! * [`blockenc`]: register-level emulation of the block-encoding circuits
//!   (HAM-T, time-ordered state preparation, SWAP-UP select and the LCU
//!   combiner).

pub mod blockenc;
pub mod bounds;
mod error;
pub mod magnus;
pub mod operators;
pub mod reference;

pub use error::{Error, Result};
