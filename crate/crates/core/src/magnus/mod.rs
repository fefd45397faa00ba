//! Magnus terms `Ω_k` and the truncated expansion `Ω̃_(p)`.
//!
//! Three representations are provided on a shared left-Riemann grid
//! `t_j + i·h/M`, `i = 0..M−1`:
//!
//! * product form: `Σ_{i_1>…>i_k} Σ_π C_{π,k} A(τ_{π(1)})⋯A(τ_{π(k)}) (h/M)^k`,
//! * commutator form: the same tuple sum over right-nested commutators with
//!   weights `c_{π,k}`,
//! * recursive form: the Bernoulli-number recursion with inner terms
//!   accumulated along the grid.
//!
//! The product and commutator forms are related by an exact reindexing, so
//! they agree to rounding on any grid. All coefficients are exact rationals.

mod coefficients;
mod combinatorics;
mod quadrature;
mod recursive;
mod stepper;

pub use coefficients::{bernoulli, coeff_commutator, coeff_product, Convention, Rational};
pub use combinatorics::{ordered_tuples, OrderedTuples, Permutation};
pub use quadrature::{
    omega_k_commutator_form, omega_k_commutator_form_with, omega_k_enumerated, omega_k_quadrature,
    omega_k_quadrature_with,
    GeneratorGrid,
};
pub use recursive::omega_k_recursive;
pub use stepper::{evolve, evolve_over, omega_p_sum, step, MagnusConfig, Representation};

/// Largest order accepted for `Ω̃_(p)` and single terms.
pub const MAX_ORDER: usize = 6;
/// Largest term computed through the Bernoulli recursion.
pub const MAX_RECURSIVE_ORDER: usize = 5;
