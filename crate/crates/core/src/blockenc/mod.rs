//! Register-level emulation of the Magnus block-encoding circuits.
//!
//! States are sparse maps from mixed-radix basis indices to amplitudes over
//! a named [`RegisterLayout`]; circuits are lists of register-level gates
//! (local unitaries, controlled families, basis permutations, phases and
//! controlled sub-circuits). A [`BlockEncoding`] stores `U = left† · right`,
//! so blocks are read off as inner products without expanding `U`.
//!
//! Construction of `Ω̃_k` (`k ≥ 2`):
//!
//! * `PREP^t`: Hadamards on `k` time registers, a descending bubble-sort
//!   comparator network that records each outcome, and repeat flags;
//! * `PREP_k`: uniform superposition of permutations in the perm
//!   registers, followed on the right only by a rotation loading
//!   `β_k C_{π,k}` onto the coefficient flag;
//! * a one-sided `repeat` qubit toggled when any flag is set, so tuples
//!   with repeated indices never reach the flagged block;
//! * SELECT: for `l = k..1`, SWAP-UP on time register `π(l)`, HAM-T on
//!   time register 0 with phase `−i`, SWAP-UP.

mod circuits;
mod encoding;
mod gates;
mod layout;

pub use circuits::{
    beta, block_encode_omega_k, dilate_contraction, expected_time_mass, ham_t, lcu_combine,
    omega_layout, prep_coeffs, prep_time_ordered, select_magnus, swap_up, OmegaRegisters,
    SUPPORT_LIMIT_LOG2,
};
pub use encoding::{exp_of_block, extract_block, BlockEncoding, LayoutSummary, PreparedState};
pub use gates::{BasisPermutation, Circuit, Gate, SparseUnitary};
pub use layout::{RegId, Register, RegisterLayout, SparseState, LAYOUT_LIMIT_LOG2};
