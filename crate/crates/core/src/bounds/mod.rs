//! Error bounds, commutator norms and parameter selection.
//!
//! Unknown absolute constants (`C`, `C₁`, `C₃`, gate constants, `C_⋄`, `a`)
//! are explicit inputs collected in [`Constants`] with default 1.

mod commutators;
mod planner;
mod truncation;

pub use commutators::{alpha_comm, bar_alpha_comm, commutator_report, BarAlpha, CommutatorReport};
pub use planner::{
    optimal_order, quadrature_points, resource_estimate, sampling_error, select_quadrature,
    select_steps, subnorm_cgamma, Constants, PlannerInput, ResourcePlan,
};
pub use truncation::{
    alt_bound_infinite, global_truncation_bound, local_truncation_bound, quadrature_bound,
    quadrature_bound_sum, ErrorBudget,
};

/// Largest commutator grade evaluated by brute force.
pub const DEFAULT_Q_CAP: usize = 6;
