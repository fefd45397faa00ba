use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("bracketing has {leaves} leaves but {given} operators were supplied")]
    ArityMismatch { leaves: usize, given: usize },

    #[error("failed to parse model: {0}")]
    Parse(String),

    #[error("invalid model: {0}")]
    Model(String),

    /// A parameter is outside the range an operation supports.
    #[error("parameter out of range: {0}")]
    Guard(String),

    #[error("register layout of dimension 2^{log2_dimension} exceeds the limit 2^{limit_log2}; registers: {registers}")]
    LayoutTooLarge {
        log2_dimension: u32,
        limit_log2: u32,
        registers: String,
    },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("reference propagator did not converge within {substeps} substeps (last difference {last_difference:e})")]
    NoConvergence { substeps: u64, last_difference: f64 },

    #[error("matrix is not a contraction (norm {0})")]
    NotContraction(f64),

    #[error("block is not anti-Hermitian (deviation {0:e})")]
    NotAntiHermitian(f64),
}
