use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "magnus-lab", version, about = "Magnus-expansion simulation and verification experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Evolve a model with the order-p Magnus integrator.
    Simulate,
    /// Global error against the reference propagator over a list of step sizes.
    Converge,
    /// Self-convergence of the Riemann-sum Ω̃_k in M.
    QuadratureSweep,
    /// Nested-commutator norms α_comm,q.
    Commutators,
    /// Block-encoding identities of the emulated circuits.
    VerifyCircuit,
    /// Resource plan for a target accuracy.
    Plan,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Converge => "converge",
            Command::QuadratureSweep => "quadrature-sweep",
            Command::Commutators => "commutators",
            Command::VerifyCircuit => "verify-circuit",
            Command::Plan => "plan",
        }
    }
}

/// Flags shared by every subcommand. Unset values fall back to
/// command-specific defaults.
#[derive(Debug, Clone, Default, Args, Serialize)]
pub struct Options {
    /// Hamiltonian model JSON file.
    #[arg(long, global = true)]
    pub model: Option<PathBuf>,
    /// Magnus order (maximum order with --optimize).
    #[arg(long, global = true)]
    pub p: Option<usize>,
    /// Number of time steps.
    #[arg(long = "L", global = true)]
    pub l: Option<usize>,
    /// Quadrature points per step.
    #[arg(long = "M", global = true)]
    pub m: Option<usize>,
    /// Total time (step length for quadrature-sweep).
    #[arg(long = "T", global = true)]
    pub t: Option<f64>,
    #[arg(long, global = true)]
    pub eps: Option<f64>,
    /// Largest commutator grade evaluated.
    #[arg(long, global = true)]
    pub qcap: Option<usize>,
    /// Time samples for norm and commutator maxima.
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    #[arg(long, global = true)]
    pub gamma: Option<f64>,
    /// Truncation-bound constant C.
    #[arg(long, global = true)]
    pub c: Option<f64>,
    #[arg(long, global = true)]
    pub c1: Option<f64>,
    #[arg(long, global = true)]
    pub c3: Option<f64>,
    #[arg(long, global = true, env = "MAGNUS_LAB_THREADS")]
    pub threads: Option<usize>,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Search the order that minimises HAM-T queries.
    #[arg(long, global = true)]
    pub optimize: bool,
    /// Order k of the quadrature sweep.
    #[arg(long, global = true)]
    pub k: Option<usize>,
    /// Step sizes for converge, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    pub h: Option<Vec<f64>>,
    /// Quadrature sizes for quadrature-sweep, comma separated.
    #[arg(long = "M-list", global = true, value_delimiter = ',')]
    pub m_list: Option<Vec<usize>>,
    /// Reference propagator tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Seed for sampled unitarity checks.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}
