use serde::{Deserialize, Serialize};

use super::coefficients::Convention;
use super::quadrature::{omega_k_commutator_form_with, omega_k_quadrature_with, GeneratorGrid};
use super::recursive::omega_k_recursive;
use super::{MAX_ORDER, MAX_RECURSIVE_ORDER};
use crate::operators::{expm, identity, zeros, ComplexMatrix, HamiltonianModel, TimeInterval};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    Recursive,
    #[default]
    Product,
    Commutator,
}

/// Order, grid size and representation used to build `Ω̃_(p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MagnusConfig {
    pub p: usize,
    pub m: usize,
    pub representation: Representation,
    pub convention: Convention,
}

impl MagnusConfig {
    pub fn new(p: usize, m: usize) -> Result<Self> {
        let config = MagnusConfig {
            p,
            m,
            representation: Representation::Product,
            convention: Convention::Paper,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn with_representation(mut self, representation: Representation) -> Result<Self> {
        self.representation = representation;
        self.validate()?;
        Ok(self)
    }

    pub fn with_convention(mut self, convention: Convention) -> Self {
        self.convention = convention;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let cap = match self.representation {
            Representation::Recursive => MAX_RECURSIVE_ORDER,
            _ => MAX_ORDER,
        };
        if self.p == 0 || self.p > cap {
            return Err(Error::Guard(format!("order p = {} outside 1..={cap}", self.p)));
        }
        if self.m == 0 {
            return Err(Error::Guard("M must be at least 1".into()));
        }
        Ok(())
    }

    /// `Ω̃_(p) = Σ_{k=1}^{p} Ω̃_k` over the interval.
    pub fn omega(&self, model: &HamiltonianModel, interval: &TimeInterval) -> Result<ComplexMatrix> {
        self.validate()?;
        let mut total = zeros(model.dim());
        if self.representation == Representation::Recursive {
            for k in 1..=self.p {
                total += omega_k_recursive(model, interval, k, self.m)?;
            }
            return Ok(total);
        }
        let grid = GeneratorGrid::new(model, interval, self.m)?;
        for k in 1..=self.p {
            total += match self.representation {
                Representation::Commutator => omega_k_commutator_form_with(&grid, k, self.convention)?,
                _ => omega_k_quadrature_with(&grid, k, self.convention)?,
            };
        }
        Ok(total)
    }

    pub fn step(&self, model: &HamiltonianModel, t0: f64, h: f64) -> Result<ComplexMatrix> {
        let interval = TimeInterval::new(t0, t0 + h)?;
        Ok(expm(&self.omega(model, &interval)?))
    }

    /// Ordered product of `slices` uniform steps, later steps on the left.
    pub fn evolve_over(
        &self,
        model: &HamiltonianModel,
        interval: &TimeInterval,
        slices: usize,
    ) -> Result<ComplexMatrix> {
        if slices == 0 {
            return Err(Error::Guard("number of slices must be at least 1".into()));
        }
        let h = interval.length() / slices as f64;
        let mut u = identity(model.dim());
        for j in 0..slices {
            let t0 = interval.start() + j as f64 * h;
            u = self.step(model, t0, h)? * u;
        }
        Ok(u)
    }
}

/// Product-form `Ω̃_(p)`.
pub fn omega_p_sum(
    model: &HamiltonianModel,
    interval: &TimeInterval,
    p: usize,
    m: usize,
) -> Result<ComplexMatrix> {
    MagnusConfig::new(p, m)?.omega(model, interval)
}

/// `U_p(t_0 + h, t_0) = exp(Ω̃_(p))`.
pub fn step(model: &HamiltonianModel, t0: f64, h: f64, p: usize, m: usize) -> Result<ComplexMatrix> {
    MagnusConfig::new(p, m)?.step(model, t0, h)
}

/// `U_p(T, 0)` from `l` uniform steps.
pub fn evolve(model: &HamiltonianModel, t: f64, l: usize, p: usize, m: usize) -> Result<ComplexMatrix> {
    evolve_over(model, &TimeInterval::new(0.0, t)?, l, p, m)
}

pub fn evolve_over(
    model: &HamiltonianModel,
    interval: &TimeInterval,
    l: usize,
    p: usize,
    m: usize,
) -> Result<ComplexMatrix> {
    MagnusConfig::new(p, m)?.evolve_over(model, interval, l)
}
