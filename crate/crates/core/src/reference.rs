//! Trusted propagator `U(t) = 𝒯 exp(∫ A)` by step-doubled midpoint exponentials.

use rayon::prelude::*;

use crate::operators::{
    expm, identity, spectral_norm, Complex64, ComplexMatrix, HamiltonianModel, TimeInterval,
};
use crate::{Error, Result};

/// Largest number of substeps tried before giving up.
pub const MAX_SUBSTEPS: u64 = 1 << 24;
/// Smallest tolerance accepted.
pub const MIN_TOL: f64 = 1e-13;

const CHUNK: usize = 1024;

#[derive(Clone, Debug)]
pub struct ReferenceResult {
    pub propagator: ComplexMatrix,
    /// Spectral-norm difference of the last two Richardson values.
    pub error_estimate: f64,
    pub substeps_used: u64,
}

fn midpoint_product(model: &HamiltonianModel, interval: &TimeInterval, n: usize) -> ComplexMatrix {
    let dt = interval.length() / n as f64;
    let factor = |j: usize| {
        let mid = interval.start() + (j as f64 + 0.5) * dt;
        expm(&(model.generator(mid) * Complex64::from(dt)))
    };
    let chunk_product = |range: std::ops::Range<usize>| {
        range.fold(identity(model.dim()), |u, j| factor(j) * u)
    };
    if n <= CHUNK {
        return chunk_product(0..n);
    }
    let chunks: Vec<ComplexMatrix> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| chunk_product(c * CHUNK..((c + 1) * CHUNK).min(n)))
        .collect();
    chunks
        .into_iter()
        .fold(identity(model.dim()), |u, block| block * u)
}

/// Doubles the substep count `n` and forms the Richardson value
/// `R_n = U_n + (U_n − U_{n/2})/3` of the last two midpoint products. Stops
/// once successive Richardson values differ by less than `tol/2`.
pub fn exact_propagator(
    model: &HamiltonianModel,
    interval: &TimeInterval,
    tol: f64,
) -> Result<ReferenceResult> {
    if !(tol >= MIN_TOL) {
        return Err(Error::Guard(format!("tolerance {tol} below {MIN_TOL}")));
    }
    let mut n: u64 = 2;
    let mut coarse = midpoint_product(model, interval, 1);
    let mut previous: Option<ComplexMatrix> = None;
    let mut last_difference = f64::INFINITY;
    while n <= MAX_SUBSTEPS {
        let fine = midpoint_product(model, interval, n as usize);
        let richardson = &fine + (&fine - &coarse) / Complex64::from(3.0);
        if let Some(prev) = &previous {
            last_difference = spectral_norm(&(&richardson - prev));
            if n >= 8 && last_difference < tol / 2.0 {
                return Ok(ReferenceResult {
                    propagator: richardson,
                    error_estimate: last_difference,
                    substeps_used: n,
                });
            }
        }
        previous = Some(richardson);
        coarse = fine;
        n *= 2;
    }
    Err(Error::NoConvergence {
        substeps: MAX_SUBSTEPS,
        last_difference,
    })
}

/// `‖U†U − I‖` in the spectral norm.
pub fn unitarity_defect(u: &ComplexMatrix) -> f64 {
    spectral_norm(&(u.adjoint() * u - identity(u.nrows())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{pauli, MatrixProperties, ScalarFunction};
    use std::f64::consts::PI;

    fn rotating() -> HamiltonianModel {
        HamiltonianModel::from_paulis(&[
            (ScalarFunction::cos(1.0, 1.0, 0.0), "X"),
            (ScalarFunction::sin(1.0, 1.0, 0.0), "Z"),
        ])
        .unwrap()
    }

    #[test]
    fn constant_model_half_turn() {
        let model = HamiltonianModel::from_paulis(&[(ScalarFunction::constant(1.0), "Z")]).unwrap();
        let r = exact_propagator(&model, &TimeInterval::new(0.0, PI).unwrap(), 1e-12).unwrap();
        let minus = identity(2) * Complex64::from(-1.0);
        assert!((r.propagator - minus).max_abs() < 1e-12);
    }

    #[test]
    fn commuting_model_matches_analytic_integral() {
        let model = HamiltonianModel::from_paulis(&[(ScalarFunction::cos(1.0, 1.0, 0.0), "Z")]).unwrap();
        let r = exact_propagator(&model, &TimeInterval::new(0.0, PI / 2.0).unwrap(), 1e-12).unwrap();
        let expected = expm(&(pauli('Z').unwrap() * Complex64::new(0.0, -1.0)));
        let err = spectral_norm(&(r.propagator - expected));
        assert!(err <= 1e-12, "{err} {} {}", r.error_estimate, r.substeps_used);
    }

    #[test]
    fn flow_property() {
        let model = rotating();
        let tol = 1e-10;
        let a = exact_propagator(&model, &TimeInterval::new(0.0, 1.0).unwrap(), tol).unwrap();
        let b = exact_propagator(&model, &TimeInterval::new(1.0, 2.0).unwrap(), tol).unwrap();
        let ab = exact_propagator(&model, &TimeInterval::new(0.0, 2.0).unwrap(), tol).unwrap();
        assert!(spectral_norm(&(b.propagator * a.propagator - ab.propagator)) <= 2.0 * tol);
    }

    #[test]
    fn defect_examples() {
        assert_eq!(unitarity_defect(&identity(3)), 0.0);
        let two = identity(2) * Complex64::from(2.0);
        assert!((unitarity_defect(&two) - 3.0).abs() < 1e-14);
        let r = exact_propagator(&rotating(), &TimeInterval::new(0.0, 1.0).unwrap(), 1e-9).unwrap();
        assert!(unitarity_defect(&r.propagator) <= r.error_estimate);
        assert!(r.error_estimate < 1e-9);
    }

    #[test]
    fn rejects_tiny_tolerance() {
        assert!(exact_propagator(&rotating(), &TimeInterval::new(0.0, 1.0).unwrap(), 1e-14).is_err());
    }
}
