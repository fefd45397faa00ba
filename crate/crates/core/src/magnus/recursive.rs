use num_complex::Complex64;

use super::coefficients::{bernoulli, to_f64, Rational};
use super::quadrature::GeneratorGrid;
use super::MAX_RECURSIVE_ORDER;
use crate::operators::{zeros, ComplexMatrix, HamiltonianModel, TimeInterval};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_traits::Zero;

/// Compositions of `total` into `parts` positive integers.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 1..=total.saturating_sub(parts - 1) {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// `Ω_k` from the Bernoulli recursion
/// `Ω_n(t) = Σ_j (B_j/j!) Σ_{k_1+…+k_j=n−1} ∫_0^t ad_{Ω_{k_j}(s)}⋯ad_{Ω_{k_1}(s)} A(s) ds`.
///
/// Every outer integral is a left-Riemann sum on `m_outer` points and the
/// inner `Ω_{k_i}(s)` are the running sums of the same recursion at each grid
/// point.
pub fn omega_k_recursive(
    model: &HamiltonianModel,
    interval: &TimeInterval,
    k: usize,
    m_outer: usize,
) -> Result<ComplexMatrix> {
    if k == 0 || k > MAX_RECURSIVE_ORDER {
        return Err(Error::Guard(format!(
            "recursive order {k} outside 1..={MAX_RECURSIVE_ORDER}"
        )));
    }
    let grid = GeneratorGrid::new(model, interval, m_outer)?;
    let m = grid.len();
    let dim = grid.dim();
    // running[n-1][i] = Ω_n(s_i), s_i = t_0 + i·h/M, i = 0..=M.
    let mut running: Vec<Vec<ComplexMatrix>> = Vec::with_capacity(k);
    for n in 1..=k {
        let mut weights = Vec::new();
        for j in 1..n {
            let b = bernoulli(j)?;
            if b.is_zero() {
                continue;
            }
            let fact: BigInt = (1..=j).map(BigInt::from).product();
            let w = to_f64(&(b / Rational::from_integer(fact)));
            for comp in compositions(n - 1, j) {
                weights.push((w, comp));
            }
        }
        let mut values = Vec::with_capacity(m + 1);
        let mut acc = zeros(dim);
        values.push(acc.clone());
        for l in 0..m {
            let a = grid.weighted(l);
            if n == 1 {
                acc += a;
            } else {
                for (w, comp) in &weights {
                    let mut x = a.clone();
                    for &part in comp {
                        let omega = &running[part - 1][l];
                        x = omega * &x - &x * omega;
                    }
                    acc += x * Complex64::from(*w);
                }
            }
            values.push(acc.clone());
        }
        running.push(values);
    }
    Ok(running[k - 1][m].clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::magnus::omega_k_quadrature;
    use crate::operators::{MatrixProperties, ScalarFunction};

    #[test]
    fn composition_counts() {
        assert_eq!(compositions(3, 2), vec![vec![1, 2], vec![2, 1]]);
        assert_eq!(compositions(4, 1), vec![vec![4]]);
        assert_eq!(compositions(4, 4), vec![vec![1, 1, 1, 1]]);
        assert_eq!(compositions(5, 3).len(), 6);
    }

    #[test]
    fn low_orders_match_product_form_exactly() {
        let model = HamiltonianModel::from_paulis(&[
            (ScalarFunction::cos(1.0, 1.0, 0.0), "X"),
            (ScalarFunction::sin(1.0, 1.0, 0.0), "Z"),
        ])
        .unwrap();
        let iv = TimeInterval::new(0.0, 0.25).unwrap();
        for k in 1..=2 {
            let r = omega_k_recursive(&model, &iv, k, 40).unwrap();
            let q = omega_k_quadrature(&model, &iv, k, 40).unwrap();
            assert!((r - q).max_abs() < 1e-15, "k={k}");
        }
        assert!(omega_k_recursive(&model, &iv, 6, 8).is_err());
    }
}
