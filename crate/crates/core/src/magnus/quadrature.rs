use num_complex::Complex64;
use rayon::prelude::*;

use super::coefficients::{coeff_commutator, coeff_product, to_f64, Convention};
use super::combinatorics::{ordered_tuples, Permutation};
use super::MAX_ORDER;
use crate::operators::{zeros, ComplexMatrix, HamiltonianModel, TimeInterval};
use crate::{Error, Result};

/// Entries allowed in the iterated-sum tensor before falling back to
/// explicit tuple enumeration.
const TENSOR_LIMIT: usize = 1 << 22;

/// Generator snapshots `A(t_0 + i·h/M)·(h/M)` on the left-Riemann grid.
#[derive(Clone, Debug)]
pub struct GeneratorGrid {
    dim: usize,
    step: f64,
    weighted: Vec<ComplexMatrix>,
}

impl GeneratorGrid {
    pub fn new(model: &HamiltonianModel, interval: &TimeInterval, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::Guard("quadrature needs at least one point".into()));
        }
        let step = interval.length() / m as f64;
        let weighted = (0..m)
            .map(|i| model.generator(interval.start() + i as f64 * step) * Complex64::from(step))
            .collect();
        Ok(GeneratorGrid {
            dim: model.dim(),
            step,
            weighted,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weighted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weighted.is_empty()
    }

    /// Spacing `h/M`.
    pub fn step(&self) -> f64 {
        self.step
    }

    /// `A(t_0 + i·h/M)·(h/M)`.
    pub fn weighted(&self, i: usize) -> &ComplexMatrix {
        &self.weighted[i]
    }
}

fn check_order(k: usize) -> Result<()> {
    if k == 0 || k > MAX_ORDER {
        return Err(Error::Guard(format!("order {k} outside 1..={MAX_ORDER}")));
    }
    Ok(())
}

fn first_order(grid: &GeneratorGrid) -> ComplexMatrix {
    grid.weighted
        .iter()
        .fold(zeros(grid.dim), |acc, a| acc + a)
}

/// Product-form `Ω̃_k` on `M` left-Riemann points, paper convention.
pub fn omega_k_quadrature(
    model: &HamiltonianModel,
    interval: &TimeInterval,
    k: usize,
    m: usize,
) -> Result<ComplexMatrix> {
    check_order(k)?;
    let grid = GeneratorGrid::new(model, interval, m)?;
    omega_k_quadrature_with(&grid, k, Convention::Paper)
}

/// Product-form `Ω̃_k` on a prepared grid.
///
/// Evaluated through the iterated sums `Σ_{i_1>…>i_k} A_{i_1}⊗…⊗A_{i_k}`
/// contracted once per permutation when the tensor is small enough, and by
/// explicit enumeration otherwise. Both routes compute the same finite sum.
pub fn omega_k_quadrature_with(
    grid: &GeneratorGrid,
    k: usize,
    convention: Convention,
) -> Result<ComplexMatrix> {
    check_order(k)?;
    if k > grid.len() {
        return Ok(zeros(grid.dim));
    }
    if k == 1 {
        return Ok(first_order(grid));
    }
    let d = grid.dim as f64;
    let entries = (grid.dim * grid.dim).pow(k as u32);
    let k_fact = (1..=k).product::<usize>() as f64;
    let tensor_cost =
        grid.len() as f64 * (entries as f64) * 1.1 + k_fact * d.powi(k as i32 + 1) * k as f64;
    let tuples = binomial_f64(grid.len(), k);
    let enum_cost = tuples * k_fact * (k - 1) as f64 * d.powi(3);
    if entries <= TENSOR_LIMIT && tensor_cost <= enum_cost {
        iterated_sum_route(grid, k, convention)
    } else {
        omega_k_enumerated(grid, k, convention)
    }
}

fn binomial_f64(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// Leading indices partition the tuple set; each part is reduced
/// sequentially and the parts are summed in index order.
fn tuples_by_leading_index(m: usize, k: usize) -> impl Iterator<Item = (usize, usize)> {
    (k - 1..m).map(move |lead| (lead, k - 1))
}

fn sum_ordered(parts: Vec<Vec<ComplexMatrix>>, slots: usize, dim: usize) -> Vec<ComplexMatrix> {
    let mut totals = vec![zeros(dim); slots];
    for part in parts {
        for (t, p) in totals.iter_mut().zip(part) {
            *t += p;
        }
    }
    totals
}

fn weighted_sum(
    per_perm: Vec<ComplexMatrix>,
    perms: &[Permutation],
    weight: impl Fn(&Permutation) -> Result<f64>,
    dim: usize,
) -> Result<ComplexMatrix> {
    let mut out = zeros(dim);
    for (acc, p) in per_perm.into_iter().zip(perms) {
        out += acc * Complex64::from(weight(p)?);
    }
    Ok(out)
}

/// Product-form `Ω̃_k` by explicit enumeration of tuples and permutations.
pub fn omega_k_enumerated(
    grid: &GeneratorGrid,
    k: usize,
    convention: Convention,
) -> Result<ComplexMatrix> {
    check_order(k)?;
    if k > grid.len() {
        return Ok(zeros(grid.dim));
    }
    let perms = Permutation::all(k);
    let leads: Vec<_> = tuples_by_leading_index(grid.len(), k).collect();
    let parts: Vec<Vec<ComplexMatrix>> = leads
        .par_iter()
        .map(|&(lead, rest)| {
            let mut acc = vec![zeros(grid.dim); perms.len()];
            let mut tuple = vec![lead; k];
            for tail in ordered_tuples(lead, rest) {
                tuple[1..].copy_from_slice(&tail);
                for (slot, p) in acc.iter_mut().zip(&perms) {
                    let mut prod = grid.weighted(tuple[p.apply(1) - 1]).clone();
                    for q in 2..=k {
                        prod *= grid.weighted(tuple[p.apply(q) - 1]);
                    }
                    *slot += prod;
                }
            }
            acc
        })
        .collect();
    let per_perm = sum_ordered(parts, perms.len(), grid.dim);
    weighted_sum(per_perm, &perms, |p| Ok(to_f64(&coeff_product(p, k, convention)?)), grid.dim)
}

fn iterated_sum_route(
    grid: &GeneratorGrid,
    k: usize,
    convention: Convention,
) -> Result<ComplexMatrix> {
    let d = grid.dim;
    let dd = d * d;
    // levels[m] holds Σ_{i_1>…>i_m} A_{i_1}⊗…⊗A_{i_m}, slot 1 most significant.
    let mut levels: Vec<Vec<Complex64>> = (0..=k).map(|m| vec![Complex64::default(); dd.pow(m as u32)]).collect();
    levels[0][0] = Complex64::from(1.0);
    for (i, a) in grid.weighted.iter().enumerate() {
        let flat: Vec<Complex64> = (0..dd).map(|e| a[(e / d, e % d)]).collect();
        for m in (1..=k.min(i + 1)).rev() {
            let (lower, upper) = levels.split_at_mut(m);
            let prev = &lower[m - 1];
            let cur = &mut upper[0];
            let block = prev.len();
            for (e, &ae) in flat.iter().enumerate() {
                if ae == Complex64::default() {
                    continue;
                }
                let dst = &mut cur[e * block..(e + 1) * block];
                for (x, &y) in dst.iter_mut().zip(prev) {
                    *x += ae * y;
                }
            }
        }
    }
    let tensor = &levels[k];
    let perms = Permutation::all(k);
    let weights: Vec<f64> = perms
        .iter()
        .map(|p| Ok(to_f64(&coeff_product(p, k, convention)?)))
        .collect::<Result<_>>()?;
    // Position q of the product reads tensor slot π(q).
    let strides: Vec<Vec<usize>> = perms
        .iter()
        .map(|p| (1..=k).map(|q| dd.pow((k - p.apply(q)) as u32)).collect())
        .collect();
    let mut out = zeros(d);
    let mut chain = vec![0usize; k + 1];
    loop {
        let mut value = Complex64::default();
        for (w, stride) in weights.iter().zip(&strides) {
            let idx: usize = (0..k)
                .map(|q| (chain[q] * d + chain[q + 1]) * stride[q])
                .sum();
            value += tensor[idx] * *w;
        }
        out[(chain[0], chain[k])] += value;
        let mut pos = k + 1;
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            chain[pos] += 1;
            if chain[pos] < d {
                break;
            }
            chain[pos] = 0;
        }
    }
}

/// Commutator-form `Ω̃_k` with right-nested brackets, paper convention.
pub fn omega_k_commutator_form(
    model: &HamiltonianModel,
    interval: &TimeInterval,
    k: usize,
    m: usize,
) -> Result<ComplexMatrix> {
    check_order(k)?;
    let grid = GeneratorGrid::new(model, interval, m)?;
    omega_k_commutator_form_with(&grid, k, Convention::Paper)
}

/// Commutator-form `Ω̃_k` on a prepared grid, by explicit enumeration.
pub fn omega_k_commutator_form_with(
    grid: &GeneratorGrid,
    k: usize,
    convention: Convention,
) -> Result<ComplexMatrix> {
    check_order(k)?;
    if k > grid.len() {
        return Ok(zeros(grid.dim));
    }
    if k == 1 {
        return Ok(first_order(grid));
    }
    let perms = Permutation::all(k);
    let leads: Vec<_> = tuples_by_leading_index(grid.len(), k).collect();
    let parts: Vec<Vec<ComplexMatrix>> = leads
        .par_iter()
        .map(|&(lead, rest)| {
            let mut acc = vec![zeros(grid.dim); perms.len()];
            let mut tuple = vec![lead; k];
            for tail in ordered_tuples(lead, rest) {
                tuple[1..].copy_from_slice(&tail);
                for (slot, p) in acc.iter_mut().zip(&perms) {
                    let mut nested = grid.weighted(tuple[p.apply(k) - 1]).clone();
                    for q in (1..k).rev() {
                        let a = grid.weighted(tuple[p.apply(q) - 1]);
                        nested = a * &nested - &nested * a;
                    }
                    *slot += nested;
                }
            }
            acc
        })
        .collect();
    let per_perm = sum_ordered(parts, perms.len(), grid.dim);
    weighted_sum(per_perm, &perms, |p| Ok(to_f64(&coeff_commutator(p, k, convention)?)), grid.dim)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{pauli, MatrixProperties, ScalarFunction};

    fn rotating() -> HamiltonianModel {
        HamiltonianModel::from_paulis(&[
            (ScalarFunction::cos(1.0, 1.0, 0.0), "X"),
            (ScalarFunction::sin(1.0, 1.0, 0.0), "Z"),
        ])
        .unwrap()
    }

    fn interval(h: f64) -> TimeInterval {
        TimeInterval::new(0.0, h).unwrap()
    }

    fn max_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
        (a - b).max_abs()
    }

    #[test]
    fn first_order_constant_is_exact() {
        let model = HamiltonianModel::from_paulis(&[(ScalarFunction::constant(1.0), "Z")]).unwrap();
        let h = 0.7;
        let expected = pauli('Z').unwrap() * Complex64::new(0.0, -h);
        for m in [1, 3, 16] {
            let got = omega_k_quadrature(&model, &interval(h), 1, m).unwrap();
            assert!(max_diff(&got, &expected) < 1e-15);
        }
    }

    #[test]
    fn commuting_model_has_no_second_order() {
        let model = HamiltonianModel::from_paulis(&[(ScalarFunction::cos(1.0, 1.0, 0.0), "Z")]).unwrap();
        let got = omega_k_quadrature(&model, &interval(0.9), 2, 32).unwrap();
        assert!(got.max_abs() < 1e-14);
    }

    #[test]
    fn second_order_matches_double_loop() {
        let grid = GeneratorGrid::new(&rotating(), &interval(0.5), 32).unwrap();
        let mut oracle = zeros(2);
        for i in 0..32 {
            for j in 0..i {
                let (a, b) = (grid.weighted(i), grid.weighted(j));
                oracle += (a * b - b * a) * Complex64::from(0.5);
            }
        }
        let comm = omega_k_commutator_form_with(&grid, 2, Convention::Paper).unwrap();
        let prod = omega_k_quadrature_with(&grid, 2, Convention::Paper).unwrap();
        assert!(max_diff(&comm, &oracle) < 1e-15);
        assert!(max_diff(&prod, &oracle) < 1e-15);
    }

    #[test]
    fn tensor_route_matches_enumeration() {
        let grid = GeneratorGrid::new(&rotating(), &interval(0.8), 9).unwrap();
        for k in 2..=5 {
            let fast = iterated_sum_route(&grid, k, Convention::Paper).unwrap();
            let slow = omega_k_enumerated(&grid, k, Convention::Paper).unwrap();
            let scale = slow.max_abs().max(1e-300);
            assert!(max_diff(&fast, &slow) <= 1e-12 * scale.max(1e-6), "k={k}");
        }
    }

    #[test]
    fn degenerate_and_guarded_orders() {
        let got = omega_k_quadrature(&rotating(), &interval(1.0), 4, 3).unwrap();
        assert_eq!(got, zeros(2));
        assert!(omega_k_quadrature(&rotating(), &interval(1.0), 7, 16).is_err());
        assert!(omega_k_quadrature(&rotating(), &interval(1.0), 0, 16).is_err());
    }

    #[test]
    fn third_order_is_anti_hermitian() {
        let got = omega_k_quadrature(&rotating(), &interval(0.6), 3, 24).unwrap();
        assert!(got.is_anti_hermitian(1e-10 * got.max_abs()));
    }
}
