//! Matrix exponential by scaling and squaring with diagonal Padé
//! approximants of degree 3, 5, 7, 9 or 13 (Higham 2005).

use num_complex::Complex64;

use super::matrix::{identity, ComplexMatrix};

const THETA: [(usize, f64); 4] = [
    (3, 1.495585217958292e-2),
    (5, 2.539398330063230e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
];
const THETA_13: f64 = 5.371920351148152;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

fn one_norm(m: &ComplexMatrix) -> f64 {
    m.column_iter()
        .map(|col| col.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn scaled(m: &ComplexMatrix, s: f64) -> ComplexMatrix {
    m * Complex64::new(s, 0.0)
}

/// Returns `(U, V)` with `exp(a) ≈ (V − U)⁻¹ (V + U)`.
fn pade_low(a: &ComplexMatrix, b: &[f64]) -> (ComplexMatrix, ComplexMatrix) {
    let n = a.nrows();
    let a2 = a * a;
    let mut power = identity(n);
    let mut odd = scaled(&power, b[1]);
    let mut even = scaled(&power, b[0]);
    for j in (2..b.len()).step_by(2) {
        power = &power * &a2;
        even += scaled(&power, b[j]);
        if j + 1 < b.len() {
            odd += scaled(&power, b[j + 1]);
        }
    }
    (a * odd, even)
}

fn pade13(a: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let n = a.nrows();
    let b = &B13;
    let id = identity(n);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let inner_u = scaled(&a6, b[13]) + scaled(&a4, b[11]) + scaled(&a2, b[9]);
    let u = a * (&a6 * inner_u
        + scaled(&a6, b[7])
        + scaled(&a4, b[5])
        + scaled(&a2, b[3])
        + scaled(&id, b[1]));
    let inner_v = scaled(&a6, b[12]) + scaled(&a4, b[10]) + scaled(&a2, b[8]);
    let v = &a6 * inner_v
        + scaled(&a6, b[6])
        + scaled(&a4, b[4])
        + scaled(&a2, b[2])
        + scaled(&id, b[0]);
    (u, v)
}

fn solve_pade(u: ComplexMatrix, v: ComplexMatrix) -> ComplexMatrix {
    let p = &v + &u;
    let q = v - u;
    q.lu()
        .solve(&p)
        .expect("Padé denominator is nonsingular for scaled arguments")
}

/// Matrix exponential `e^m`.
pub fn expm(m: &ComplexMatrix) -> ComplexMatrix {
    assert!(m.is_square(), "expm requires a square matrix");
    let n = m.nrows();
    if n == 0 {
        return m.clone();
    }
    if n == 1 {
        return ComplexMatrix::from_element(1, 1, m[(0, 0)].exp());
    }
    let norm = one_norm(m);
    if norm == 0.0 {
        return identity(n);
    }
    for &(degree, theta) in &THETA {
        if norm <= theta {
            let b: &[f64] = match degree {
                3 => &B3,
                5 => &B5,
                7 => &B7,
                _ => &B9,
            };
            let (u, v) = pade_low(m, b);
            return solve_pade(u, v);
        }
    }
    let squarings = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let a = scaled(m, 2f64.powi(-squarings));
    let (u, v) = pade13(&a);
    let mut result = solve_pade(u, v);
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{pauli, MatrixProperties};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Plain Taylor series summed until the terms vanish; only usable for
    /// moderate norms.
    fn taylor(m: &ComplexMatrix) -> ComplexMatrix {
        let mut term = identity(m.nrows());
        let mut sum = term.clone();
        for k in 1..200 {
            term = &term * m * c(1.0 / k as f64, 0.0);
            sum += &term;
            if term.max_abs() < 1e-300 {
                break;
            }
        }
        sum
    }

    #[test]
    fn trivial_cases() {
        assert!((expm(&ComplexMatrix::zeros(3, 3)) - identity(3)).max_abs() == 0.0);

        let z = pauli('Z').unwrap();
        let e = expm(&(z * c(0.0, -std::f64::consts::FRAC_PI_2)));
        assert!((e[(0, 0)] - c(0.0, -1.0)).norm() < 1e-15);
        assert!((e[(1, 1)] - c(0.0, 1.0)).norm() < 1e-15);
        assert!(e[(0, 1)].norm() < 1e-15);

        let nil = ComplexMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(0., 0.), c(0., 0.)]);
        let e = expm(&nil);
        let expected = ComplexMatrix::from_row_slice(2, 2, &[c(1., 0.), c(1., 0.), c(0., 0.), c(1., 0.)]);
        assert!((e - expected).max_abs() < 1e-15);
    }

    #[test]
    fn agrees_with_taylor_across_degree_regimes() {
        let base = ComplexMatrix::from_row_slice(
            3,
            3,
            &[
                c(0.1, 0.3),
                c(-0.4, 0.2),
                c(0.7, 0.0),
                c(0.2, -0.1),
                c(-0.3, 0.5),
                c(0.1, 0.1),
                c(0.0, 0.6),
                c(0.5, -0.2),
                c(0.2, 0.0),
            ],
        );
        for scale in [1e-3, 0.05, 0.3, 1.0, 2.0, 4.0, 8.0] {
            let m = &base * c(scale, 0.0);
            let e = expm(&m);
            let t = taylor(&m);
            let rel = (&e - &t).max_abs() / t.max_abs();
            assert!(rel < 1e-13, "scale {scale}: relative deviation {rel:e}");
        }
    }

    #[test]
    fn large_anti_hermitian_argument_stays_unitary() {
        let x = pauli('X').unwrap();
        let z = pauli('Z').unwrap();
        let h = x * c(12.0, 0.0) + z * c(-9.0, 0.0);
        let u = expm(&(h * c(0.0, -1.0)));
        assert!(u.is_unitary(1e-12));
        // exp(-i θ n·σ) = cos θ − i sin θ n·σ with θ = 15
        let expected = c(15f64.cos(), 0.0);
        assert!((u[(0, 0)] + u[(1, 1)] - expected * 2.0).norm() < 1e-12);
    }
}
