use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::combinatorics::Permutation;
use crate::{Error, Result};

/// Exact reduced fraction with arbitrary-precision parts.
pub type Rational = BigRational;

const MAX_BERNOULLI: usize = 64;

/// Which count plays the role of `d` in the signed coefficient formulas.
///
/// `Paper` uses descents `|{i : π(i) > π(i+1)}|` in both formulas. `Flipped`
/// swaps descents and ascents everywhere.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    #[default]
    Paper,
    Flipped,
}

impl Convention {
    fn signed_count(self, p: &Permutation) -> usize {
        match self {
            Convention::Paper => p.descents(),
            Convention::Flipped => p.ascents(),
        }
    }
}

fn bernoulli_table() -> &'static [Rational] {
    static TABLE: OnceLock<Vec<Rational>> = OnceLock::new();
    TABLE.get_or_init(|| {
        // Σ_{m=0}^{n} C(n+1, m) B_m = 0 for n ≥ 1.
        let mut table: Vec<Rational> = vec![Rational::one()];
        for n in 1..=MAX_BERNOULLI {
            let mut acc = Rational::zero();
            let mut binom = BigInt::one();
            for (m, b) in table.iter().enumerate() {
                acc += b * Rational::from_integer(binom.clone());
                binom = binom * BigInt::from(n + 1 - m) / BigInt::from(m + 1);
            }
            table.push(-acc / Rational::from_integer(BigInt::from(n + 1)));
        }
        table
    })
}

/// Bernoulli number `B_n` with `B_1 = −1/2`.
pub fn bernoulli(n: usize) -> Result<Rational> {
    bernoulli_table()
        .get(n)
        .cloned()
        .ok_or_else(|| Error::Guard(format!("bernoulli({n}) exceeds the supported n ≤ {MAX_BERNOULLI}")))
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

fn binomial(n: usize, k: usize) -> BigInt {
    factorial(n) / (factorial(k) * factorial(n - k))
}

fn check_size(p: &Permutation, k: usize) -> Result<()> {
    if k == 0 || p.len() != k {
        return Err(Error::Guard(format!(
            "permutation of length {} used with order {k}",
            p.len()
        )));
    }
    Ok(())
}

fn sign(d: usize) -> BigInt {
    if d % 2 == 0 {
        BigInt::one()
    } else {
        -BigInt::one()
    }
}

/// Product-form weight `C_{π,k} = (−1)^d / (k·C(k−1, d))`.
pub fn coeff_product(p: &Permutation, k: usize, convention: Convention) -> Result<Rational> {
    check_size(p, k)?;
    let d = convention.signed_count(p);
    Ok(Rational::new(sign(d), BigInt::from(k) * binomial(k - 1, d)))
}

/// Commutator-form weight `c_{π,n} = (1/n)(−1)^{d_b} d_a! d_b! / n!`.
pub fn coeff_commutator(p: &Permutation, n: usize, convention: Convention) -> Result<Rational> {
    check_size(p, n)?;
    let d_b = convention.signed_count(p);
    let d_a = n - 1 - d_b;
    Ok(Rational::new(
        sign(d_b) * factorial(d_a) * factorial(d_b),
        BigInt::from(n) * factorial(n),
    ))
}

pub(crate) fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        let sign = if r.is_negative() { -1.0 } else { 1.0 };
        sign * f64::INFINITY
    })
}
