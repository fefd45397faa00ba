use serde::{Deserialize, Serialize};

use super::commutators::{bar_alpha_comm, CommutatorReport};
use crate::{Error, Result};

/// Truncation and quadrature error estimates with the constant used.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorBudget {
    pub local_truncation: f64,
    pub global_truncation: f64,
    pub local_quadrature: f64,
    pub global_quadrature: f64,
    pub constant_c: f64,
}

impl ErrorBudget {
    pub fn local_total(&self) -> f64 {
        self.local_truncation + self.local_quadrature
    }

    pub fn global_total(&self) -> f64 {
        self.global_truncation + self.global_quadrature
    }
}

/// `α_q` from the report, or `ᾱ^q` beyond the largest grade it covers.
fn alpha_or_substitute(report: &CommutatorReport, p: usize) -> Result<impl Fn(usize) -> f64 + '_> {
    let cap = report
        .alpha
        .keys()
        .next_back()
        .copied()
        .ok_or_else(|| Error::Guard("commutator report is empty".into()))?;
    let bar = bar_alpha_comm(report, p, cap)?.value;
    Ok(move |q: usize| match report.alpha.get(&q) {
        Some(&a) if q <= cap => a,
        _ => bar.powi(q as i32),
    })
}

/// `(1/(p+1)) α_{p+1} h^{p+1} + C Σ_{q=p+2}^{p²+2p} α_q h^q`.
pub fn local_truncation_bound(p: usize, h: f64, report: &CommutatorReport, c: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::Guard(format!("step h = {h} must be positive")));
    }
    let alpha = alpha_or_substitute(report, p)?;
    let lead = alpha(p + 1) * h.powi(p as i32 + 1) / (p + 1) as f64;
    let tail: f64 = (p + 2..=p * p + 2 * p)
        .map(|q| alpha(q) * h.powi(q as i32))
        .sum();
    Ok(lead + c * tail)
}

/// `(1/(p+1)) α_{p+1} h^p T + C Σ α_q h^{q−1} T`.
pub fn global_truncation_bound(
    p: usize,
    h: f64,
    t: f64,
    report: &CommutatorReport,
    c: f64,
) -> Result<f64> {
    Ok(local_truncation_bound(p, h, report, c)? * t / h)
}

/// `2 (ᾱ̃ h)^{p+1}`, valid for `ᾱ̃ h < 1`.
pub fn alt_bound_infinite(p: usize, h: f64, tilde_alpha: f64) -> Result<f64> {
    let x = tilde_alpha * h;
    if x >= 1.0 {
        return Err(Error::Guard(format!(
            "alternative bound needs ᾱ̃h < 1, got {x}"
        )));
    }
    Ok(2.0 * x.powi(p as i32 + 1))
}

/// `(1/M)(k t^{k+1}‖A′‖‖A‖^{k−1} + (k−1) t^k ‖A‖^k)`.
pub fn quadrature_bound(k: usize, t: f64, m: usize, norm_a: f64, norm_a_prime: f64) -> f64 {
    let k_f = k as f64;
    let ki = k as i32;
    (k_f * t.powi(ki + 1) * norm_a_prime * norm_a.powi(ki - 1)
        + (k_f - 1.0) * t.powi(ki) * norm_a.powi(ki))
        / m as f64
}

/// Sum of [`quadrature_bound`] over `k = 1..=p`.
pub fn quadrature_bound_sum(p: usize, t: f64, m: usize, norm_a: f64, norm_a_prime: f64) -> f64 {
    (1..=p)
        .map(|k| quadrature_bound(k, t, m, norm_a, norm_a_prime))
        .sum()
}
