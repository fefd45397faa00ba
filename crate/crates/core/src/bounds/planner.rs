use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Absolute constants of the cost model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    /// Truncation-bound constant `C`.
    pub c: f64,
    /// Step-selection constant `C₁`.
    pub c1: f64,
    /// Quadrature-selection constant `C₃`.
    pub c3: f64,
    /// Gate-count constants multiplying `p³ log p` and `p log p log M`.
    pub gate_c2: f64,
    pub gate_c3: f64,
    /// Sampling-oracle constants `C_⋄` and `a`.
    pub c_diamond: f64,
    pub a: f64,
}

impl Default for Constants {
    fn default() -> Self {
        Constants {
            c: 1.0,
            c1: 1.0,
            c3: 1.0,
            gate_c2: 1.0,
            gate_c3: 1.0,
            c_diamond: 1.0,
            a: 1.0,
        }
    }
}

/// Problem data shared by every order in a plan sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlannerInput {
    pub t: f64,
    pub eps: f64,
    /// `sup ‖H(t)‖`.
    pub alpha: f64,
    pub bar_alpha: f64,
    pub norm_a_prime: f64,
    pub gamma: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResourcePlan {
    pub p: usize,
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub h: f64,
    pub alpha_h: f64,
    pub delta: f64,
    #[serde(rename = "hamT_queries")]
    pub hamt_queries: f64,
    pub ancilla_qubits: f64,
    pub two_qubit_gates: f64,
    #[serde(rename = "subnorm_Cgamma")]
    pub subnorm_cgamma: f64,
    /// `Σ_{k=2}^{p} ε̃_k` of the permutation-coefficient preparation.
    pub sampling_error: f64,
    /// True when `L` was raised above the accuracy choice to keep `αh ≤ γ`.
    pub steps_raised_for_gamma: bool,
    pub input: PlannerInput,
    pub constants: Constants,
}

const MAX_COUNT: f64 = 9.0e15;
const MAX_PLAN_ORDER: usize = 16;
const DELTA_CEILING: f64 = 0.5;

/// Ceiling that ignores relative rounding noise below 1e−12.
fn ceil_count(x: f64, what: &str) -> Result<usize> {
    if !x.is_finite() || x > MAX_COUNT {
        return Err(Error::Infeasible(format!("{what} = {x:e} is not representable")));
    }
    Ok((x * (1.0 - 1e-12)).ceil().max(0.0) as usize)
}

fn check_order(p: usize) -> Result<()> {
    if p == 0 || p > MAX_PLAN_ORDER {
        return Err(Error::Guard(format!("order {p} outside 1..={MAX_PLAN_ORDER}")));
    }
    Ok(())
}

/// `L = ⌈C₁^{1/p} ᾱ^{1+1/p} T^{1+1/p} / ε^{1/p}⌉`, at least 1.
pub fn select_steps(p: usize, t: f64, eps: f64, bar_alpha: f64, c1: f64) -> Result<usize> {
    check_order(p)?;
    if !(eps > 0.0) || !(t > 0.0) {
        return Err(Error::Guard(format!("need ε > 0 and T > 0, got ε = {eps}, T = {t}")));
    }
    let inv_p = 1.0 / p as f64;
    let x = c1.powf(inv_p) * (bar_alpha * t).powf(1.0 + inv_p) / eps.powf(inv_p);
    Ok(ceil_count(x, "L")?.max(1))
}

/// `M = ⌈C₃ ‖A′‖ ᾱ^{−2} (L/(ᾱT))^{p−1}⌉`, at least `p`.
pub fn quadrature_points(
    p: usize,
    l: usize,
    t: f64,
    bar_alpha: f64,
    norm_a_prime: f64,
    c3: f64,
) -> Result<usize> {
    check_order(p)?;
    if norm_a_prime == 0.0 {
        return Ok(p);
    }
    if bar_alpha == 0.0 {
        return Err(Error::Infeasible(
            "M is unbounded when ᾱ = 0 but ‖A′‖ > 0".into(),
        ));
    }
    let x = c3 * norm_a_prime / (bar_alpha * bar_alpha)
        * (l as f64 / (bar_alpha * t)).powi(p as i32 - 1);
    Ok(ceil_count(x, "M")?.max(p))
}

/// [`quadrature_points`] with `L` from [`select_steps`].
pub fn select_quadrature(
    p: usize,
    t: f64,
    eps: f64,
    bar_alpha: f64,
    norm_a_prime: f64,
    c1: f64,
    c3: f64,
) -> Result<usize> {
    let l = select_steps(p, t, eps, bar_alpha, c1)?;
    quadrature_points(p, l, t, bar_alpha, norm_a_prime, c3)
}

/// `C^γ_(p) = Σ_{i=0}^{p−1} (αh)^i`.
pub fn subnorm_cgamma(p: usize, alpha_h: f64) -> f64 {
    (0..p).map(|i| alpha_h.powi(i as i32)).sum()
}

/// `ε̃_k = √C_⋄ k^{(2−a)/2} + C_⋄ k^{2−a}`.
pub fn sampling_error(k: usize, c_diamond: f64, a: f64) -> f64 {
    let k = k as f64;
    c_diamond.sqrt() * k.powf((2.0 - a) / 2.0) + c_diamond * k.powf(2.0 - a)
}

fn log2_at_least_one(x: f64) -> f64 {
    x.log2().max(1.0)
}

/// Step count, grid size, `δ` and the HAM-T, ancilla and two-qubit-gate
/// counts of the `p`-th order algorithm.
pub fn resource_estimate(p: usize, input: &PlannerInput, constants: &Constants) -> Result<ResourcePlan> {
    check_order(p)?;
    let PlannerInput {
        t,
        eps,
        alpha,
        bar_alpha,
        norm_a_prime,
        gamma,
    } = *input;
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::Infeasible(format!("γ = {gamma} must lie in (0, 1)")));
    }
    if !(alpha >= 0.0) {
        return Err(Error::Guard(format!("α = {alpha} must be non-negative")));
    }
    let accuracy_l = select_steps(p, t, eps, bar_alpha, constants.c1)?;
    let gamma_l = ceil_count(alpha * t / gamma, "L")?.max(1);
    let l = accuracy_l.max(gamma_l);
    let h = t / l as f64;
    let alpha_h = alpha * h;
    let m = quadrature_points(p, l, t, bar_alpha, norm_a_prime, constants.c3)?;
    let inv_p = 1.0 / p as f64;
    let delta = (constants.c1 * eps / (bar_alpha * t))
        .powf(1.0 + inv_p)
        .min(DELTA_CEILING);
    let cgamma = subnorm_cgamma(p, alpha_h);
    let per_step = cgamma * alpha_h + (1.0 / delta).ln();
    let p_f = p as f64;
    let hamt_queries = l as f64 * p_f * p_f * per_step;
    let ancilla_qubits =
        p_f * p_f * (p_f * l as f64 / eps).log2().max(0.0) + p_f + p_f * (m as f64).log2();
    let log_p = log2_at_least_one(p_f);
    let two_qubit_gates = l as f64
        * (constants.gate_c2 * p_f.powi(3) * log_p
            + constants.gate_c3 * p_f * log_p * log2_at_least_one(m as f64))
        * per_step;
    let sampling = (2..=p)
        .map(|k| sampling_error(k, constants.c_diamond, constants.a))
        .sum();
    Ok(ResourcePlan {
        p,
        l,
        m,
        h,
        alpha_h,
        delta,
        hamt_queries,
        ancilla_qubits,
        two_qubit_gates,
        subnorm_cgamma: cgamma,
        sampling_error: sampling,
        steps_raised_for_gamma: gamma_l > accuracy_l,
        input: *input,
        constants: *constants,
    })
}

/// Order in `1..=p_max` with the fewest HAM-T queries; ties go to the
/// smaller order.
pub fn optimal_order(
    input: &PlannerInput,
    constants: &Constants,
    p_max: usize,
) -> Result<(usize, ResourcePlan)> {
    check_order(p_max)?;
    let mut best: Option<ResourcePlan> = None;
    for p in 1..=p_max {
        let plan = resource_estimate(p, input, constants)?;
        if best.as_ref().map_or(true, |b| plan.hamt_queries < b.hamt_queries) {
            best = Some(plan);
        }
    }
    let plan = best.expect("p_max ≥ 1");
    Ok((plan.p, plan))
}
