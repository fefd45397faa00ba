use std::fmt;

use magnus_lab::blockenc::{
    beta, block_encode_omega_k, expected_time_mass, extract_block, lcu_combine, prep_time_ordered,
};
use magnus_lab::bounds::{
    bar_alpha_comm, commutator_report, global_truncation_bound, optimal_order, quadrature_bound,
    quadrature_bound_sum, resource_estimate, CommutatorReport, Constants, PlannerInput,
};
use magnus_lab::magnus::{evolve, omega_k_quadrature, omega_p_sum};
use magnus_lab::operators::{
    spectral_norm, Complex64, HamiltonianModel, MatrixProperties, TimeInterval,
};
use magnus_lab::reference::{exact_propagator, unitarity_defect};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::args::{Command, Options};
use crate::report::{
    fitted_slope, json_header, matrix_json, num, pair_slope, slope_cell, Csv, Report,
};

/// Grid maxima of `‖A‖`, `‖A′‖` are inflated by this factor before entering
/// a bound.
const SUP_INFLATION: f64 = 1.05;

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Io(String),
    Core(magnus_lab::Error),
}

impl Failure {
    /// 0 success, 2 parse, 3 guard, 4 layout, 5 infeasible.
    pub fn exit_code(&self) -> i32 {
        use magnus_lab::Error as E;
        match self {
            Failure::Usage(_) | Failure::Io(_) => 2,
            Failure::Core(E::Parse(_) | E::Model(_)) => 2,
            Failure::Core(E::LayoutTooLarge { .. }) => 4,
            Failure::Core(E::Infeasible(_)) => 5,
            Failure::Core(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(s) => write!(f, "usage: {s}"),
            Failure::Io(s) => write!(f, "i/o: {s}"),
            Failure::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<magnus_lab::Error> for Failure {
    fn from(e: magnus_lab::Error) -> Self {
        Failure::Core(e)
    }
}

type Outcome = Result<Report, Failure>;

pub fn run(command: Command, opts: &Options) -> Outcome {
    match command {
        Command::Simulate => simulate(opts),
        Command::Converge => converge(opts),
        Command::QuadratureSweep => quadrature_sweep(opts),
        Command::Commutators => commutators(opts),
        Command::VerifyCircuit => verify_circuit(opts),
        Command::Plan => plan(opts),
    }
}

fn load_model(opts: &Options) -> Result<(HamiltonianModel, Value), Failure> {
    let path = opts
        .model
        .as_ref()
        .ok_or_else(|| Failure::Usage("--model PATH is required".into()))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    let model = HamiltonianModel::from_json(&text)?;
    let value = model.to_json_value();
    Ok((model, value))
}

fn positive(name: &str, x: f64) -> Result<f64, Failure> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(Failure::Usage(format!("{name} must be positive, got {x}")))
    }
}

fn simulate(opts: &Options) -> Outcome {
    let (model, model_json) = load_model(opts)?;
    let p = opts.p.unwrap_or(2);
    let l = opts.l.unwrap_or(16);
    let m = opts.m.unwrap_or(64);
    let t = positive("T", opts.t.unwrap_or(1.0))?;
    let config = json!({
        "model_path": opts.model, "model": model_json,
        "p": p, "L": l, "M": m, "T": t, "tol": opts.tol,
    });
    let u = evolve(&model, t, l, p, m)?;
    let mut out = json_header("simulate", config);
    out["unitarity_defect"] = json!(unitarity_defect(&u));
    if let Some(tol) = opts.tol {
        let r = exact_propagator(&model, &TimeInterval::new(0.0, t)?, tol)?;
        out["reference"] = json!({
            "error": spectral_norm(&(&u - &r.propagator)),
            "error_estimate": r.error_estimate,
            "substeps_used": r.substeps_used,
        });
    }
    out["propagator"] = matrix_json(&u);
    Ok(Report::Json(out))
}

fn report_for(
    model: &HamiltonianModel,
    interval: &TimeInterval,
    opts: &Options,
) -> Result<CommutatorReport, Failure> {
    let qcap = opts.qcap.unwrap_or(6);
    let samples = opts.samples.unwrap_or(8);
    Ok(commutator_report(model, interval, 2, qcap, samples)?)
}

fn converge(opts: &Options) -> Outcome {
    let (model, model_json) = load_model(opts)?;
    let p = opts.p.unwrap_or(2);
    let m = opts.m.unwrap_or(512);
    let t = positive("T", opts.t.unwrap_or(1.0))?;
    let c = opts.c.unwrap_or(3.0);
    let tol = opts.tol.unwrap_or(1e-12);
    let mut hs = opts
        .h
        .clone()
        .unwrap_or_else(|| vec![0.25, 0.125, 0.0625, 0.03125]);
    hs.sort_by(|a, b| a.total_cmp(b));
    hs.dedup();
    let mut steps = Vec::with_capacity(hs.len());
    for &h in &hs {
        positive("h", h)?;
        let l = (t / h).round();
        if l < 1.0 || (l * h - t).abs() > 1e-9 * t {
            return Err(Failure::Usage(format!("T/h must be a positive integer, got T = {t}, h = {h}")));
        }
        steps.push(l as usize);
    }
    let interval = TimeInterval::new(0.0, t)?;
    let report = report_for(&model, &interval, opts)?;
    let norms = model
        .sup_norms(&interval, opts.samples.unwrap_or(8).max(64))?
        .inflated(SUP_INFLATION);
    let config = json!({
        "model_path": opts.model, "model": model_json,
        "p": p, "M": m, "T": t, "C": c, "tol": tol, "h": hs,
        "qcap": report.q_range.last(), "samples": report.time_samples,
        "sup_inflation": SUP_INFLATION,
    });
    let exact = exact_propagator(&model, &interval, tol)?;
    let rows: Vec<(f64, f64)> = hs
        .par_iter()
        .zip(&steps)
        .map(|(&h, &l)| -> Result<(f64, f64), Failure> {
            let u = evolve(&model, t, l, p, m)?;
            let error = spectral_norm(&(&u - &exact.propagator));
            let bound = global_truncation_bound(p, h, t, &report, c)?
                + l as f64 * quadrature_bound_sum(p, h, m, norms.generator, norms.derivative);
            Ok((error, bound))
        })
        .collect::<Result<_, _>>()?;
    let mut csv = Csv::new("converge", &config);
    csv.row(&["h", "L", "error", "bound", "slope_running"]);
    for (i, (&h, &(error, bound))) in hs.iter().zip(&rows).enumerate() {
        let slope = if i == 0 {
            None
        } else {
            pair_slope(hs[i - 1], rows[i - 1].0, h, error)
        };
        csv.row(&[num(h), steps[i].to_string(), num(error), num(bound), slope_cell(slope)]);
    }
    let errors: Vec<f64> = rows.iter().map(|r| r.0).collect();
    csv.comment("fitted_slope", &slope_cell(fitted_slope(&hs, &errors)));
    csv.comment("reference_error_estimate", &num(exact.error_estimate));
    Ok(csv.finish())
}

fn quadrature_sweep(opts: &Options) -> Outcome {
    let (model, model_json) = load_model(opts)?;
    let k = opts.k.unwrap_or(2);
    let t = positive("T", opts.t.unwrap_or(0.5))?;
    let samples = opts.samples.unwrap_or(64);
    let mut ms = opts.m_list.clone().unwrap_or_else(|| vec![8, 16, 32, 64, 128]);
    ms.sort_unstable();
    ms.dedup();
    let m_max = *ms
        .last()
        .ok_or_else(|| Failure::Usage("--M-list must not be empty".into()))?;
    let m_ref = 8 * m_max;
    let interval = TimeInterval::new(0.0, t)?;
    let norms = model.sup_norms(&interval, samples)?.inflated(SUP_INFLATION);
    let config = json!({
        "model_path": opts.model, "model": model_json,
        "k": k, "T": t, "M_list": ms, "M_ref": m_ref, "samples": samples,
        "sup_inflation": SUP_INFLATION,
    });
    let reference = omega_k_quadrature(&model, &interval, k, m_ref)?;
    let errors: Vec<f64> = ms
        .par_iter()
        .map(|&m| -> Result<f64, Failure> {
            let omega = omega_k_quadrature(&model, &interval, k, m)?;
            Ok(spectral_norm(&(omega - &reference)))
        })
        .collect::<Result<_, _>>()?;
    let mut csv = Csv::new("quadrature-sweep", &config);
    csv.row(&["M", "error", "bound", "within_bound"]);
    for (&m, &error) in ms.iter().zip(&errors) {
        let bound = quadrature_bound(k, t, m, norms.generator, norms.derivative);
        csv.row(&[m.to_string(), num(error), num(bound), (error <= bound).to_string()]);
    }
    let xs: Vec<f64> = ms.iter().map(|&m| m as f64).collect();
    csv.comment("fitted_slope", &slope_cell(fitted_slope(&xs, &errors)));
    Ok(csv.finish())
}

fn commutators(opts: &Options) -> Outcome {
    let (model, model_json) = load_model(opts)?;
    let t = positive("T", opts.t.unwrap_or(1.0))?;
    let p = opts.p.unwrap_or(2);
    let interval = TimeInterval::new(0.0, t)?;
    let report = report_for(&model, &interval, opts)?;
    let cap = *report.q_range.last().expect("non-empty range");
    let bar = bar_alpha_comm(&report, p, cap)?;
    let config = json!({
        "model_path": opts.model, "model": model_json,
        "p": p, "T": t, "qcap": cap, "samples": report.time_samples,
    });
    let mut out = json_header("commutators", config);
    out["report"] = json!(report);
    out["bar_alpha"] = json!(bar);
    Ok(Report::Json(out))
}

fn verify_circuit(opts: &Options) -> Outcome {
    let (model, model_json) = load_model(opts)?;
    let p = opts.p.unwrap_or(2);
    let m = opts.m.unwrap_or(2);
    let l = opts.l.unwrap_or(1).max(1);
    let t = positive("T", opts.t.unwrap_or(0.5))?;
    let seed = opts.seed.unwrap_or(0);
    let h = t / l as f64;
    let alpha = (0..m)
        .map(|i| spectral_norm(&model.hamiltonian(i as f64 * h / m as f64)))
        .fold(0.0, f64::max)
        * (1.0 + 1e-12);
    let alpha = if alpha > 0.0 { alpha } else { 1.0 };
    let interval = TimeInterval::new(0.0, h)?;
    let config = json!({
        "model_path": opts.model, "model": model_json,
        "p": p, "M": m, "L": l, "T": t, "h": h, "alpha": alpha, "seed": seed,
    });
    let mut terms = Vec::new();
    let mut encodings = Vec::new();
    let mut max_dev = 0.0f64;
    let mut max_defect = 0.0f64;
    for k in 1..=p {
        let be = block_encode_omega_k(&model, 0, h, k, m, alpha)?;
        let target = omega_k_quadrature(&model, &interval, k, m)?;
        let dev = (extract_block(&be) * Complex64::from(be.sub) - &target).max_abs();
        let defect = be.unitarity_defect(16, seed);
        max_dev = max_dev.max(dev);
        max_defect = max_defect.max(defect);
        let mut entry = json!({
            "k": k,
            "sub": be.sub,
            "max_deviation": dev,
            "unitarity_defect": defect,
            "qubits": be.summary().qubits,
        });
        if k >= 2 {
            let prep = prep_time_ordered(k, m)?;
            let expected = expected_time_mass(k, m);
            entry["beta"] = json!(beta(k).to_string());
            entry["good_mass"] = json!(prep.good_mass);
            entry["good_mass_exact"] = json!(prep.good_mass_exact.to_string());
            entry["good_mass_matches"] = json!(prep.good_mass_exact == expected);
        }
        terms.push(entry);
        encodings.push(be);
    }
    let lcu = lcu_combine(&encodings, alpha, h)?;
    let target = omega_p_sum(&model, &interval, p, m)?;
    let dev = (extract_block(&lcu) * Complex64::from(lcu.sub) - &target).max_abs();
    let defect = lcu.unitarity_defect(16, seed);
    max_dev = max_dev.max(dev);
    max_defect = max_defect.max(defect);
    let mut out = json_header("verify-circuit", config);
    out["terms"] = json!(terms);
    out["lcu"] = json!({
        "sub": lcu.sub,
        "max_deviation": dev,
        "unitarity_defect": defect,
        "layout": lcu.summary(),
    });
    out["max_deviation"] = json!(max_dev);
    out["max_unitarity_defect"] = json!(max_defect);
    Ok(Report::Json(out))
}

fn plan(opts: &Options) -> Outcome {
    let (model, model_json) = load_model(opts)?;
    let t = positive("T", opts.t.unwrap_or(1.0))?;
    let eps = positive("eps", opts.eps.unwrap_or(1e-6))?;
    let gamma = opts.gamma.unwrap_or(0.5);
    let interval = TimeInterval::new(0.0, t)?;
    let report = report_for(&model, &interval, opts)?;
    let norms = model.sup_norms(&interval, opts.samples.unwrap_or(8).max(64))?;
    // Uniform ᾱ over every grade in the report, so one input serves all orders.
    let bar_alpha = report
        .alpha
        .iter()
        .map(|(&q, &a)| a.powf(1.0 / q as f64))
        .fold(0.0, f64::max);
    let input = PlannerInput {
        t,
        eps,
        alpha: norms.generator,
        bar_alpha,
        norm_a_prime: norms.derivative,
        gamma,
    };
    let defaults = Constants::default();
    let constants = Constants {
        c: opts.c.unwrap_or(defaults.c),
        c1: opts.c1.unwrap_or(defaults.c1),
        c3: opts.c3.unwrap_or(defaults.c3),
        ..defaults
    };
    let p = opts.p.unwrap_or(if opts.optimize { 8 } else { 2 });
    let config = json!({
        "model_path": opts.model, "model": model_json,
        "p": p, "T": t, "eps": eps, "gamma": gamma, "optimize": opts.optimize,
        "qcap": report.q_range.last(), "samples": report.time_samples,
    });
    let mut out = json_header("plan", config);
    if opts.optimize {
        let (p_star, plan) = optimal_order(&input, &constants, p)?;
        out["p_star"] = json!(p_star);
        out["plan"] = json!(plan);
    } else {
        out["plan"] = json!(resource_estimate(p, &input, &constants)?);
    }
    Ok(Report::Json(out))
}
