use serde::{Deserialize, Serialize};

use super::matrix::{pauli_string, spectral_norm, zeros, ComplexMatrix, MatrixProperties};
use super::Complex64;
use crate::{Error, Result};

const HERMITIAN_TOL: f64 = 1e-12;

/// Closed-form real coefficient `f(t)`.
#[derive(Clone, Debug, PartialEq)]
pub enum ScalarFunction {
    Const { scale: f64 },
    /// `scale · cos(omega·t + phase)`
    Cos { scale: f64, omega: f64, phase: f64 },
    /// `scale · sin(omega·t + phase)`
    Sin { scale: f64, omega: f64, phase: f64 },
    /// `scale · t^power`
    Monomial { scale: f64, power: u32 },
}

impl ScalarFunction {
    pub fn constant(scale: f64) -> Self {
        ScalarFunction::Const { scale }
    }

    pub fn cos(scale: f64, omega: f64, phase: f64) -> Self {
        ScalarFunction::Cos { scale, omega, phase }
    }

    pub fn sin(scale: f64, omega: f64, phase: f64) -> Self {
        ScalarFunction::Sin { scale, omega, phase }
    }

    pub fn monomial(scale: f64, power: u32) -> Self {
        ScalarFunction::Monomial { scale, power }
    }

    pub fn value(&self, t: f64) -> f64 {
        match *self {
            ScalarFunction::Const { scale } => scale,
            ScalarFunction::Cos { scale, omega, phase } => scale * (omega * t + phase).cos(),
            ScalarFunction::Sin { scale, omega, phase } => scale * (omega * t + phase).sin(),
            ScalarFunction::Monomial { scale, power } => scale * t.powi(power as i32),
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        match *self {
            ScalarFunction::Const { .. } => 0.0,
            ScalarFunction::Cos { scale, omega, phase } => {
                -scale * omega * (omega * t + phase).sin()
            }
            ScalarFunction::Sin { scale, omega, phase } => {
                scale * omega * (omega * t + phase).cos()
            }
            ScalarFunction::Monomial { scale, power } => match power {
                0 => 0.0,
                p => scale * p as f64 * t.powi(p as i32 - 1),
            },
        }
    }

    /// `∫_{t0}^{t1} f(s) ds`.
    pub fn integral(&self, t0: f64, t1: f64) -> f64 {
        match *self {
            ScalarFunction::Const { scale } => scale * (t1 - t0),
            ScalarFunction::Cos { scale, omega, phase } if omega != 0.0 => {
                scale / omega * ((omega * t1 + phase).sin() - (omega * t0 + phase).sin())
            }
            ScalarFunction::Sin { scale, omega, phase } if omega != 0.0 => {
                -scale / omega * ((omega * t1 + phase).cos() - (omega * t0 + phase).cos())
            }
            ScalarFunction::Cos { scale, phase, .. } => scale * phase.cos() * (t1 - t0),
            ScalarFunction::Sin { scale, phase, .. } => scale * phase.sin() * (t1 - t0),
            ScalarFunction::Monomial { scale, power } => {
                let n = power as i32 + 1;
                scale * (t1.powi(n) - t0.powi(n)) / n as f64
            }
        }
    }
}

/// One summand `f_j(t) H_j`.
#[derive(Clone, Debug)]
pub struct Term {
    pub coeff: ScalarFunction,
    pub matrix: ComplexMatrix,
}

/// `[t0, t1]` with `t1 > t0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeInterval {
    t0: f64,
    t1: f64,
}

impl TimeInterval {
    pub fn new(t0: f64, t1: f64) -> Result<Self> {
        if !(t0.is_finite() && t1.is_finite() && t1 > t0) {
            return Err(Error::Guard(format!("time interval requires t1 > t0, got [{t0}, {t1}]")));
        }
        Ok(TimeInterval { t0, t1 })
    }

    pub fn start(&self) -> f64 {
        self.t0
    }

    pub fn end(&self) -> f64 {
        self.t1
    }

    pub fn length(&self) -> f64 {
        self.t1 - self.t0
    }
}

/// Grid maxima of `‖A(t)‖` and `‖A'(t)‖`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupNorms {
    pub generator: f64,
    pub derivative: f64,
}

impl SupNorms {
    /// Both norms multiplied by `factor` (used to cover the gap between a
    /// grid maximum and the true supremum).
    pub fn inflated(self, factor: f64) -> Self {
        SupNorms {
            generator: self.generator * factor,
            derivative: self.derivative * factor,
        }
    }
}

/// `H(t) = Σ_j f_j(t) H_j` with Hermitian `H_j`.
#[derive(Clone, Debug)]
pub struct HamiltonianModel {
    dim: usize,
    terms: Vec<Term>,
}

impl HamiltonianModel {
    pub fn new(dim: usize, terms: Vec<Term>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Model("dimension must be positive".into()));
        }
        for (j, term) in terms.iter().enumerate() {
            if term.matrix.shape() != (dim, dim) {
                return Err(Error::Model(format!(
                    "term {j} has shape {:?}, expected {dim}x{dim}",
                    term.matrix.shape()
                )));
            }
            if !term.matrix.is_hermitian(HERMITIAN_TOL) {
                return Err(Error::Model(format!("term {j} is not Hermitian")));
            }
            let (ScalarFunction::Const { scale }
            | ScalarFunction::Cos { scale, .. }
            | ScalarFunction::Sin { scale, .. }
            | ScalarFunction::Monomial { scale, .. }) = term.coeff;
            if !scale.is_finite() {
                return Err(Error::Model(format!("term {j} has a non-finite scale")));
            }
        }
        Ok(HamiltonianModel { dim, terms })
    }

    /// Convenience constructor from `(coefficient, Pauli string)` pairs.
    pub fn from_paulis(terms: &[(ScalarFunction, &str)]) -> Result<Self> {
        let built = terms
            .iter()
            .map(|(coeff, label)| {
                Ok(Term {
                    coeff: coeff.clone(),
                    matrix: pauli_string(label)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let dim = built
            .first()
            .map(|t| t.matrix.nrows())
            .ok_or_else(|| Error::Model("model needs at least one term".into()))?;
        Self::new(dim, built)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    fn combine(&self, weight: impl Fn(&ScalarFunction) -> f64) -> ComplexMatrix {
        let mut out = zeros(self.dim);
        for term in &self.terms {
            let w = weight(&term.coeff);
            if w != 0.0 {
                out += &term.matrix * Complex64::new(w, 0.0);
            }
        }
        out
    }

    /// `H(t)`.
    pub fn hamiltonian(&self, t: f64) -> ComplexMatrix {
        self.combine(|f| f.value(t))
    }

    /// `A(t) = −i H(t)`.
    pub fn generator(&self, t: f64) -> ComplexMatrix {
        self.hamiltonian(t) * Complex64::new(0.0, -1.0)
    }

    /// `H'(t)` from the analytic coefficient derivatives.
    pub fn hamiltonian_derivative(&self, t: f64) -> ComplexMatrix {
        self.combine(|f| f.derivative(t))
    }

    /// `∫ H` over the interval, exact for every coefficient family.
    pub fn hamiltonian_integral(&self, interval: &TimeInterval) -> ComplexMatrix {
        self.combine(|f| f.integral(interval.start(), interval.end()))
    }

    /// True when all term matrices commute pairwise, so `H(t)` commutes with
    /// itself at all times.
    pub fn is_commuting(&self, tol: f64) -> bool {
        self.terms.iter().enumerate().all(|(i, a)| {
            self.terms[i + 1..].iter().all(|b| {
                (&a.matrix * &b.matrix - &b.matrix * &a.matrix).max_abs() <= tol
            })
        })
    }

    /// Maxima of `‖A‖` and `‖A'‖` over `samples` uniformly spaced points of
    /// the closed interval. This is a lower bound of the true supremum.
    pub fn sup_norms(&self, interval: &TimeInterval, samples: usize) -> Result<SupNorms> {
        if samples < 2 {
            return Err(Error::Guard(format!("sup_norms needs at least 2 samples, got {samples}")));
        }
        let step = interval.length() / (samples - 1) as f64;
        let mut norms = SupNorms {
            generator: 0.0,
            derivative: 0.0,
        };
        for i in 0..samples {
            let t = interval.start() + step * i as f64;
            norms.generator = norms.generator.max(spectral_norm(&self.hamiltonian(t)));
            norms.derivative = norms
                .derivative
                .max(spectral_norm(&self.hamiltonian_derivative(t)));
        }
        Ok(norms)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawModel = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        raw.build()
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let terms: Vec<RawTerm> = self
            .terms
            .iter()
            .map(|t| RawTerm {
                matrix: RawMatrix {
                    pauli: None,
                    dense_re: Some(rows(&t.matrix, |z| z.re)),
                    dense_im: Some(rows(&t.matrix, |z| z.im)),
                },
                coeff: RawCoeff::from(&t.coeff),
            })
            .collect();
        serde_json::to_value(RawModel {
            dim: self.dim,
            terms,
        })
        .expect("model serializes")
    }
}

fn rows(m: &ComplexMatrix, part: impl Fn(&Complex64) -> f64) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| part(&m[(r, c)])).collect())
        .collect()
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    dim: usize,
    terms: Vec<RawTerm>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTerm {
    matrix: RawMatrix,
    coeff: RawCoeff,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMatrix {
    #[serde(skip_serializing_if = "Option::is_none")]
    pauli: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dense_re: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dense_im: Option<Vec<Vec<f64>>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCoeff {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    omega: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    phase: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    power: Option<u32>,
}

impl From<&ScalarFunction> for RawCoeff {
    fn from(f: &ScalarFunction) -> Self {
        let (kind, scale, omega, phase, power) = match *f {
            ScalarFunction::Const { scale } => ("const", scale, None, None, None),
            ScalarFunction::Cos { scale, omega, phase } => ("cos", scale, Some(omega), Some(phase), None),
            ScalarFunction::Sin { scale, omega, phase } => ("sin", scale, Some(omega), Some(phase), None),
            ScalarFunction::Monomial { scale, power } => ("monomial", scale, None, None, Some(power)),
        };
        RawCoeff {
            kind: kind.into(),
            scale: Some(scale),
            omega,
            phase,
            power,
        }
    }
}

impl RawCoeff {
    fn build(&self, j: usize) -> Result<ScalarFunction> {
        let scale = self.scale.unwrap_or(1.0);
        let reject = |field: &str, present: bool| {
            if present {
                Err(Error::Parse(format!(
                    "term {j}: field '{field}' is not valid for kind '{}'",
                    self.kind
                )))
            } else {
                Ok(())
            }
        };
        match self.kind.as_str() {
            "const" => {
                reject("omega", self.omega.is_some())?;
                reject("phase", self.phase.is_some())?;
                reject("power", self.power.is_some())?;
                Ok(ScalarFunction::constant(scale))
            }
            "cos" | "sin" => {
                reject("power", self.power.is_some())?;
                let omega = self.omega.unwrap_or(1.0);
                let phase = self.phase.unwrap_or(0.0);
                Ok(if self.kind == "cos" {
                    ScalarFunction::cos(scale, omega, phase)
                } else {
                    ScalarFunction::sin(scale, omega, phase)
                })
            }
            "monomial" => {
                reject("omega", self.omega.is_some())?;
                reject("phase", self.phase.is_some())?;
                let power = self.power.ok_or_else(|| {
                    Error::Parse(format!("term {j}: monomial requires 'power'"))
                })?;
                Ok(ScalarFunction::monomial(scale, power))
            }
            other => Err(Error::Parse(format!("term {j}: unknown coefficient kind '{other}'"))),
        }
    }
}

impl RawMatrix {
    fn build(&self, j: usize, dim: usize) -> Result<ComplexMatrix> {
        match (&self.pauli, &self.dense_re, &self.dense_im) {
            (Some(label), None, None) => pauli_string(label),
            (None, Some(re), im) => {
                let n = re.len();
                if n != dim {
                    return Err(Error::Model(format!("term {j}: dense matrix has {n} rows, expected {dim}")));
                }
                let mut m = zeros(n);
                for (r, row) in re.iter().enumerate() {
                    if row.len() != n {
                        return Err(Error::Model(format!("term {j}: dense_re row {r} has wrong length")));
                    }
                    for (c, &v) in row.iter().enumerate() {
                        m[(r, c)].re = v;
                    }
                }
                if let Some(im) = im {
                    if im.len() != n || im.iter().any(|row| row.len() != n) {
                        return Err(Error::Model(format!("term {j}: dense_im has wrong shape")));
                    }
                    for (r, row) in im.iter().enumerate() {
                        for (c, &v) in row.iter().enumerate() {
                            m[(r, c)].im = v;
                        }
                    }
                }
                Ok(m)
            }
            _ => Err(Error::Parse(format!(
                "term {j}: matrix must be either {{\"pauli\": ...}} or {{\"dense_re\": ..., \"dense_im\": ...}}"
            ))),
        }
    }
}

impl RawModel {
    fn build(&self) -> Result<HamiltonianModel> {
        let terms = self
            .terms
            .iter()
            .enumerate()
            .map(|(j, t)| {
                Ok(Term {
                    coeff: t.coeff.build(j)?,
                    matrix: t.matrix.build(j, self.dim)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        HamiltonianModel::new(self.dim, terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::pauli;
    use std::f64::consts::PI;

    fn close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> bool {
        (a - b).max_abs() <= tol
    }

    #[test]
    fn evaluation_examples() {
        let z = pauli('Z').unwrap();
        let x = pauli('X').unwrap();
        let m = HamiltonianModel::from_paulis(&[(ScalarFunction::cos(1.0, 1.0, 0.0), "Z")]).unwrap();
        assert!(close(&m.hamiltonian(0.0), &z, 0.0));
        assert!(m.hamiltonian_derivative(0.0).max_abs() < 1e-16);

        let m = HamiltonianModel::from_paulis(&[
            (ScalarFunction::cos(1.0, 1.0, 0.0), "X"),
            (ScalarFunction::sin(1.0, 1.0, 0.0), "Z"),
        ])
        .unwrap();
        assert!(close(&m.hamiltonian(PI / 2.0), &z, 1e-15));

        let m = HamiltonianModel::from_paulis(&[(ScalarFunction::monomial(1.0, 2), "X")]).unwrap();
        assert!(close(&m.hamiltonian(3.0), &(&x * Complex64::new(9.0, 0.0)), 1e-14));

        let m = HamiltonianModel::from_paulis(&[(ScalarFunction::monomial(1.0, 1), "X")]).unwrap();
        assert!(close(&m.generator(2.0), &(&x * Complex64::new(0.0, -2.0)), 1e-15));
        assert!(close(&m.hamiltonian_derivative(-4.0), &x, 0.0));

        let m = HamiltonianModel::from_paulis(&[(ScalarFunction::constant(1.0), "Z")]).unwrap();
        assert!(close(&m.generator(0.0), &(&z * Complex64::new(0.0, -1.0)), 0.0));
    }

    #[test]
    fn derivative_matches_central_difference() {
        let m = HamiltonianModel::from_paulis(&[
            (ScalarFunction::cos(1.0, 2.0, 0.0), "X"),
            (ScalarFunction::sin(1.0, 1.0, 0.0), "Z"),
        ])
        .unwrap();
        let (t, step) = (0.3, 1e-5);
        let fd = (m.hamiltonian(t + step) - m.hamiltonian(t - step)) / Complex64::new(2.0 * step, 0.0);
        assert!(close(&fd, &m.hamiltonian_derivative(t), 1e-8));
    }

    #[test]
    fn sup_norm_examples() {
        let constant = HamiltonianModel::from_paulis(&[(ScalarFunction::constant(1.0), "Z")]).unwrap();
        let n = constant.sup_norms(&TimeInterval::new(0.0, 5.0).unwrap(), 7).unwrap();
        assert_eq!((n.generator, n.derivative), (1.0, 0.0));

        let cosine = HamiltonianModel::from_paulis(&[(ScalarFunction::cos(1.0, 1.0, 0.0), "Z")]).unwrap();
        let n = cosine.sup_norms(&TimeInterval::new(0.0, 2.0 * PI).unwrap(), 1001).unwrap();
        assert!((n.generator - 1.0).abs() < 1e-5);
        assert!((n.derivative - 1.0).abs() < 1e-5);

        let linear = HamiltonianModel::from_paulis(&[(ScalarFunction::monomial(1.0, 1), "X")]).unwrap();
        let n = linear.sup_norms(&TimeInterval::new(0.0, 2.0).unwrap(), 3).unwrap();
        assert_eq!((n.generator, n.derivative), (2.0, 1.0));

        assert!(linear.sup_norms(&TimeInterval::new(0.0, 2.0).unwrap(), 1).is_err());
    }

    #[test]
    fn rejects_non_hermitian_and_bad_intervals() {
        let mut m = zeros(2);
        m[(0, 1)] = Complex64::new(1.0, 0.0);
        let err = HamiltonianModel::new(2, vec![Term { coeff: ScalarFunction::constant(1.0), matrix: m }]);
        assert!(matches!(err, Err(Error::Model(_))));
        assert!(TimeInterval::new(1.0, 1.0).is_err());
    }

    #[test]
    fn json_schema_round_trip_and_rejections() {
        let text = r#"{"dim": 4, "terms": [
            {"matrix": {"pauli": "XI"}, "coeff": {"kind": "cos", "scale": 1.0, "omega": 1.0, "phase": 0.0}},
            {"matrix": {"dense_re": [[1,0,0,0],[0,-1,0,0],[0,0,-1,0],[0,0,0,1]], "dense_im": [[0,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]]},
             "coeff": {"kind": "monomial", "scale": 0.5, "power": 2}}
        ]}"#;
        let m = HamiltonianModel::from_json(text).unwrap();
        assert_eq!(m.dim(), 4);
        let again = HamiltonianModel::from_json(&m.to_json_value().to_string()).unwrap();
        assert!(close(&again.hamiltonian(0.7), &m.hamiltonian(0.7), 0.0));

        let unknown = r#"{"dim": 2, "terms": [], "extra": 1}"#;
        assert!(matches!(HamiltonianModel::from_json(unknown), Err(Error::Parse(_))));
        let unknown_coeff = r#"{"dim": 2, "terms": [{"matrix": {"pauli": "X"}, "coeff": {"kind": "const", "scale": 1, "bogus": 2}}]}"#;
        assert!(matches!(HamiltonianModel::from_json(unknown_coeff), Err(Error::Parse(_))));
        let wrong_dim = r#"{"dim": 4, "terms": [{"matrix": {"pauli": "X"}, "coeff": {"kind": "const"}}]}"#;
        assert!(matches!(HamiltonianModel::from_json(wrong_dim), Err(Error::Model(_))));
    }

    #[test]
    fn analytic_integrals() {
        let f = ScalarFunction::cos(2.0, 3.0, 0.5);
        let (a, b) = (0.2, 1.1);
        let n = 200_000;
        let h = (b - a) / n as f64;
        let mid: f64 = (0..n).map(|i| f.value(a + (i as f64 + 0.5) * h)).sum::<f64>() * h;
        assert!((mid - f.integral(a, b)).abs() < 1e-9);
        assert!((ScalarFunction::monomial(3.0, 2).integral(0.0, 2.0) - 8.0).abs() < 1e-15);
    }
}
