use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::gates::Circuit;
use super::layout::{RegId, RegisterLayout, SparseState};
use crate::magnus::Rational;
use crate::operators::{expm, ComplexMatrix, MatrixProperties};
use crate::{Error, Result};

/// Layouts up to this many basis states may be expanded densely.
const DENSE_LIMIT_LOG2: f64 = 14.0;

/// A circuit `U = left† · right` whose block `⟨0_anc|U|0_anc⟩` on the
/// system register encodes a target divided by `sub`.
#[derive(Clone, Debug)]
pub struct BlockEncoding {
    pub layout: RegisterLayout,
    pub left: Circuit,
    pub right: Circuit,
    pub sub: f64,
    pub system: RegId,
    pub ancillas: Vec<RegId>,
    pub err: f64,
    pub label: String,
}

/// Output of a state-preparation circuit applied to `|0⟩`.
#[derive(Clone, Debug)]
pub struct PreparedState {
    pub layout: RegisterLayout,
    pub state: SparseState,
    pub good_flag: String,
    pub good_mass: f64,
    /// Good mass recomputed in rational arithmetic.
    pub good_mass_exact: Rational,
}

/// Summary suitable for reports.
#[derive(Clone, Debug, Serialize)]
pub struct LayoutSummary {
    pub registers: Vec<(String, usize)>,
    pub qubits: f64,
    pub flagged_projector: String,
}

impl BlockEncoding {
    pub fn system_dim(&self) -> usize {
        self.layout.dim(self.system)
    }

    /// Index of `|0_anc⟩ ⊗ |s⟩`.
    fn flagged_index(&self, s: usize) -> u64 {
        s as u64 * self.layout.stride(self.system)
    }

    pub fn flagged_projector(&self) -> String {
        let names: Vec<&str> = self.ancillas.iter().map(|&r| self.layout.name(r)).collect();
        format!("<0| on {}", names.join(", "))
    }

    pub fn summary(&self) -> LayoutSummary {
        LayoutSummary {
            registers: self
                .layout
                .registers()
                .iter()
                .map(|r| (r.name.clone(), r.dim))
                .collect(),
            qubits: self.layout.qubits(),
            flagged_projector: self.flagged_projector(),
        }
    }

    /// `U|ψ⟩`.
    pub fn apply(&self, state: SparseState) -> SparseState {
        let mid = self.right.apply(&self.layout, state);
        self.left.adjoint().apply(&self.layout, mid)
    }

    /// `U†|ψ⟩`.
    pub fn apply_adjoint(&self, state: SparseState) -> SparseState {
        let mid = self.left.apply(&self.layout, state);
        self.right.adjoint().apply(&self.layout, mid)
    }

    /// Largest entry of `G − I` for the Gram matrix of `U` applied to the
    /// flagged inputs and `extra` seeded random basis states, together
    /// with the worst round-trip error `‖U†U|ψ⟩ − |ψ⟩‖`.
    pub fn unitarity_defect(&self, extra: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut probes: Vec<u64> = (0..self.system_dim()).map(|s| self.flagged_index(s)).collect();
        for _ in 0..extra {
            let digits: Vec<usize> = self
                .layout
                .registers()
                .iter()
                .map(|r| rng.gen_range(0..r.dim))
                .collect();
            let idx = self.layout.index(&digits);
            if !probes.contains(&idx) {
                probes.push(idx);
            }
        }
        let images: Vec<SparseState> = probes
            .iter()
            .map(|&i| self.apply(SparseState::basis(i)))
            .collect();
        let mut defect = 0.0f64;
        for (a, ia) in images.iter().enumerate() {
            for (b, ib) in images.iter().enumerate().skip(a) {
                let expected = if a == b { 1.0 } else { 0.0 };
                defect = defect.max((ia.inner(ib) - Complex64::from(expected)).norm());
            }
            let back = self.apply_adjoint(ia.clone());
            let round_trip = back.norm_sqr() - 2.0 * back.amplitude(probes[a]).re + 1.0;
            defect = defect.max(round_trip.max(0.0).sqrt());
        }
        defect
    }

    /// Full unitary, only for small layouts.
    pub fn dense_unitary(&self) -> Result<ComplexMatrix> {
        let log2 = self.layout.log2_dim();
        if log2 > DENSE_LIMIT_LOG2 {
            return Err(Error::LayoutTooLarge {
                log2_dimension: log2.ceil() as u32,
                limit_log2: DENSE_LIMIT_LOG2 as u32,
                registers: self.summary().registers.iter().map(|r| format!("{}({})", r.0, r.1)).collect::<Vec<_>>().join(", "),
            });
        }
        let n = 2f64.powf(log2).round() as usize;
        let mut u = ComplexMatrix::zeros(n, n);
        for j in 0..n {
            for &(i, a) in self.apply(SparseState::basis(j as u64)).entries() {
                u[(i as usize, j)] = a;
            }
        }
        Ok(u)
    }
}

/// The system block `⟨0_anc|U|0_anc⟩`, computed as inner products of
/// `left|0, s'⟩` and `right|0, s⟩`.
pub fn extract_block(be: &BlockEncoding) -> ComplexMatrix {
    let d = be.system_dim();
    let lefts: Vec<SparseState> = (0..d)
        .map(|s| be.left.apply(&be.layout, SparseState::basis(be.flagged_index(s))))
        .collect();
    let rights: Vec<SparseState> = (0..d)
        .map(|s| be.right.apply(&be.layout, SparseState::basis(be.flagged_index(s))))
        .collect();
    ComplexMatrix::from_fn(d, d, |r, c| lefts[r].inner(&rights[c]))
}

/// `expm(sub · block)`, standing in for the QSVT step.
pub fn exp_of_block(be: &BlockEncoding) -> Result<ComplexMatrix> {
    let generator = extract_block(be) * Complex64::from(be.sub);
    let skew = (&generator + generator.adjoint()).max_abs();
    if skew > 1e-8 * be.sub.max(1.0) {
        return Err(Error::NotAntiHermitian(skew));
    }
    Ok(expm(&generator))
}
