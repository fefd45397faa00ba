use std::sync::Arc;

use num_complex::Complex64;

use super::layout::{RegId, RegisterLayout, SparseState};
use crate::operators::ComplexMatrix;
use crate::{Error, Result};

const UNITARY_TOL: f64 = 1e-12;

/// Column-sparse unitary on a joint register space.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseUnitary {
    columns: Vec<Vec<(usize, Complex64)>>,
}

impl SparseUnitary {
    pub fn identity(dim: usize) -> Self {
        SparseUnitary {
            columns: (0..dim).map(|j| vec![(j, Complex64::new(1.0, 0.0))]).collect(),
        }
    }

    pub fn from_dense(m: &ComplexMatrix) -> Result<Self> {
        let columns = (0..m.ncols())
            .map(|j| {
                (0..m.nrows())
                    .filter(|&i| m[(i, j)] != Complex64::default())
                    .map(|i| (i, m[(i, j)]))
                    .collect()
            })
            .collect();
        Self::from_columns(columns)
    }

    /// Validates that the columns are orthonormal.
    pub fn from_columns(columns: Vec<Vec<(usize, Complex64)>>) -> Result<Self> {
        let dim = columns.len();
        let mut dense = ComplexMatrix::zeros(dim, dim);
        for (j, col) in columns.iter().enumerate() {
            for &(i, v) in col {
                if i >= dim {
                    return Err(Error::Guard(format!("row {i} outside a {dim}-dimensional unitary")));
                }
                dense[(i, j)] += v;
            }
        }
        let defect = (dense.adjoint() * &dense - ComplexMatrix::identity(dim, dim))
            .iter()
            .fold(0.0f64, |m, z| m.max(z.norm()));
        if defect > UNITARY_TOL {
            return Err(Error::Guard(format!("gate is not unitary (defect {defect:e})")));
        }
        Ok(SparseUnitary { columns })
    }

    /// Skips the orthonormality check; for constructions whose unitarity is
    /// covered by tests.
    pub(crate) fn trusted(columns: Vec<Vec<(usize, Complex64)>>) -> Self {
        SparseUnitary { columns }
    }

    pub fn dim(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &[(usize, Complex64)] {
        &self.columns[j]
    }

    pub fn adjoint(&self) -> Self {
        let mut columns = vec![Vec::new(); self.dim()];
        for (j, col) in self.columns.iter().enumerate() {
            for &(i, v) in col {
                columns[i].push((j, v.conj()));
            }
        }
        SparseUnitary { columns }
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        let n = self.dim();
        let mut m = ComplexMatrix::zeros(n, n);
        for (j, col) in self.columns.iter().enumerate() {
            for &(i, v) in col {
                m[(i, j)] += v;
            }
        }
        m
    }
}

/// A basis permutation of a joint register space with its inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisPermutation {
    forward: Vec<usize>,
    inverse: Vec<usize>,
}

impl BasisPermutation {
    pub fn new(forward: Vec<usize>) -> Result<Self> {
        let mut inverse = vec![usize::MAX; forward.len()];
        for (i, &f) in forward.iter().enumerate() {
            if f >= forward.len() || inverse[f] != usize::MAX {
                return Err(Error::Guard("basis map is not a bijection".into()));
            }
            inverse[f] = i;
        }
        Ok(BasisPermutation { forward, inverse })
    }

    pub fn apply(&self, i: usize) -> usize {
        self.forward[i]
    }

    pub fn inverted(&self) -> Self {
        BasisPermutation {
            forward: self.inverse.clone(),
            inverse: self.forward.clone(),
        }
    }
}

#[derive(Clone, Debug)]
pub enum Gate {
    /// Unitary on the joint space of `regs`.
    Local {
        regs: Vec<RegId>,
        unitary: Arc<SparseUnitary>,
    },
    /// The joint value of `controls` picks one of `unitaries` (or identity)
    /// for the joint space of `targets`.
    Controlled {
        controls: Vec<RegId>,
        targets: Vec<RegId>,
        choice: Arc<Vec<Option<usize>>>,
        unitaries: Arc<Vec<SparseUnitary>>,
    },
    Permutation {
        regs: Vec<RegId>,
        map: Arc<BasisPermutation>,
    },
    Phase(Complex64),
    /// Runs `circuit` on the basis states where `control` holds `value`.
    ControlledCircuit {
        control: RegId,
        value: usize,
        circuit: Circuit,
    },
}

impl Gate {
    pub fn adjoint(&self) -> Gate {
        match self {
            Gate::Local { regs, unitary } => Gate::Local {
                regs: regs.clone(),
                unitary: Arc::new(unitary.adjoint()),
            },
            Gate::Controlled {
                controls,
                targets,
                choice,
                unitaries,
            } => Gate::Controlled {
                controls: controls.clone(),
                targets: targets.clone(),
                choice: choice.clone(),
                unitaries: Arc::new(unitaries.iter().map(SparseUnitary::adjoint).collect()),
            },
            Gate::Permutation { regs, map } => Gate::Permutation {
                regs: regs.clone(),
                map: Arc::new(map.inverted()),
            },
            Gate::Phase(z) => Gate::Phase(z.conj()),
            Gate::ControlledCircuit {
                control,
                value,
                circuit,
            } => Gate::ControlledCircuit {
                control: *control,
                value: *value,
                circuit: circuit.adjoint(),
            },
        }
    }

    fn remap(&self, f: &dyn Fn(RegId) -> RegId) -> Gate {
        let m = |regs: &[RegId]| regs.iter().map(|&r| f(r)).collect::<Vec<_>>();
        match self {
            Gate::Local { regs, unitary } => Gate::Local {
                regs: m(regs),
                unitary: unitary.clone(),
            },
            Gate::Controlled {
                controls,
                targets,
                choice,
                unitaries,
            } => Gate::Controlled {
                controls: m(controls),
                targets: m(targets),
                choice: choice.clone(),
                unitaries: unitaries.clone(),
            },
            Gate::Permutation { regs, map } => Gate::Permutation {
                regs: m(regs),
                map: map.clone(),
            },
            Gate::Phase(z) => Gate::Phase(*z),
            Gate::ControlledCircuit {
                control,
                value,
                circuit,
            } => Gate::ControlledCircuit {
                control: f(*control),
                value: *value,
                circuit: circuit.remap(f),
            },
        }
    }

    fn apply(&self, layout: &RegisterLayout, state: SparseState) -> SparseState {
        match self {
            Gate::Phase(z) => {
                let mut s = state;
                s.scale(*z);
                s
            }
            Gate::Local { regs, unitary } => {
                let geo = layout.geometry(regs);
                let mut out = Vec::with_capacity(state.len());
                for (idx, amp) in state.into_entries() {
                    let (joint, base) = layout.split(idx, &geo);
                    for &(row, v) in unitary.column(joint) {
                        out.push((base + layout.place(row, &geo), amp * v));
                    }
                }
                SparseState::from_unsorted(out)
            }
            Gate::Controlled {
                controls,
                targets,
                choice,
                unitaries,
            } => {
                let cgeo = layout.geometry(controls);
                let tgeo = layout.geometry(targets);
                let mut out = Vec::with_capacity(state.len());
                for (idx, amp) in state.into_entries() {
                    let (c, _) = layout.split(idx, &cgeo);
                    match choice[c] {
                        None => out.push((idx, amp)),
                        Some(u) => {
                            let (joint, base) = layout.split(idx, &tgeo);
                            for &(row, v) in unitaries[u].column(joint) {
                                out.push((base + layout.place(row, &tgeo), amp * v));
                            }
                        }
                    }
                }
                SparseState::from_unsorted(out)
            }
            Gate::Permutation { regs, map } => {
                let geo = layout.geometry(regs);
                let out = state
                    .into_entries()
                    .into_iter()
                    .map(|(idx, amp)| {
                        let (joint, base) = layout.split(idx, &geo);
                        (base + layout.place(map.apply(joint), &geo), amp)
                    })
                    .collect();
                SparseState::from_unsorted(out)
            }
            Gate::ControlledCircuit {
                control,
                value,
                circuit,
            } => {
                let (hit, miss): (Vec<_>, Vec<_>) = state
                    .into_entries()
                    .into_iter()
                    .partition(|&(idx, _)| layout.digit(idx, *control) == *value);
                let mut out = circuit
                    .apply(layout, SparseState::from_unsorted(hit))
                    .into_entries();
                out.extend(miss);
                SparseState::from_unsorted(out)
            }
        }
    }
}

/// Gates applied first to last.
#[derive(Clone, Debug, Default)]
pub struct Circuit {
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, gate: Gate) {
        self.gates.push(gate);
    }

    pub fn extend(&mut self, other: &Circuit) {
        self.gates.extend(other.gates.iter().cloned());
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn adjoint(&self) -> Circuit {
        Circuit {
            gates: self.gates.iter().rev().map(Gate::adjoint).collect(),
        }
    }

    pub fn remap(&self, f: &dyn Fn(RegId) -> RegId) -> Circuit {
        Circuit {
            gates: self.gates.iter().map(|g| g.remap(f)).collect(),
        }
    }

    pub fn apply(&self, layout: &RegisterLayout, state: SparseState) -> SparseState {
        self.gates
            .iter()
            .fold(state, |s, g| g.apply(layout, s))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::pauli;

    fn layout() -> (RegisterLayout, RegId, RegId) {
        let mut l = RegisterLayout::new();
        let a = l.add("a", 2).unwrap();
        let b = l.add("b", 3).unwrap();
        (l, a, b)
    }

    #[test]
    fn rejects_non_unitary_and_non_bijective() {
        let m = ComplexMatrix::identity(2, 2) * Complex64::from(2.0);
        assert!(SparseUnitary::from_dense(&m).is_err());
        assert!(BasisPermutation::new(vec![0, 0, 1]).is_err());
    }

    #[test]
    fn local_gate_acts_on_its_register() {
        let (l, a, b) = layout();
        let x = Arc::new(SparseUnitary::from_dense(&pauli('X').unwrap()).unwrap());
        let mut c = Circuit::new();
        c.push(Gate::Local { regs: vec![a], unitary: x });
        let out = c.apply(&l, SparseState::basis(l.index(&[0, 2])));
        assert_eq!(out.entries(), &[(l.index(&[1, 2]), Complex64::new(1.0, 0.0))]);
        let back = c.adjoint().apply(&l, out);
        assert_eq!(back, SparseState::basis(l.index(&[0, 2])));
        let _ = b;
    }

    #[test]
    fn controlled_and_permutation_gates_invert() {
        let (l, a, b) = layout();
        let h = {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            let mut m = ComplexMatrix::zeros(2, 2);
            m[(0, 0)] = s.into();
            m[(0, 1)] = s.into();
            m[(1, 0)] = s.into();
            m[(1, 1)] = (-s).into();
            SparseUnitary::from_dense(&m).unwrap()
        };
        let mut c = Circuit::new();
        c.push(Gate::Controlled {
            controls: vec![b],
            targets: vec![a],
            choice: Arc::new(vec![None, Some(0), Some(0)]),
            unitaries: Arc::new(vec![h]),
        });
        c.push(Gate::Permutation {
            regs: vec![b],
            map: Arc::new(BasisPermutation::new(vec![1, 2, 0]).unwrap()),
        });
        c.push(Gate::Phase(Complex64::new(0.0, 1.0)));
        for idx in 0..6u64 {
            let out = c.apply(&l, SparseState::basis(idx));
            assert!((out.norm_sqr() - 1.0).abs() < 1e-15);
            let back = c.adjoint().apply(&l, out);
            assert!((back.amplitude(idx) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
            assert_eq!(back.len(), 1);
        }
    }

    #[test]
    fn controlled_circuit_only_touches_matching_branch() {
        let (l, a, b) = layout();
        let x = Arc::new(SparseUnitary::from_dense(&pauli('X').unwrap()).unwrap());
        let mut inner = Circuit::new();
        inner.push(Gate::Local { regs: vec![a], unitary: x });
        let mut c = Circuit::new();
        c.push(Gate::ControlledCircuit { control: b, value: 1, circuit: inner });
        let hit = c.apply(&l, SparseState::basis(l.index(&[0, 1])));
        assert_eq!(hit.entries()[0].0, l.index(&[1, 1]));
        let miss = c.apply(&l, SparseState::basis(l.index(&[0, 2])));
        assert_eq!(miss.entries()[0].0, l.index(&[0, 2]));
    }
}
