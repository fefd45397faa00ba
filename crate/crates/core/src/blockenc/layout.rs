use num_complex::Complex64;
use serde::Serialize;

use crate::{Error, Result};

/// Largest total layout dimension, as a power of two. Basis indices are
/// `u64`, so this keeps products of register dimensions exact.
pub const LAYOUT_LIMIT_LOG2: u32 = 62;

/// Amplitudes below this magnitude are dropped after each gate.
const PRUNE: f64 = 1e-17;

pub type RegId = usize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Register {
    pub name: String,
    pub dim: usize,
}

/// Ordered named registers; the last register is the least significant
/// digit of a basis index.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RegisterLayout {
    registers: Vec<Register>,
}

impl RegisterLayout {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, name: impl Into<String>, dim: usize) -> Result<RegId> {
        let name = name.into();
        if dim == 0 {
            return Err(Error::Guard(format!("register {name} has dimension 0")));
        }
        if self.registers.iter().any(|r| r.name == name) {
            return Err(Error::Guard(format!("duplicate register {name}")));
        }
        self.registers.push(Register { name, dim });
        self.check_size()?;
        Ok(self.registers.len() - 1)
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn len(&self) -> usize {
        self.registers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.registers.is_empty()
    }

    pub fn dim(&self, id: RegId) -> usize {
        self.registers[id].dim
    }

    pub fn name(&self, id: RegId) -> &str {
        &self.registers[id].name
    }

    pub fn find(&self, name: &str) -> Option<RegId> {
        self.registers.iter().position(|r| r.name == name)
    }

    /// `log₂` of the total dimension.
    pub fn log2_dim(&self) -> f64 {
        self.registers.iter().map(|r| (r.dim as f64).log2()).sum()
    }

    /// Number of qubits when every register is a power of two.
    pub fn qubits(&self) -> f64 {
        self.log2_dim()
    }

    fn check_size(&self) -> Result<()> {
        let log2 = self.log2_dim();
        if log2 > LAYOUT_LIMIT_LOG2 as f64 {
            return Err(self.too_large(log2, LAYOUT_LIMIT_LOG2));
        }
        Ok(())
    }

    pub(crate) fn too_large(&self, log2: f64, limit_log2: u32) -> Error {
        let registers = self
            .registers
            .iter()
            .map(|r| format!("{}({})", r.name, r.dim))
            .collect::<Vec<_>>()
            .join(", ");
        Error::LayoutTooLarge {
            log2_dimension: log2.ceil() as u32,
            limit_log2,
            registers,
        }
    }

    pub(crate) fn stride(&self, id: RegId) -> u64 {
        self.registers[id + 1..]
            .iter()
            .map(|r| r.dim as u64)
            .product()
    }

    /// Basis index from one digit per register.
    pub fn index(&self, digits: &[usize]) -> u64 {
        assert_eq!(digits.len(), self.registers.len(), "one digit per register");
        digits
            .iter()
            .zip(&self.registers)
            .fold(0u64, |acc, (&d, r)| {
                debug_assert!(d < r.dim);
                acc * r.dim as u64 + d as u64
            })
    }

    pub fn digit(&self, index: u64, id: RegId) -> usize {
        ((index / self.stride(id)) % self.registers[id].dim as u64) as usize
    }

    /// Digits of `index` for every register.
    pub fn digits(&self, index: u64) -> Vec<usize> {
        (0..self.registers.len()).map(|id| self.digit(index, id)).collect()
    }

    /// Extracts the joint value of several registers, first register most
    /// significant, and the index with those digits cleared.
    pub(crate) fn split(&self, index: u64, regs: &[(u64, u64)]) -> (usize, u64) {
        let mut joint = 0u64;
        let mut base = index;
        for &(stride, dim) in regs {
            let d = (index / stride) % dim;
            joint = joint * dim + d;
            base -= d * stride;
        }
        (joint as usize, base)
    }

    /// Index offset for a joint value of several registers.
    pub(crate) fn place(&self, mut joint: usize, regs: &[(u64, u64)]) -> u64 {
        let mut offset = 0u64;
        for &(stride, dim) in regs.iter().rev() {
            offset += (joint as u64 % dim) * stride;
            joint /= dim as usize;
        }
        offset
    }

    pub(crate) fn geometry(&self, regs: &[RegId]) -> Vec<(u64, u64)> {
        regs.iter()
            .map(|&id| (self.stride(id), self.registers[id].dim as u64))
            .collect()
    }
}

/// Sparse amplitudes over a layout, sorted by basis index.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SparseState {
    entries: Vec<(u64, Complex64)>,
}

impl SparseState {
    pub fn basis(index: u64) -> Self {
        SparseState {
            entries: vec![(index, Complex64::new(1.0, 0.0))],
        }
    }

    /// Sorts by index, merges duplicates in emission order and drops
    /// negligible amplitudes.
    pub fn from_unsorted(mut entries: Vec<(u64, Complex64)>) -> Self {
        entries.sort_by_key(|e| e.0);
        let mut merged: Vec<(u64, Complex64)> = Vec::with_capacity(entries.len());
        for (i, a) in entries {
            match merged.last_mut() {
                Some(last) if last.0 == i => last.1 += a,
                _ => merged.push((i, a)),
            }
        }
        merged.retain(|e| e.1.norm() > PRUNE);
        SparseState { entries: merged }
    }

    pub fn entries(&self) -> &[(u64, Complex64)] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<(u64, Complex64)> {
        self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn amplitude(&self, index: u64) -> Complex64 {
        self.entries
            .binary_search_by_key(&index, |e| e.0)
            .map(|pos| self.entries[pos].1)
            .unwrap_or_default()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|e| e.1.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &SparseState) -> Complex64 {
        let (mut i, mut j) = (0, 0);
        let mut acc = Complex64::default();
        while i < self.entries.len() && j < other.entries.len() {
            let (a, b) = (&self.entries[i], &other.entries[j]);
            match a.0.cmp(&b.0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc += a.1.conj() * b.1;
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }

    pub fn scale(&mut self, factor: Complex64) {
        for e in &mut self.entries {
            e.1 *= factor;
        }
    }
}
