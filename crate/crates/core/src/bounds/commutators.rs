use std::collections::{BTreeMap, HashMap};
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::operators::{spectral_norm, BinaryTree, ComplexMatrix, HamiltonianModel, TimeInterval};
use crate::{Error, Result};

/// Upper limit on root-level commutator evaluations for one grade.
const WORK_LIMIT: f64 = 4.0e9;
/// Upper limit on stored matrix entries for the largest subtree.
const MEMORY_LIMIT: f64 = 3.3e7;
const MAX_GRADE: usize = 6;

/// Grid maxima of grade-`q` nested commutator norms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommutatorReport {
    pub q_range: Vec<usize>,
    pub alpha: BTreeMap<usize, f64>,
    pub time_samples: usize,
    pub trees_enumerated: BTreeMap<usize, usize>,
    pub interval: [f64; 2],
}

/// `max_q α_q^{1/q}` over the capped range `min(p+1, cap)..=min(p²+2p, cap)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BarAlpha {
    pub value: f64,
    pub q_min: usize,
    pub q_max: usize,
    pub q_cap: usize,
}

fn snapshots(model: &HamiltonianModel, interval: &TimeInterval, samples: usize) -> Vec<ComplexMatrix> {
    let step = interval.length() / (samples - 1) as f64;
    (0..samples)
        .map(|i| model.hamiltonian(interval.start() + step * i as f64))
        .collect()
}

type Memo = HashMap<BinaryTree, std::sync::Arc<Vec<ComplexMatrix>>>;

/// All values of a subtree with independent leaf times.
fn subtree_values(tree: &BinaryTree, leaves: &[ComplexMatrix], memo: &mut Memo) -> std::sync::Arc<Vec<ComplexMatrix>> {
    if let Some(v) = memo.get(tree) {
        return v.clone();
    }
    let values = match tree {
        BinaryTree::Leaf => leaves.to_vec(),
        BinaryTree::Node(l, r) => {
            let left = subtree_values(l, leaves, memo);
            let right = subtree_values(r, leaves, memo);
            left.par_iter()
                .flat_map_iter(|a| right.iter().map(move |b| a * b - b * a))
                .collect()
        }
    };
    let values = std::sync::Arc::new(values);
    memo.insert(tree.clone(), values.clone());
    values
}

fn grade_max(leaves: &[ComplexMatrix], q: usize, memo: &mut Memo) -> f64 {
    let mut best = 0.0f64;
    for tree in BinaryTree::all_with_leaves(q) {
        let BinaryTree::Node(l, r) = &tree else {
            unreachable!("grade at least 2")
        };
        let left = subtree_values(l, leaves, memo);
        let right = subtree_values(r, leaves, memo);
        // The Frobenius norm bounds the spectral norm from above, so the SVD is
        // skipped whenever it cannot raise the running maximum.
        let shared = AtomicU64::new(best.to_bits());
        left.par_iter().for_each(|a| {
            for b in right.iter() {
                let c = a * b - b * a;
                if c.norm() <= f64::from_bits(shared.load(Ordering::Relaxed)) {
                    continue;
                }
                let n = spectral_norm(&c);
                shared.fetch_max(n.to_bits(), Ordering::Relaxed);
            }
        });
        best = best.max(f64::from_bits(shared.load(Ordering::Relaxed)));
    }
    best
}

fn check_grade(q: usize, samples: usize, dim: usize) -> Result<()> {
    if !(2..=MAX_GRADE).contains(&q) {
        return Err(Error::Guard(format!("commutator grade {q} outside 2..={MAX_GRADE}")));
    }
    if samples < 2 {
        return Err(Error::Guard(format!("need at least 2 time samples, got {samples}")));
    }
    let trees = catalan(q - 1) as f64;
    let work = trees * (samples as f64).powi(q as i32);
    if work > WORK_LIMIT {
        return Err(Error::Guard(format!(
            "grade {q} with {samples} samples needs {work:.2e} commutator evaluations"
        )));
    }
    let stored = (samples as f64).powi(q as i32 - 1) * (dim * dim) as f64;
    if stored > MEMORY_LIMIT {
        return Err(Error::Guard(format!(
            "grade {q} with {samples} samples stores {stored:.2e} matrix entries"
        )));
    }
    Ok(())
}

fn catalan(n: usize) -> usize {
    (0..n).fold(1usize, |c, i| c * 2 * (2 * i + 1) / (i + 2))
}

/// `α_comm,q`: maximum over every bracketing with `q` leaves and every
/// assignment of grid times to the leaves. A grid lower bound of the sup.
pub fn alpha_comm(model: &HamiltonianModel, interval: &TimeInterval, q: usize, time_samples: usize) -> Result<f64> {
    check_grade(q, time_samples, model.dim())?;
    let leaves = snapshots(model, interval, time_samples);
    Ok(grade_max(&leaves, q, &mut Memo::new()))
}

/// `α_comm,q` for every grade in `q_min..=q_max`, sharing subtree values.
pub fn commutator_report(
    model: &HamiltonianModel,
    interval: &TimeInterval,
    q_min: usize,
    q_max: usize,
    time_samples: usize,
) -> Result<CommutatorReport> {
    if q_min > q_max {
        return Err(Error::Guard(format!("empty grade range {q_min}..={q_max}")));
    }
    for q in q_min..=q_max {
        check_grade(q, time_samples, model.dim())?;
    }
    let leaves = snapshots(model, interval, time_samples);
    let mut memo = Memo::new();
    let mut alpha = BTreeMap::new();
    let mut trees = BTreeMap::new();
    for q in q_min..=q_max {
        alpha.insert(q, grade_max(&leaves, q, &mut memo));
        trees.insert(q, BinaryTree::all_with_leaves(q).len());
    }
    Ok(CommutatorReport {
        q_range: (q_min..=q_max).collect(),
        alpha,
        time_samples,
        trees_enumerated: trees,
        interval: [interval.start(), interval.end()],
    })
}

/// `ᾱ_comm = max α_q^{1/q}` over the grade range of order `p`, truncated
/// at `q_cap`.
pub fn bar_alpha_comm(report: &CommutatorReport, p: usize, q_cap: usize) -> Result<BarAlpha> {
    if p == 0 {
        return Err(Error::Guard("order p must be at least 1".into()));
    }
    let q_min = (p + 1).min(q_cap);
    let q_max = (p * p + 2 * p).min(q_cap);
    let mut value = 0.0f64;
    for q in q_min..=q_max {
        let a = report
            .alpha
            .get(&q)
            .ok_or_else(|| Error::Guard(format!("commutator report has no grade {q}")))?;
        value = value.max(a.powf(1.0 / q as f64));
    }
    Ok(BarAlpha {
        value,
        q_min,
        q_max,
        q_cap,
    })
}
