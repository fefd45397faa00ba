use std::sync::Arc;

use nalgebra::SymmetricEigen;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};

use super::encoding::{BlockEncoding, PreparedState};
use super::gates::{BasisPermutation, Circuit, Gate, SparseUnitary};
use super::layout::{RegId, RegisterLayout, SparseState};
use crate::magnus::{coeff_product, Convention, Permutation, Rational};
use crate::operators::{spectral_norm, ComplexMatrix, HamiltonianModel};
use crate::{Error, Result};

const MAX_EMULATED_ORDER: usize = 4;

fn ceil_log2(n: usize) -> u32 {
    if n <= 1 {
        0
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// `β_k = k! / 2^{⌈log₂ k!⌉}`.
pub fn beta(k: usize) -> Rational {
    let f = factorial(k);
    Rational::new(BigInt::from(f), BigInt::from(1u64 << ceil_log2(f)))
}

fn beta_f64(k: usize) -> f64 {
    beta(k).to_f64().expect("small rational")
}

/// Hermitian square root of a positive semidefinite matrix.
fn psd_sqrt(m: &ComplexMatrix) -> ComplexMatrix {
    let eig = SymmetricEigen::new(m.clone());
    let roots = eig
        .eigenvalues
        .map(|v| Complex64::from(v.max(0.0).sqrt()));
    &eig.eigenvectors * ComplexMatrix::from_diagonal(&roots) * eig.eigenvectors.adjoint()
}

/// Unitary `[[c, √(I−cc†)], [√(I−c†c), −c†]]` with `c` in the top-left block.
pub fn dilate_contraction(c: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = c.nrows();
    if c.ncols() != n {
        return Err(Error::DimensionMismatch {
            left: n,
            right: c.ncols(),
        });
    }
    let norm = spectral_norm(c);
    if norm > 1.0 + 1e-12 {
        return Err(Error::NotContraction(norm));
    }
    let id = ComplexMatrix::identity(n, n);
    let top = psd_sqrt(&(&id - c * c.adjoint()));
    let bottom = psd_sqrt(&(&id - c.adjoint() * c));
    let mut u = ComplexMatrix::zeros(2 * n, 2 * n);
    u.view_mut((0, 0), (n, n)).copy_from(c);
    u.view_mut((0, n), (n, n)).copy_from(&top);
    u.view_mut((n, 0), (n, n)).copy_from(&bottom);
    u.view_mut((n, n), (n, n)).copy_from(&(-c.adjoint()));
    Ok(u)
}

/// `H^{⊗log₂ M}` on an `M`-dimensional register.
fn walsh_hadamard(m: usize) -> SparseUnitary {
    let s = 1.0 / (m as f64).sqrt();
    let columns = (0..m)
        .map(|c| {
            (0..m)
                .map(|r| {
                    let sign = if (r & c).count_ones() % 2 == 0 { s } else { -s };
                    (r, Complex64::from(sign))
                })
                .collect()
        })
        .collect();
    SparseUnitary::trusted(columns)
}

/// Householder reflection sending `|0⟩` to the real unit vector `target`.
fn householder(dim: usize, target: &[(usize, f64)]) -> Result<SparseUnitary> {
    let mut v = vec![0.0; dim];
    for &(i, a) in target {
        v[i] -= a;
    }
    v[0] += 1.0;
    let vv: f64 = v.iter().map(|x| x * x).sum();
    if vv < 1e-28 {
        return Ok(SparseUnitary::identity(dim));
    }
    let support: Vec<usize> = (0..dim).filter(|&i| v[i] != 0.0).collect();
    let columns = (0..dim)
        .map(|j| {
            let mut col = Vec::new();
            if v[j] == 0.0 {
                col.push((j, Complex64::from(1.0)));
            } else {
                for &i in &support {
                    let mut x = -2.0 * v[i] * v[j] / vv;
                    if i == j {
                        x += 1.0;
                    }
                    if x != 0.0 {
                        col.push((i, Complex64::from(x)));
                    }
                }
            }
            col
        })
        .collect();
    if dim <= 512 {
        SparseUnitary::from_columns(columns)
    } else {
        Ok(SparseUnitary::trusted(columns))
    }
}

/// Real rotation with `⟨0|R|0⟩ = a` on the lowest qubit of a `dim`-level
/// register.
fn lowest_qubit_rotation(dim: usize, a: f64) -> Result<SparseUnitary> {
    if a.abs() > 1.0 + 1e-15 {
        return Err(Error::NotContraction(a.abs()));
    }
    let a = a.clamp(-1.0, 1.0);
    let b = (1.0 - a * a).max(0.0).sqrt();
    let columns = (0..dim)
        .map(|v| {
            let (lo, hi) = (v & !1, v | 1);
            if hi >= dim {
                return vec![(v, Complex64::from(1.0))];
            }
            if v & 1 == 0 {
                vec![(lo, Complex64::from(a)), (hi, Complex64::from(b))]
            } else {
                vec![(lo, Complex64::from(-b)), (hi, Complex64::from(a))]
            }
        })
        .collect();
    SparseUnitary::from_columns(columns)
}

fn joint_dim(layout: &RegisterLayout, regs: &[RegId]) -> usize {
    regs.iter().map(|&r| layout.dim(r)).product()
}

fn digits_of(mut joint: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for (slot, &d) in out.iter_mut().zip(dims).rev() {
        *slot = joint % d;
        joint /= d;
    }
    out
}

fn joint_of(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&x, &d)| acc * d + x)
}

/// Basis permutation defined digit-wise on the joint space of `regs`.
fn permutation_gate(
    layout: &RegisterLayout,
    regs: Vec<RegId>,
    f: impl Fn(&[usize]) -> Vec<usize>,
) -> Result<Gate> {
    let dims: Vec<usize> = regs.iter().map(|&r| layout.dim(r)).collect();
    let total = joint_dim(layout, &regs);
    let forward = (0..total)
        .map(|j| joint_of(&f(&digits_of(j, &dims)), &dims))
        .collect();
    Ok(Gate::Permutation {
        regs,
        map: Arc::new(BasisPermutation::new(forward)?),
    })
}

fn check_power_of_two(m: usize) -> Result<()> {
    if m == 0 || !m.is_power_of_two() {
        return Err(Error::Guard(format!("M = {m} must be a power of 2")));
    }
    Ok(())
}

fn snapshot_times(j: usize, h: f64, m: usize) -> Vec<f64> {
    let t0 = j as f64 * h;
    (0..m).map(|i| t0 + i as f64 * h / m as f64).collect()
}

/// HAM-T on `(anc, system)` controlled by `time`: diagonal block `i` is the
/// dilation of `H(t_j + i·h/M)/α`.
fn ham_t_gate(
    model: &HamiltonianModel,
    j: usize,
    h: f64,
    m: usize,
    alpha: f64,
    time: RegId,
    anc: RegId,
    system: RegId,
) -> Result<Gate> {
    if !(alpha > 0.0) {
        return Err(Error::Guard(format!("α = {alpha} must be positive")));
    }
    let mut unitaries = Vec::with_capacity(m);
    for t in snapshot_times(j, h, m) {
        let scaled = model.hamiltonian(t) / Complex64::from(alpha);
        let norm = spectral_norm(&scaled);
        if norm > 1.0 + 1e-12 {
            return Err(Error::NotContraction(norm));
        }
        unitaries.push(SparseUnitary::from_dense(&dilate_contraction(&scaled)?)?);
    }
    Ok(Gate::Controlled {
        controls: vec![time],
        targets: vec![anc, system],
        choice: Arc::new((0..m).map(Some).collect()),
        unitaries: Arc::new(unitaries),
    })
}

/// Block encoding of the time-indexed snapshots `Σ_i |i⟩⟨i| ⊗ H(t_j + i·h/M)/α`.
pub fn ham_t(model: &HamiltonianModel, j: usize, h: f64, m: usize, alpha: f64) -> Result<BlockEncoding> {
    if m == 0 {
        return Err(Error::Guard("M must be at least 1".into()));
    }
    let mut layout = RegisterLayout::new();
    let anc = layout.add("ham", 2)?;
    let time = layout.add("time", m)?;
    let system = layout.add("system", model.dim())?;
    let mut right = Circuit::new();
    right.push(ham_t_gate(model, j, h, m, alpha, time, anc, system)?);
    Ok(BlockEncoding {
        layout,
        left: Circuit::new(),
        right,
        sub: alpha,
        system,
        ancillas: vec![anc],
        err: 0.0,
        label: format!("HAM-T (slice {j}, h = {h}, M = {m})"),
    })
}

/// Register handles of the `Ω̃_k` circuit.
#[derive(Clone, Debug)]
pub struct OmegaRegisters {
    pub k: usize,
    pub flags: Vec<RegId>,
    pub repeat: Option<RegId>,
    pub time: Vec<RegId>,
    pub record: Vec<RegId>,
    pub coeff_flag: Option<RegId>,
    pub perm: Vec<RegId>,
    pub ham: Vec<RegId>,
    pub system: RegId,
}

/// Largest reachable support (log2 of basis states per emulated column)
/// accepted by the order-`k` layouts.
pub const SUPPORT_LIMIT_LOG2: u32 = 22;

/// Layout `flag, repeat, time, record, coeff_flag, perm, ham, system` for
/// order `k` (only `time`, `ham`, `system` when `k = 1`).
pub fn omega_layout(k: usize, m: usize, system_dim: usize) -> Result<(RegisterLayout, OmegaRegisters)> {
    let mut l = RegisterLayout::new();
    let many = k >= 2;
    let flags = if many {
        (0..k).map(|i| l.add(format!("flag.{i}"), 2)).collect::<Result<_>>()?
    } else {
        vec![]
    };
    let repeat = if many { Some(l.add("repeat", 2)?) } else { None };
    let time = (0..k).map(|i| l.add(format!("time.{i}"), m)).collect::<Result<_>>()?;
    let record = if many {
        (0..k * (k - 1) / 2)
            .map(|i| l.add(format!("record.{i}"), 2))
            .collect::<Result<_>>()?
    } else {
        vec![]
    };
    let coeff_flag = if many {
        Some(l.add("coeff_flag", 1 << ceil_log2(factorial(k)))?)
    } else {
        None
    };
    let perm = if many {
        (0..k)
            .map(|i| l.add(format!("perm.{i}"), 1 << ceil_log2(k)))
            .collect::<Result<_>>()?
    } else {
        vec![]
    };
    let ham = (0..k).map(|i| l.add(format!("ham.{i}"), 2)).collect::<Result<_>>()?;
    let system = l.add("system", system_dim)?;
    let support = k as f64 * (m as f64).log2() + (factorial(k) as f64).log2() + 1.0 + k as f64;
    if support > SUPPORT_LIMIT_LOG2 as f64 {
        return Err(l.too_large(support, SUPPORT_LIMIT_LOG2));
    }
    Ok((
        l,
        OmegaRegisters {
            k,
            flags,
            repeat,
            time,
            record,
            coeff_flag,
            perm,
            ham,
            system,
        },
    ))
}

/// Hadamards on every time sub-register, a descending bubble-sort network
/// recording each comparator outcome, then `flag_l = [time_l is repeated]`.
fn time_prep_circuit(layout: &RegisterLayout, regs: &OmegaRegisters, m: usize) -> Result<Circuit> {
    let k = regs.k;
    let mut c = Circuit::new();
    let wh = Arc::new(walsh_hadamard(m));
    for &t in &regs.time {
        c.push(Gate::Local {
            regs: vec![t],
            unitary: wh.clone(),
        });
    }
    let mut comparator = 0;
    for pass in 0..k.saturating_sub(1) {
        for b in 0..k - 1 - pass {
            let gate = permutation_gate(
                layout,
                vec![regs.time[b], regs.time[b + 1], regs.record[comparator]],
                |d| {
                    let (x, y, r) = (d[0], d[1], d[2]);
                    let r_out = r ^ usize::from(x < y);
                    if r_out == 1 {
                        vec![y, x, 1]
                    } else {
                        vec![x, y, 0]
                    }
                },
            )?;
            c.push(gate);
            comparator += 1;
        }
    }
    for l in 0..k {
        let mut targets = regs.time.clone();
        targets.push(regs.flags[l]);
        c.push(permutation_gate(layout, targets, |d| {
            let repeated = (0..k).any(|o| o != l && d[o] == d[l]);
            let mut out = d.to_vec();
            out[k] ^= usize::from(repeated);
            out
        })?);
    }
    Ok(c)
}

fn repeat_mark(layout: &RegisterLayout, regs: &OmegaRegisters) -> Result<Gate> {
    let k = regs.k;
    let mut targets = regs.flags.clone();
    targets.push(regs.repeat.expect("order at least 2"));
    permutation_gate(layout, targets, |d| {
        let mut out = d.to_vec();
        out[k] ^= usize::from(d[..k].iter().any(|&f| f != 0));
        out
    })
}

/// Joint perm-register value of each permutation, digits `π(l) − 1`.
fn perm_codes(layout: &RegisterLayout, regs: &OmegaRegisters) -> Vec<(usize, Permutation)> {
    let dims: Vec<usize> = regs.perm.iter().map(|&r| layout.dim(r)).collect();
    Permutation::all(regs.k)
        .into_iter()
        .map(|p| {
            let digits: Vec<usize> = p.image().iter().map(|v| v - 1).collect();
            (joint_of(&digits, &dims), p)
        })
        .collect()
}

fn uniform_perm_prep(layout: &RegisterLayout, regs: &OmegaRegisters) -> Result<Gate> {
    let codes = perm_codes(layout, regs);
    let amp = 1.0 / (codes.len() as f64).sqrt();
    let target: Vec<(usize, f64)> = codes.iter().map(|(c, _)| (*c, amp)).collect();
    Ok(Gate::Local {
        regs: regs.perm.clone(),
        unitary: Arc::new(householder(joint_dim(layout, &regs.perm), &target)?),
    })
}

/// Controlled on the perm registers, rotates the lowest coeff-flag qubit so
/// that its `|0⟩` amplitude is `β_k C_{π,k}`.
fn sampling_gate(layout: &RegisterLayout, regs: &OmegaRegisters) -> Result<Gate> {
    let k = regs.k;
    let flag = regs.coeff_flag.expect("order at least 2");
    let b = beta_f64(k);
    let mut choice = vec![None; joint_dim(layout, &regs.perm)];
    let mut unitaries = Vec::new();
    for (code, p) in perm_codes(layout, regs) {
        let c = coeff_product(&p, k, Convention::Paper)?.to_f64().expect("small rational");
        choice[code] = Some(unitaries.len());
        unitaries.push(lowest_qubit_rotation(layout.dim(flag), b * c)?);
    }
    Ok(Gate::Controlled {
        controls: regs.perm.clone(),
        targets: vec![flag],
        choice: Arc::new(choice),
        unitaries: Arc::new(unitaries),
    })
}

fn swap_up_gate(layout: &RegisterLayout, perm_reg: RegId, time: &[RegId]) -> Result<Gate> {
    let k = time.len();
    let mut regs = vec![perm_reg];
    regs.extend_from_slice(time);
    permutation_gate(layout, regs, |d| {
        let sel = d[0];
        let mut out = d.to_vec();
        if sel > 0 && sel < k {
            out.swap(1, 1 + sel);
        }
        out
    })
}

/// SWAP-UP for a fixed selector as a permutation matrix on `M^k` time
/// states (time sub-register 0 most significant).
pub fn swap_up(k: usize, m: usize, sel: usize) -> Result<ComplexMatrix> {
    if sel >= k {
        return Err(Error::Guard(format!("selector {sel} outside 0..{k}")));
    }
    let dims = vec![m; k];
    let n = m.pow(k as u32);
    let mut out = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = digits_of(j, &dims);
        d.swap(0, sel);
        out[(joint_of(&d, &dims), j)] = Complex64::from(1.0);
    }
    Ok(out)
}

fn select_circuit(
    model: &HamiltonianModel,
    layout: &RegisterLayout,
    regs: &OmegaRegisters,
    j: usize,
    h: f64,
    m: usize,
    alpha: f64,
) -> Result<Circuit> {
    let k = regs.k;
    let mut c = Circuit::new();
    let minus_i = Gate::Phase(Complex64::new(0.0, -1.0));
    if k == 1 {
        c.push(ham_t_gate(model, j, h, m, alpha, regs.time[0], regs.ham[0], regs.system)?);
        c.push(minus_i);
        return Ok(c);
    }
    for l in (0..k).rev() {
        let swap = swap_up_gate(layout, regs.perm[l], &regs.time)?;
        c.push(swap.clone());
        c.push(ham_t_gate(model, j, h, m, alpha, regs.time[0], regs.ham[l], regs.system)?);
        c.push(minus_i.clone());
        c.push(swap);
    }
    Ok(c)
}

fn check_order(k: usize, m: usize) -> Result<()> {
    if k == 0 || k > MAX_EMULATED_ORDER {
        return Err(Error::Guard(format!("emulated order {k} outside 1..={MAX_EMULATED_ORDER}")));
    }
    if k > m {
        return Err(Error::Guard(format!("order {k} exceeds M = {m}")));
    }
    check_power_of_two(m)
}

/// SELECT oracle of the `Ω̃_k` circuit: `k` passes of SWAP-UP, HAM-T on
/// time sub-register 0 with phase `−i`, SWAP-UP, controlled by the perm
/// registers. On flagged inputs it applies `A(τ_{π(1)})⋯A(τ_{π(k)})/α^k`.
pub fn select_magnus(
    model: &HamiltonianModel,
    j: usize,
    h: f64,
    k: usize,
    m: usize,
    alpha: f64,
) -> Result<(RegisterLayout, OmegaRegisters, Circuit)> {
    check_order(k, m)?;
    let (layout, regs) = omega_layout(k, m, model.dim())?;
    let c = select_circuit(model, &layout, &regs, j, h, m, alpha)?;
    Ok((layout, regs, c))
}

/// Block encoding of `Ω̃_k` on slice `[jh, (j+1)h]` with subnormalization
/// `α^k h^k / β_k` (`αh` for `k = 1`).
pub fn block_encode_omega_k(
    model: &HamiltonianModel,
    j: usize,
    h: f64,
    k: usize,
    m: usize,
    alpha: f64,
) -> Result<BlockEncoding> {
    check_order(k, m)?;
    if !(h > 0.0) {
        return Err(Error::Guard(format!("h = {h} must be positive")));
    }
    let (layout, regs) = omega_layout(k, m, model.dim())?;
    let select = select_circuit(model, &layout, &regs, j, h, m, alpha)?;
    let mut left = Circuit::new();
    let mut right = Circuit::new();
    if k == 1 {
        left.push(Gate::Local {
            regs: vec![regs.time[0]],
            unitary: Arc::new(walsh_hadamard(m)),
        });
        right.extend(&left);
    } else {
        left.extend(&time_prep_circuit(&layout, &regs, m)?);
        left.push(uniform_perm_prep(&layout, &regs)?);
        right.extend(&left);
        right.push(repeat_mark(&layout, &regs)?);
        right.push(sampling_gate(&layout, &regs)?);
    }
    right.extend(&select);
    let ancillas = (0..layout.len()).filter(|&r| r != regs.system).collect();
    Ok(BlockEncoding {
        sub: (alpha * h).powi(k as i32) / beta_f64(k),
        layout,
        left,
        right,
        system: regs.system,
        ancillas,
        err: 0.0,
        label: format!("Omega_{k} (slice {j}, h = {h}, M = {m})"),
    })
}

/// LCU of encodings of `Ω̃_1, …, Ω̃_p` with selector weights
/// `√(α^k h^k / Σ_i α^i h^i)` and one-sided rotations scaling branch `k` by
/// `sub_k / (2 α^k h^k)`. The result has subnormalization `2 C^γ_(p) αh`.
pub fn lcu_combine(encodings: &[BlockEncoding], alpha: f64, h: f64) -> Result<BlockEncoding> {
    let p = encodings.len();
    if p == 0 {
        return Err(Error::Guard("LCU needs at least one encoding".into()));
    }
    let ah = alpha * h;
    if !(ah > 0.0 && ah < 1.0) {
        return Err(Error::Infeasible(format!("αh = {ah} must lie in (0, 1)")));
    }
    let system_dim = encodings[0].layout.dim(encodings[0].system);
    let weights: Vec<f64> = (1..=p).map(|k| ah.powi(k as i32)).collect();
    let total: f64 = weights.iter().sum();
    let mut layout = RegisterLayout::new();
    let selector = layout.add("select", 1 << ceil_log2(p))?;
    let unify = layout.add("unify", 2)?;
    let mut maps = Vec::with_capacity(p);
    for (idx, enc) in encodings.iter().enumerate() {
        if enc.layout.dim(enc.system) != system_dim {
            return Err(Error::DimensionMismatch {
                left: system_dim,
                right: enc.layout.dim(enc.system),
            });
        }
        let mut map = vec![usize::MAX; enc.layout.len()];
        for r in 0..enc.layout.len() {
            if r != enc.system {
                map[r] = layout.add(format!("k{}.{}", idx + 1, enc.layout.name(r)), enc.layout.dim(r))?;
            }
        }
        maps.push(map);
    }
    let system = layout.add("system", system_dim)?;
    let amps: Vec<(usize, f64)> = weights
        .iter()
        .enumerate()
        .map(|(i, w)| (i, (w / total).sqrt()))
        .collect();
    let select_prep = Gate::Local {
        regs: vec![selector],
        unitary: Arc::new(householder(layout.dim(selector), &amps)?),
    };
    let mut choice = vec![None; layout.dim(selector)];
    let mut rotations = Vec::with_capacity(p);
    for (idx, enc) in encodings.iter().enumerate() {
        let u = enc.sub / (2.0 * weights[idx]);
        if u > 1.0 + 1e-12 {
            return Err(Error::Guard(format!(
                "branch {} has subnormalization {} above 2α^kh^k",
                idx + 1,
                enc.sub
            )));
        }
        choice[idx] = Some(idx);
        rotations.push(lowest_qubit_rotation(2, u.min(1.0))?);
    }
    let mut left = Circuit::new();
    let mut right = Circuit::new();
    left.push(select_prep.clone());
    right.push(select_prep);
    right.push(Gate::Controlled {
        controls: vec![selector],
        targets: vec![unify],
        choice: Arc::new(choice),
        unitaries: Arc::new(rotations),
    });
    for (idx, (enc, map)) in encodings.iter().zip(&maps).enumerate() {
        let remap = |r: RegId| if r == enc.system { system } else { map[r] };
        left.push(Gate::ControlledCircuit {
            control: selector,
            value: idx,
            circuit: enc.left.remap(&remap),
        });
        right.push(Gate::ControlledCircuit {
            control: selector,
            value: idx,
            circuit: enc.right.remap(&remap),
        });
    }
    let ancillas = (0..layout.len()).filter(|&r| r != system).collect();
    Ok(BlockEncoding {
        layout,
        left,
        right,
        sub: 2.0 * total,
        system,
        ancillas,
        err: encodings.iter().map(|e| e.err).sum(),
        label: format!("LCU of Omega_1..Omega_{p}"),
    })
}

/// `PREP^t_k` on `|0⟩`: uniform tuples sorted in descending order with the
/// comparator record; flagged when no time index repeats.
pub fn prep_time_ordered(k: usize, m: usize) -> Result<PreparedState> {
    if !(2..=MAX_EMULATED_ORDER).contains(&k) {
        return Err(Error::Guard(format!("time-ordered preparation needs 2 ≤ k ≤ {MAX_EMULATED_ORDER}")));
    }
    check_order(k, m)?;
    let (full, regs) = omega_layout(k, m, 1)?;
    let circuit = time_prep_circuit(&full, &regs, m)?;
    let state = circuit.apply(&full, SparseState::basis(0));
    let mut good_count = 0u64;
    let mut good_mass = 0.0;
    let unit = 1.0 / (m as f64).powi(k as i32);
    for &(idx, amp) in state.entries() {
        if regs.flags.iter().all(|&f| full.digit(idx, f) == 0) {
            if (amp.norm_sqr() - unit).abs() > 1e-14 * unit.max(1e-300) + 1e-15 {
                return Err(Error::Guard(format!(
                    "flagged amplitude {amp} differs from 1/√M^k"
                )));
            }
            good_count += 1;
            good_mass += amp.norm_sqr();
        }
    }
    let denom = BigInt::from(m).pow(k as u32);
    Ok(PreparedState {
        layout: full,
        state,
        good_flag: "all flag registers 0".into(),
        good_mass,
        good_mass_exact: Rational::new(BigInt::from(good_count), denom),
    })
}

/// `Sampling ∘ PREP_k` on `|0⟩`: flagged amplitude `β_k C_{π,k}/√k!` on
/// each permutation.
pub fn prep_coeffs(k: usize) -> Result<PreparedState> {
    if !(2..=MAX_EMULATED_ORDER).contains(&k) {
        return Err(Error::Guard(format!("coefficient preparation needs 2 ≤ k ≤ {MAX_EMULATED_ORDER}")));
    }
    let (full, regs) = omega_layout(k, k, 1)?;
    let mut c = Circuit::new();
    c.push(uniform_perm_prep(&full, &regs)?);
    c.push(sampling_gate(&full, &regs)?);
    let state = c.apply(&full, SparseState::basis(0));
    let flag = regs.coeff_flag.expect("order at least 2");
    let good_mass = state
        .entries()
        .iter()
        .filter(|(idx, _)| full.digit(*idx, flag) == 0)
        .map(|e| e.1.norm_sqr())
        .sum();
    let b = beta(k);
    let mut exact = Rational::zero();
    for p in Permutation::all(k) {
        let c = coeff_product(&p, k, Convention::Paper)?;
        exact += &b * &b * &c * &c;
    }
    exact /= Rational::from_integer(BigInt::from(factorial(k)));
    Ok(PreparedState {
        layout: full,
        state,
        good_flag: "coeff_flag register 0".into(),
        good_mass,
        good_mass_exact: exact,
    })
}

/// `k! · C(M, k) / M^k`.
pub fn expected_time_mass(k: usize, m: usize) -> Rational {
    let mut strict = BigInt::one();
    for i in 0..k {
        strict *= BigInt::from(m - i);
    }
    Rational::new(strict, BigInt::from(m).pow(k as u32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::MatrixProperties;

    #[test]
    fn log2_ceil() {
        let got: Vec<u32> = [1, 2, 3, 4, 5, 6, 24, 120].iter().map(|&n| ceil_log2(n)).collect();
        assert_eq!(got, vec![0, 1, 2, 2, 3, 3, 5, 7]);
    }

    #[test]
    fn householder_maps_zero_to_target() {
        let t = [(1usize, 0.6), (3, -0.8)];
        let u = householder(4, &t).unwrap().to_dense();
        assert!((u[(1, 0)].re - 0.6).abs() < 1e-15);
        assert!((u[(3, 0)].re + 0.8).abs() < 1e-15);
        assert!(u[(0, 0)].norm() < 1e-15);
    }

    #[test]
    fn walsh_is_unitary() {
        let w = walsh_hadamard(8).to_dense();
        assert!(w.is_unitary(1e-14));
    }

    #[test]
    fn rotation_amplitude() {
        let r = lowest_qubit_rotation(4, -0.3).unwrap().to_dense();
        assert!((r[(0, 0)].re + 0.3).abs() < 1e-15);
        assert!((r[(2, 2)].re + 0.3).abs() < 1e-15);
        assert!(lowest_qubit_rotation(2, 1.5).is_err());
    }
}
