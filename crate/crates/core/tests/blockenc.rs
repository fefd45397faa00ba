use std::time::Instant;

use magnus_lab::blockenc::*;
use magnus_lab::magnus::{omega_k_quadrature, omega_p_sum, step};
use magnus_lab::operators::*;

fn rotating() -> HamiltonianModel {
    HamiltonianModel::from_paulis(&[
        (ScalarFunction::cos(1.0, 1.0, 0.0), "X"),
        (ScalarFunction::sin(1.0, 1.0, 0.0), "Z"),
    ])
    .unwrap()
}

fn two_qubit() -> HamiltonianModel {
    HamiltonianModel::from_paulis(&[
        (ScalarFunction::cos(0.6, 1.0, 0.0), "XI"),
        (ScalarFunction::sin(0.4, 2.0, 0.3), "ZZ"),
        (ScalarFunction::constant(0.3), "IY"),
    ])
    .unwrap()
}

#[test]
fn omega_k_identity_small() {
    let model = rotating();
    let (h, alpha) = (0.5, 1.0);
    for (k, m) in [(1, 2), (2, 2), (2, 4), (3, 4)] {
        let start = Instant::now();
        let be = block_encode_omega_k(&model, 0, h, k, m, alpha).unwrap();
        let block = extract_block(&be) * Complex64::from(be.sub);
        let iv = TimeInterval::new(0.0, h).unwrap();
        let target = omega_k_quadrature(&model, &iv, k, m).unwrap();
        let dev = (&block - &target).max_abs();
        let defect = be.unitarity_defect(4, 7);
        println!("k={k} M={m} dev={dev:e} defect={defect:e} qubits={} t={:?}", be.layout.qubits(), start.elapsed());
        assert!(dev <= 1e-10 * target.max_abs().max(1.0), "k={k} M={m}: {dev}");
        assert!(defect < 1e-10);
    }
}

#[test]
fn lcu_identity_small() {
    let model = two_qubit();
    let (h, alpha, m) = (0.3, 1.3, 4);
    for p in 1..=3 {
        let start = Instant::now();
        let encs: Vec<_> = (1..=p)
            .map(|k| block_encode_omega_k(&model, 1, h, k, m, alpha).unwrap())
            .collect();
        let lcu = lcu_combine(&encs, alpha, h).unwrap();
        let block = extract_block(&lcu) * Complex64::from(lcu.sub);
        let iv = TimeInterval::new(h, 2.0 * h).unwrap();
        let target = omega_p_sum(&model, &iv, p, m).unwrap();
        let dev = (&block - &target).max_abs();
        println!("p={p} dev={dev:e} qubits={} t={:?}", lcu.layout.qubits(), start.elapsed());
        assert!(dev < 1e-10);
        let u = exp_of_block(&lcu).unwrap();
        let s = step(&model, h, h, p, m).unwrap();
        assert!((u - s).max_abs() < 1e-9);
    }
}

fn real(rows: &[&[f64]]) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows.len(), rows[0].len(), |i, j| Complex64::from(rows[i][j]))
}

#[test]
fn dilation_examples() {
    let u = dilate_contraction(&real(&[&[0.6]])).unwrap();
    assert!((u - real(&[&[0.6, 0.8], &[0.8, -0.6]])).max_abs() < 1e-15);
    let u = dilate_contraction(&identity(2)).unwrap();
    let mut expected = identity(4);
    expected[(2, 2)] = Complex64::from(-1.0);
    expected[(3, 3)] = Complex64::from(-1.0);
    assert!((u - expected).max_abs() < 1e-15);
    assert!(dilate_contraction(&(identity(2) * Complex64::from(1.1))).is_err());
}

#[test]
fn dilation_of_random_contractions() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for dim in [1, 2, 3, 4] {
        let m = ComplexMatrix::from_fn(dim, dim, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let c = &m / Complex64::from(spectral_norm(&m) * 1.0001);
        let u = dilate_contraction(&c).unwrap();
        assert!(u.is_unitary(1e-12));
        assert!((u.view((0, 0), (dim, dim)) - &c).max_abs() < 1e-12);
    }
}

#[test]
fn ham_t_blocks() {
    let z = HamiltonianModel::from_paulis(&[(ScalarFunction::constant(1.0), "Z")]).unwrap();
    let be = ham_t(&z, 0, 0.5, 1, 1.0).unwrap();
    assert!((extract_block(&be) - pauli('Z').unwrap()).max_abs() < 1e-15);
    let be = ham_t(&z, 0, 0.5, 2, 1.0).unwrap();
    let time = be.layout.find("time").unwrap();
    for i in 0..2 {
        let block = time_block(&be, time, i);
        assert!((block - pauli('Z').unwrap()).max_abs() < 1e-15);
    }
    let model = rotating();
    let (j, h, m, alpha) = (2, 0.3, 4, 1.5);
    let be = ham_t(&model, j, h, m, alpha).unwrap();
    for i in 0..m {
        let t = j as f64 * h + i as f64 * h / m as f64;
        let block = time_block(&be, time, i) * Complex64::from(be.sub);
        assert!((block - model.hamiltonian(t)).max_abs() < 1e-12);
    }
    assert!(ham_t(&model, 0, 0.3, 4, 0.5).is_err());
}

/// Block of a HAM-T encoding with the time register fixed to `i`.
fn time_block(be: &BlockEncoding, time: RegId, i: usize) -> ComplexMatrix {
    let d = be.layout.dim(be.system);
    let mut out = ComplexMatrix::zeros(d, d);
    for s in 0..d {
        let mut digits = vec![0; be.layout.len()];
        digits[time] = i;
        digits[be.system] = s;
        let state = be.apply(SparseState::basis(be.layout.index(&digits)));
        for r in 0..d {
            digits[be.system] = r;
            out[(r, s)] = state.amplitude(be.layout.index(&digits));
        }
    }
    out
}

#[test]
fn time_ordered_preparation() {
    let p = prep_time_ordered(2, 4).unwrap();
    assert!((p.good_mass - 0.75).abs() < 1e-14);
    assert_eq!(p.good_mass_exact, expected_time_mass(2, 4));
    let p = prep_time_ordered(2, 2).unwrap();
    assert!((p.good_mass - 0.5).abs() < 1e-14);
    let time: Vec<RegId> = (0..2).map(|i| p.layout.find(&format!("time.{i}")).unwrap()).collect();
    let flags: Vec<RegId> = (0..2).map(|i| p.layout.find(&format!("flag.{i}")).unwrap()).collect();
    let good: Vec<_> = p
        .state
        .entries()
        .iter()
        .filter(|(idx, _)| flags.iter().all(|&f| p.layout.digit(*idx, f) == 0))
        .map(|(idx, _)| (p.layout.digit(*idx, time[0]), p.layout.digit(*idx, time[1])))
        .collect();
    assert!(good.iter().all(|&t| t == (1, 0)));
    assert!(prep_time_ordered(2, 3).is_err());
}

#[test]
fn flagged_tuple_amplitudes() {
    for (k, m) in [(2, 4), (3, 4), (3, 8)] {
        let p = prep_time_ordered(k, m).unwrap();
        let time: Vec<RegId> = (0..k).map(|i| p.layout.find(&format!("time.{i}")).unwrap()).collect();
        let flags: Vec<RegId> = (0..k).map(|i| p.layout.find(&format!("flag.{i}")).unwrap()).collect();
        let mut per_tuple = std::collections::BTreeMap::<Vec<usize>, f64>::new();
        for &(idx, amp) in p.state.entries() {
            if flags.iter().all(|&f| p.layout.digit(idx, f) == 0) {
                let tuple: Vec<usize> = time.iter().map(|&t| p.layout.digit(idx, t)).collect();
                assert!(tuple.windows(2).all(|w| w[0] > w[1]));
                *per_tuple.entry(tuple).or_default() += amp.norm_sqr();
            }
        }
        let fact: f64 = (1..=k).map(|i| i as f64).product();
        let expected = (fact / (m as f64).powi(k as i32)).sqrt();
        assert_eq!(per_tuple.len(), magnus_lab::magnus::ordered_tuples(m, k).count());
        for (_, mass) in per_tuple {
            assert!((mass.sqrt() - expected).abs() < 1e-14);
        }
        assert_eq!(p.good_mass_exact, expected_time_mass(k, m));
    }
}

#[test]
fn coefficient_preparation() {
    use magnus_lab::magnus::Rational;
    use num_bigint::BigInt;
    let q = |n: i64, d: i64| Rational::new(BigInt::from(n), BigInt::from(d));
    assert_eq!(beta(2), q(1, 1));
    assert_eq!(beta(3), q(3, 4));
    assert_eq!(beta(4), q(3, 4));
    for k in 1..=8 {
        assert!(beta(k) >= q(1, 2) && beta(k) <= q(1, 1));
    }
    let p = prep_coeffs(2).unwrap();
    assert_eq!(p.good_mass_exact, q(1, 4));
    assert!((p.good_mass - 0.25).abs() < 1e-15);
    for k in 3..=4 {
        let p = prep_coeffs(k).unwrap();
        let exact: f64 = num_traits::ToPrimitive::to_f64(&p.good_mass_exact).unwrap();
        assert!((p.good_mass - exact).abs() < 1e-14);
    }
}

#[test]
fn swap_up_examples() {
    assert_eq!(swap_up(3, 2, 0).unwrap(), identity(8));
    for sel in 0..3 {
        let s = swap_up(3, 2, sel).unwrap();
        assert_eq!(&s * &s, identity(8));
    }
    let s = swap_up(2, 2, 1).unwrap();
    for i1 in 0..2 {
        for i2 in 0..2 {
            let col = i1 * 2 + i2;
            assert_eq!(s[(i2 * 2 + i1, col)], Complex64::from(1.0));
        }
    }
    assert!(swap_up(2, 2, 2).is_err());
}

#[test]
fn select_is_block_diagonal_in_time() {
    let (layout, regs, select) = select_magnus(&rotating(), 0, 0.5, 2, 2, 1.0).unwrap();
    for idx in [0u64, 5, 77, 300] {
        let idx = idx % (1u64 << 12);
        let out = select.apply(&layout, SparseState::basis(idx));
        for &(o, _) in out.entries() {
            for &t in &regs.time {
                assert_eq!(layout.digit(o, t), layout.digit(idx, t));
            }
        }
    }
}

#[test]
fn sub_and_exponential_examples() {
    let z = HamiltonianModel::from_paulis(&[(ScalarFunction::constant(1.0), "Z")]).unwrap();
    let pi = std::f64::consts::PI;
    let k1 = block_encode_omega_k(&z, 0, pi, 1, 1, 1.0).unwrap();
    assert!((k1.sub - pi).abs() < 1e-15);
    // αh must stay below 1 for the combiner.
    assert!(lcu_combine(&[k1.clone()], 1.0, pi).is_err());
    assert!((exp_of_block(&k1).unwrap() + identity(2)).max_abs() < 1e-12);

    let model = rotating();
    let (h, alpha) = (0.1, 1.0);
    let enc = vec![block_encode_omega_k(&model, 0, h, 1, 2, alpha).unwrap()];
    let lcu = lcu_combine(&enc, alpha, h).unwrap();
    assert!((lcu.sub - 2.0 * alpha * h).abs() < 1e-15);
    let encs: Vec<_> = (1..=3).map(|k| block_encode_omega_k(&model, 0, h, k, 4, alpha).unwrap()).collect();
    let lcu = lcu_combine(&encs, alpha, h).unwrap();
    assert!((lcu.sub - 2.0 * 1.11 * alpha * h).abs() < 1e-14);
    let block = extract_block(&lcu);
    assert!(spectral_norm(&block) <= 1.0 + 1e-10);
}

#[test]
fn zero_block_exponentiates_to_identity() {
    let zero = HamiltonianModel::new(2, vec![]).unwrap();
    let be = block_encode_omega_k(&zero, 0, 0.5, 1, 2, 1.0).unwrap();
    assert!((exp_of_block(&be).unwrap() - identity(2)).max_abs() < 1e-15);
}

#[test]
fn dense_unitary_of_small_encoding() {
    let be = block_encode_omega_k(&rotating(), 0, 0.5, 1, 4, 1.0).unwrap();
    let u = be.dense_unitary().unwrap();
    assert!(u.is_unitary(1e-12));
    assert!((u.view((0, 0), (2, 2)) - extract_block(&be)).max_abs() < 1e-14);
}

#[test]
fn oversized_emulation_is_refused() {
    let err = block_encode_omega_k(&rotating(), 0, 0.01, 3, 1024, 1.0).unwrap_err();
    match err {
        magnus_lab::Error::LayoutTooLarge { limit_log2, registers, .. } => {
            assert_eq!(limit_log2, SUPPORT_LIMIT_LOG2);
            assert!(registers.contains("time.2(1024)"));
        }
        other => panic!("unexpected error {other}"),
    }
}
