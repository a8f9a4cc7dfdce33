use std::f64::consts::PI;
use std::sync::Arc;

use proptest::prelude::*;
use qspace_core::circuit::{DenseOp, Gate, StateVector, UniformCircuit, UnitaryOp};
use qspace_core::numerics::random::{random_state, random_unitary, seeded};
use qspace_core::numerics::{c, decompose, inner, max_abs_diff, norm, unitary_eigen, DenseMatrix, SparseRowMatrix, C64};
use qspace_core::spectral::{
    ancilla_count, evolve, grover_rotation, one_bit_pe, one_bit_pe_with, outcome_amplitude, outcome_probability,
    pe_circuit, phase_estimate, phase_estimate_bits, window_probability, EvolutionOperator, Projector,
};

fn circle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

#[test]
fn evolution_basics() {
    let h = SparseRowMatrix::diagonal(&[0.3, 0.9]).unwrap();
    let zero_t = EvolutionOperator::exact(&h, 0.0).unwrap();
    let psi = StateVector::from_amplitudes(vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
    assert!(max_abs_diff(evolve(&zero_t, &psi).unwrap().amplitudes(), psi.amplitudes()) < 1e-15);
    let t = 1.7;
    let op = EvolutionOperator::exact(&h, t).unwrap();
    let out = evolve(&op, &StateVector::basis(1, 1)).unwrap();
    assert!((out.amplitudes()[1] - C64::from_polar(1.0, -0.9 * t)).norm() < 1e-14);
    assert!(out.amplitudes()[0].norm() < 1e-15);
}

#[test]
fn error_injection_bound() {
    let mut rng = seeded(21);
    let h = qspace_core::numerics::random::random_sparse_hermitian(8, 0.5, &mut rng);
    let exact = EvolutionOperator::exact(&h, 0.8).unwrap();
    let noisy = EvolutionOperator::with_error(&h, 0.8, 1e-3, 99).unwrap();
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let psi = StateVector::from_amplitudes(random_state(8, &mut rng)).unwrap();
        let a = evolve(&exact, &psi).unwrap();
        let b = evolve(&noisy, &psi).unwrap();
        let d: Vec<C64> = a.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| x - y).collect();
        worst = worst.max(norm(&d));
        assert!((b.norm() - 1.0).abs() < 1e-10);
    }
    assert!(worst <= 1e-3 + 1e-12, "{worst}");
    assert!(worst > 1e-5);
    // Operator-norm deviation is attained exactly.
    let diff = exact.to_dense().sub(&noisy.to_dense());
    let gram = diff.adjoint().mul(&diff);
    let top = decompose(&DenseMatrix::from_fn(8, |i, j| (gram[(i, j)] + gram[(j, i)].conj()) * 0.5)).unwrap().max();
    assert!((top.sqrt() - 1e-3).abs() < 1e-9, "{}", top.sqrt());
}

#[test]
fn exact_phase_is_deterministic() {
    let u = UniformCircuit::new(1, 0, vec![Gate::phase(0, 2.0 * PI * 3.0 / 8.0)]).unwrap();
    let mut rng = seeded(1);
    let pe = phase_estimate_bits(&u, &StateVector::basis(1, 1), 3, &mut rng).unwrap();
    assert_eq!(pe.phase, 3.0 / 8.0);
    assert!((pe.distribution[3] - 1.0).abs() < 1e-12);
    assert_eq!(pe.ancillas_used, 3);
}

#[test]
fn ancilla_formula() {
    // ceil(log2 8) + ceil(log2(2 + 1/(2*0.1))) = 3 + 3
    assert_eq!(ancilla_count(1.0 / 8.0, 0.1), 6);
    // ceil(log2 100) + ceil(log2(2 + 2.5)) = 7 + 3
    assert_eq!(ancilla_count(0.01, 0.2), 10);
}

#[test]
fn distribution_sums_to_one_and_matches_gate_level_circuit() {
    let mut rng = seeded(7);
    let u = random_unitary(4, &mut rng);
    let psi = random_state(4, &mut rng);
    let op = DenseOp::new(u.clone()).unwrap();
    let pe = phase_estimate_bits(&op, &StateVector::from_amplitudes(psi.clone()).unwrap(), 5, &mut rng).unwrap();
    assert!((pe.distribution.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    let circ = pe_circuit(&u, 5).unwrap();
    let input = StateVector::from_amplitudes(psi).unwrap().tensor(&StateVector::zero(5));
    let out = circ.simulate(&input).unwrap();
    for y in 0..32 {
        let p: f64 = (0..4).map(|s| out.amplitudes()[s + 4 * y].norm_sqr()).sum();
        assert!((p - pe.distribution[y]).abs() < 1e-10, "y={y}: {p} vs {}", pe.distribution[y]);
    }
    // Residual for the sampled outcome matches the circuit's conditional state.
    let y = pe.outcome;
    let mut cond: Vec<C64> = (0..4).map(|s| out.amplitudes()[s + 4 * y]).collect();
    qspace_core::numerics::normalize(&mut cond);
    assert!(qspace_core::numerics::trace_distance_pure(&cond, pe.residual_state.amplitudes()) < 1e-8);
}

#[test]
fn kernel_identities() {
    for &phase in &[0.0, 0.123, 0.5, 0.999, 3.0 / 16.0] {
        let s: f64 = (0..64).map(|y| outcome_probability(phase, y, 6)).sum();
        assert!((s - 1.0).abs() < 1e-12);
        for y in [0, 5, 63] {
            let direct: C64 = (0..64)
                .map(|t| C64::from_polar(1.0 / 64.0, 2.0 * PI * t as f64 * (phase - y as f64 / 64.0)))
                .sum();
            assert!((direct - outcome_amplitude(phase, y, 6)).norm() < 1e-12);
        }
        let thr = 0.1;
        let direct: f64 = (0..64)
            .filter(|&y| (y as f64 / 64.0).min(1.0 - y as f64 / 64.0) <= thr)
            .map(|y| outcome_probability(phase, y, 6))
            .sum();
        assert!((direct - window_probability(phase, 6, thr)).abs() < 1e-12);
        let thr = 0.45;
        let direct: f64 = (0..64)
            .filter(|&y| (y as f64 / 64.0).min(1.0 - y as f64 / 64.0) <= thr)
            .map(|y| outcome_probability(phase, y, 6))
            .sum();
        assert!((direct - window_probability(phase, 6, thr)).abs() < 1e-12);
    }
}

#[test]
fn random_single_qubit_success_frequency() {
    let mut rng = seeded(2024);
    let (precision, failure) = (1.0 / 16.0, 0.1);
    let mut hits = 0;
    let trials = 1000;
    for _ in 0..trials {
        let u = random_unitary(2, &mut rng);
        let eig = unitary_eigen(&u).unwrap();
        let phase = qspace_core::circuit::turns(eig.phases[0]);
        let op = DenseOp::new(u).unwrap();
        let st = StateVector::from_amplitudes(eig.vectors[0].clone()).unwrap();
        let pe = phase_estimate(&op, &st, precision, failure, &mut rng).unwrap();
        if circle_distance(pe.phase, phase) <= precision {
            hits += 1;
        }
    }
    assert!(hits as f64 / trials as f64 >= 1.0 - failure, "{hits}");
}

#[test]
fn one_bit_pe_examples() {
    let h = SparseRowMatrix::diagonal(&[0.0, 1.0]).unwrap();
    let p0 = one_bit_pe(&h, 1.0, &StateVector::basis(1, 0)).unwrap();
    assert!((p0 - 1.0).abs() < 1e-15);
    let p1 = one_bit_pe(&h, PI, &StateVector::basis(1, 1)).unwrap();
    assert!(p1.abs() < 1e-15);
    assert!(one_bit_pe(&h, 0.0, &StateVector::basis(1, 1)).is_err());
}

#[test]
fn one_bit_pe_eigenstates_and_mixtures() {
    let mut rng = seeded(8);
    let spectrum = [0.05, 0.2, 0.4, 0.55, 0.7, 0.8, 0.9, 1.0];
    let h = SparseRowMatrix::from_dense(
        &qspace_core::numerics::random::hermitian_with_spectrum(&spectrum, &mut rng),
        0.0,
    )
    .unwrap();
    let t = PI / h.gershgorin_bound();
    let d = decompose(&h).unwrap();
    for (lam, v) in d.eigenvalues.iter().zip(&d.eigenvectors) {
        let p = one_bit_pe(&h, t, &StateVector::from_amplitudes(v.clone()).unwrap()).unwrap();
        assert!((p - (1.0 + (lam * t).cos()) / 2.0).abs() <= 1e-10);
    }
    let psi = random_state(8, &mut rng);
    let expect: f64 = d
        .eigenvalues
        .iter()
        .zip(&d.eigenvectors)
        .map(|(lam, v)| inner(v, &psi).norm_sqr() * (1.0 + (lam * t).cos()) / 2.0)
        .sum();
    let p = one_bit_pe(&h, t, &StateVector::from_amplitudes(psi.clone()).unwrap()).unwrap();
    assert!((p - expect).abs() <= 1e-10);
    // Error-injected evolution stays within epsilon.
    let noisy = EvolutionOperator::with_error(&h, t, 1e-3, 5).unwrap();
    let pn = one_bit_pe_with(Arc::new(noisy), &StateVector::from_amplitudes(psi).unwrap()).unwrap();
    assert!((pn - expect).abs() <= 1e-3);
}

fn rank_one(v: &[C64]) -> Projector {
    Projector::rank_one(v.to_vec())
}

#[test]
fn grover_limits() {
    let mut rng = seeded(3);
    let v = random_state(8, &mut rng);
    // alpha = 1: Pi_1 v = v.
    let r = grover_rotation(rank_one(&v), rank_one(&v)).unwrap();
    let mut w = v.clone();
    r.apply(&mut w);
    assert!(max_abs_diff(&w, &v.iter().map(|x| -x).collect::<Vec<_>>()) < 1e-12);
    // alpha = 0: Pi_1 v = 0.
    let mut u = random_state(8, &mut rng);
    let o = inner(&v, &u);
    for (a, b) in u.iter_mut().zip(&v) {
        *a -= o * b;
    }
    qspace_core::numerics::normalize(&mut u);
    let r = grover_rotation(rank_one(&v), rank_one(&u)).unwrap();
    let mut w = v.clone();
    r.apply(&mut w);
    assert!(max_abs_diff(&w, &v) < 1e-12);
}

#[test]
fn grover_pe_concentrates_on_both_signs() {
    let mut rng = seeded(13);
    let v = random_state(8, &mut rng);
    let u = random_state(8, &mut rng);
    let r = grover_rotation(rank_one(&v), rank_one(&u)).unwrap();
    let theta = r.angle(&v);
    let failure = 0.05;
    let pe = phase_estimate(&r, &StateVector::from_amplitudes(v.clone()).unwrap(), 1.0 / 64.0, failure, &mut rng).unwrap();
    let m = pe.distribution.len();
    let near = |target: f64| -> f64 {
        (0..m)
            .filter(|&y| circle_distance(y as f64 / m as f64, target) <= 1.0 / 64.0)
            .map(|y| pe.distribution[y])
            .sum()
    };
    let plus = theta / PI;
    assert!(near(plus) >= (1.0 - failure) / 2.0);
    assert!(near(1.0 - plus) >= (1.0 - failure) / 2.0);
}

#[test]
fn grover_eigenvectors_and_residual_fidelity() {
    let mut rng = seeded(17);
    let v = random_state(8, &mut rng);
    let u = random_state(8, &mut rng);
    let r = grover_rotation(rank_one(&v), rank_one(&u)).unwrap();
    let theta = r.angle(&v);
    let (plus, minus) = r.eigenvectors(&v).unwrap();
    let mut rp = plus.clone();
    r.apply(&mut rp);
    let e = C64::from_polar(1.0, 2.0 * theta);
    assert!(max_abs_diff(&rp, &plus.iter().map(|x| x * e).collect::<Vec<_>>()) < 1e-10);
    let recombined: Vec<C64> = plus.iter().zip(&minus).map(|(a, b)| (a + b) / 2f64.sqrt()).collect();
    assert!(max_abs_diff(&recombined, &v) < 1e-10);
    let failure = 0.05;
    for _ in 0..20 {
        let pe = phase_estimate(&r, &StateVector::from_amplitudes(v.clone()).unwrap(), 1.0 / 64.0, failure, &mut rng)
            .unwrap();
        if circle_distance(pe.phase, theta / PI) <= 1.0 / 64.0 {
            let f = qspace_core::numerics::fidelity_pure(pe.residual_state.amplitudes(), &plus);
            assert!(f >= 1.0 - failure, "{f}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn grover_dense_spectrum(seed in 0u64..100_000) {
        let mut rng = seeded(seed);
        let v = random_state(8, &mut rng);
        let u = random_state(8, &mut rng);
        let r = grover_rotation(rank_one(&v), rank_one(&u)).unwrap();
        let alpha = inner(&u, &v).norm();
        let d = r.to_dense();
        let eig = unitary_eigen(&d).unwrap();
        // Restrict to span{v, u}: the two eigenvectors with largest weight there.
        let plane = Projector::subspace(8, &[v.clone(), u.clone()]).unwrap();
        let mut found: Vec<f64> = eig.phases.iter().zip(&eig.vectors)
            .filter(|(_, w)| plane.expectation(w) > 0.5)
            .map(|(p, _)| *p).collect();
        found.sort_by(f64::total_cmp);
        let t = 2.0 * alpha.asin();
        prop_assert_eq!(found.len(), 2);
        prop_assert!((found[0] + t).abs() <= 1e-10 && (found[1] - t).abs() <= 1e-10,
            "{:?} vs {}", found, t);
    }
}

#[test]
fn controlled_circuit_handles_compose() {
    let mut rng = seeded(44);
    let u = random_unitary(2, &mut rng);
    let op = Arc::new(DenseOp::new(u.clone()).unwrap());
    let circ = UniformCircuit::new(2, 1, vec![Gate::h(1), Gate::controlled(op, vec![0], vec![1])]).unwrap();
    let d = circ.to_dense().unwrap();
    let cu = DenseMatrix::from_fn(4, |i, j| {
        let (ti, ci) = (i & 1, i >> 1);
        let (tj, cj) = (j & 1, j >> 1);
        if ci != cj {
            c(0.0, 0.0)
        } else if ci == 1 {
            u[(ti, tj)]
        } else if ti == tj {
            c(1.0, 0.0)
        } else {
            c(0.0, 0.0)
        }
    });
    let h = DenseMatrix::from_fn(2, |i, j| c(if i == 1 && j == 1 { -1.0 } else { 1.0 } / 2f64.sqrt(), 0.0));
    let hh = h.kron(&DenseMatrix::identity(2));
    assert!(d.max_abs_diff(&cu.mul(&hh)) < 1e-14);
}
