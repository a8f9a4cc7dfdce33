use std::f64::consts::{FRAC_1_SQRT_2, PI};

use proptest::prelude::*;
use qspace_core::circuit::{Gate, StateVector, UniformCircuit, UnitaryOp};
use qspace_core::numerics::random::{random_state, random_unitary, seeded, SeededRng};
use qspace_core::numerics::{c, max_abs_diff, DenseMatrix};
use rand::Rng;

fn random_circuit(qubits: usize, len: usize, rng: &mut SeededRng) -> UniformCircuit {
    let mut gates = Vec::new();
    for _ in 0..len {
        let a = rng.random_range(0..qubits);
        let mut b = rng.random_range(0..qubits);
        while qubits > 1 && b == a {
            b = rng.random_range(0..qubits);
        }
        let g = match rng.random_range(0..6) {
            0 => Gate::h(a),
            1 => Gate::x(a),
            2 if qubits > 1 => Gate::cnot(a, b),
            3 => Gate::phase(a, rng.random_range(0.0..2.0 * PI)),
            4 => Gate::one_qubit(a, random_unitary(2, rng)),
            5 if qubits > 1 => Gate::two_qubit(a, b, random_unitary(4, rng)),
            _ => Gate::h(a),
        };
        gates.push(g);
    }
    UniformCircuit::new(qubits, 0, gates).unwrap()
}

/// Dense matrix of a gate on the full register, built from its columns.
fn dense_gate(g: &Gate, qubits: usize) -> DenseMatrix {
    let n = 1 << qubits;
    let mut m = DenseMatrix::zeros(n);
    for x in 0..n {
        for (y, a) in g.column(x) {
            m[(y, x)] = a;
        }
    }
    m
}

#[test]
fn hadamard_and_toffoli() {
    let h = UniformCircuit::new(1, 0, vec![Gate::h(0)]).unwrap();
    let out = h.simulate(&StateVector::zero(1)).unwrap();
    assert!(max_abs_diff(out.amplitudes(), &[c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)]) < 1e-15);
    let t = UniformCircuit::new(3, 2, vec![Gate::toffoli(0, 1, 2)]).unwrap();
    let out = t.simulate(&StateVector::basis(3, 0b011)).unwrap();
    assert_eq!(out.amplitudes()[0b111], c(1.0, 0.0));
}

#[test]
fn acceptance_basics() {
    let x = UniformCircuit::new(2, 0, vec![Gate::x(0)]).unwrap();
    assert_eq!(x.accept_probability(&StateVector::zero(2)).unwrap(), 1.0);
    let h = UniformCircuit::new(2, 0, vec![Gate::h(0)]).unwrap();
    assert!((h.accept_probability(&StateVector::zero(2)).unwrap() - 0.5).abs() < 1e-15);
}

#[test]
fn inversion_of_simple_gates() {
    let h = UniformCircuit::new(1, 0, vec![Gate::h(0)]).unwrap();
    assert!(h.invert().to_dense().unwrap().max_abs_diff(&h.to_dense().unwrap()) < 1e-15);
    let p = Gate::phase(0, 0.3).adjoint();
    match p.kind {
        qspace_core::circuit::GateKind::Phase(a) => assert_eq!(a, -0.3),
        _ => panic!("phase adjoint changed kind"),
    }
}

#[test]
fn invalid_gates_are_rejected() {
    assert!(UniformCircuit::new(2, 0, vec![Gate::cnot(1, 1)]).is_err());
    assert!(UniformCircuit::new(2, 0, vec![Gate::x(2)]).is_err());
    let bad = DenseMatrix::from_fn(2, |_, _| c(1.0, 0.0));
    assert!(UniformCircuit::new(1, 0, vec![Gate::one_qubit(0, bad)]).is_err());
    assert!(UniformCircuit::new(2, 0, vec![]).unwrap().simulate(&StateVector::zero(3)).is_err());
}

#[test]
fn qca_instance_known_values() {
    let x = UniformCircuit::new(2, 0, vec![Gate::x(0)]).unwrap();
    let q = x.make_qca_instance().unwrap();
    let amp = q.simulate(&StateVector::zero(3)).unwrap().amplitudes()[0];
    assert!((amp - c(1.0, 0.0)).norm() < 1e-15);
    let id = UniformCircuit::new(2, 0, vec![]).unwrap();
    let q = id.make_qca_instance().unwrap();
    assert!(q.simulate(&StateVector::zero(3)).unwrap().amplitudes()[0].norm() < 1e-15);
}

#[test]
fn generated_circuit_matches_list() {
    let mut rng = seeded(4);
    let list = random_circuit(3, 12, &mut rng);
    let gates: Vec<Gate> = list.gates().collect();
    let gen = UniformCircuit::generated(3, 0, gates.len(), std::sync::Arc::new(move |i| gates[i - 1].clone())).unwrap();
    let psi = StateVector::from_amplitudes(random_state(8, &mut rng)).unwrap();
    let a = list.simulate(&psi).unwrap();
    let b = gen.simulate(&psi).unwrap();
    assert!(max_abs_diff(a.amplitudes(), b.amplitudes()) < 1e-15);
    let ai = list.invert().simulate(&psi).unwrap();
    let bi = gen.invert().simulate(&psi).unwrap();
    assert!(max_abs_diff(ai.amplitudes(), bi.amplitudes()) < 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn inverse_composition(seed in 0u64..10_000) {
        let mut rng = seeded(seed);
        let circ = random_circuit(4, 20, &mut rng);
        let psi = StateVector::from_amplitudes(random_state(16, &mut rng)).unwrap();
        let back = circ.simulate(&circ.invert().simulate(&psi).unwrap()).unwrap();
        prop_assert!(max_abs_diff(back.amplitudes(), psi.amplitudes()) <= 1e-10);
        prop_assert!((back.norm() - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn dense_product_oracle(seed in 0u64..10_000, qubits in 1usize..=5) {
        let mut rng = seeded(seed);
        let circ = random_circuit(qubits, 15, &mut rng);
        let mut u = DenseMatrix::identity(1 << qubits);
        for g in circ.gates() {
            u = dense_gate(&g, qubits).mul(&u);
        }
        prop_assert!(u.max_abs_diff(&circ.to_dense().unwrap()) <= 1e-10);
        let psi = random_state(1 << qubits, &mut rng);
        let direct = u.mul_vec(&psi);
        let p_dense: f64 = direct.iter().enumerate().filter(|(i, _)| i & 1 == 1).map(|(_, a)| a.norm_sqr()).sum();
        let p = circ.accept_probability(&StateVector::from_amplitudes(psi).unwrap()).unwrap();
        prop_assert!((p - p_dense).abs() <= 1e-10);
        prop_assert!(circ.invert().to_dense().unwrap().mul(&u).max_abs_diff(&DenseMatrix::identity(1 << qubits)) <= 1e-10);
    }

    #[test]
    fn composition_is_sequential(seed in 0u64..10_000) {
        let mut rng = seeded(seed);
        let a = random_circuit(3, 8, &mut rng);
        let b = random_circuit(3, 8, &mut rng);
        let psi = StateVector::from_amplitudes(random_state(8, &mut rng)).unwrap();
        let seq = b.simulate(&a.simulate(&psi).unwrap()).unwrap();
        let joint = a.then(&b).unwrap().simulate(&psi).unwrap();
        prop_assert!(max_abs_diff(seq.amplitudes(), joint.amplitudes()) <= 1e-12);
    }

    #[test]
    fn qca_amplitude_equals_acceptance(seed in 0u64..10_000) {
        let mut rng = seeded(seed);
        let q = random_circuit(3, 10, &mut rng);
        let p = q.accept_probability(&StateVector::zero(3)).unwrap();
        let amp = q.make_qca_instance().unwrap().simulate(&StateVector::zero(4)).unwrap().amplitudes()[0];
        prop_assert!((amp.re - p).abs() <= 1e-10);
        prop_assert!(amp.im.abs() <= 1e-10);
    }

    #[test]
    fn circuit_as_operator(seed in 0u64..1000) {
        let mut rng = seeded(seed);
        let q = random_circuit(3, 6, &mut rng);
        let mut v = random_state(8, &mut rng);
        let orig = v.clone();
        q.apply(&mut v);
        q.apply_adjoint(&mut v);
        prop_assert!(max_abs_diff(&v, &orig) <= 1e-12);
    }
}
