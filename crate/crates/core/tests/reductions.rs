use std::f64::consts::PI;

use qspace_core::circuit::{Gate, StateVector, UniformCircuit, UnitaryOp};
use qspace_core::generators::{deterministic_verifier, random_circuit};
use qspace_core::numerics::random::{random_sparse_hermitian, random_state, seeded};
use qspace_core::numerics::{c, classical_inverse_entry, condition_number, decompose, inner, DenseMatrix, SparseRowMatrix, C64};
use qspace_core::qma::QmaVerifier;
use qspace_core::reductions::{
    childs_walk, circuit_to_clock, clock_history_state, default_clock_offset, frustration_free_check,
    precise_lh_gap, precise_lh_validity, qca_entry_formula, qca_kappa_bound, qca_to_matinv, qca_to_matinv_with_offset,
    to_matinv_instance, CycleUnitary, ReductionKind, Thresholds,
};
use rand::Rng;

fn entry(art: &qspace_core::reductions::ReductionArtifact) -> C64 {
    let Thresholds::MatInv { s, t, .. } = art.thresholds else { panic!("not a matinv artifact") };
    classical_inverse_entry(&art.matrix, s, t).unwrap()
}

#[test]
fn cycle_unitary_closes_after_3t_steps() {
    let mut rng = seeded(31);
    for (k, t) in [(1, 1), (1, 3), (2, 2), (2, 4)] {
        let q = random_circuit(k, t, 0, &mut rng).unwrap();
        let cycle = CycleUnitary::new(&q).unwrap();
        let u = cycle.to_dense();
        assert!(u.unitarity_defect() < 1e-12);
        let full = u.pow(3 * t as u64);
        assert!(full.max_abs_diff(&DenseMatrix::identity(u.dim())) < 1e-9, "k {k} T {t}");

        // U^s |1>|psi> = |s+1> Q|psi> for s in [T, 2T]
        let psi = StateVector::from_amplitudes(random_state(1 << k, &mut rng)).unwrap();
        let q_psi = q.simulate(&psi).unwrap();
        let b = 1 << k;
        for s in t..=2 * t {
            let mut v = vec![C64::new(0.0, 0.0); cycle.dim()];
            v[..b].copy_from_slice(psi.amplitudes());
            for _ in 0..s {
                cycle.apply(&mut v);
            }
            let block = &v[s * b..(s + 1) * b];
            for (x, y) in block.iter().zip(q_psi.amplitudes()) {
                assert!((x - y).norm() < 1e-12);
            }
        }
        let mut v = random_state(cycle.dim(), &mut rng);
        let orig = v.clone();
        cycle.apply(&mut v);
        cycle.apply_adjoint(&mut v);
        assert!(v.iter().zip(&orig).all(|(a, b)| (a - b).norm() < 1e-12));
    }
}

#[test]
fn qca_entry_matches_formula() {
    let mut rng = seeded(32);
    for i in 0..6 {
        let k = 1 + i % 2;
        let t = 1 + rng.random_range(0..4);
        let q = random_circuit(k, t, 0, &mut rng).unwrap();
        for offset in t..=2 * t {
            let art = qca_to_matinv_with_offset(&q, offset).unwrap();
            let want = qca_entry_formula(&q, offset).unwrap();
            assert!((entry(&art) - want).norm() < 1e-9, "k {k} T {t} offset {offset}");
        }
        assert!(qca_to_matinv_with_offset(&q, t - 1).is_err());
        assert!(qca_to_matinv_with_offset(&q, 2 * t + 1).is_err());
    }
}

#[test]
fn qca_single_x_gate_has_zero_entry() {
    let q = UniformCircuit::new(1, 0, vec![Gate::x(0)]).unwrap();
    let art = qca_to_matinv(&q).unwrap();
    assert!(entry(&art).norm() < 1e-9);
    assert_eq!(art.kind, ReductionKind::QcaMatinv);
    assert_eq!(art.meta.clock_offset, Some(default_clock_offset(1)));
    assert_eq!(art.matrix.dim(), 16);
}

#[test]
fn qca_condition_number() {
    let mut rng = seeded(33);
    for t in 1..=5 {
        let q = random_circuit(2, t, 0, &mut rng).unwrap();
        let art = qca_to_matinv(&q).unwrap();
        let kappa = condition_number(&decompose(&art.matrix).unwrap());
        assert!(kappa <= qca_kappa_bound(t) * (1.0 + 1e-9), "T {t}: {kappa}");
        // U has eigenvalue -1 exactly when 3T is even
        if t % 2 == 0 {
            assert!((kappa - qca_kappa_bound(t)).abs() < 1e-8 * kappa);
            assert!(kappa > 2.0 * t as f64);
        } else {
            assert!(kappa <= 2.0 * t as f64, "T {t}: {kappa}");
        }
    }
}

#[test]
fn qca_instance_decides_acceptance() {
    // accept-always and reject-always circuits through make_qca_instance
    for (gates, yes) in [(vec![Gate::x(0)], true), (vec![Gate::h(0), Gate::h(0)], false)] {
        let q = UniformCircuit::new(1, 0, gates).unwrap().make_qca_instance().unwrap();
        let art = qca_to_matinv(&q).unwrap();
        let inst = to_matinv_instance(&art).unwrap();
        assert_eq!(inst.oracle_decision().unwrap(), yes);
    }
}

#[test]
fn provenance_is_stable() {
    let mut rng = seeded(34);
    let q = random_circuit(2, 3, 0, &mut rng).unwrap();
    let a = qca_to_matinv(&q).unwrap();
    let b = qca_to_matinv(&q.materialize().unwrap()).unwrap();
    assert_eq!(a.provenance, b.provenance);
    assert_eq!(a.provenance.len(), 64);
    let other = random_circuit(2, 3, 0, &mut rng).unwrap();
    assert_ne!(a.provenance, qca_to_matinv(&other).unwrap().provenance);
}

#[test]
fn clock_accepting_circuit_is_frustration_free() {
    let mut rng = seeded(35);
    for (m, k, g) in [(0, 2, 2), (1, 1, 2), (1, 2, 3), (2, 1, 3)] {
        let v = deterministic_verifier(m, k, g, true, &mut rng).unwrap();
        let clock = circuit_to_clock(&v).unwrap();
        let (ff, lmin) = frustration_free_check(&clock.h).unwrap();
        assert!(ff && lmin.abs() < 1e-10, "lambda_min {lmin}");
        assert!(lmin <= clock.a + 1e-10);
    }
}

#[test]
fn clock_rejecting_circuit_has_gap() {
    let mut rng = seeded(36);
    for (m, k, g) in [(0, 2, 1), (1, 1, 2), (1, 2, 3), (2, 1, 4)] {
        let v = deterministic_verifier(m, k, g, false, &mut rng).unwrap();
        let clock = circuit_to_clock(&v).unwrap();
        let t = clock.gates as f64;
        let (ff, lmin) = frustration_free_check(&clock.h).unwrap();
        assert!(!ff);
        assert!(lmin >= 1.0 / (t * t * t), "T {t}: {lmin}");
        assert!((clock.b - 1.0 / (t * t * t)).abs() < 1e-15);
    }
}

#[test]
fn clock_structure() {
    let mut rng = seeded(37);
    let v = deterministic_verifier(1, 2, 3, true, &mut rng).unwrap();
    let clock = circuit_to_clock(&v).unwrap();
    assert!(clock.h.d_max() <= 6);
    let live = (clock.gates + 1) << clock.qubits;
    for i in 0..live {
        for j in 0..live {
            let sum = clock.h_in.entry(i, j) + clock.h_prop.entry(i, j) + clock.h_out.entry(i, j);
            assert_eq!(sum, clock.h.entry(i, j));
        }
    }
    // classical gates: H_prop entries are 0, +-1/2 or 1
    for row in clock.h_prop.rows() {
        for (_, z) in row {
            assert!(z.im == 0.0 && [-0.5, 0.5, 1.0].contains(&z.re), "{z}");
        }
    }
    // padded clock values carry a unit penalty
    for i in live..clock.h.dim() {
        assert_eq!(clock.h.row_entries(i), &[(i, c(1.0, 0.0))]);
    }
}

#[test]
fn history_state_energy() {
    let mut rng = seeded(38);
    for _ in 0..5 {
        let (m, k, g) = (1, 2, 3);
        let circuit = random_circuit(m + k, g, m + k - 1, &mut rng).unwrap();
        let v = QmaVerifier::new(circuit.clone(), m, k, 0.5, 0.0).unwrap();
        let clock = circuit_to_clock(&v).unwrap();
        let psi = StateVector::from_amplitudes(random_state(1 << m, &mut rng)).unwrap();
        let eta = clock_history_state(&circuit, &psi).unwrap();
        let energy = inner(&eta, &clock.h.mul_vec(&eta)).re;
        let p = v.circuit.accept_probability(&psi.tensor(&StateVector::zero(k))).unwrap();
        assert!((energy - (1.0 - p) / (g as f64 + 1.0)).abs() < 1e-12);
    }
}

#[test]
fn clock_bounds_on_generic_verifiers() {
    // the upper bound (1 - c)/(T + 1) holds with c the best acceptance; the
    // (1 - s)/T^3 lower bound is only asymptotic for s > 0, so check positivity
    let mut rng = seeded(39);
    for _ in 0..10 {
        let circuit = random_circuit(2, 2, 1, &mut rng).unwrap();
        let v = QmaVerifier::new(circuit, 1, 1, 0.5, 0.0).unwrap();
        let best = qspace_core::qma::optimal_witness(&v).unwrap().1;
        let lmin = decompose(&circuit_to_clock(&v).unwrap().h).unwrap().min();
        assert!(lmin <= (1.0 - best) / 3.0 + 1e-10);
        assert!(best > 1.0 - 1e-9 || lmin > 1e-9);
    }
}

#[test]
fn clock_lower_bound_on_deterministic_grid() {
    let mut rng = seeded(43);
    for k in 1..=3 {
        for g in 1..=3 {
            let v = deterministic_verifier(0, k.max(2), g, false, &mut rng).unwrap();
            let clock = circuit_to_clock(&v).unwrap();
            let t = clock.gates as f64;
            if clock.gates > 8 {
                continue;
            }
            let lmin = decompose(&clock.h).unwrap().min();
            assert!(lmin >= 1.0 / (t * t * t), "k {k} T {t}: {lmin}");
        }
    }
}

fn nonneg_diag(h: &SparseRowMatrix) -> SparseRowMatrix {
    let rows = h
        .rows()
        .iter()
        .enumerate()
        .map(|(i, r)| r.iter().map(|&(j, z)| if i == j { (j, c(z.re.abs(), 0.0)) } else { (j, z) }).collect())
        .collect();
    SparseRowMatrix::from_rows(h.dim(), rows).unwrap()
}

#[test]
fn walk_is_unitary_and_reproduces_arcsin() {
    let mut rng = seeded(40);
    for _ in 0..5 {
        let h = nonneg_diag(&random_sparse_hermitian(8, 0.3, &mut rng));
        let walk = childs_walk(&h, h.hmax()).unwrap();
        let u = walk.materialize().unwrap();
        assert!(u.unitarity_defect() < 1e-10);
        let mut v = random_state(walk.dim(), &mut rng);
        let orig = v.clone();
        walk.apply(&mut v);
        walk.apply_adjoint(&mut v);
        assert!(v.iter().zip(&orig).all(|(a, b)| (a - b).norm() < 1e-12));
        for block in walk.invariant_blocks().unwrap() {
            assert!(block.leakage < 1e-9 && block.phase_error() < 1e-9, "{block:?}");
        }
    }
}

#[test]
fn walk_dense_route_matches_blocks() {
    let mut rng = seeded(41);
    let h = nonneg_diag(&random_sparse_hermitian(8, 0.4, &mut rng));
    let walk = childs_walk(&h, 1.0).unwrap();
    let (phases, leakage) = walk.data_subspace_phases().unwrap();
    assert!(leakage < 1e-9);
    let mut expected: Vec<f64> = Vec::new();
    for b in walk.invariant_blocks().unwrap() {
        expected.push(b.expected);
        expected.push(qspace_core::numerics::wrap_angle(PI - b.expected));
    }
    assert_eq!(phases.len(), expected.len());
    let mut used = vec![false; phases.len()];
    for e in expected {
        let i = (0..phases.len())
            .filter(|&i| !used[i])
            .min_by(|&a, &b| {
                let da = qspace_core::numerics::wrap_angle(phases[a] - e).abs();
                let db = qspace_core::numerics::wrap_angle(phases[b] - e).abs();
                da.total_cmp(&db)
            })
            .unwrap();
        used[i] = true;
        assert!(qspace_core::numerics::wrap_angle(phases[i] - e).abs() < 1e-9);
    }
}

#[test]
fn walk_on_zero_and_clock_hamiltonians() {
    let zero = SparseRowMatrix::zero(4).unwrap();
    let walk = childs_walk(&zero, 1.0).unwrap();
    for b in walk.invariant_blocks().unwrap() {
        assert_eq!(b.expected, 0.0);
        assert!(b.phase_error() < 1e-12);
    }

    let mut rng = seeded(42);
    let v = deterministic_verifier(0, 2, 1, true, &mut rng).unwrap();
    let clock = circuit_to_clock(&v).unwrap();
    let walk = childs_walk(&clock.h_prop, 1.0).unwrap();
    // |amplitude|^2 d lies in {0, 1/2, 1}
    for j in 0..clock.h_prop.dim() {
        for &(_, a) in walk.phi(j) {
            let p = a.norm_sqr() * walk.d() as f64;
            assert!([0.0, 0.5, 1.0].iter().any(|q| (p - q).abs() < 1e-15), "{p}");
        }
    }
    assert!(walk.materialize().unwrap().unitarity_defect() < 1e-10);
    for b in walk.invariant_blocks().unwrap() {
        assert!(b.leakage < 1e-9 && b.phase_error() < 1e-9);
    }
}

#[test]
fn walk_rejects_bad_input() {
    let h = SparseRowMatrix::diagonal(&[0.5, 1.0]).unwrap();
    assert!(childs_walk(&h, 0.9).is_err());
    assert!(childs_walk(&h, 0.0).is_err());
    let neg = SparseRowMatrix::diagonal(&[-0.5, 1.0]).unwrap();
    assert!(childs_walk(&neg, 1.0).is_err());
}

#[test]
fn precise_lh_examples() {
    assert!(precise_lh_validity(8, 1.0, 1.0 - 2f64.powi(-10)));
    for t in 2..10 {
        for s in [0.0, 0.3, 0.9, 1.0] {
            assert!(!precise_lh_validity(t, s, s));
        }
    }
    for t in 1..12 {
        for ci in 0..=10 {
            for si in 0..=10 {
                let (cv, sv) = (ci as f64 / 10.0, si as f64 / 10.0);
                let direct = (1.0 - sv) / (t as f64).powi(3) - (1.0 - cv) / (t as f64 + 1.0);
                assert_eq!(precise_lh_gap(t, cv, sv), direct);
                assert_eq!(precise_lh_validity(t, cv, sv), direct > 0.0);
            }
        }
    }
    assert!(!precise_lh_validity(0, 1.0, 0.0));
}

#[test]
fn frustration_free_identity() {
    let (ff, lmin) = frustration_free_check(&SparseRowMatrix::identity(4).unwrap()).unwrap();
    assert!(!ff && (lmin - 1.0).abs() < 1e-12);
}
