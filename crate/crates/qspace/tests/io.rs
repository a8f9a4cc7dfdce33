use proptest::prelude::*;
use qspace::io::{artifact_file, artifact_from_file, CircuitFile, InstanceFile, MatrixFile};
use qspace_core::generators::{random_circuit, random_psd};
use qspace_core::reductions::qca_to_matinv;
use qspace_core::numerics::random::seeded;
use qspace_core::numerics::SparseRowMatrix;

fn bits(m: &SparseRowMatrix) -> Vec<(usize, usize, u64, u64)> {
    m.upper_entries().into_iter().map(|(i, j, z)| (i, j, z.re.to_bits(), z.im.to_bits())).collect()
}

fn through_json<T: serde::Serialize + for<'de> serde::Deserialize<'de>>(v: &T) -> T {
    serde_json::from_str(&qspace::io::to_json(v)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn matrix_roundtrip_is_bit_exact(seed in any::<u64>(), log_dim in 0u32..5, kappa in 1.0f64..20.0) {
        let m = random_psd(1 << log_dim, kappa, &mut seeded(seed)).unwrap();
        let back = through_json(&MatrixFile::from_matrix(&m)).to_matrix().unwrap();
        prop_assert_eq!(bits(&m), bits(&back));
    }

    #[test]
    fn circuit_roundtrip_keeps_canonical_bytes(seed in any::<u64>(), qubits in 1usize..5, gates in 1usize..10) {
        let c = random_circuit(qubits, gates, 0, &mut seeded(seed)).unwrap();
        let back = through_json(&CircuitFile::from_circuit(&c)).to_circuit().unwrap();
        prop_assert_eq!(c.canonical_bytes(), back.canonical_bytes());
    }
}

#[test]
fn artifact_roundtrip() {
    let c = random_circuit(2, 3, 0, &mut seeded(7)).unwrap();
    let art = qca_to_matinv(&c).unwrap();
    let file: InstanceFile = through_json(&artifact_file(&art));
    let back = artifact_from_file(&file).unwrap().expect("meta block present");
    assert_eq!(back.kind, art.kind);
    assert_eq!(back.thresholds, art.thresholds);
    assert_eq!(back.provenance, art.provenance);
    assert_eq!(back.meta, art.meta);
    assert_eq!(bits(&back.matrix), bits(&art.matrix));
}

#[test]
fn malformed_matrices_are_rejected() {
    let cases = [
        r#"{"dim": 0, "entries": []}"#,
        r#"{"dim": 2, "entries": [[2, 2, 1.0, 0.0]]}"#,
        r#"{"dim": 2, "entries": [[1, 0, 1.0, 0.0]]}"#,
        r#"{"dim": 2, "entries": [[0, 0, 1.0, 0.5]]}"#,
        r#"{"dim": 100000, "entries": []}"#,
    ];
    for text in cases {
        let f: MatrixFile = serde_json::from_str(text).unwrap();
        assert!(f.to_matrix().is_err(), "{text}");
    }
}
