//! JSON file formats: matrices, circuits, verifiers, instances and
//! reduction artifacts. Loaders validate everything and never panic.

use std::path::Path;

use qspace_core::circuit::{DenseOp, Gate, GateKind, UniformCircuit};
use qspace_core::numerics::{DenseMatrix, SparseRowMatrix, C64};
use qspace_core::qma::QmaVerifier;
use qspace_core::reductions::{ArtifactMeta, ReductionArtifact, ReductionKind, Thresholds};
use qspace_core::tolerances;
use serde::{Deserialize, Serialize};

/// Qubit limit for circuit files, matching the simulator's state cap.
pub const MAX_QUBITS: usize = 22;

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error(transparent)]
    Core(#[from] qspace_core::Error),
}

fn malformed(msg: impl Into<String>) -> LoadError {
    LoadError::Malformed(msg.into())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, LoadError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| LoadError::Read { path: path.display().to_string(), source: e })?;
    serde_json::from_str(&text).map_err(|e| malformed(format!("{}: {e}", path.display())))
}

/// `{"dim": N, "entries": [[i, j, re, im], ...]}`, upper triangle only.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixFile {
    pub dim: usize,
    pub entries: Vec<(usize, usize, f64, f64)>,
}

impl MatrixFile {
    pub fn from_matrix(m: &SparseRowMatrix) -> Self {
        let entries = m.upper_entries().into_iter().map(|(i, j, z)| (i, j, z.re, z.im)).collect();
        MatrixFile { dim: m.dim(), entries }
    }

    pub fn to_matrix(&self) -> Result<SparseRowMatrix, LoadError> {
        if self.dim == 0 {
            return Err(malformed("matrix dimension is zero"));
        }
        if self.dim > tolerances::dense_cap() {
            return Err(qspace_core::Error::Capacity { dim: self.dim, cap: tolerances::dense_cap() }.into());
        }
        let mut upper = Vec::with_capacity(self.entries.len());
        for &(i, j, re, im) in &self.entries {
            if i >= self.dim || j >= self.dim {
                return Err(malformed(format!("entry ({i}, {j}) outside dim {}", self.dim)));
            }
            if i > j {
                return Err(malformed(format!("entry ({i}, {j}) is below the diagonal")));
            }
            if !(re.is_finite() && im.is_finite()) {
                return Err(malformed(format!("entry ({i}, {j}) is not finite")));
            }
            upper.push((i, j, C64::new(re, im)));
        }
        Ok(SparseRowMatrix::from_upper(self.dim, &upper)?)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GateFile {
    pub kind: String,
    pub targets: Vec<usize>,
    #[serde(default)]
    pub controls: Vec<usize>,
    /// Row-major [re, im] pairs for u1, u2 and unitary gates.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<(f64, f64)>>,
    /// Angle of a phase gate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angle: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CircuitFile {
    pub qubits: usize,
    #[serde(default)]
    pub out: usize,
    pub gates: Vec<GateFile>,
}

fn dense_from_pairs(pairs: &[(f64, f64)]) -> Result<DenseMatrix, LoadError> {
    let dim = (pairs.len() as f64).sqrt() as usize;
    if dim * dim != pairs.len() || dim == 0 {
        return Err(malformed(format!("gate matrix has {} entries, not a square", pairs.len())));
    }
    if pairs.iter().any(|(re, im)| !(re.is_finite() && im.is_finite())) {
        return Err(malformed("gate matrix has non-finite entries"));
    }
    Ok(DenseMatrix::from_row_major(dim, pairs.iter().map(|&(re, im)| C64::new(re, im)).collect())?)
}

impl GateFile {
    pub fn from_gate(g: &Gate) -> Self {
        let pairs = |m: &DenseMatrix| Some(m.as_slice().iter().map(|z| (z.re, z.im)).collect());
        let (kind, matrix, angle) = match &g.kind {
            GateKind::Hadamard => ("h", None, None),
            GateKind::X => ("x", None, None),
            GateKind::Phase(a) => ("phase", None, Some(*a)),
            GateKind::GenericOneQubit(m) => ("u1", pairs(m), None),
            GateKind::GenericTwoQubit(m) => ("u2", pairs(m), None),
            GateKind::ControlledUnitary(op) => ("unitary", pairs(&op.to_dense()), None),
        };
        GateFile { kind: kind.into(), targets: g.targets.clone(), controls: g.controls.clone(), matrix, angle }
    }

    pub fn to_gate(&self) -> Result<Gate, LoadError> {
        let need_matrix = || {
            self.matrix.as_deref().ok_or_else(|| malformed(format!("{} gate needs a matrix", self.kind))).and_then(dense_from_pairs)
        };
        let arity = |n: usize| {
            if self.targets.len() == n {
                Ok(())
            } else {
                Err(malformed(format!("{} gate takes {n} targets, got {}", self.kind, self.targets.len())))
            }
        };
        let kind = match self.kind.as_str() {
            "h" => {
                arity(1)?;
                GateKind::Hadamard
            }
            "x" | "cnot" | "toffoli" | "mcx" => {
                arity(1)?;
                GateKind::X
            }
            "phase" => {
                arity(1)?;
                let a = self.angle.ok_or_else(|| malformed("phase gate needs an angle"))?;
                if !a.is_finite() {
                    return Err(malformed("phase angle is not finite"));
                }
                GateKind::Phase(a)
            }
            "u1" => {
                arity(1)?;
                GateKind::GenericOneQubit(need_matrix()?)
            }
            "u2" => {
                arity(2)?;
                GateKind::GenericTwoQubit(need_matrix()?)
            }
            "unitary" => {
                let m = need_matrix()?;
                if self.targets.is_empty() || self.targets.len() > MAX_QUBITS || m.dim() != 1 << self.targets.len() {
                    return Err(malformed("unitary gate matrix does not match its targets"));
                }
                GateKind::ControlledUnitary(std::sync::Arc::new(DenseOp::new(m)?))
            }
            other => return Err(malformed(format!("unknown gate kind {other:?}"))),
        };
        Ok(Gate::new(kind, self.targets.clone(), self.controls.clone()))
    }
}

impl CircuitFile {
    pub fn from_circuit(c: &UniformCircuit) -> Self {
        CircuitFile { qubits: c.qubits(), out: c.out(), gates: c.gates().map(|g| GateFile::from_gate(&g)).collect() }
    }

    pub fn to_circuit(&self) -> Result<UniformCircuit, LoadError> {
        if self.qubits == 0 || self.qubits > MAX_QUBITS {
            return Err(malformed(format!("qubit count {} outside 1..={MAX_QUBITS}", self.qubits)));
        }
        let gates = self.gates.iter().map(GateFile::to_gate).collect::<Result<Vec<_>, _>>()?;
        Ok(UniformCircuit::new(self.qubits, self.out, gates)?)
    }
}

/// Circuit file plus `{"m", "k", "c", "s"}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerifierFile {
    #[serde(flatten)]
    pub circuit: CircuitFile,
    pub m: usize,
    pub k: usize,
    pub c: f64,
    pub s: f64,
}

impl VerifierFile {
    pub fn from_verifier(v: &QmaVerifier) -> Self {
        VerifierFile { circuit: CircuitFile::from_circuit(&v.circuit), m: v.m, k: v.k, c: v.c, s: v.s }
    }

    pub fn to_verifier(&self) -> Result<QmaVerifier, LoadError> {
        Ok(QmaVerifier::new(self.circuit.to_circuit()?, self.m, self.k, self.c, self.s)?)
    }
}

/// Matrix file plus optional instance parameters; command-line flags
/// override the file. Artifacts carry a `meta` block instead.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InstanceFile {
    #[serde(flatten)]
    pub matrix: MatrixFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<MetaFile>,
}

impl InstanceFile {
    pub fn bare(m: &SparseRowMatrix) -> Self {
        InstanceFile { matrix: MatrixFile::from_matrix(m), kappa: None, s: None, t: None, a: None, b: None, meta: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalkMeta {
    pub x: f64,
    pub d: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum ThresholdFile {
    MinEig { a: f64, b: f64 },
    MatInv { s: usize, t: usize, a: f64, b: f64 },
    None,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetaFile {
    pub kind: String,
    pub thresholds: ThresholdFile,
    pub provenance: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clock_offset: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gates: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qubits: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub walk: Option<WalkMeta>,
}

pub fn artifact_file(art: &ReductionArtifact) -> InstanceFile {
    let thresholds = match art.thresholds {
        Thresholds::MinEig { a, b } => ThresholdFile::MinEig { a, b },
        Thresholds::MatInv { s, t, a, b } => ThresholdFile::MatInv { s, t, a, b },
        Thresholds::None => ThresholdFile::None,
    };
    let meta = MetaFile {
        kind: art.kind.name().into(),
        thresholds,
        provenance: art.provenance.clone(),
        clock_offset: art.meta.clock_offset,
        gates: art.meta.gates,
        qubits: art.meta.qubits,
        kappa: art.meta.kappa,
        walk: art.meta.walk.map(|(x, d)| WalkMeta { x, d }),
    };
    InstanceFile { meta: Some(meta), ..InstanceFile::bare(&art.matrix) }
}

pub fn artifact_from_file(f: &InstanceFile) -> Result<Option<ReductionArtifact>, LoadError> {
    let Some(meta) = &f.meta else { return Ok(None) };
    let kind = ReductionKind::parse(&meta.kind).ok_or_else(|| malformed(format!("unknown reduction kind {:?}", meta.kind)))?;
    let thresholds = match meta.thresholds {
        ThresholdFile::MinEig { a, b } => Thresholds::MinEig { a, b },
        ThresholdFile::MatInv { s, t, a, b } => Thresholds::MatInv { s, t, a, b },
        ThresholdFile::None => Thresholds::None,
    };
    Ok(Some(ReductionArtifact {
        matrix: f.matrix.to_matrix()?,
        kind,
        thresholds,
        provenance: meta.provenance.clone(),
        meta: ArtifactMeta {
            gates: meta.gates,
            qubits: meta.qubits,
            clock_offset: meta.clock_offset,
            kappa: meta.kappa,
            walk: meta.walk.as_ref().map(|w| (w.x, w.d)),
        },
    }))
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable value");
    s.push('\n');
    s
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> std::io::Result<()> {
    std::fs::write(path, to_json(value))
}
