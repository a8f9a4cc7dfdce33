//! Subcommand implementations. Each returns a report and an exit code;
//! errors map to exit 2 (malformed input, capacity) or 3 (promise violation).

use std::path::{Path, PathBuf};
use std::time::Instant;

use qspace_core::circuit::UnitaryOp;
use qspace_core::matinv::{basis_prep, MatInvInstance, MatInvSolver};
use qspace_core::numerics::random::{derive_seed, seeded};
use qspace_core::numerics::{classical_inverse_entry, condition_number, decompose, DenseMatrix, SparseRowMatrix};
use qspace_core::qma::{decide_mineig, HamSim, MinEigInstance};
use qspace_core::reductions::{
    childs_walk, circuit_to_clock, default_clock_offset, digest, frustration_free_check, qca_entry_formula,
    qca_kappa_bound, qca_to_matinv_with_offset, to_matinv_instance, CycleUnitary, ReductionArtifact, ReductionKind,
    Thresholds,
};
use serde_json::json;

use crate::criteria;
use crate::io::{self, artifact_file, artifact_from_file, CircuitFile, InstanceFile, LoadError, VerifierFile};
use crate::report::RunReport;

pub const EXIT_YES: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_MALFORMED: i32 = 2;
pub const EXIT_PROMISE: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CmdError {
    #[error("{0}")]
    Malformed(String),
    #[error("promise violated: {0}")]
    Promise(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CmdError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CmdError::Promise(_) => EXIT_PROMISE,
            _ => EXIT_MALFORMED,
        }
    }
}

impl From<qspace_core::Error> for CmdError {
    fn from(e: qspace_core::Error) -> Self {
        match e {
            qspace_core::Error::PromiseViolation(m) => CmdError::Promise(m),
            other => CmdError::Malformed(other.to_string()),
        }
    }
}

impl From<LoadError> for CmdError {
    fn from(e: LoadError) -> Self {
        match e {
            LoadError::Core(c) => c.into(),
            other => CmdError::Malformed(other.to_string()),
        }
    }
}

pub type CmdResult = Result<(RunReport, i32), CmdError>;

fn decision_code(yes: bool) -> i32 {
    if yes {
        EXIT_YES
    } else {
        EXIT_NO
    }
}

#[derive(Clone, Debug, Default)]
pub struct InvertArgs {
    pub s: Option<usize>,
    pub t: Option<usize>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub eps: f64,
    pub seed: u64,
    pub verify_oracle: bool,
    /// Source circuit of a QCA artifact, for the provenance and formula check.
    pub circuit: Option<PathBuf>,
}

/// MATINV on an instance file or a qca-matinv artifact.
pub fn invert(file: &InstanceFile, args: &InvertArgs) -> CmdResult {
    let start = Instant::now();
    if !(args.eps > 0.0 && args.eps < 1.0) {
        return Err(CmdError::Malformed(format!("eps = {} must lie in (0, 1)", args.eps)));
    }
    let art = artifact_from_file(file)?;
    let (inst, scale, offset) = match &art {
        Some(art) if art.kind == ReductionKind::QcaMatinv => {
            if args.s.is_some() || args.t.is_some() || args.a.is_some() || args.b.is_some() {
                return Err(CmdError::Malformed("a qca-matinv artifact fixes s, t, a and b".into()));
            }
            let gates = art.meta.gates.ok_or_else(|| CmdError::Malformed("artifact lacks a gate count".into()))?;
            (to_matinv_instance(art)?, 1.0 + (-1.0 / gates as f64).exp(), art.meta.clock_offset)
        }
        Some(art) => {
            return Err(CmdError::Malformed(format!("invert needs a qca-matinv artifact, got {}", art.kind.name())))
        }
        None => {
            let h = file.matrix.to_matrix()?;
            let need = |v: Option<usize>, w: Option<usize>, name: &str| {
                v.or(w).ok_or_else(|| CmdError::Malformed(format!("missing {name}")))
            };
            let s = need(args.s, file.s, "s")?;
            let t = need(args.t, file.t, "t")?;
            let a = args.a.or(file.a).ok_or_else(|| CmdError::Malformed("missing a".into()))?;
            let b = args.b.or(file.b).ok_or_else(|| CmdError::Malformed("missing b".into()))?;
            let kappa = match file.kappa {
                Some(k) => k,
                None => condition_number(&decompose(&h)?),
            };
            (MatInvInstance::new(h, kappa, s, t, a, b)?, 1.0, None)
        }
    };
    let exact = classical_inverse_entry(&inst.h, inst.s, inst.t)?.norm();
    let want = inst.oracle_decision()?;
    let mut rng = seeded(args.seed);
    let q = inst.data_qubits();
    let (si, ti) = (inst.s, inst.t);
    let solver = MatInvSolver::new(inst.clone(), args.eps)?;
    let est = solver.estimate_entry(&basis_prep(q, si)?, &basis_prep(q, ti)?, &mut rng)?;
    let decision = solver.decide(&mut rng)?;

    let mut report = RunReport::new("invert", args.seed);
    report.decision = Some(decision.yes);
    // artifacts are inverted at H / scale, so rescale to the unscaled entry
    report.estimate = Some(est.value / scale);
    report.tolerance = Some(args.eps);
    report.ancilla_count = Some(est.ancillas());
    let oracle_entry = exact / scale;
    if args.verify_oracle {
        report.classical_oracle = Some(json!({ "entry": oracle_entry, "decision": want }));
        report.pass = (est.value / scale - oracle_entry).abs() <= args.eps && decision.yes == want;
    }
    let mut details = json!({
        "s": inst.s, "t": inst.t, "a": inst.a_thresh / scale, "b": inst.b_thresh / scale, "kappa": inst.kappa,
        "median": decision.median / scale, "estimates": decision.estimates.iter().map(|e| e / scale).collect::<Vec<_>>(),
        "pe_bits": est.pe_bits, "wh_ancillas": est.wh_ancillas,
    });
    if let Some(path) = &args.circuit {
        let art = art.as_ref().ok_or_else(|| CmdError::Malformed("--circuit needs a qca-matinv artifact".into()))?;
        let circuit = io::read_json::<CircuitFile>(path)?.to_circuit()?;
        if digest(&circuit.canonical_bytes()) != art.provenance {
            return Err(CmdError::Malformed("artifact provenance does not match the circuit".into()));
        }
        let offset = offset.unwrap_or_else(|| default_clock_offset(circuit.len()));
        details["formula"] = json!(qca_entry_formula(&circuit, offset)?.norm());
    }
    report.details = details;
    report.timing = start.elapsed();
    Ok((report, decision_code(decision.yes)))
}

#[derive(Clone, Debug, Default)]
pub struct MinEigArgs {
    pub a: Option<f64>,
    pub b: Option<f64>,
    /// None for exact evolution.
    pub inject_eps: Option<f64>,
    pub seed: u64,
    pub verify_oracle: bool,
}

pub fn mineig(file: &InstanceFile, args: &MinEigArgs) -> CmdResult {
    let start = Instant::now();
    let art = artifact_from_file(file)?;
    let (fa, fb) = match art.as_ref().map(|a| a.thresholds) {
        Some(Thresholds::MinEig { a, b }) => (Some(a), Some(b)),
        _ => (file.a, file.b),
    };
    let h = file.matrix.to_matrix()?;
    let a = args.a.or(fa).ok_or_else(|| CmdError::Malformed("missing a".into()))?;
    let b = args.b.or(fb).ok_or_else(|| CmdError::Malformed("missing b".into()))?;
    let inst = MinEigInstance::new(h, a, b)?;
    let lambda = inst.lambda_min()?;
    let want = inst.oracle_decision()?;
    let hamsim = match args.inject_eps {
        None => HamSim::Exact,
        Some(e) if e.is_finite() && e >= 0.0 => HamSim::Injected { epsilon: e, seed: derive_seed(args.seed, 7) },
        Some(e) => return Err(CmdError::Malformed(format!("injected error {e} must be nonnegative"))),
    };
    let r = decide_mineig(&inst, hamsim)?;
    let mut report = RunReport::new("mineig", args.seed);
    report.decision = Some(r.yes);
    report.estimate = Some(r.final_acceptance);
    report.ancilla_count = Some(r.ancillas);
    if args.verify_oracle {
        report.classical_oracle = Some(json!({ "lambda_min": lambda, "decision": want }));
        report.pass = r.yes == want;
    }
    let ladder: Vec<_> = ["protocol", "amplified", "witness_free", "final"]
        .iter()
        .zip(r.ladder)
        .map(|(stage, (c, s))| json!({ "stage": stage, "c": c, "s": s }))
        .collect();
    report.details = json!({
        "a": a, "b": b, "t": r.t, "epsilon": r.epsilon, "ladder": ladder,
        "optimal_witness_acceptance": [r.optimal_witness_acceptance.0, r.optimal_witness_acceptance.1],
        "witness_free_acceptance": r.witness_free_acceptance,
        "final_acceptance": r.final_acceptance,
    });
    report.timing = start.elapsed();
    Ok((report, decision_code(r.yes)))
}

#[derive(Clone, Debug, Default)]
pub struct ReduceArgs {
    pub clock_offset: Option<usize>,
    /// Walk normalization X; defaults to max |H_ij| (1 for the zero matrix).
    pub x: Option<f64>,
    pub verify: bool,
    pub out: Option<PathBuf>,
    pub seed: u64,
}

/// Reduction input: a circuit file for qca, a verifier file for clock, a
/// matrix or artifact file for walk.
pub fn reduce(kind: ReductionKind, input: &Path, args: &ReduceArgs) -> CmdResult {
    let start = Instant::now();
    let mut report = RunReport::new(&format!("reduce-{}", kind.name()), args.seed);
    let (art, details) = match kind {
        ReductionKind::QcaMatinv => {
            let circuit = io::read_json::<CircuitFile>(input)?.to_circuit()?;
            let t = circuit.len();
            let offset = args.clock_offset.unwrap_or_else(|| default_clock_offset(t));
            let art = qca_to_matinv_with_offset(&circuit, offset)?;
            let mut d = json!({ "gates": t, "clock_offset": offset, "kappa_bound_2t": 2.0 * t as f64 });
            if args.verify {
                let Thresholds::MatInv { s, t: col, .. } = art.thresholds else { unreachable!("qca thresholds") };
                let entry = classical_inverse_entry(&art.matrix, s, col)?;
                let formula = qca_entry_formula(&circuit, offset)?;
                let u = CycleUnitary::new(&circuit)?.to_dense();
                let cycle = u.pow(3 * t as u64).max_abs_diff(&DenseMatrix::identity(u.dim()));
                let kappa = condition_number(&decompose(&art.matrix)?);
                let entry_err = (entry - formula).norm();
                d["entry"] = json!(entry.norm());
                d["formula"] = json!(formula.norm());
                d["entry_error"] = json!(entry_err);
                d["cycle_error"] = json!(cycle);
                d["kappa"] = json!(kappa);
                d["kappa_le_2t"] = json!(kappa <= 2.0 * t as f64);
                d["kappa_exact_bound"] = json!(qca_kappa_bound(t));
                report.pass =
                    entry_err <= criteria::QCA_TOL && cycle <= criteria::QCA_TOL && kappa <= 2.0 * t as f64;
                report.estimate = Some(entry.norm());
                report.classical_oracle = Some(json!({ "formula": formula.norm() }));
                report.tolerance = Some(criteria::QCA_TOL);
            }
            (art, d)
        }
        ReductionKind::Clock => {
            let v = io::read_json::<VerifierFile>(input)?.to_verifier()?;
            let clock = circuit_to_clock(&v)?;
            let mut d = json!({
                "gates": clock.gates, "qubits": clock.qubits, "a": clock.a, "b": clock.b,
                "max_row_nnz": clock.h.d_max(),
            });
            if args.verify {
                let (ff, lmin) = frustration_free_check(&clock.h)?;
                let side = if lmin <= clock.a + criteria::FRUSTRATION_TOL {
                    "yes"
                } else if lmin >= clock.b {
                    "no"
                } else {
                    "between"
                };
                d["lambda_min"] = json!(lmin);
                d["frustration_free"] = json!(ff);
                d["side"] = json!(side);
                report.estimate = Some(lmin);
                report.decision = Some(side == "yes");
                report.pass = side != "between" && clock.h.d_max() <= criteria::CLOCK_ROW_NNZ;
            }
            (clock.artifact(), d)
        }
        ReductionKind::Walk => {
            let file: InstanceFile = io::read_json(input)?;
            let h: SparseRowMatrix = file.matrix.to_matrix()?;
            let x = args.x.unwrap_or(if h.hmax() > 0.0 { h.hmax() } else { 1.0 });
            let walk = childs_walk(&h, x)?;
            let mut d = json!({ "x": x, "d": walk.d(), "dim": walk.dim() });
            if args.verify {
                let u = walk.materialize()?;
                let defect = u.adjoint().mul(&u).max_abs_diff(&DenseMatrix::identity(u.dim()));
                let blocks = walk.invariant_blocks()?;
                let err = blocks.iter().map(|b| b.phase_error()).fold(0.0, f64::max);
                let leak = blocks.iter().map(|b| b.leakage).fold(0.0, f64::max);
                d["phase_error"] = json!(err);
                d["leakage"] = json!(leak);
                d["unitarity_defect"] = json!(defect);
                d["phases"] = json!(blocks.iter().map(|b| json!({ "lambda": b.lambda, "expected": b.expected, "phases": b.phases })).collect::<Vec<_>>());
                report.estimate = Some(err);
                report.tolerance = Some(criteria::WALK_PHASE_TOL);
                report.pass = err <= criteria::WALK_PHASE_TOL
                    && leak <= criteria::WALK_PHASE_TOL
                    && defect <= criteria::WALK_UNITARY_TOL;
            }
            (walk.artifact(), d)
        }
    };
    write_artifact(&art, args.out.as_deref())?;
    report.details = details;
    report.details["provenance"] = json!(art.provenance);
    report.timing = start.elapsed();
    let code = if report.pass { EXIT_YES } else { EXIT_NO };
    Ok((report, code))
}

fn write_artifact(art: &ReductionArtifact, out: Option<&Path>) -> Result<(), CmdError> {
    if let Some(path) = out {
        io::write_json(path, &artifact_file(art))?;
    }
    Ok(())
}
