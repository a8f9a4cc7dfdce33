use alloc::sync::Arc;
use alloc::vec::Vec;
#[allow(unused_imports)] // inherent f64 methods shadow it when std is linked
use num_traits::Float;

use crate::circuit::{SpectralComponent, StateVector, UnitaryOp};
use crate::error::{Error, Result};
use crate::numerics::random::{random_unitary, seeded};
use crate::numerics::{cis, decompose, inner, DenseMatrix, SparseRowMatrix, SpectralDecomposition, C64, ZERO};

/// exp(-iHt), optionally followed by a seeded error term.
///
/// With `epsilon > 0` the operator is exp(-iHt) exp(-iE) where E is a random
/// Hermitian matrix whose eigenvalues lie in [-eta, eta], the extreme one
/// attained, and eta = 2 arcsin(epsilon/2). Then ||exp(-iE) - I|| = epsilon
/// exactly, so the operator-norm deviation from exact evolution is epsilon.
#[derive(Clone, Debug)]
pub struct EvolutionOperator {
    h: SparseRowMatrix,
    spec: Arc<SpectralDecomposition>,
    t: f64,
    epsilon: f64,
    perturbation: Option<Perturbation>,
}

#[derive(Clone, Debug)]
struct Perturbation {
    basis: DenseMatrix,
    angles: Vec<f64>,
}

impl EvolutionOperator {
    pub fn exact(h: &SparseRowMatrix, t: f64) -> Result<Self> {
        let spec = Arc::new(decompose(h)?);
        Self::from_parts(h.clone(), spec, t, 0.0, 0)
    }

    pub fn with_error(h: &SparseRowMatrix, t: f64, epsilon: f64, seed: u64) -> Result<Self> {
        let spec = Arc::new(decompose(h)?);
        Self::from_parts(h.clone(), spec, t, epsilon, seed)
    }

    /// Reuses an existing decomposition of `h`.
    pub fn from_parts(
        h: SparseRowMatrix,
        spec: Arc<SpectralDecomposition>,
        t: f64,
        epsilon: f64,
        seed: u64,
    ) -> Result<Self> {
        if !t.is_finite() {
            return Err(Error::InvalidParameter("evolution time is not finite".into()));
        }
        if !(0.0..=2.0).contains(&epsilon) {
            return Err(Error::InvalidParameter(alloc::format!("epsilon {epsilon} outside [0, 2]")));
        }
        if spec.dim() != h.dim() {
            return Err(Error::DimensionMismatch { expected: h.dim(), got: spec.dim() });
        }
        let perturbation = (epsilon > 0.0).then(|| {
            let mut rng = seeded(seed);
            let n = h.dim();
            let eta = 2.0 * (epsilon / 2.0).asin();
            let mut angles: Vec<f64> = (0..n).map(|_| rand::Rng::random_range(&mut rng, -eta..=eta)).collect();
            angles[0] = if rand::Rng::random::<bool>(&mut rng) { eta } else { -eta };
            Perturbation { basis: random_unitary(n, &mut rng), angles }
        });
        Ok(Self { h, spec, t, epsilon, perturbation })
    }

    pub fn hamiltonian(&self) -> &SparseRowMatrix {
        &self.h
    }

    pub fn decomposition(&self) -> &SpectralDecomposition {
        &self.spec
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    fn perturb(&self, v: &mut [C64], sign: f64) {
        if let Some(p) = &self.perturbation {
            let n = v.len();
            let coeffs: Vec<C64> = (0..n)
                .map(|k| {
                    let c: C64 = (0..n).map(|i| p.basis[(i, k)].conj() * v[i]).sum();
                    c * cis(-sign * p.angles[k])
                })
                .collect();
            for (i, x) in v.iter_mut().enumerate() {
                *x = (0..n).map(|k| p.basis[(i, k)] * coeffs[k]).sum();
            }
        }
    }

    fn exact_part(&self, v: &mut [C64], sign: f64) {
        let t = self.t;
        let out = self.spec.apply_function(v, |lam| cis(-sign * lam * t));
        v.copy_from_slice(&out);
    }
}

impl UnitaryOp for EvolutionOperator {
    fn dim(&self) -> usize {
        self.h.dim()
    }

    fn apply(&self, v: &mut [C64]) {
        self.perturb(v, 1.0);
        self.exact_part(v, 1.0);
    }

    fn apply_adjoint(&self, v: &mut [C64]) {
        self.exact_part(v, -1.0);
        self.perturb(v, -1.0);
    }

    fn spectral_components(&self, state: &[C64]) -> Result<Vec<SpectralComponent>> {
        if state.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: state.len() });
        }
        if self.perturbation.is_some() {
            let eig = crate::numerics::unitary_eigen(&self.to_dense())?;
            return Ok(eig
                .phases
                .iter()
                .zip(&eig.vectors)
                .map(|(p, v)| {
                    let a = inner(v, state);
                    SpectralComponent { phase: crate::circuit::turns(*p), vector: v.iter().map(|x| x * a).collect() }
                })
                .collect());
        }
        Ok(self
            .spec
            .eigenvalues
            .iter()
            .zip(&self.spec.eigenvectors)
            .filter_map(|(lam, v)| {
                let a = inner(v, state);
                (a != ZERO).then(|| SpectralComponent {
                    phase: crate::circuit::turns(-lam * self.t),
                    vector: v.iter().map(|x| x * a).collect(),
                })
            })
            .collect())
    }
}

/// Applies the evolution operator to a state.
pub fn evolve(op: &EvolutionOperator, state: &StateVector) -> Result<StateVector> {
    if state.dim() != op.dim() {
        return Err(Error::DimensionMismatch { expected: op.dim(), got: state.dim() });
    }
    let mut out = state.clone();
    op.apply(out.amplitudes_mut());
    Ok(out)
}
