use alloc::boxed::Box;
use alloc::vec::Vec;
#[allow(unused_imports)] // inherent f64 methods shadow it when std is linked
use num_traits::Float;

use crate::circuit::{OpHandle, UnitaryOp};
use crate::error::{Error, Result};
use crate::numerics::{inner, norm_sqr, C64, ZERO};

/// Orthogonal projector given by structure rather than by matrix.
#[derive(Clone, Debug)]
pub enum Projector {
    /// Basis states whose bits under `mask` equal `value`.
    Pattern { dim: usize, mask: usize, value: usize },
    /// |state><state| on the low `state.len()` indices tensored with a
    /// basis-bit pattern on the high part of the index. `high_mask` is
    /// applied to index / state.len().
    StateTimesPattern { dim: usize, state: Vec<C64>, high_mask: usize, high_value: usize },
    /// U^dag P U.
    Conjugated { inner: Box<Projector>, op: OpHandle },
    /// Span of an orthonormal list.
    Subspace { dim: usize, basis: Vec<Vec<C64>> },
}

impl Projector {
    pub fn pattern(dim: usize, mask: usize, value: usize) -> Self {
        Projector::Pattern { dim, mask, value: value & mask }
    }

    pub fn rank_one(state: Vec<C64>) -> Self {
        Projector::Subspace { dim: state.len(), basis: alloc::vec![state] }
    }

    /// Orthonormalizes `vectors` (dropping dependent ones) and projects onto
    /// their span.
    pub fn subspace(dim: usize, vectors: &[Vec<C64>]) -> Result<Self> {
        let mut basis: Vec<Vec<C64>> = Vec::new();
        for v in vectors {
            if v.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: v.len() });
            }
            let mut w = v.clone();
            for _ in 0..2 {
                for q in &basis {
                    let p = inner(q, &w);
                    for (x, y) in w.iter_mut().zip(q) {
                        *x -= p * y;
                    }
                }
            }
            if crate::numerics::normalize(&mut w) > 1e-10 {
                basis.push(w);
            }
        }
        Ok(Projector::Subspace { dim, basis })
    }

    pub fn state_times_pattern(dim: usize, state: Vec<C64>, high_mask: usize, high_value: usize) -> Result<Self> {
        let low = state.len();
        if low == 0 || !dim.is_multiple_of(low) {
            return Err(Error::DimensionMismatch { expected: dim, got: low });
        }
        Ok(Projector::StateTimesPattern { dim, state, high_mask, high_value: high_value & high_mask })
    }

    pub fn conjugated(inner: Projector, op: OpHandle) -> Result<Self> {
        if inner.dim() != op.dim() {
            return Err(Error::DimensionMismatch { expected: inner.dim(), got: op.dim() });
        }
        Ok(Projector::Conjugated { inner: Box::new(inner), op })
    }

    pub fn dim(&self) -> usize {
        match self {
            Projector::Pattern { dim, .. }
            | Projector::StateTimesPattern { dim, .. }
            | Projector::Subspace { dim, .. } => *dim,
            Projector::Conjugated { inner, .. } => inner.dim(),
        }
    }

    /// v <- P v
    pub fn project(&self, v: &mut [C64]) {
        match self {
            Projector::Pattern { mask, value, .. } => {
                for (i, x) in v.iter_mut().enumerate() {
                    if i & mask != *value {
                        *x = ZERO;
                    }
                }
            }
            Projector::StateTimesPattern { state, high_mask, high_value, .. } => {
                let low = state.len();
                for (h, chunk) in v.chunks_mut(low).enumerate() {
                    if h & high_mask != *high_value {
                        chunk.iter_mut().for_each(|x| *x = ZERO);
                    } else {
                        let a = inner(state, chunk);
                        for (x, s) in chunk.iter_mut().zip(state) {
                            *x = s * a;
                        }
                    }
                }
            }
            Projector::Conjugated { inner, op } => {
                op.apply(v);
                inner.project(v);
                op.apply_adjoint(v);
            }
            Projector::Subspace { basis, .. } => {
                let coeffs: Vec<C64> = basis.iter().map(|b| inner(b, v)).collect();
                v.iter_mut().for_each(|x| *x = ZERO);
                for (c, b) in coeffs.iter().zip(basis) {
                    for (x, y) in v.iter_mut().zip(b) {
                        *x += c * y;
                    }
                }
            }
        }
    }

    /// <v|P|v> = ||P v||^2
    pub fn expectation(&self, v: &[C64]) -> f64 {
        let mut w = v.to_vec();
        self.project(&mut w);
        norm_sqr(&w)
    }
}

/// R = 2P - I.
#[derive(Clone, Debug)]
pub struct Reflection {
    pub projector: Projector,
}

impl Reflection {
    pub fn new(projector: Projector) -> Self {
        Self { projector }
    }
}

impl UnitaryOp for Reflection {
    fn dim(&self) -> usize {
        self.projector.dim()
    }

    fn apply(&self, v: &mut [C64]) {
        let mut p = v.to_vec();
        self.projector.project(&mut p);
        for (x, y) in v.iter_mut().zip(&p) {
            *x = y * 2.0 - *x;
        }
    }

    fn apply_adjoint(&self, v: &mut [C64]) {
        self.apply(v)
    }
}

/// R = -(I - 2 Pi_1)(I - 2 Pi_0).
#[derive(Clone, Debug)]
pub struct GroverRotation {
    pub pi0: Projector,
    pub pi1: Projector,
}

pub fn grover_rotation(pi0: Projector, pi1: Projector) -> Result<GroverRotation> {
    if pi0.dim() != pi1.dim() {
        return Err(Error::DimensionMismatch { expected: pi0.dim(), got: pi1.dim() });
    }
    Ok(GroverRotation { pi0, pi1 })
}

fn reflect_away(p: &Projector, v: &mut [C64]) {
    // v <- (I - 2P) v
    let mut w = v.to_vec();
    p.project(&mut w);
    for (x, y) in v.iter_mut().zip(&w) {
        *x -= y * 2.0;
    }
}

impl GroverRotation {
    /// sin(theta) = ||Pi_1 v||, the half-angle of the rotation on the plane
    /// containing v.
    pub fn angle(&self, v: &[C64]) -> f64 {
        self.pi1.expectation(v).sqrt().min(1.0).asin()
    }

    /// psi_pm = (v +- i v_perp)/sqrt 2 where v_perp is the unit vector in the
    /// invariant plane orthogonal to v, oriented so Pi_1 v / ||Pi_1 v|| =
    /// sin(theta) v + cos(theta) v_perp. `v` must lie in the range of Pi_0.
    pub fn eigenvectors(&self, v: &[C64]) -> Option<(Vec<C64>, Vec<C64>)> {
        let mut w = v.to_vec();
        self.pi1.project(&mut w);
        let a = crate::numerics::normalize(&mut w);
        let cos_t = (1.0 - a * a).max(0.0).sqrt();
        if a < 1e-12 || cos_t < 1e-12 {
            return None;
        }
        let perp: Vec<C64> = w.iter().zip(v).map(|(wi, vi)| (wi - vi * a) / cos_t).collect();
        let s = core::f64::consts::FRAC_1_SQRT_2;
        let i = C64::new(0.0, 1.0);
        let plus = v.iter().zip(&perp).map(|(x, y)| (x + i * y) * s).collect();
        let minus = v.iter().zip(&perp).map(|(x, y)| (x - i * y) * s).collect();
        Some((plus, minus))
    }
}

impl UnitaryOp for GroverRotation {
    fn dim(&self) -> usize {
        self.pi0.dim()
    }

    fn apply(&self, v: &mut [C64]) {
        reflect_away(&self.pi0, v);
        reflect_away(&self.pi1, v);
        v.iter_mut().for_each(|x| *x = -*x);
    }

    fn apply_adjoint(&self, v: &mut [C64]) {
        reflect_away(&self.pi1, v);
        reflect_away(&self.pi0, v);
        v.iter_mut().for_each(|x| *x = -*x);
    }
}
