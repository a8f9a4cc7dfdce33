use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt::Debug;

use crate::error::{Error, Result};
use crate::numerics::{unitary_eigen, DenseMatrix, C64, ONE, ZERO};

/// Eigen-component of a state under a unitary: the projection of the state
/// onto one eigenvector, with its eigenphase in turns, in [0, 1).
#[derive(Clone, Debug)]
pub struct SpectralComponent {
    pub phase: f64,
    pub vector: Vec<C64>,
}

/// A unitary acting on a complex vector space of dimension `dim()`.
pub trait UnitaryOp: Send + Sync + Debug {
    fn dim(&self) -> usize;

    fn apply(&self, v: &mut [C64]);

    fn apply_adjoint(&self, v: &mut [C64]);

    fn to_dense(&self) -> DenseMatrix {
        let n = self.dim();
        let mut cols = Vec::with_capacity(n);
        for j in 0..n {
            let mut e = vec![ZERO; n];
            e[j] = ONE;
            self.apply(&mut e);
            cols.push(e);
        }
        DenseMatrix::from_columns(&cols)
    }

    /// Splits `state` into eigen-components. The default materializes the
    /// operator and diagonalizes it densely.
    fn spectral_components(&self, state: &[C64]) -> Result<Vec<SpectralComponent>> {
        if state.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: state.len() });
        }
        let eig = unitary_eigen(&self.to_dense())?;
        Ok(eig
            .phases
            .iter()
            .zip(&eig.vectors)
            .map(|(p, v)| {
                let amp = crate::numerics::inner(v, state);
                SpectralComponent { phase: turns(*p), vector: v.iter().map(|x| x * amp).collect() }
            })
            .collect())
    }

    /// Number of qubits when `dim()` is a power of two.
    fn qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }
}

/// Converts an angle in radians to turns in [0, 1).
pub fn turns(angle: f64) -> f64 {
    let t = angle / (2.0 * PI);
    let f = t - num_traits::Float::floor(t);
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

pub type OpHandle = Arc<dyn UnitaryOp>;

/// An explicit unitary matrix.
#[derive(Clone, Debug)]
pub struct DenseOp {
    matrix: DenseMatrix,
}

impl DenseOp {
    pub fn new(matrix: DenseMatrix) -> Result<Self> {
        let dev = matrix.unitarity_defect();
        if dev > 1e-9 {
            return Err(Error::NonUnitary { deviation: dev });
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }
}

impl UnitaryOp for DenseOp {
    fn dim(&self) -> usize {
        self.matrix.dim()
    }

    fn apply(&self, v: &mut [C64]) {
        let out = self.matrix.mul_vec(v);
        v.copy_from_slice(&out);
    }

    fn apply_adjoint(&self, v: &mut [C64]) {
        let n = self.matrix.dim();
        let mut out = vec![ZERO; n];
        for (i, &vi) in v.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.matrix.row(i)) {
                *o += a.conj() * vi;
            }
        }
        v.copy_from_slice(&out);
    }

    fn to_dense(&self) -> DenseMatrix {
        self.matrix.clone()
    }
}

/// The adjoint of another handle.
#[derive(Clone, Debug)]
pub struct AdjointOp(pub OpHandle);

impl UnitaryOp for AdjointOp {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn apply(&self, v: &mut [C64]) {
        self.0.apply_adjoint(v)
    }

    fn apply_adjoint(&self, v: &mut [C64]) {
        self.0.apply(v)
    }

    fn spectral_components(&self, state: &[C64]) -> Result<Vec<SpectralComponent>> {
        let mut comps = self.0.spectral_components(state)?;
        for c in comps.iter_mut() {
            c.phase = if c.phase == 0.0 { 0.0 } else { 1.0 - c.phase };
        }
        Ok(comps)
    }
}
