use alloc::vec;
use alloc::vec::Vec;

use super::{inner, norm, DenseMatrix, SparseRowMatrix, C64, ZERO};
use crate::error::{Error, Result};
use crate::tolerances;

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    /// `eigenvectors[i]` belongs to `eigenvalues[i]`.
    pub eigenvectors: Vec<Vec<C64>>,
}

/// Anything the dense solver can ingest.
pub trait HermitianInput {
    fn dense(&self) -> DenseMatrix;
    fn input_dim(&self) -> usize;
}

impl HermitianInput for DenseMatrix {
    fn dense(&self) -> DenseMatrix {
        self.clone()
    }
    fn input_dim(&self) -> usize {
        self.dim()
    }
}

impl HermitianInput for SparseRowMatrix {
    fn dense(&self) -> DenseMatrix {
        self.to_dense()
    }
    fn input_dim(&self) -> usize {
        self.dim()
    }
}

pub fn decompose<M: HermitianInput + ?Sized>(h: &M) -> Result<SpectralDecomposition> {
    decompose_with_cap(h, tolerances::dense_cap())
}

pub fn decompose_with_cap<M: HermitianInput + ?Sized>(h: &M, cap: usize) -> Result<SpectralDecomposition> {
    let dim = h.input_dim();
    if dim > cap {
        return Err(Error::Capacity { dim, cap });
    }
    let m = h.dense();
    if !m.is_finite() {
        return Err(Error::Validation("matrix has non-finite entries".into()));
    }
    let scale = m.max_abs().max(1.0);
    if m.hermiticity_defect() > tolerances::EXACT * scale {
        return Err(Error::Validation("matrix is not Hermitian".into()));
    }
    Ok(hermitian_eigen(&m))
}

fn hermitian_eigen(m: &DenseMatrix) -> SpectralDecomposition {
    let n = m.dim();
    if n == 0 {
        return SpectralDecomposition { eigenvalues: Vec::new(), eigenvectors: Vec::new() };
    }
    // Symmetrize so the solver sees an exactly Hermitian input.
    let sym = DenseMatrix::from_fn(n, |i, j| {
        if i == j {
            C64::new(m[(i, i)].re, 0.0)
        } else {
            (m[(i, j)] + m[(j, i)].conj()) * 0.5
        }
    });
    let eig = sym.to_nalgebra().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let eigenvectors = order
        .iter()
        .map(|&k| eig.eigenvectors.column(k).iter().copied().collect())
        .collect();
    SpectralDecomposition { eigenvalues, eigenvectors }
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// Spectral norm max |lambda|.
    pub fn norm(&self) -> f64 {
        self.min().abs().max(self.max().abs())
    }

    /// Coefficients <v_i|x> in the eigenbasis.
    pub fn coefficients(&self, x: &[C64]) -> Vec<C64> {
        self.eigenvectors.iter().map(|v| inner(v, x)).collect()
    }

    /// sum_i f(lambda_i) v_i <v_i|x>
    pub fn apply_function(&self, x: &[C64], f: impl Fn(f64) -> C64) -> Vec<C64> {
        let mut out = vec![ZERO; x.len()];
        for (lam, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            let w = f(*lam) * inner(v, x);
            if w == ZERO {
                continue;
            }
            for (o, vi) in out.iter_mut().zip(v) {
                *o += w * vi;
            }
        }
        out
    }

    /// sum_i lambda_i v_i v_i^dagger
    pub fn reconstruct(&self) -> DenseMatrix {
        let n = self.dim();
        let mut m = DenseMatrix::zeros(n);
        for (lam, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            for i in 0..n {
                let a = v[i] * *lam;
                for j in 0..n {
                    m[(i, j)] += a * v[j].conj();
                }
            }
        }
        m
    }

    /// Largest ||H v_i - lambda_i v_i|| over all pairs.
    pub fn max_residual(&self, h: &DenseMatrix) -> f64 {
        self.eigenvalues
            .iter()
            .zip(&self.eigenvectors)
            .map(|(lam, v)| {
                let hv = h.mul_vec(v);
                let r: Vec<C64> = hv.iter().zip(v).map(|(a, b)| a - b * *lam).collect();
                norm(&r)
            })
            .fold(0.0, f64::max)
    }

    /// Largest |<v_i|v_j> - delta_ij|.
    pub fn orthonormality_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                let g = inner(&self.eigenvectors[i], &self.eigenvectors[j]);
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g - target).norm());
            }
        }
        worst
    }

    /// Clamps eigenvalues in [-PSD_CLAMP * ||H||, 0) to zero and returns how
    /// many were clamped. Fails if anything lies further below zero.
    pub fn clamp_psd(&mut self) -> Result<usize> {
        let tol = tolerances::PSD_CLAMP * self.norm().max(f64::MIN_POSITIVE);
        let mut clamped = 0;
        for lam in self.eigenvalues.iter_mut() {
            if *lam < 0.0 {
                if *lam >= -tol {
                    *lam = 0.0;
                    clamped += 1;
                } else {
                    return Err(Error::NotPsd { min: *lam });
                }
            }
        }
        Ok(clamped)
    }
}

/// (H^-1)(s,t) computed as sum_i lambda_i^-1 v_i(s) conj(v_i(t)).
///
/// Indefinite but nonsingular matrices are accepted as well; only
/// |lambda| below SINGULAR * ||H|| is rejected.
pub fn classical_inverse_entry(h: &SparseRowMatrix, s: usize, t: usize) -> Result<C64> {
    let d = decompose(h)?;
    inverse_entry_from(&d, s, t)
}

pub(crate) fn inverse_entry_from(d: &SpectralDecomposition, s: usize, t: usize) -> Result<C64> {
    let n = d.dim();
    if s >= n || t >= n {
        return Err(Error::InvalidParameter(alloc::format!("index out of range for dim {n}")));
    }
    let min_abs = d.eigenvalues.iter().map(|l| l.abs()).fold(f64::INFINITY, f64::min);
    if min_abs < tolerances::SINGULAR * d.norm().max(f64::MIN_POSITIVE) || min_abs == 0.0 {
        return Err(Error::Singular { min_abs });
    }
    Ok(d
        .eigenvalues
        .iter()
        .zip(&d.eigenvectors)
        .map(|(lam, v)| v[s] * v[t].conj() / *lam)
        .sum())
}

/// Exact condition number of a PSD matrix, reported next to the a-priori
/// norm bound d_max * hmax.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConditionBound {
    pub kappa: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub gershgorin_norm: f64,
}

pub fn condition_bound(h: &SparseRowMatrix) -> Result<ConditionBound> {
    let mut d = decompose(h)?;
    d.clamp_psd()?;
    let (lo, hi) = (d.min(), d.max());
    if lo <= 0.0 {
        return Err(Error::NotPsd { min: lo });
    }
    Ok(ConditionBound { kappa: hi / lo, lambda_min: lo, lambda_max: hi, gershgorin_norm: h.gershgorin_bound() })
}

/// max |lambda| / min |lambda| for any nonsingular Hermitian matrix.
pub fn condition_number(d: &SpectralDecomposition) -> f64 {
    let lo = d.eigenvalues.iter().map(|l| l.abs()).fold(f64::INFINITY, f64::min);
    d.norm() / lo
}

/// Eigen-decomposition of a unitary matrix: phases in (-pi, pi] and an
/// orthonormal eigenbasis.
#[derive(Clone, Debug)]
pub struct UnitaryEigen {
    pub phases: Vec<f64>,
    pub vectors: Vec<Vec<C64>>,
}

// Mixing weights for the Hermitian pencil (U + U^dag)/2 + g (U - U^dag)/2i.
// Irrational and distinct so accidental collisions of cos + g sin between
// different phases are not aligned with symmetric phase pairs.
const MIX: [f64; 3] = [0.414_213_562_373_095_1, -1.732_050_807_568_877_2, 0.302_775_637_731_994_6];

/// Diagonalizes a unitary through Hermitian pencils, splitting clusters of
/// nearly equal pencil eigenvalues with a second weight.
pub fn unitary_eigen(u: &DenseMatrix) -> Result<UnitaryEigen> {
    let dim = u.dim();
    if dim > tolerances::dense_cap() {
        return Err(Error::Capacity { dim, cap: tolerances::dense_cap() });
    }
    let dev = u.unitarity_defect();
    if dev > 1e-8 {
        return Err(Error::NonUnitary { deviation: dev });
    }
    let mut phases = Vec::with_capacity(dim);
    let mut vectors = Vec::with_capacity(dim);
    if dim > 0 {
        split(u, None, u.clone(), 0, &mut phases, &mut vectors);
    }
    Ok(UnitaryEigen { phases, vectors })
}

/// Diagonalizes the restriction `b` of `u` to span(basis); `None` stands for
/// the standard basis.
fn split(
    u: &DenseMatrix,
    basis: Option<&[Vec<C64>]>,
    b: DenseMatrix,
    depth: usize,
    phases: &mut Vec<f64>,
    vectors: &mut Vec<Vec<C64>>,
) {
    let k = b.dim();
    let n = u.dim();
    let lift = |w: &Vec<C64>| -> Vec<C64> {
        match basis {
            None => w.clone(),
            Some(basis) => {
                let mut out = vec![ZERO; n];
                for (c, v) in w.iter().zip(basis) {
                    for (o, x) in out.iter_mut().zip(v) {
                        *o += c * x;
                    }
                }
                out
            }
        }
    };
    let scalar = b.max_abs_diff(&DenseMatrix::identity(k).scale(b[(0, 0)]));
    if k == 1 || scalar < 1e-12 || depth == MIX.len() {
        for i in 0..k {
            let mut e = vec![ZERO; k];
            e[i] = C64::new(1.0, 0.0);
            let v = lift(&e);
            let uv = u.mul_vec(&v);
            phases.push(inner(&v, &uv).arg());
            vectors.push(v);
        }
        return;
    }
    let g = MIX[depth];
    let herm = DenseMatrix::from_fn(k, |i, j| {
        let p = b[(i, j)];
        let q = b[(j, i)].conj();
        (p + q) * 0.5 + (p - q) * C64::new(0.0, -0.5 * g)
    });
    let eig = hermitian_eigen(&herm);
    let gap = 1e-7;
    let mut start = 0;
    while start < k {
        let mut end = start + 1;
        while end < k && eig.eigenvalues[end] - eig.eigenvalues[end - 1] < gap {
            end += 1;
        }
        let cluster: Vec<Vec<C64>> = eig.eigenvectors[start..end].iter().map(lift).collect();
        if cluster.len() == 1 {
            let uv = u.mul_vec(&cluster[0]);
            phases.push(inner(&cluster[0], &uv).arg());
            vectors.push(cluster.into_iter().next().unwrap());
        } else {
            let uc: Vec<Vec<C64>> = cluster.iter().map(|v| u.mul_vec(v)).collect();
            let bc = DenseMatrix::from_fn(cluster.len(), |i, j| inner(&cluster[i], &uc[j]));
            split(u, Some(&cluster), bc, depth + 1, phases, vectors);
        }
        start = end;
    }
}

impl UnitaryEigen {
    /// Largest ||U v - e^{i phi} v||.
    pub fn max_residual(&self, u: &DenseMatrix) -> f64 {
        self.phases
            .iter()
            .zip(&self.vectors)
            .map(|(p, v)| {
                let uv = u.mul_vec(v);
                let e = super::cis(*p);
                let r: Vec<C64> = uv.iter().zip(v).map(|(a, b)| a - b * e).collect();
                norm(&r)
            })
            .fold(0.0, f64::max)
    }
}
