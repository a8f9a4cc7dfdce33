use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // inherent f64 methods shadow it when std is linked
use num_traits::Float;

use super::{digest, ArtifactMeta, ReductionArtifact, ReductionKind, Thresholds};
use crate::circuit::UnitaryOp;
use crate::error::{Error, Result};
use crate::numerics::{decompose, inner, norm, unitary_eigen, wrap_angle, DenseMatrix, SparseRowMatrix, C64, ZERO};
use crate::tolerances;

/// Quantum walk U = i S (2 T T^dag - I) on (C^N (x) C^2) (x) (C^N (x) C^2).
/// Register one is (j, b) with index j + N b, register two likewise, and
/// the full index is r1 + 2N r2. T maps |j, b>|0> to |j, b>|phi_jb>.
///
/// On span{T|v,0>, S T|v,0>} for an eigenvector v of H with eigenvalue
/// lambda, U has eigenvalues e^{i l} and -e^{-i l}, l = arcsin(lambda/(X d)).
#[derive(Clone, Debug)]
pub struct WalkUnitary {
    h: SparseRowMatrix,
    x: f64,
    d: usize,
    n: usize,
    /// phi_{j0} over the second register, sparse.
    phi: Vec<Vec<(usize, C64)>>,
}

pub fn childs_walk(h: &SparseRowMatrix, x: f64) -> Result<WalkUnitary> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::InvalidParameter(alloc::format!("X = {x} must be positive")));
    }
    if h.hmax() > x {
        return Err(Error::InvalidParameter(alloc::format!("X = {x} below max entry {}", h.hmax())));
    }
    let n = h.dim();
    let d = h.d_max().max(1).next_power_of_two();
    let mut phi = Vec::with_capacity(n);
    let scale = 1.0 / (d as f64).sqrt();
    for j in 0..n {
        let row = h.row_entries(j);
        let mut support: Vec<usize> = row.iter().map(|(l, _)| *l).collect();
        // pad F_j with zero entries up to d indices
        let mut fill = 0;
        while support.len() < d {
            if !support.contains(&fill) {
                support.push(fill);
            }
            fill += 1;
        }
        support.sort_unstable();
        let mut amps = Vec::with_capacity(2 * d);
        for &l in &support {
            let z = h.entry(j, l);
            if l == j && z.re < 0.0 {
                return Err(Error::InvalidInstance(alloc::format!(
                    "negative diagonal entry H({j},{j}) = {} has no walk encoding",
                    z.re
                )));
            }
            let mag = z.norm() / x;
            // branch chosen per ordered pair so that a(l, j) conj(a(j, l)) = H_jl / X
            let theta = if l == j {
                0.0
            } else if j < l {
                -z.arg() / 2.0
            } else {
                h.entry(l, j).arg() / 2.0
            };
            amps.push((l, C64::from_polar(mag.sqrt() * scale, theta)));
            amps.push((l + n, C64::new((1.0 - mag).max(0.0).sqrt() * scale, 0.0)));
        }
        amps.sort_by_key(|(i, _)| *i);
        phi.push(amps);
    }
    Ok(WalkUnitary { h: h.clone(), x, d, n, phi })
}

/// Eigenphases of the walk on the invariant plane of one eigenvalue of H.
#[derive(Clone, Debug)]
pub struct WalkBlock {
    pub lambda: f64,
    /// arcsin(lambda / (X d))
    pub expected: f64,
    pub phases: Vec<f64>,
    /// Largest component of U e outside the plane, over the plane's basis.
    pub leakage: f64,
}

impl WalkBlock {
    /// Largest circular distance from a computed phase to the nearer of
    /// l and pi - l.
    pub fn phase_error(&self) -> f64 {
        let targets = [self.expected, wrap_angle(PI - self.expected)];
        self.phases
            .iter()
            .map(|p| targets.iter().map(|t| wrap_angle(p - t).abs()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    }
}

impl WalkUnitary {
    pub fn x(&self) -> f64 {
        self.x
    }

    /// Padded sparsity.
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn hamiltonian(&self) -> &SparseRowMatrix {
        &self.h
    }

    /// H with (X, d) in the metadata; the walk itself is rebuilt on load.
    pub fn artifact(&self) -> ReductionArtifact {
        let mut bytes = self.h.canonical_bytes();
        bytes.extend_from_slice(&self.x.to_bits().to_le_bytes());
        ReductionArtifact {
            matrix: self.h.clone(),
            kind: ReductionKind::Walk,
            thresholds: Thresholds::None,
            provenance: digest(&bytes),
            meta: ArtifactMeta { walk: Some((self.x, self.d)), ..ArtifactMeta::default() },
        }
    }

    /// phi_{r1} for a register-one index r1 = j + N b.
    fn state(&self, r1: usize) -> Vec<(usize, C64)> {
        if r1 < self.n {
            self.phi[r1].clone()
        } else {
            vec![(self.n, C64::new(1.0, 0.0))]
        }
    }

    pub fn phi(&self, j: usize) -> &[(usize, C64)] {
        &self.phi[j]
    }

    fn reflect(&self, v: &mut [C64]) {
        let w = 2 * self.n;
        for r1 in 0..w {
            let phi = self.state(r1);
            let ov: C64 = phi.iter().map(|(r2, a)| a.conj() * v[r1 + w * r2]).sum();
            for r2 in 0..w {
                v[r1 + w * r2] = -v[r1 + w * r2];
            }
            for (r2, a) in phi {
                v[r1 + w * r2] += a * ov * 2.0;
            }
        }
    }

    fn swap(&self, v: &mut [C64]) {
        let w = 2 * self.n;
        for r1 in 0..w {
            for r2 in r1 + 1..w {
                v.swap(r1 + w * r2, r2 + w * r1);
            }
        }
    }

    /// T |v, 0>: data vector v on register one with b = 0.
    pub fn isometry(&self, v: &[C64]) -> Vec<C64> {
        let w = 2 * self.n;
        let mut out = vec![ZERO; w * w];
        for (j, vj) in v.iter().enumerate() {
            for &(r2, a) in &self.phi[j] {
                out[j + w * r2] += vj * a;
            }
        }
        out
    }

    pub fn swapped(&self, v: &[C64]) -> Vec<C64> {
        let mut s = v.to_vec();
        self.swap(&mut s);
        s
    }

    pub fn materialize(&self) -> Result<DenseMatrix> {
        let dim = self.dim();
        if dim > tolerances::dense_cap() {
            return Err(Error::Capacity { dim, cap: tolerances::dense_cap() });
        }
        Ok(self.to_dense())
    }

    /// Per-eigenvalue restriction of U to span{T|v,0>, S T|v,0>}.
    pub fn invariant_blocks(&self) -> Result<Vec<WalkBlock>> {
        let spec = decompose(&self.h)?;
        let xd = self.x * self.d as f64;
        let mut blocks = Vec::with_capacity(spec.dim());
        for (lambda, v) in spec.eigenvalues.iter().zip(&spec.eigenvectors) {
            let psi = self.isometry(v);
            let basis = orthonormalize(&[psi.clone(), self.swapped(&psi)]);
            let (m, leakage) = self.restrict(&basis);
            let phases = match m.len() {
                1 => vec![m[0][0].arg()],
                _ => {
                    let tr = m[0][0] + m[1][1];
                    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
                    let disc = (tr * tr - det * 4.0).sqrt();
                    vec![((tr + disc) * 0.5).arg(), ((tr - disc) * 0.5).arg()]
                }
            };
            blocks.push(WalkBlock { lambda: *lambda, expected: (lambda / xd).clamp(-1.0, 1.0).asin(), phases, leakage });
        }
        Ok(blocks)
    }

    /// Spectrum of U on the span of T|j,0> and S T|j,0> over all j, from a
    /// dense eigensolve of the restricted matrix; also returns the leakage.
    pub fn data_subspace_phases(&self) -> Result<(Vec<f64>, f64)> {
        let mut gens = Vec::with_capacity(2 * self.n);
        for j in 0..self.n {
            let mut e = vec![ZERO; self.n];
            e[j] = C64::new(1.0, 0.0);
            let t = self.isometry(&e);
            gens.push(self.swapped(&t));
            gens.push(t);
        }
        let basis = orthonormalize(&gens);
        let (m, leakage) = self.restrict(&basis);
        let k = basis.len();
        let dense = DenseMatrix::from_fn(k, |i, j| m[i][j]);
        Ok((unitary_eigen(&dense)?.phases, leakage))
    }

    fn restrict(&self, basis: &[Vec<C64>]) -> (Vec<Vec<C64>>, f64) {
        let k = basis.len();
        let mut m = vec![vec![ZERO; k]; k];
        let mut leakage: f64 = 0.0;
        for j in 0..k {
            let mut u = basis[j].clone();
            self.apply(&mut u);
            let mut rest = u.clone();
            for i in 0..k {
                m[i][j] = inner(&basis[i], &u);
                for (r, b) in rest.iter_mut().zip(&basis[i]) {
                    *r -= m[i][j] * b;
                }
            }
            leakage = leakage.max(norm(&rest));
        }
        (m, leakage)
    }
}

/// Modified Gram-Schmidt with one re-orthogonalization pass, dropping
/// vectors that are dependent to 1e-10.
fn orthonormalize(vectors: &[Vec<C64>]) -> Vec<Vec<C64>> {
    let mut basis: Vec<Vec<C64>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        let n0 = norm(&w);
        for _ in 0..2 {
            for b in &basis {
                let c = inner(b, &w);
                for (x, y) in w.iter_mut().zip(b) {
                    *x -= c * y;
                }
            }
        }
        let n = norm(&w);
        if n > 1e-10 * n0.max(1.0) {
            basis.push(w.into_iter().map(|x| x / n).collect());
        }
    }
    basis
}

impl UnitaryOp for WalkUnitary {
    fn dim(&self) -> usize {
        4 * self.n * self.n
    }

    fn apply(&self, v: &mut [C64]) {
        self.reflect(v);
        self.swap(v);
        for x in v.iter_mut() {
            *x *= C64::new(0.0, 1.0);
        }
    }

    fn apply_adjoint(&self, v: &mut [C64]) {
        self.swap(v);
        self.reflect(v);
        for x in v.iter_mut() {
            *x *= C64::new(0.0, -1.0);
        }
    }
}
