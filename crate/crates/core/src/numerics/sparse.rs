use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::{is_power_of_two, DenseMatrix, C64, ZERO};
use crate::error::{Error, Result};
use crate::tolerances;

/// Row access to a sparse matrix: given a row index, the positions and
/// values of its nonzero entries.
pub trait RowOracle {
    fn dim(&self) -> usize;
    fn row(&self, i: usize) -> Vec<(usize, C64)>;
}

/// Hermitian matrix stored by rows, both triangles present.
///
/// `dim` is a power of two. Rows are sorted by column and carry no explicit
/// zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseRowMatrix {
    dim: usize,
    rows: Vec<Vec<(usize, C64)>>,
    d_max: usize,
    hmax: f64,
}

impl SparseRowMatrix {
    pub fn zero(dim: usize) -> Result<Self> {
        Self::from_rows(dim, vec![Vec::new(); dim])
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::from_rows(dim, (0..dim).map(|i| vec![(i, C64::new(1.0, 0.0))]).collect())
    }

    pub fn diagonal(d: &[f64]) -> Result<Self> {
        Self::from_rows(
            d.len(),
            d.iter()
                .enumerate()
                .map(|(i, &x)| if x == 0.0 { Vec::new() } else { vec![(i, C64::new(x, 0.0))] })
                .collect(),
        )
    }

    /// Builds from upper-triangle entries `(i, j, value)` with `i <= j`,
    /// mirroring each off-diagonal entry. Repeated positions are summed.
    pub fn from_upper(dim: usize, entries: &[(usize, usize, C64)]) -> Result<Self> {
        let mut acc: BTreeMap<(usize, usize), C64> = BTreeMap::new();
        for &(i, j, v) in entries {
            if i > j {
                return Err(Error::Validation(format!("entry ({i},{j}) is below the diagonal")));
            }
            if i >= dim || j >= dim {
                return Err(Error::Validation(format!("entry ({i},{j}) out of range for dim {dim}")));
            }
            if i == j && v.im != 0.0 {
                return Err(Error::Validation(format!("diagonal entry ({i},{i}) is not real")));
            }
            *acc.entry((i, j)).or_insert(ZERO) += v;
            if i != j {
                *acc.entry((j, i)).or_insert(ZERO) += v.conj();
            }
        }
        Self::from_map(dim, acc)
    }

    /// Builds from arbitrary `(i, j, value)` triples, summing repeats, and
    /// requires the result to be Hermitian bit-exactly.
    pub fn from_triplets(dim: usize, entries: impl IntoIterator<Item = (usize, usize, C64)>) -> Result<Self> {
        let mut acc: BTreeMap<(usize, usize), C64> = BTreeMap::new();
        for (i, j, v) in entries {
            if i >= dim || j >= dim {
                return Err(Error::Validation(format!("entry ({i},{j}) out of range for dim {dim}")));
            }
            *acc.entry((i, j)).or_insert(ZERO) += v;
        }
        Self::from_map(dim, acc)
    }

    fn from_map(dim: usize, acc: BTreeMap<(usize, usize), C64>) -> Result<Self> {
        let mut rows = vec![Vec::new(); dim];
        for ((i, j), v) in acc {
            if v != ZERO {
                rows[i].push((j, v));
            }
        }
        Self::from_rows(dim, rows)
    }

    /// Builds from explicit rows and validates every invariant.
    pub fn from_rows(dim: usize, mut rows: Vec<Vec<(usize, C64)>>) -> Result<Self> {
        if !is_power_of_two(dim) {
            return Err(Error::Validation(format!("dimension {dim} is not a power of two")));
        }
        if rows.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: rows.len() });
        }
        let mut d_max = 0;
        let mut hmax: f64 = 0.0;
        for (i, row) in rows.iter_mut().enumerate() {
            row.retain(|(_, v)| *v != ZERO);
            row.sort_by_key(|(j, _)| *j);
            for w in row.windows(2) {
                if w[0].0 == w[1].0 {
                    return Err(Error::Validation(format!("duplicate column {} in row {i}", w[0].0)));
                }
            }
            for &(j, v) in row.iter() {
                if j >= dim {
                    return Err(Error::Validation(format!("column {j} out of range in row {i}")));
                }
                if !(v.re.is_finite() && v.im.is_finite()) {
                    return Err(Error::Validation(format!("non-finite entry at ({i},{j})")));
                }
                hmax = hmax.max(v.norm());
            }
            d_max = d_max.max(row.len());
        }
        let m = Self { dim, rows, d_max, hmax };
        for i in 0..dim {
            for &(j, v) in &m.rows[i] {
                if m.entry(j, i) != v.conj() {
                    return Err(Error::Validation(format!("not Hermitian at ({i},{j})")));
                }
            }
        }
        Ok(m)
    }

    /// Reads every row from an oracle and validates the result.
    pub fn from_oracle(oracle: &impl RowOracle) -> Result<Self> {
        let dim = oracle.dim();
        Self::from_rows(dim, (0..dim).map(|i| oracle.row(i)).collect())
    }

    /// Converts a dense Hermitian matrix, treating entries with modulus
    /// below `drop_tol` as zero and symmetrizing the rest.
    pub fn from_dense(m: &DenseMatrix, drop_tol: f64) -> Result<Self> {
        let n = m.dim();
        let scale = m.max_abs().max(1.0);
        if m.hermiticity_defect() > tolerances::EXACT * scale {
            return Err(Error::Validation("dense matrix is not Hermitian".into()));
        }
        let mut upper = Vec::new();
        for i in 0..n {
            for j in i..n {
                let v = if i == j {
                    C64::new(m[(i, i)].re, 0.0)
                } else {
                    (m[(i, j)] + m[(j, i)].conj()) * 0.5
                };
                if v.norm() > drop_tol {
                    upper.push((i, j, v));
                }
            }
        }
        Self::from_upper(n, &upper)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of qubits indexing the matrix.
    pub fn qubits(&self) -> usize {
        self.dim.trailing_zeros() as usize
    }

    pub fn d_max(&self) -> usize {
        self.d_max
    }

    /// max |H(s,t)|
    pub fn hmax(&self) -> f64 {
        self.hmax
    }

    /// Gershgorin-type norm bound d_max * hmax >= ||H||.
    pub fn gershgorin_bound(&self) -> f64 {
        self.d_max as f64 * self.hmax
    }

    /// Stable byte encoding used for provenance digests.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut b = Vec::with_capacity(16 + 24 * self.nnz());
        b.extend_from_slice(b"matrix");
        b.extend_from_slice(&(self.dim as u64).to_le_bytes());
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                b.extend_from_slice(&(i as u64).to_le_bytes());
                b.extend_from_slice(&(j as u64).to_le_bytes());
                b.extend_from_slice(&v.re.to_bits().to_le_bytes());
                b.extend_from_slice(&v.im.to_bits().to_le_bytes());
            }
        }
        b
    }

    pub fn rows(&self) -> &[Vec<(usize, C64)>] {
        &self.rows
    }

    pub fn row_entries(&self, i: usize) -> &[(usize, C64)] {
        &self.rows[i]
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(|r| r.len()).sum()
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        match self.rows[i].binary_search_by_key(&j, |(c, _)| *c) {
            Ok(k) => self.rows[i][k].1,
            Err(_) => ZERO,
        }
    }

    /// Upper-triangle entries in row-major order.
    pub fn upper_entries(&self) -> Vec<(usize, usize, C64)> {
        let mut out = Vec::with_capacity(self.nnz());
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                if j >= i {
                    out.push((i, j, v));
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim);
        self.rows
            .iter()
            .map(|row| row.iter().map(|&(j, a)| a * v[j]).sum())
            .collect()
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.dim);
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn scaled(&self, s: f64) -> Self {
        let rows = self
            .rows
            .iter()
            .map(|r| r.iter().map(|&(j, v)| (j, v * s)).collect())
            .collect();
        Self::from_rows(self.dim, rows).expect("scaling preserves the invariants")
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        let trip = self
            .rows
            .iter()
            .chain(other.rows.iter())
            .enumerate()
            .flat_map(|(k, r)| {
                let i = k % self.dim;
                r.iter().map(move |&(j, v)| (i, j, v))
            });
        Self::from_triplets(self.dim, trip)
    }
}

impl RowOracle for SparseRowMatrix {
    fn dim(&self) -> usize {
        self.dim
    }

    fn row(&self, i: usize) -> Vec<(usize, C64)> {
        self.rows[i].clone()
    }
}
