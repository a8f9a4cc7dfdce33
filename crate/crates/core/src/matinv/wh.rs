use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // inherent f64 methods shadow it when std is linked
use num_traits::Float;

use crate::circuit::{turns, SpectralComponent, UnitaryOp};
use crate::error::{Error, Result};
use crate::numerics::{cis, decompose, fft_in_place, inner, norm_sqr, DenseMatrix, FftDirection, SparseRowMatrix, SpectralDecomposition, C64, ZERO};
use crate::spectral::MAX_PE_BITS;
use crate::tolerances;

/// Evolution time of the controlled exp(iHt0) inside W_H. With ||H|| <= 1
/// the eigenphase lambda/4 stays inside (-1/4, 1/4], so negative
/// eigenvalues decode without wrapping.
pub const T0: f64 = PI / 2.0;

/// Slack allowed when checking the kappa bounds against the exact spectrum.
const SPECTRUM_SLACK: f64 = 1e-10;

/// The inversion unitary W_H.
///
/// Layout: data qubits [0, k), eigenvalue register [k, k + bits), flag
/// qubit `out` at k + bits. The register is prepared in the sine window
/// sqrt(2/M) sin(pi (tau + 1/2)/M), drives controlled exp(iH T0 tau), and
/// is read through the inverse QFT. The flag is rotated to
/// f|0> + g|1> with f = 1/(kappa lambda~), and the estimation is undone.
#[derive(Clone, Debug)]
pub struct WhOperator {
    h: SparseRowMatrix,
    spec: Arc<SpectralDecomposition>,
    kappa: f64,
    eps_prime: f64,
    bits: usize,
    window: Vec<f64>,
    rotation: Vec<f64>,
    /// (F1, F2) per eigenvalue of `spec`.
    moments: Vec<(f64, f64)>,
}

/// Register bits for accuracy eps': ceil(log2(kappa/eps')) + 2.
pub fn register_bits(kappa: f64, eps_prime: f64) -> usize {
    (kappa / eps_prime).log2().ceil() as usize + 2
}

pub fn build_wh(h: &SparseRowMatrix, kappa: f64, eps_prime: f64) -> Result<WhOperator> {
    if !(eps_prime > 0.0 && eps_prime < 0.5) {
        return Err(Error::InvalidParameter(alloc::format!("eps' = {eps_prime} outside (0, 1/2)")));
    }
    WhOperator::with_bits(h, kappa, eps_prime, register_bits(kappa, eps_prime))
}

/// Checks kappa^-1 <= |lambda| <= 1 for every eigenvalue.
pub(crate) fn check_spectrum(spec: &SpectralDecomposition, kappa: f64) -> Result<()> {
    if !(kappa >= 1.0 && kappa.is_finite()) {
        return Err(Error::InvalidParameter(alloc::format!("kappa = {kappa} must be >= 1")));
    }
    for &l in &spec.eigenvalues {
        if l.abs() < 1.0 / kappa - SPECTRUM_SLACK || l.abs() > 1.0 + SPECTRUM_SLACK {
            return Err(Error::InvalidInstance(alloc::format!(
                "eigenvalue {l} outside kappa^-1 <= |lambda| <= 1 with kappa = {kappa}"
            )));
        }
    }
    Ok(())
}

impl WhOperator {
    /// W_H with an explicit register size, for dense checks at small sizes.
    pub fn with_bits(h: &SparseRowMatrix, kappa: f64, eps_prime: f64, bits: usize) -> Result<Self> {
        let spec = Arc::new(decompose(h)?);
        Self::from_parts(h.clone(), spec, kappa, eps_prime, bits)
    }

    pub fn from_parts(
        h: SparseRowMatrix,
        spec: Arc<SpectralDecomposition>,
        kappa: f64,
        eps_prime: f64,
        bits: usize,
    ) -> Result<Self> {
        if bits == 0 || bits > MAX_PE_BITS {
            return Err(Error::Capacity { dim: 1usize << bits.min(63), cap: 1 << MAX_PE_BITS });
        }
        check_spectrum(&spec, kappa)?;
        let m = 1usize << bits;
        let window = (0..m)
            .map(|t| (2.0 / m as f64).sqrt() * (PI * (t as f64 + 0.5) / m as f64).sin())
            .collect();
        let rotation = (0..m).map(|y| flag_amplitude(decode(y, bits), kappa)).collect();
        let mut wh = WhOperator { h, spec, kappa, eps_prime, bits, window, rotation, moments: Vec::new() };
        wh.moments = wh.spec.eigenvalues.iter().map(|&l| wh.moments_for(l)).collect();
        Ok(wh)
    }

    pub fn hamiltonian(&self) -> &SparseRowMatrix {
        &self.h
    }

    pub fn decomposition(&self) -> &SpectralDecomposition {
        &self.spec
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn eps_prime(&self) -> f64 {
        self.eps_prime
    }

    pub fn register_bits(&self) -> usize {
        self.bits
    }

    /// Ancillas beyond the data register: eigenvalue register plus flag.
    pub fn ell(&self) -> usize {
        self.bits + 1
    }

    pub fn data_qubits(&self) -> usize {
        self.h.qubits()
    }

    pub fn out_qubit(&self) -> usize {
        self.data_qubits() + self.bits
    }

    /// Mask of every ancilla bit (register and flag) in a basis index.
    pub fn ancilla_mask(&self) -> usize {
        ((1usize << self.ell()) - 1) << self.data_qubits()
    }

    /// Register amplitude of outcome y after estimation on an eigenvector
    /// with eigenvalue `lambda`.
    pub fn register_amplitude(&self, lambda: f64, y: usize) -> C64 {
        window_amplitude(lambda * T0 / (2.0 * PI), y, self.bits)
    }

    /// (F1, F2) = (sum_y |c_y|^2 f_y, sum_y |c_y|^2 f_y^2).
    fn moments_for(&self, lambda: f64) -> (f64, f64) {
        let phi = lambda * T0 / (2.0 * PI);
        let (mut f1, mut f2) = (0.0, 0.0);
        for (y, f) in self.rotation.iter().enumerate() {
            let p = window_amplitude(phi, y, self.bits).norm_sqr();
            f1 += p * f;
            f2 += p * f * f;
        }
        (f1, f2)
    }

    /// Closed-form response to |0^ell>|b>.
    pub fn response(&self, b: &[C64]) -> Result<WhResponse> {
        if b.len() != self.h.dim() {
            return Err(Error::DimensionMismatch { expected: self.h.dim(), got: b.len() });
        }
        let coeffs = self.spec.coefficients(b);
        let mut alpha2 = 0.0;
        let mut z = vec![ZERO; b.len()];
        for ((c, v), (f1, f2)) in coeffs.iter().zip(&self.spec.eigenvectors).zip(&self.moments) {
            alpha2 += c.norm_sqr() * f2;
            let w = c * *f1;
            for (zi, vi) in z.iter_mut().zip(v) {
                *zi += w * vi;
            }
        }
        Ok(WhResponse { alpha: alpha2.max(0.0).sqrt(), clean: z })
    }

    /// |alpha - ||H^-1 b||/kappa| and ||psi_b - |0^{ell-1}> H^-1 b/||H^-1 b|| ||,
    /// against the exact inverse.
    pub fn contract_errors(&self, b: &[C64]) -> Result<(f64, f64)> {
        let r = self.response(b)?;
        let x = self.spec.apply_function(b, |l| C64::new(1.0 / l, 0.0));
        let n = norm_sqr(&x).sqrt();
        let overlap = inner(&x, &r.clean) / (n * r.alpha);
        let dist = (2.0 - 2.0 * overlap.re).max(0.0).sqrt();
        Ok(((r.alpha - n / self.kappa).abs(), dist))
    }

    /// Dense matrix of the full operator, capped by the dense limit.
    pub fn materialize(&self) -> Result<DenseMatrix> {
        let dim = self.dim();
        if dim > tolerances::dense_cap() {
            return Err(Error::Capacity { dim, cap: tolerances::dense_cap() });
        }
        Ok(self.to_dense())
    }

    fn transform(&self, v: &mut [C64], adjoint: bool) {
        let d = self.h.dim();
        let m = 1usize << self.bits;
        let blocks = 2 * m;
        let mut out = vec![ZERO; v.len()];
        let mut block = vec![ZERO; blocks];
        let norm = 1.0 / (m as f64).sqrt();
        for (lam, ev) in self.spec.eigenvalues.iter().zip(&self.spec.eigenvectors) {
            for (r, slot) in block.iter_mut().enumerate() {
                let base = r * d;
                *slot = ev.iter().zip(&v[base..base + d]).map(|(a, b)| a.conj() * b).sum();
            }
            if block.iter().all(|x| *x == ZERO) {
                continue;
            }
            let phase: Vec<C64> = (0..m).map(|t| cis(lam * T0 * t as f64)).collect();
            for half in block.chunks_mut(m) {
                self.householder(half);
                for (x, p) in half.iter_mut().zip(&phase) {
                    *x *= p;
                }
                fft_in_place(half, FftDirection::Forward);
                half.iter_mut().for_each(|x| *x *= norm);
            }
            let sign = if adjoint { -1.0 } else { 1.0 };
            for (y, &f) in self.rotation.iter().enumerate() {
                let g = sign * (1.0 - f * f).max(0.0).sqrt();
                let (a0, a1) = (block[y], block[y + m]);
                block[y] = a0 * f - a1 * g;
                block[y + m] = a0 * g + a1 * f;
            }
            for half in block.chunks_mut(m) {
                fft_in_place(half, FftDirection::Inverse);
                for (x, p) in half.iter_mut().zip(&phase) {
                    *x *= p.conj() * norm;
                }
                self.householder(half);
            }
            for (r, &a) in block.iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                let base = r * d;
                for (o, e) in out[base..base + d].iter_mut().zip(ev) {
                    *o += a * e;
                }
            }
        }
        v.copy_from_slice(&out);
    }

    /// Reflection exchanging |0> and the window state.
    fn householder(&self, x: &mut [C64]) {
        let w = &self.window;
        let uu = 2.0 - 2.0 * w[0];
        if uu < 1e-300 {
            return;
        }
        // u = e0 - w
        let mut dot = x[0];
        for (xi, wi) in x.iter().zip(w) {
            dot -= xi * *wi;
        }
        let s = dot * (2.0 / uu);
        x[0] -= s;
        for (xi, wi) in x.iter_mut().zip(w) {
            *xi += s * *wi;
        }
    }
}

/// Structured output of W_H on |0^ell>|b>.
#[derive(Clone, Debug)]
pub struct WhResponse {
    /// Norm of the flag-0 branch.
    pub alpha: f64,
    /// The flag-0, register-zero part of W_H|0^ell>|b> on the data register:
    /// sum_lambda <v_lambda|b> F1(lambda) v_lambda. Unnormalized.
    pub clean: Vec<C64>,
}

impl UnitaryOp for WhOperator {
    fn dim(&self) -> usize {
        self.h.dim() << self.ell()
    }

    fn apply(&self, v: &mut [C64]) {
        self.transform(v, false)
    }

    fn apply_adjoint(&self, v: &mut [C64]) {
        self.transform(v, true)
    }

    fn spectral_components(&self, state: &[C64]) -> Result<Vec<SpectralComponent>> {
        if self.dim() > tolerances::dense_cap() {
            return Err(Error::Capacity { dim: self.dim(), cap: tolerances::dense_cap() });
        }
        let eig = crate::numerics::unitary_eigen(&self.to_dense())?;
        Ok(eig
            .phases
            .iter()
            .zip(&eig.vectors)
            .map(|(p, v)| {
                let a = inner(v, state);
                SpectralComponent { phase: turns(*p), vector: v.iter().map(|x| x * a).collect() }
            })
            .collect())
    }
}

/// Eigenvalue estimate read from register outcome y: the phase y/M is
/// taken in (-1/2, 1/2] and scaled back by 2 pi / T0.
pub fn decode(y: usize, bits: usize) -> f64 {
    let m = (1usize << bits) as f64;
    let mut p = y as f64 / m;
    if p >= 0.5 {
        p -= 1.0;
    }
    p * 2.0 * PI / T0
}

/// 1/(kappa x) clamped to [-1, 1]; zero at x = 0.
pub fn flag_amplitude(x: f64, kappa: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    (1.0 / (kappa * x)).clamp(-1.0, 1.0)
}

/// sum_tau sqrt(2/M) sin(pi (tau + 1/2)/M) e^{2 pi i tau (phi - y/M)} / sqrt(M)
/// in closed form.
pub fn window_amplitude(phi: f64, y: usize, bits: usize) -> C64 {
    let m = (1usize << bits) as f64;
    let mut x = m * phi - y as f64;
    x -= m * (x / m).round();
    let g = |u: f64| -> C64 {
        // sum_tau e^{2 pi i tau u/M}
        let n = u.round();
        let r = u - n;
        if r.abs() < 1e-9 && n == 0.0 {
            return C64::new(m, 0.0);
        }
        let den = (PI * u / m).sin();
        let sign = if (n as i64).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        cis(PI * (m - 1.0) * u / m) * (sign * (PI * r).sin() / den)
    };
    let half = PI / (2.0 * m);
    let diff = cis(half) * g(x + 0.5) - cis(-half) * g(x - 0.5);
    // (sqrt 2 / M) (1 / 2i) diff
    diff * C64::new(0.0, -(2f64).sqrt() / (2.0 * m))
}
