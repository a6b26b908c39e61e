//! Seeded random matrices and the named operator ensembles.
//!
//! Every trial draws from its own ChaCha20 stream keyed by
//! `(seed, stream, trial)`, so trials are reproducible individually and in
//! any order.

use num_complex::Complex;
use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::norms::operator_norm;
use crate::spectral::HermitianOperator;

/// Counter-based generator for one trial.
///
/// Key layout (32 bytes): `seed` as u64 little endian, then `stream`, then
/// `trial`, then eight zero bytes. Uniforms take the top 53 bits of each
/// `next_u64`; normals come from Box-Muller using two uniforms, cosine branch
/// first then the cached sine branch.
pub struct TrialRng {
    inner: ChaCha20Rng,
    spare: Option<f64>,
}

impl TrialRng {
    pub fn new(seed: u64, stream: u64, trial: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        key[8..16].copy_from_slice(&stream.to_le_bytes());
        key[16..24].copy_from_slice(&trial.to_le_bytes());
        Self {
            inner: ChaCha20Rng::from_seed(key),
            spare: None,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform integer in `lo..=hi`.
    pub fn int_in(&mut self, lo: usize, hi: usize) -> usize {
        lo + (self.uniform() * (hi - lo + 1) as f64) as usize
    }

    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
        self.spare = Some(r * s);
        r * c
    }

    /// Circular complex normal with `E|z|^2 = 1`.
    pub fn complex_normal(&mut self) -> Complex<f64> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Complex::new(self.normal() * h, self.normal() * h)
    }

    pub fn gaussian_matrix(&mut self, rows: usize, cols: usize) -> Matrix<f64> {
        Matrix::from_fn(rows, cols, |_, _| self.complex_normal())
    }

    /// GUE-type Hermitian matrix: real normal diagonal, complex normal off-diagonal.
    pub fn gaussian_hermitian(&mut self, n: usize) -> HermitianOperator<f64> {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::new(self.normal(), 0.0);
            for j in i + 1..n {
                let z = self.complex_normal();
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        HermitianOperator::new(m).expect("hermitian by construction")
    }

    /// Haar-distributed unitary from modified Gram-Schmidt with phase fix.
    pub fn haar_unitary(&mut self, n: usize) -> Matrix<f64> {
        let g = self.gaussian_matrix(n, n);
        let mut cols: Vec<Vec<Complex<f64>>> = (0..n).map(|j| g.column(j)).collect();
        for j in 0..n {
            for k in 0..j {
                let proj: Complex<f64> = (0..n).map(|i| cols[k][i].conj() * cols[j][i]).sum();
                for i in 0..n {
                    let v = cols[k][i];
                    cols[j][i] -= proj * v;
                }
            }
            let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            for z in &mut cols[j] {
                *z /= norm;
            }
        }
        Matrix::from_fn(n, n, |i, j| cols[j][i])
    }

    /// Random Hermitian matrix rescaled to operator norm `norm`.
    pub fn hermitian_with_norm(&mut self, n: usize, norm: f64) -> Result<HermitianOperator<f64>> {
        let h = self.gaussian_hermitian(n);
        let s = h.operator_norm()?;
        if s == 0.0 {
            return Ok(h);
        }
        HermitianOperator::new(h.matrix().scale_real(norm / s))
    }

    /// Random (non-Hermitian) matrix rescaled to operator norm `norm`.
    pub fn matrix_with_norm(&mut self, n: usize, norm: f64) -> Result<Matrix<f64>> {
        let m = self.gaussian_matrix(n, n);
        let s = operator_norm(&m)?;
        Ok(m.scale_real(norm / s))
    }

    /// `W diag(values) W*` with Haar `W`.
    pub fn rotated_spectrum(&mut self, values: &[f64]) -> HermitianOperator<f64> {
        let w = self.haar_unitary(values.len());
        HermitianOperator::from_spectrum(values.to_vec(), w)
    }
}

/// Distribution of the base operator `D` (or `D0`) of a trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EnsembleSpec {
    /// GUE-type matrix times `scale`.
    GaussianHermitian { n: usize, scale: f64 },
    /// Fixed eigenvalues in a Haar-random eigenbasis.
    PrescribedSpectrum { values: Vec<f64> },
    /// Two mirrored clusters `+-(1 + j gap)`, `j < n/2`, Haar-rotated.
    ClusteredSpectrum { n: usize, gap: f64 },
    /// `diag(-N..=N)`: the derivative on the circle truncated to `2N + 1` modes.
    PeriodicDerivativeModel { modes: usize },
}

/// Smallest |eigenvalue| the ensembles produce when an inverse or sign is needed.
pub const MIN_ABS_EIGENVALUE: f64 = 1e-6;

impl EnsembleSpec {
    pub fn dim(&self) -> usize {
        match self {
            Self::GaussianHermitian { n, .. } | Self::ClusteredSpectrum { n, .. } => *n,
            Self::PrescribedSpectrum { values } => values.len(),
            Self::PeriodicDerivativeModel { modes } => 2 * modes + 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.to_string()));
        match self {
            Self::GaussianHermitian { n, scale } if *n == 0 || !(*scale > 0.0) => {
                bad("gaussian ensemble needs n >= 1 and scale > 0")
            }
            Self::PrescribedSpectrum { values }
                if values.is_empty() || values.iter().any(|v| !v.is_finite()) =>
            {
                bad("prescribed spectrum must be non-empty and finite")
            }
            Self::ClusteredSpectrum { n, gap } if *n < 2 || !(*gap > 0.0) => {
                bad("clustered ensemble needs n >= 2 and gap > 0")
            }
            _ => Ok(()),
        }
    }

    pub fn generate(&self, rng: &mut TrialRng) -> Result<HermitianOperator<f64>> {
        self.validate()?;
        Ok(match self {
            Self::GaussianHermitian { n, scale } => {
                let h = rng.gaussian_hermitian(*n);
                HermitianOperator::new(h.matrix().scale_real(*scale))?
            }
            Self::PrescribedSpectrum { values } => rng.rotated_spectrum(values),
            Self::ClusteredSpectrum { n, gap } => rng.rotated_spectrum(&clustered_values(*n, *gap)),
            Self::PeriodicDerivativeModel { modes } => {
                let m = *modes as i64;
                let d: Vec<f64> = (-m..=m).map(|k| k as f64).collect();
                HermitianOperator::from_real_diag(&d)
            }
        })
    }
}

/// `+-(1 + j gap)` for `j = 0..`, alternating signs, `n` values.
pub fn clustered_values(n: usize, gap: f64) -> Vec<f64> {
    (0..n)
        .map(|k| {
            let j = (k / 2) as f64;
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sign * (1.0 + j * gap)
        })
        .collect()
}

/// Toeplitz multiplication operator of `V(x) = sum_k c_k cos(k x)` in the Fourier basis.
///
/// Entry `(i, j)` is `c_{|i-j|}/2` (`c_0` on the diagonal); bounded by `sum |c_k|`.
pub fn trigonometric_potential(modes: usize, coeffs: &[f64]) -> HermitianOperator<f64> {
    let n = 2 * modes + 1;
    let m = Matrix::from_fn(n, n, |i, j| {
        let k = i.abs_diff(j);
        let c = coeffs.get(k).copied().unwrap_or(0.0);
        Complex::new(if k == 0 { c } else { c / 2.0 }, 0.0)
    });
    HermitianOperator::new(m).expect("symmetric by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::unitarity_defect;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = {
            let mut r = TrialRng::new(7, 1, 3);
            (0..4).map(|_| r.next_u64()).collect()
        };
        let b: Vec<u64> = {
            let mut r = TrialRng::new(7, 1, 3);
            (0..4).map(|_| r.next_u64()).collect()
        };
        let c: Vec<u64> = {
            let mut r = TrialRng::new(7, 1, 4);
            (0..4).map(|_| r.next_u64()).collect()
        };
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn normals_have_unit_variance() {
        let mut r = TrialRng::new(1, 0, 0);
        let xs: Vec<f64> = (0..20000).map(|_| r.normal()).collect();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / xs.len() as f64;
        assert!(
            mean.abs() < 0.03 && (var - 1.0).abs() < 0.05,
            "{mean} {var}"
        );
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let mut r = TrialRng::new(2, 0, 0);
        assert!(unitarity_defect(&r.haar_unitary(7)) < 1e-13);
    }

    #[test]
    fn clustered_spectrum_avoids_zero() {
        let v = clustered_values(6, 1e-3);
        assert_eq!(v.len(), 6);
        assert!(v.iter().all(|x| x.abs() >= 1.0));
        let mut r = TrialRng::new(3, 0, 0);
        let d = EnsembleSpec::ClusteredSpectrum { n: 6, gap: 1e-3 }
            .generate(&mut r)
            .unwrap();
        assert!(d.spectral_gap().unwrap() >= MIN_ABS_EIGENVALUE);
    }

    #[test]
    fn periodic_model_is_integer_diagonal() {
        let mut r = TrialRng::new(0, 0, 0);
        let d = EnsembleSpec::PeriodicDerivativeModel { modes: 2 }
            .generate(&mut r)
            .unwrap();
        assert_eq!(d.spectrum().unwrap(), &[-2.0, -1.0, 0.0, 1.0, 2.0]);
    }

    #[test]
    fn potential_norm_bounded_by_coefficients() {
        let v = trigonometric_potential(10, &[0.2, 0.3, -0.1]);
        assert!(v.operator_norm().unwrap() <= 0.6 + 1e-12);
    }
}
