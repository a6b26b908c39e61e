//! Hermitian eigendecomposition and the scalar spectral calculus.

use std::sync::OnceLock;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::function::ScalarFunction;
use crate::matrix::Matrix;
use crate::scalar::{real, Real, C};

const MAX_SWEEPS: usize = 100;

/// Eigenvalues in ascending order with the matching unitary of eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition<T> {
    pub spectrum: Vec<T>,
    pub vectors: Matrix<T>,
}

/// Rotation zeroing the off-diagonal entry of `[[a, z], [conj z, b]]`.
///
/// Returns `(c, s, phase, t)` where the 2x2 unitary acting on columns is
/// `[[c, s], [-s e^{-i phi}, c e^{-i phi}]]` and the new diagonal is
/// `(a - t|z|, b + t|z|)`.
#[derive(Debug, Clone, Copy)]
struct Rotation<T> {
    c: T,
    s: T,
    phase: C<T>,
    t: T,
}

impl<T: Real> Rotation<T> {
    fn new(a: T, b: T, z: C<T>) -> Self {
        let r = z.norm();
        let phase = z / r;
        let theta = (b - a) / (r + r);
        let sign = if theta < T::zero() {
            -T::one()
        } else {
            T::one()
        };
        // Large theta: t ~ 1/(2 theta); avoid overflow in theta^2.
        let t = if theta.abs() > T::of(1e150) {
            T::one() / (theta + theta)
        } else {
            sign / (theta.abs() + (theta * theta + T::one()).sqrt())
        };
        let c = T::one() / (t * t + T::one()).sqrt();
        Self {
            c,
            s: t * c,
            phase,
            t,
        }
    }

    /// `X <- X G` on columns `p`, `q`.
    fn apply_right(&self, x: &mut Matrix<T>, p: usize, q: usize) {
        let e = self.phase.conj();
        for k in 0..x.rows() {
            let xp = x[(k, p)];
            let xq = x[(k, q)];
            x[(k, p)] = xp * self.c - xq * e * self.s;
            x[(k, q)] = xp * self.s + xq * e * self.c;
        }
    }

    /// `X <- G* X` on rows `p`, `q`.
    fn apply_left_adjoint(&self, x: &mut Matrix<T>, p: usize, q: usize) {
        let e = self.phase;
        for k in 0..x.cols() {
            let xp = x[(p, k)];
            let xq = x[(q, k)];
            x[(p, k)] = xp * self.c - xq * e * self.s;
            x[(q, k)] = xp * self.s + xq * e * self.c;
        }
    }
}

fn off_diagonal<T: Real>(a: &Matrix<T>) -> T {
    let n = a.rows();
    let mut acc = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc = acc + a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Cyclic complex Jacobi on a matrix already known to be Hermitian.
fn jacobi_eigh<T: Real>(input: &Matrix<T>) -> Result<Decomposition<T>> {
    let n = input.rows();
    let mut a = input.clone();
    let mut v = Matrix::identity(n);
    let scale = a.frobenius();
    let target = T::of(T::JACOBI_TARGET) * scale;
    let mut converged = n <= 1 || scale == T::zero();
    let mut sweeps = 0;
    while !converged && sweeps < MAX_SWEEPS {
        if off_diagonal(&a) <= target {
            converged = true;
            break;
        }
        sweeps += 1;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let z = a[(p, q)];
                if z.norm() <= T::min_positive_value() {
                    continue;
                }
                let (app, aqq) = (a[(p, p)].re, a[(q, q)].re);
                let rot = Rotation::new(app, aqq, z);
                rot.apply_right(&mut a, p, q);
                rot.apply_left_adjoint(&mut a, p, q);
                let shift = rot.t * z.norm();
                a[(p, p)] = real(app - shift);
                a[(q, q)] = real(aqq + shift);
                a[(p, q)] = C::zero();
                a[(q, p)] = C::zero();
                rot.apply_right(&mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal(&a) > target {
        return Err(Error::ConvergenceFailure {
            solver: "hermitian jacobi",
            sweeps,
            residual: off_diagonal(&a).as_f64(),
        });
    }
    log::trace!("jacobi converged in {sweeps} sweeps (n = {n})");
    let diag: Vec<T> = (0..n).map(|i| a[(i, i)].re).collect();
    Ok(sorted(diag, &v))
}

fn sorted<T: Real>(values: Vec<T>, vectors: &Matrix<T>) -> Decomposition<T> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        values[i]
            .partial_cmp(&values[j])
            .expect("finite eigenvalues")
    });
    let spectrum = order.iter().map(|&i| values[i]).collect();
    let vectors = Matrix::from_fn(vectors.rows(), n, |r, c| vectors[(r, order[c])]);
    Decomposition { spectrum, vectors }
}

/// One-sided Hestenes Jacobi: singular values in non-increasing order.
pub(crate) fn hestenes_singular_values<T: Real>(input: &Matrix<T>) -> Result<Vec<T>> {
    let mut a = input.clone();
    let cols = a.cols();
    let eps = T::of(T::JACOBI_TARGET);
    let col_norm2 =
        |a: &Matrix<T>, j: usize| (0..a.rows()).map(|k| a[(k, j)].norm_sqr()).sum::<T>();
    let mut sweeps = 0;
    loop {
        let mut worst = T::zero();
        for p in 0..cols.saturating_sub(1) {
            for q in p + 1..cols {
                let alpha = col_norm2(&a, p);
                let beta = col_norm2(&a, q);
                let gamma: C<T> =
                    (0..a.rows()).fold(C::zero(), |acc, k| acc + a[(k, p)].conj() * a[(k, q)]);
                let g = gamma.norm();
                if g <= T::min_positive_value() {
                    continue;
                }
                let rel = g / (alpha * beta).sqrt();
                worst = worst.max(rel);
                if rel <= eps {
                    continue;
                }
                Rotation::new(alpha, beta, gamma).apply_right(&mut a, p, q);
            }
        }
        if worst <= eps {
            break;
        }
        sweeps += 1;
        if sweeps >= MAX_SWEEPS {
            return Err(Error::ConvergenceFailure {
                solver: "one-sided jacobi svd",
                sweeps,
                residual: worst.as_f64(),
            });
        }
    }
    let mut s: Vec<T> = (0..cols).map(|j| col_norm2(&a, j).sqrt()).collect();
    s.sort_by(|x, y| y.partial_cmp(x).expect("finite singular values"));
    s.truncate(input.rows().min(cols));
    Ok(s)
}

/// Hermitian matrix with a lazily computed, compute-once spectral decomposition.
#[derive(Debug)]
pub struct HermitianOperator<T: Real> {
    entries: Matrix<T>,
    decomposition: OnceLock<Decomposition<T>>,
}

impl<T: Real> Clone for HermitianOperator<T> {
    fn clone(&self) -> Self {
        let decomposition = OnceLock::new();
        if let Some(d) = self.decomposition.get() {
            let _ = decomposition.set(d.clone());
        }
        Self {
            entries: self.entries.clone(),
            decomposition,
        }
    }
}

impl<T: Real> HermitianOperator<T> {
    /// Validates hermiticity and stores the symmetrized `(A + A*)/2`.
    pub fn new(entries: Matrix<T>) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::DimensionMismatch {
                left: entries.shape(),
                right: (entries.cols(), entries.rows()),
            });
        }
        if entries
            .as_slice()
            .iter()
            .any(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::InvalidParameter(
                "matrix has non-finite entries".into(),
            ));
        }
        let dev = entries.hermitian_deviation();
        let tol = T::of(T::HERMITICITY_TOL) * (T::one() + entries.max_abs());
        if dev > tol {
            return Err(Error::NonHermitianInput {
                deviation: dev.as_f64(),
                tolerance: tol.as_f64(),
            });
        }
        if dev > T::zero() {
            log::debug!("symmetrizing input with hermitian deviation {dev:e}");
        }
        Ok(Self {
            entries: entries.hermitian_part(),
            decomposition: OnceLock::new(),
        })
    }

    pub fn from_real_diag(d: &[T]) -> Self {
        let n = d.len();
        Self::from_spectrum(d.to_vec(), Matrix::identity(n))
    }

    /// `U diag(spectrum) U*` with the decomposition cached up front.
    ///
    /// `vectors` is trusted to be unitary.
    pub fn from_spectrum(spectrum: Vec<T>, vectors: Matrix<T>) -> Self {
        let entries = reconstruct(&spectrum, &vectors).hermitian_part();
        let dec = sorted(spectrum, &vectors);
        let decomposition = OnceLock::new();
        let _ = decomposition.set(dec);
        Self {
            entries,
            decomposition,
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.rows()
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.entries
    }

    pub fn into_matrix(self) -> Matrix<T> {
        self.entries
    }

    pub fn decomposition(&self) -> Result<&Decomposition<T>> {
        if let Some(d) = self.decomposition.get() {
            return Ok(d);
        }
        let d = jacobi_eigh(&self.entries)?;
        // A concurrent caller may have won; both results are equal.
        let _ = self.decomposition.set(d);
        Ok(self.decomposition.get().expect("just set"))
    }

    pub fn spectrum(&self) -> Result<&[T]> {
        Ok(&self.decomposition()?.spectrum)
    }

    pub fn eigenvectors(&self) -> Result<&Matrix<T>> {
        Ok(&self.decomposition()?.vectors)
    }

    /// Real spectral map; the result shares the eigenbasis.
    pub fn map_spectrum(&self, mut f: impl FnMut(T) -> Result<T>) -> Result<Self> {
        let d = self.decomposition()?;
        let values = d
            .spectrum
            .iter()
            .map(|&l| f(l))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_spectrum(values, d.vectors.clone()))
    }

    /// Complex spectral map `U diag(f(lambda)) U*`.
    pub fn map_spectrum_complex(&self, mut f: impl FnMut(T) -> Result<C<T>>) -> Result<Matrix<T>> {
        let d = self.decomposition()?;
        let values = d
            .spectrum
            .iter()
            .map(|&l| f(l))
            .collect::<Result<Vec<_>>>()?;
        Ok(reconstruct_complex(&values, &d.vectors))
    }

    pub fn apply_function(&self, f: &ScalarFunction) -> Result<Self> {
        if !f.is_real() {
            return Err(Error::ComplexValued);
        }
        self.map_spectrum(|l| f.eval_real(l))
    }

    /// Spectral calculus for complex-valued `f`; `ImagPower` yields a unitary.
    pub fn apply_function_complex(&self, f: &ScalarFunction) -> Result<Matrix<T>> {
        self.map_spectrum_complex(|l| f.eval(l))
    }

    /// `(alpha^2 + A^2)^{1/2}`.
    pub fn delta(&self, alpha: T) -> Result<Self> {
        if !(alpha > T::zero()) || !alpha.is_finite() {
            return Err(Error::NonPositiveAlpha(alpha.as_f64()));
        }
        self.map_spectrum(|l| Ok(alpha.hypot(l)))
    }

    /// `A^p` for positive definite `A`.
    pub fn power(&self, p: T) -> Result<Self> {
        self.map_spectrum(|l| {
            if l > T::zero() {
                Ok(l.powf(p))
            } else {
                Err(Error::DomainError {
                    function: format!("t^{p}"),
                    at: l.as_f64(),
                })
            }
        })
    }

    /// Conjugation `W A W*` by a unitary.
    pub fn conjugate_by(&self, w: &Matrix<T>) -> Result<Self> {
        let m = w.try_mul(&self.entries)?.try_mul(&w.adjoint())?;
        Self::new(m)
    }

    /// Smallest absolute eigenvalue.
    pub fn spectral_gap(&self) -> Result<T> {
        Ok(self
            .spectrum()?
            .iter()
            .fold(T::infinity(), |m, l| m.min(l.abs())))
    }

    pub fn operator_norm(&self) -> Result<T> {
        Ok(self
            .spectrum()?
            .iter()
            .fold(T::zero(), |m, l| m.max(l.abs())))
    }
}

fn reconstruct<T: Real>(spectrum: &[T], u: &Matrix<T>) -> Matrix<T> {
    let values: Vec<C<T>> = spectrum.iter().map(|&l| real(l)).collect();
    reconstruct_complex(&values, u)
}

fn reconstruct_complex<T: Real>(values: &[C<T>], u: &Matrix<T>) -> Matrix<T> {
    let n = u.rows();
    Matrix::from_fn(n, n, |i, j| {
        values.iter().enumerate().fold(C::zero(), |acc, (k, &v)| {
            acc + u[(i, k)] * v * u[(j, k)].conj()
        })
    })
}

/// Ascending spectrum and eigenvector unitary of `a`.
pub fn decompose<T: Real>(a: &HermitianOperator<T>) -> Result<(Vec<T>, Matrix<T>)> {
    let d = a.decomposition()?;
    Ok((d.spectrum.clone(), d.vectors.clone()))
}

pub fn apply_function<T: Real>(
    f: &ScalarFunction,
    a: &HermitianOperator<T>,
) -> Result<HermitianOperator<T>> {
    a.apply_function(f)
}

pub fn delta<T: Real>(a: &HermitianOperator<T>, alpha: T) -> Result<HermitianOperator<T>> {
    a.delta(alpha)
}

pub fn commutator<T: Real>(x: &Matrix<T>, y: &Matrix<T>) -> Result<Matrix<T>> {
    x.commutator(y)
}

/// `max |U diag U* - A|` over entries; a cheap diagnostic used by tests.
pub fn reconstruction_residual<T: Real>(a: &HermitianOperator<T>) -> Result<T> {
    let d = a.decomposition()?;
    Ok((&reconstruct(&d.spectrum, &d.vectors) - a.matrix()).max_abs())
}

/// `U* U - I` entrywise maximum.
pub fn unitarity_defect<T: Real>(u: &Matrix<T>) -> T {
    let g = &u.adjoint() * u;
    let n = g.rows();
    let mut worst = T::zero();
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { C::one() } else { C::zero() };
            worst = worst.max((g[(i, j)] - target).norm());
        }
    }
    worst
}
