//! Double operator integrals as Schur multipliers.
//!
//! With `D0 = U diag(lambda) U*` and `D1 = V diag(mu) V*` the map is
//! `x -> U ([phi(lambda_i, mu_j)] . (U* x V)) V*`, the finite-dimensional
//! form of integrating `phi` against the two spectral measures.

use num_traits::Zero;

use crate::ensemble::TrialRng;
use crate::error::{Error, Result};
use crate::function::ScalarFunction;
use crate::kernels::Kernel;
use crate::matrix::Matrix;
use crate::norms::operator_norm;
use crate::report::{ConstantSource, EstimateReport};
use crate::scalar::{Real, C};
use crate::spectral::HermitianOperator;

#[derive(Debug, Clone)]
pub struct DoiOperator<T: Real> {
    kernel: Kernel,
    left: HermitianOperator<T>,
    right: HermitianOperator<T>,
    schur: Matrix<T>,
}

impl<T: Real> DoiOperator<T> {
    /// Decomposes both operators and tabulates `phi` on eigenvalue pairs.
    pub fn new(
        kernel: Kernel,
        left: HermitianOperator<T>,
        right: HermitianOperator<T>,
    ) -> Result<Self> {
        let lam = left.spectrum()?.to_vec();
        let mu = right.spectrum()?.to_vec();
        let mut schur = Matrix::zeros(lam.len(), mu.len());
        for (i, &l) in lam.iter().enumerate() {
            for (j, &m) in mu.iter().enumerate() {
                let v = kernel.eval(l, m)?;
                if !(v.re.is_finite() && v.im.is_finite()) {
                    return Err(Error::DomainError {
                        function: kernel.to_string(),
                        at: l.as_f64(),
                    });
                }
                schur[(i, j)] = v;
            }
        }
        Ok(Self {
            kernel,
            left,
            right,
            schur,
        })
    }

    /// Same operator on both sides, `T_phi(D, D)`.
    pub fn symmetric(kernel: Kernel, d: HermitianOperator<T>) -> Result<Self> {
        Self::new(kernel, d.clone(), d)
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn left(&self) -> &HermitianOperator<T> {
        &self.left
    }

    pub fn right(&self) -> &HermitianOperator<T> {
        &self.right
    }

    /// `[phi(lambda_i, mu_j)]` in ascending eigenvalue order.
    pub fn schur_matrix(&self) -> &Matrix<T> {
        &self.schur
    }

    pub fn apply(&self, x: &Matrix<T>) -> Result<Matrix<T>> {
        let u = self.left.eigenvectors()?;
        let v = self.right.eigenvectors()?;
        if x.shape() != (u.rows(), v.rows()) {
            return Err(Error::DimensionMismatch {
                left: (u.rows(), v.rows()),
                right: x.shape(),
            });
        }
        let inner = u.adjoint().try_mul(x)?.try_mul(v)?;
        u.try_mul(&inner.hadamard(&self.schur)?)?
            .try_mul(&v.adjoint())
    }
}

pub fn schur_apply<T: Real>(op: &DoiOperator<T>, x: &Matrix<T>) -> Result<Matrix<T>> {
    op.apply(x)
}

/// Spectral projections of `d`, one per cluster of eigenvalues within `tol`.
///
/// Returns `(representative eigenvalue, projection)` pairs; the projection
/// does not depend on the eigenvector choice inside the cluster.
pub fn spectral_projections<T: Real>(
    d: &HermitianOperator<T>,
    tol: T,
) -> Result<Vec<(T, Matrix<T>)>> {
    let dec = d.decomposition()?;
    let n = d.dim();
    let mut out = Vec::new();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && dec.spectrum[end] - dec.spectrum[end - 1] <= tol {
            end += 1;
        }
        let members = start..end;
        let mean = members
            .clone()
            .map(|k| dec.spectrum[k])
            .fold(T::zero(), |a, b| a + b)
            / T::of((end - start) as f64);
        let p = Matrix::from_fn(n, n, |i, j| {
            members.clone().fold(C::zero(), |acc, k| {
                acc + dec.vectors[(i, k)] * dec.vectors[(j, k)].conj()
            })
        });
        out.push((mean, p));
        start = end;
    }
    Ok(out)
}

fn residual_report(id: &str, residual: f64, scale: f64, tol: f64) -> EstimateReport {
    EstimateReport::new(id, residual, scale, tol, ConstantSource::Residual).with_tolerance(0.0)
}

/// Brute-force check of `tr(x T(y)) = sum_ij phi(lambda_i, mu_j) tr(x P_i y Q_j)`.
///
/// Projections are grouped by eigenspace; `lhs` is the worst deviation over
/// `trials` random pairs `(x, y)` and `rhs` the matching scale
/// `1 + max|phi| ||x||_F ||y||_F`.
pub fn defining_identity_check<T: Real>(
    op: &DoiOperator<T>,
    trials: usize,
    rng: &mut TrialRng,
) -> Result<EstimateReport> {
    let n = op.left.dim();
    if n > 8 || op.right.dim() > 8 {
        return Err(Error::InvalidParameter(
            "brute-force oracle is capped at n = 8".into(),
        ));
    }
    let cluster = T::of(T::DIAG_DELTA);
    let ps = spectral_projections(&op.left, cluster)?;
    let qs = spectral_projections(&op.right, cluster)?;
    let mut worst = 0.0_f64;
    let mut scale = 1.0_f64;
    let phi_max = op.schur.max_abs().as_f64();
    for _ in 0..trials {
        let x: Matrix<T> = rng.gaussian_matrix(op.right.dim(), n).cast();
        let y: Matrix<T> = rng.gaussian_matrix(n, op.right.dim()).cast();
        let lhs = x.trace_product(&op.apply(&y)?)?;
        let mut rhs = C::<T>::zero();
        for (l, p) in &ps {
            let xp = x.try_mul(p)?;
            let xpy = xp.try_mul(&y)?;
            for (m, q) in &qs {
                rhs = rhs + op.kernel.eval(*l, *m)? * xpy.trace_product(q)?;
            }
        }
        worst = worst.max((lhs - rhs).norm().as_f64());
        scale = scale.max(1.0 + phi_max * x.frobenius().as_f64() * y.frobenius().as_f64());
    }
    Ok(
        residual_report("doi_defining_identity", worst, scale, T::CHECK_TOL)
            .with_extra("trials", trials as f64)
            .note(&format!("kernel {}", op.kernel)),
    )
}

/// Product, sum and adjoint laws of `phi -> T_phi` on a shared pair `(D0, D1)`.
pub fn homomorphism_check<T: Real>(
    phi1: &Kernel,
    phi2: &Kernel,
    d0: &HermitianOperator<T>,
    d1: &HermitianOperator<T>,
    x: &Matrix<T>,
) -> Result<EstimateReport> {
    let t1 = DoiOperator::new(phi1.clone(), d0.clone(), d1.clone())?;
    let t2 = DoiOperator::new(phi2.clone(), d0.clone(), d1.clone())?;
    let prod = DoiOperator::new(
        Kernel::Product(vec![phi1.clone(), phi2.clone()]),
        d0.clone(),
        d1.clone(),
    )?;
    let sum = DoiOperator::new(
        Kernel::Sum(vec![phi1.clone(), phi2.clone()]),
        d0.clone(),
        d1.clone(),
    )?;
    let adj = DoiOperator::new(
        Kernel::Adjoint(Box::new(phi1.clone())),
        d1.clone(),
        d0.clone(),
    )?;

    let y1 = t1.apply(x)?;
    let y2 = t2.apply(x)?;
    let r_prod = operator_norm(&(&prod.apply(x)? - &t1.apply(&y2)?))?;
    let r_sum = operator_norm(&(&sum.apply(x)? - &(&y1 + &y2)))?;
    let r_adj = operator_norm(&(&adj.apply(&x.adjoint())? - &y1.adjoint()))?;
    let worst = r_prod.max(r_sum).max(r_adj).as_f64();
    let scale =
        1.0 + (t1.schur.max_abs() * (T::one() + t2.schur.max_abs()) * x.frobenius()).as_f64();
    Ok(
        residual_report("doi_homomorphism", worst, scale, T::CHECK_TOL)
            .with_extra("product_residual", r_prod.as_f64())
            .with_extra("sum_residual", r_sum.as_f64())
            .with_extra("adjoint_residual", r_adj.as_f64()),
    )
}

/// `T_{phi(f0, f1)}(D0, D1) = T_phi(f0(D0), f1(D1))`.
pub fn change_of_variables_check<T: Real>(
    phi: &Kernel,
    f0: &ScalarFunction,
    f1: &ScalarFunction,
    d0: &HermitianOperator<T>,
    d1: &HermitianOperator<T>,
    x: &Matrix<T>,
) -> Result<EstimateReport> {
    let substituted = Kernel::Substituted {
        inner: Box::new(phi.clone()),
        left: f0.clone(),
        right: f1.clone(),
    };
    let a = DoiOperator::new(substituted, d0.clone(), d1.clone())?.apply(x)?;
    // Fresh decompositions of f(D): the eigenbasis is chosen independently.
    let e0 = HermitianOperator::new(d0.apply_function(f0)?.into_matrix())?;
    let e1 = HermitianOperator::new(d1.apply_function(f1)?.into_matrix())?;
    let op = DoiOperator::new(phi.clone(), e0, e1)?;
    let b = op.apply(x)?;
    let residual = operator_norm(&(&a - &b))?.as_f64();
    let scale = 1.0 + (op.schur.max_abs() * x.frobenius()).as_f64();
    Ok(residual_report(
        "doi_change_of_variables",
        residual,
        scale,
        T::CHECK_TOL,
    ))
}

/// Largest `|f'|` over the convex hull of both spectra, sampled on 257 points plus the eigenvalues.
fn derivative_sup<T: Real>(fprime: &ScalarFunction, spectra: &[&[T]]) -> Result<T> {
    let all: Vec<T> = spectra.iter().flat_map(|s| s.iter().copied()).collect();
    let lo = all.iter().fold(T::infinity(), |m, &x| m.min(x));
    let hi = all.iter().fold(T::neg_infinity(), |m, &x| m.max(x));
    let mut best = T::zero();
    for k in 0..=256 {
        let t = lo + (hi - lo) * T::of(k as f64 / 256.0);
        best = best.max(fprime.eval(t)?.norm());
    }
    for &t in &all {
        best = best.max(fprime.eval(t)?.norm());
    }
    Ok(best)
}

/// `f(D0) a - a f(D1) = T_{psi_f}(D0, D1)(D0 a - a D1)`, exact in finite dimensions.
///
/// The residual is measured in operator norm against `1 + ||a|| sup|f'|`.
pub fn commutator_transfer_check<T: Real>(
    f: &ScalarFunction,
    fprime: &ScalarFunction,
    d0: &HermitianOperator<T>,
    d1: &HermitianOperator<T>,
    a: &Matrix<T>,
) -> Result<EstimateReport> {
    let lhs =
        &d0.apply_function_complex(f)?.try_mul(a)? - &a.try_mul(&d1.apply_function_complex(f)?)?;
    let diff = &d0.matrix().try_mul(a)? - &a.try_mul(d1.matrix())?;
    let op = DoiOperator::new(Kernel::DividedDifference(f.clone()), d0.clone(), d1.clone())?;
    let rhs = op.apply(&diff)?;
    let residual = operator_norm(&(&lhs - &rhs))?;
    let sup = derivative_sup(fprime, &[d0.spectrum()?, d1.spectrum()?])?;
    let a_norm = operator_norm(a)?;
    let scale = T::one() + a_norm * sup;
    Ok(residual_report(
        "thm3_commutator_transfer",
        residual.as_f64(),
        scale.as_f64(),
        T::CHECK_TOL,
    )
    .with_extra("a_op_norm", a_norm.as_f64())
    .with_extra("sup_fprime", sup.as_f64())
    .note(&format!("f = {f}")))
}

/// Largest observed `||T(x)||_op / ||x||_op` over random `x`; a lower bound
/// for the multiplier norm.
pub fn observed_multiplier_norm<T: Real>(
    op: &DoiOperator<T>,
    trials: usize,
    rng: &mut TrialRng,
) -> Result<f64> {
    let (n, m) = (op.left.dim(), op.right.dim());
    let mut best = 0.0_f64;
    for _ in 0..trials {
        let x: Matrix<T> = rng.gaussian_matrix(n, m).cast();
        let ratio = operator_norm(&op.apply(&x)?)? / operator_norm(&x)?;
        best = best.max(ratio.as_f64());
    }
    Ok(best)
}

/// Re-applies the multiplier with the eigenbasis of every repeated eigenvalue
/// rotated by a random unitary; returns the largest change in operator norm.
pub fn basis_independence_residual(
    kernel: &Kernel,
    d: &HermitianOperator<f64>,
    x: &Matrix<f64>,
    rng: &mut TrialRng,
) -> Result<f64> {
    let dec = d.decomposition()?;
    let n = d.dim();
    let mut rotated = dec.vectors.clone();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && dec.spectrum[end] - dec.spectrum[end - 1] <= f64::DIAG_DELTA {
            end += 1;
        }
        let k = end - start;
        if k > 1 {
            let w = rng.haar_unitary(k);
            let block = Matrix::from_fn(n, k, |i, j| dec.vectors[(i, start + j)]);
            let mixed = block.try_mul(&w)?;
            for i in 0..n {
                for j in 0..k {
                    rotated[(i, start + j)] = mixed[(i, j)];
                }
            }
        }
        start = end;
    }
    let other = HermitianOperator::from_spectrum(dec.spectrum.clone(), rotated);
    let a = DoiOperator::symmetric(kernel.clone(), d.clone())?.apply(x)?;
    let b = DoiOperator::symmetric(kernel.clone(), other)?.apply(x)?;
    operator_norm(&(&a - &b))
}

/// Exact derivative `d/dt f(D0 + tG)` at `t = 0` as `T_{psi_f}(D0, D0)(G)`.
pub fn frechet_derivative<T: Real>(
    f: &ScalarFunction,
    d0: &HermitianOperator<T>,
    g: &Matrix<T>,
) -> Result<Matrix<T>> {
    DoiOperator::symmetric(Kernel::DividedDifference(f.clone()), d0.clone())?.apply(g)
}
