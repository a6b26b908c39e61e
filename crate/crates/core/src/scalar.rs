//! Scalar abstraction shared by the matrix, spectral and norm layers.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real floating point type the linear algebra is generic over.
///
/// The associated constants carry the tolerances of the numerical core; they
/// are scaled to the precision of the type so that `f32` runs use
/// proportionally looser checks.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + LowerExp
    + Default
    + Sum
    + Send
    + Sync
    + 'static
{
    /// Relative max-entry deviation accepted from a Hermitian input.
    const HERMITICITY_TOL: f64;
    /// Relative off-diagonal Frobenius target for the Jacobi sweeps.
    const JACOBI_TARGET: f64;
    /// Relative reconstruction tolerance `|U diag U* - A| <= tol (1 + |A|)`.
    const RECONSTRUCTION_TOL: f64;
    /// Additive slack used by inequality and identity checks.
    const CHECK_TOL: f64;
    /// Relative spacing below which a divided difference switches to `f'`.
    const DIAG_DELTA: f64;

    /// Lossless-enough conversion from an `f64` literal or parameter.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 is representable")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    const HERMITICITY_TOL: f64 = 1e-12;
    const JACOBI_TARGET: f64 = 1e-13;
    const RECONSTRUCTION_TOL: f64 = 1e-9;
    const CHECK_TOL: f64 = 1e-9;
    const DIAG_DELTA: f64 = 1e-7;
}

impl Real for f32 {
    const HERMITICITY_TOL: f64 = 1e-5;
    const JACOBI_TARGET: f64 = 5e-6;
    const RECONSTRUCTION_TOL: f64 = 1e-4;
    const CHECK_TOL: f64 = 1e-3;
    const DIAG_DELTA: f64 = 1e-3;
}

/// Complex scalar over a [`Real`] type.
pub type C<T> = Complex<T>;

pub(crate) fn real<T: Real>(x: T) -> C<T> {
    Complex::new(x, T::zero())
}
