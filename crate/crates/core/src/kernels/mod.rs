//! Two-variable kernels `phi(lambda, mu)` and their explicit factorizations.

mod factorization;
pub mod profile;

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::function::ScalarFunction;
use crate::scalar::{real, Real, C};

pub use factorization::{factorization_residual, FactorizationKind, FactorizationResidual};
pub use profile::{
    chi0, chi1, fourier_profile, synthesize_from_profile, FourierProfile, GFamily, GridConfig,
};

/// `(f(lambda) - f(mu))/(lambda - mu)`, or `f'` at the midpoint when the
/// points are closer than `DIAG_DELTA (1 + max(|lambda|, |mu|))`.
pub fn divided_difference<T: Real>(
    f: &ScalarFunction,
    fprime: &ScalarFunction,
    lambda: T,
    mu: T,
) -> Result<C<T>> {
    let scale = T::one() + lambda.abs().max(mu.abs());
    if (lambda - mu).abs() > T::of(T::DIAG_DELTA) * scale {
        Ok((f.eval(lambda)? - f.eval(mu)?) / (lambda - mu))
    } else {
        fprime.eval((lambda + mu) / T::of(2.0))
    }
}

/// Which piece of the weak-`L^p` split of the divided difference of `t^{1-r}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitPart {
    /// `mu^{-r} chi0(t) (1 - rho^{1-r})/(1 - rho)` with `rho = lambda/mu`, `t = ln rho`.
    Near,
    /// `chi1(t) lambda^{1/2-r} mu^{-1/2}/(rho^{1/2} - rho^{-1/2})`.
    FarLeft,
    /// `-chi1(t) lambda^{-1/2} mu^{1/2-r}/(rho^{1/2} - rho^{-1/2})`.
    FarRight,
    Full,
}

#[derive(Debug, Clone)]
pub enum Kernel {
    Constant(f64),
    /// `alpha(lambda)`.
    Left(ScalarFunction),
    /// `beta(mu)`.
    Right(ScalarFunction),
    DividedDifference(ScalarFunction),
    /// `1/((alpha^2+lambda^2)^{1/2} + (alpha^2+mu^2)^{1/2})`.
    PsiPrimeAlpha(f64),
    /// `1 + (alpha^2 - lambda mu)/((alpha^2+lambda^2)^{1/2}(alpha^2+mu^2)^{1/2})`.
    PsiAlphaFactor(f64),
    /// `1/(lambda + mu)` on positive spectra.
    PsiZero,
    /// `1/(rho^theta + rho^{theta-1})`, `rho = lambda/mu`.
    PsiTheta(f64),
    /// `(lambda + mu)/((alpha^2+lambda^2)^{1/2}(alpha^2+mu^2)^{1/2})`.
    PsiHAlphaFactor(f64),
    /// `(1+lambda^2)^{1/4}(1+mu^2)^{1/4}/((1+lambda^2)^{1/2} + (1+mu^2)^{1/2})`.
    PhiPrime,
    /// Frequency-truncated `PhiPrime`: its Fourier integral over `|s| <= cutoff`.
    PhiDoublePrime {
        profile: Arc<FourierProfile>,
        cutoff: f64,
    },
    WeakLpSplit {
        r: f64,
        part: SplitPart,
    },
    /// `g(ln(lambda/mu))` on positive spectra.
    Translation(GFamily),
    /// `inner(f0(lambda), f1(mu))`.
    Substituted {
        inner: Box<Kernel>,
        left: ScalarFunction,
        right: ScalarFunction,
    },
    /// `conj(inner(mu, lambda))`; the kernel of the adjoint map.
    Adjoint(Box<Kernel>),
    Product(Vec<Kernel>),
    Sum(Vec<Kernel>),
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant(c) => write!(f, "const({c})"),
            Self::Left(g) => write!(f, "left[{g}]"),
            Self::Right(g) => write!(f, "right[{g}]"),
            Self::DividedDifference(g) => write!(f, "divdiff[{g}]"),
            Self::PsiPrimeAlpha(a) => write!(f, "psi_prime_alpha({a})"),
            Self::PsiAlphaFactor(a) => write!(f, "psi_alpha_factor({a})"),
            Self::PsiZero => write!(f, "psi_zero"),
            Self::PsiTheta(t) => write!(f, "psi_theta({t})"),
            Self::PsiHAlphaFactor(a) => write!(f, "psi_h_alpha_factor({a})"),
            Self::PhiPrime => write!(f, "phi_prime"),
            Self::PhiDoublePrime { cutoff, .. } => write!(f, "phi_double_prime({cutoff})"),
            Self::WeakLpSplit { r, part } => write!(f, "weak_split({r}, {part:?})"),
            Self::Translation(g) => write!(f, "translation[{g}]"),
            Self::Substituted { inner, left, right } => write!(f, "{inner}∘({left}, {right})"),
            Self::Adjoint(k) => write!(f, "adjoint[{k}]"),
            Self::Product(ks) => write_list(f, "*", ks),
            Self::Sum(ks) => write_list(f, "+", ks),
        }
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, op: &str, ks: &[Kernel]) -> fmt::Result {
    write!(f, "(")?;
    for (i, k) in ks.iter().enumerate() {
        if i > 0 {
            write!(f, " {op} ")?;
        }
        write!(f, "{k}")?;
    }
    write!(f, ")")
}

fn positive<T: Real>(name: &str, x: T) -> Result<T> {
    if x > T::zero() {
        Ok(x)
    } else {
        Err(Error::DomainError {
            function: name.to_string(),
            at: x.as_f64(),
        })
    }
}

impl Kernel {
    pub fn divided_difference(f: ScalarFunction) -> Self {
        Self::DividedDifference(f)
    }

    /// True when `phi(lambda, mu) = phi(mu, lambda)` by construction.
    pub fn is_symmetric(&self) -> bool {
        match self {
            Self::Constant(_)
            | Self::PsiPrimeAlpha(_)
            | Self::PsiAlphaFactor(_)
            | Self::PsiZero
            | Self::PsiHAlphaFactor(_)
            | Self::PhiPrime => true,
            Self::DividedDifference(f) => f.is_real(),
            Self::PsiTheta(t) => *t == 0.5,
            Self::Translation(GFamily::SechHalf) => true,
            Self::Product(ks) | Self::Sum(ks) => ks.iter().all(Kernel::is_symmetric),
            _ => false,
        }
    }

    pub fn eval<T: Real>(&self, lambda: T, mu: T) -> Result<C<T>> {
        let one = T::one();
        Ok(match self {
            Self::Constant(c) => real(T::of(*c)),
            Self::Left(f) => f.eval(lambda)?,
            Self::Right(f) => f.eval(mu)?,
            Self::DividedDifference(f) => divided_difference(f, &f.derivative(), lambda, mu)?,
            Self::PsiPrimeAlpha(a) => {
                let a = T::of(*a);
                real(one / (a.hypot(lambda) + a.hypot(mu)))
            }
            Self::PsiAlphaFactor(a) => {
                let a = T::of(*a);
                real(one + (a * a - lambda * mu) / (a.hypot(lambda) * a.hypot(mu)))
            }
            Self::PsiZero => {
                positive("psi_zero", lambda)?;
                positive("psi_zero", mu)?;
                real(one / (lambda + mu))
            }
            Self::PsiTheta(theta) => {
                let rho = positive("psi_theta", lambda)? / positive("psi_theta", mu)?;
                let th = T::of(*theta);
                real(one / (rho.powf(th) + rho.powf(th - one)))
            }
            Self::PsiHAlphaFactor(a) => {
                let a = T::of(*a);
                real((lambda + mu) / (a.hypot(lambda) * a.hypot(mu)))
            }
            Self::PhiPrime => {
                let (dl, dm) = (one.hypot(lambda), one.hypot(mu));
                real((dl * dm).sqrt() / (dl + dm))
            }
            Self::PhiDoublePrime { profile, cutoff } => {
                let x = one.hypot(lambda).ln() - one.hypot(mu).ln();
                let z = profile.partial_inverse(x.as_f64(), *cutoff);
                Complex::new(T::of(z.re), T::of(z.im))
            }
            Self::WeakLpSplit { r, part } => {
                let l = positive("weak_split", lambda)?.as_f64();
                let m = positive("weak_split", mu)?.as_f64();
                real(T::of(weak_split(*r, *part, l, m)))
            }
            Self::Translation(g) => {
                let l = positive("translation", lambda)?;
                let m = positive("translation", mu)?;
                real(T::of(g.g((l.ln() - m.ln()).as_f64())))
            }
            Self::Substituted { inner, left, right } => {
                inner.eval(left.eval_real(lambda)?, right.eval_real(mu)?)?
            }
            Self::Adjoint(k) => k.eval(mu, lambda)?.conj(),
            Self::Product(ks) => {
                let mut acc = C::one();
                for k in ks {
                    acc = acc * k.eval(lambda, mu)?;
                }
                acc
            }
            Self::Sum(ks) => {
                let mut acc = C::zero();
                for k in ks {
                    acc = acc + k.eval(lambda, mu)?;
                }
                acc
            }
        })
    }
}

fn weak_split(r: f64, part: SplitPart, l: f64, m: f64) -> f64 {
    let t = (l / m).ln();
    let near = || m.powf(-r) * GFamily::WeakLpChi0 { r }.g(t);
    let g1 = GFamily::WeakLpChi1.g(t);
    let far_left = || g1 * l.powf(0.5 - r) * m.powf(-0.5);
    let far_right = || -g1 * l.powf(-0.5) * m.powf(0.5 - r);
    match part {
        SplitPart::Near => near(),
        SplitPart::FarLeft => far_left(),
        SplitPart::FarRight => far_right(),
        SplitPart::Full => near() + far_left() + far_right(),
    }
}
