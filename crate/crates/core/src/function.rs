//! Scalar functions fed through the spectral calculus.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{real, Real, C};

/// Piecewise-linear function through sorted sample points.
#[derive(Debug, Clone, PartialEq)]
pub struct Tabulated {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl Tabulated {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() || xs.len() < 2 {
            return Err(Error::InvalidParameter(
                "tabulated function needs at least two (x, y) pairs of equal length".into(),
            ));
        }
        if xs.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidParameter(
                "tabulated abscissae must be strictly increasing".into(),
            ));
        }
        if ys.iter().chain(&xs).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "tabulated values must be finite".into(),
            ));
        }
        Ok(Self { xs, ys })
    }

    fn segment(&self, t: f64) -> Option<usize> {
        let (first, last) = (self.xs[0], *self.xs.last().unwrap());
        if !(first..=last).contains(&t) {
            return None;
        }
        let k = self.xs.partition_point(|&x| x <= t);
        Some(k.clamp(1, self.xs.len() - 1) - 1)
    }

    fn eval(&self, t: f64) -> Option<f64> {
        let k = self.segment(t)?;
        let w = (t - self.xs[k]) / (self.xs[k + 1] - self.xs[k]);
        Some(self.ys[k] + w * (self.ys[k + 1] - self.ys[k]))
    }

    fn slope(&self, t: f64) -> Option<f64> {
        let k = self.segment(t)?;
        Some((self.ys[k + 1] - self.ys[k]) / (self.xs[k + 1] - self.xs[k]))
    }
}

/// A scalar function `R -> C` tagged with its family.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarFunction {
    /// `t (1 + t^2)^{-1/2}`, the bounded transform.
    MainF,
    /// `t (alpha^2 + t^2)^{-1/2}`.
    FAlpha(f64),
    /// `(alpha^2 + t^2)^{-1/2}`.
    HAlpha(f64),
    /// `t^{1-r}` on `t > 0`.
    PowerOneMinusR(f64),
    /// `(1 + t^2)^{is/2}`; unimodular, so the result of the calculus is unitary.
    ImagPower(f64),
    /// `(1 + t^2)^{1/4}`.
    QuarterPower,
    /// `sgn t`, undefined at 0.
    Sign,
    /// `ln t` on `t > 0`.
    Log,
    /// `t^p` on `t > 0`.
    Power(f64),
    /// Coefficients in ascending degree.
    Polynomial(Vec<f64>),
    Custom(Arc<Tabulated>),
    /// Derivative of the boxed function, evaluated through its analytic derivative.
    Derivative(Box<ScalarFunction>),
}

impl fmt::Display for ScalarFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::MainF => write!(f, "t/sqrt(1+t^2)"),
            Self::FAlpha(a) => write!(f, "t/sqrt({a}^2+t^2)"),
            Self::HAlpha(a) => write!(f, "1/sqrt({a}^2+t^2)"),
            Self::PowerOneMinusR(r) => write!(f, "t^(1-{r})"),
            Self::ImagPower(s) => write!(f, "(1+t^2)^(i{s}/2)"),
            Self::QuarterPower => write!(f, "(1+t^2)^(1/4)"),
            Self::Sign => write!(f, "sgn t"),
            Self::Log => write!(f, "ln t"),
            Self::Power(p) => write!(f, "t^{p}"),
            Self::Polynomial(c) => write!(f, "poly{c:?}"),
            Self::Custom(_) => write!(f, "tabulated"),
            Self::Derivative(g) => write!(f, "d/dt[{g}]"),
        }
    }
}

fn domain(name: &ScalarFunction, at: f64) -> Error {
    Error::DomainError {
        function: name.to_string(),
        at,
    }
}

impl ScalarFunction {
    pub fn main_f() -> Self {
        Self::MainF
    }

    pub fn f_alpha(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self::FAlpha(alpha))
    }

    pub fn h_alpha(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self::HAlpha(alpha))
    }

    pub fn derivative(&self) -> Self {
        Self::Derivative(Box::new(self.clone()))
    }

    /// True when the function is real on its whole domain.
    pub fn is_real(&self) -> bool {
        !matches!(self, Self::ImagPower(_))
    }

    pub fn eval<T: Real>(&self, t: T) -> Result<C<T>> {
        let one = T::one();
        let v = match self {
            Self::MainF => t / (one + t * t).sqrt(),
            Self::FAlpha(a) => {
                let a = T::of(*a);
                t / (a * a + t * t).sqrt()
            }
            Self::HAlpha(a) => {
                let a = T::of(*a);
                one / (a * a + t * t).sqrt()
            }
            Self::PowerOneMinusR(r) => {
                if !(t > T::zero()) {
                    return Err(domain(self, t.as_f64()));
                }
                t.powf(one - T::of(*r))
            }
            Self::ImagPower(s) => {
                let phase = T::of(*s) * (t * t).ln_1p() / T::of(2.0);
                return Ok(Complex::new(phase.cos(), phase.sin()));
            }
            Self::QuarterPower => (one + t * t).powf(T::of(0.25)),
            Self::Sign => {
                if t == T::zero() || t.is_nan() {
                    return Err(domain(self, t.as_f64()));
                }
                t.signum()
            }
            Self::Log => {
                if !(t > T::zero()) {
                    return Err(domain(self, t.as_f64()));
                }
                t.ln()
            }
            Self::Power(p) => {
                if !(t > T::zero()) {
                    return Err(domain(self, t.as_f64()));
                }
                t.powf(T::of(*p))
            }
            Self::Polynomial(c) => c.iter().rev().fold(T::zero(), |acc, &k| acc * t + T::of(k)),
            Self::Custom(tab) => T::of(
                tab.eval(t.as_f64())
                    .ok_or_else(|| domain(self, t.as_f64()))?,
            ),
            Self::Derivative(g) => return g.derivative_at(t),
        };
        if !v.is_finite() {
            return Err(domain(self, t.as_f64()));
        }
        Ok(real(v))
    }

    pub fn eval_real<T: Real>(&self, t: T) -> Result<T> {
        if !self.is_real() {
            return Err(Error::ComplexValued);
        }
        Ok(self.eval(t)?.re)
    }

    /// Analytic derivative where available, a five-point stencil otherwise.
    pub fn derivative_at<T: Real>(&self, t: T) -> Result<C<T>> {
        let one = T::one();
        let three_halves = T::of(1.5);
        let v = match self {
            Self::MainF => (one + t * t).powf(-three_halves),
            Self::FAlpha(a) => {
                let a2 = T::of(a * a);
                a2 * (a2 + t * t).powf(-three_halves)
            }
            Self::HAlpha(a) => -t * (T::of(a * a) + t * t).powf(-three_halves),
            Self::PowerOneMinusR(r) => {
                if !(t > T::zero()) {
                    return Err(domain(self, t.as_f64()));
                }
                T::of(1.0 - r) * t.powf(-T::of(*r))
            }
            Self::ImagPower(s) => {
                let w = self.eval(t)?;
                let k = T::of(*s) * t / (one + t * t);
                return Ok(w * Complex::new(T::zero(), k));
            }
            Self::QuarterPower => t / T::of(2.0) * (one + t * t).powf(-T::of(0.75)),
            Self::Sign => {
                if t == T::zero() {
                    return Err(domain(self, 0.0));
                }
                T::zero()
            }
            Self::Log => {
                if !(t > T::zero()) {
                    return Err(domain(self, t.as_f64()));
                }
                one / t
            }
            Self::Power(p) => {
                if !(t > T::zero()) {
                    return Err(domain(self, t.as_f64()));
                }
                T::of(*p) * t.powf(T::of(*p) - one)
            }
            Self::Polynomial(c) => c
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(T::zero(), |acc, (k, &ck)| acc * t + T::of(ck * k as f64)),
            Self::Custom(tab) => T::of(
                tab.slope(t.as_f64())
                    .ok_or_else(|| domain(self, t.as_f64()))?,
            ),
            Self::Derivative(_) => return self.stencil_derivative(t),
        };
        if !v.is_finite() {
            return Err(domain(self, t.as_f64()));
        }
        Ok(real(v))
    }

    fn stencil_derivative<T: Real>(&self, t: T) -> Result<C<T>> {
        let h = T::of(1e-3) * (T::one() + t.abs());
        let two = T::of(2.0);
        let d = (self.eval(t - two * h)? - self.eval(t + two * h)?
            + (self.eval(t + h)? - self.eval(t - h)?) * T::of(8.0))
            / (T::of(12.0) * h);
        Ok(d)
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveAlpha(alpha))
    }
}
