//! Singular values and the symmetric norms built on them.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::report::{ConstantSource, EstimateReport};
use crate::scalar::Real;
use crate::spectral::{hestenes_singular_values, HermitianOperator};

/// Which symmetric norm is meant.
///
/// Text form: `schatten:P` (`P` may be `inf`), `weak:P`, `kyfan:K`, `op`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum NormSpec {
    Schatten(f64),
    /// Weak `L^{p,infinity}`: `max_k k^{1/p} s_k`. Only a quasi-norm.
    WeakLp(f64),
    KyFan(usize),
    OperatorNorm,
}

impl NormSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Schatten(p) if !(p >= 1.0) => {
                Err(Error::InvalidSpec(format!("schatten p = {p} < 1")))
            }
            Self::WeakLp(p) if !(p >= 1.0 && p.is_finite()) => {
                Err(Error::InvalidSpec(format!("weak p = {p} outside [1, inf)")))
            }
            Self::KyFan(0) => Err(Error::InvalidSpec("ky fan k must be at least 1".into())),
            _ => Ok(()),
        }
    }

    /// True for genuine norms; the weak space only has a quasi-norm.
    pub fn is_norm(&self) -> bool {
        !matches!(self, Self::WeakLp(_))
    }

    /// Norm of the identity in dimension `n`.
    pub fn identity_norm(&self, n: usize) -> f64 {
        let ones = vec![1.0; n];
        norm_of_values(&ones, *self).unwrap_or(f64::NAN)
    }
}

impl fmt::Display for NormSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Schatten(p) if p.is_infinite() => write!(f, "schatten:inf"),
            Self::Schatten(p) => write!(f, "schatten:{p}"),
            Self::WeakLp(p) => write!(f, "weak:{p}"),
            Self::KyFan(k) => write!(f, "kyfan:{k}"),
            Self::OperatorNorm => write!(f, "op"),
        }
    }
}

impl FromStr for NormSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let bad = || Error::InvalidSpec(s.clone());
        let spec = match s.split_once(':') {
            None if s == "op" || s == "operator" => Self::OperatorNorm,
            None => return Err(bad()),
            Some((kind, arg)) => {
                let num = || -> Result<f64> {
                    if arg == "inf" {
                        Ok(f64::INFINITY)
                    } else {
                        arg.parse::<f64>().map_err(|_| bad())
                    }
                };
                match kind {
                    "schatten" | "p" => Self::Schatten(num()?),
                    "weak" => Self::WeakLp(num()?),
                    "kyfan" => Self::KyFan(arg.parse().map_err(|_| bad())?),
                    _ => return Err(bad()),
                }
            }
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl TryFrom<String> for NormSpec {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<NormSpec> for String {
    fn from(n: NormSpec) -> String {
        n.to_string()
    }
}

/// Non-increasing singular values `s_1 >= s_2 >= ... >= s_n >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularValueSequence<T> {
    values: Vec<T>,
}

impl<T: Real> SingularValueSequence<T> {
    /// Sorts and validates arbitrary non-negative values.
    pub fn from_values(mut values: Vec<T>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite() || *v < T::zero()) {
            return Err(Error::InvalidParameter(
                "singular values must be finite and non-negative".into(),
            ));
        }
        values.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
        Ok(Self { values })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `mu_t` as the right-continuous step function `s_{floor(t)+1}`.
    pub fn mu(&self, t: f64) -> T {
        let k = t.max(0.0).floor() as usize;
        self.values.get(k).copied().unwrap_or_else(T::zero)
    }

    /// Partial sums `sum_{j<=k} s_j` for `k = 1..n`.
    pub fn partial_sums(&self) -> Vec<T> {
        self.values
            .iter()
            .scan(T::zero(), |acc, &s| {
                *acc = *acc + s;
                Some(*acc)
            })
            .collect()
    }

    pub fn norm(&self, spec: NormSpec) -> Result<T> {
        norm_of_values(&self.values, spec)
    }
}

pub fn singular_values<T: Real>(t: &Matrix<T>) -> Result<SingularValueSequence<T>> {
    Ok(SingularValueSequence {
        values: hestenes_singular_values(t)?,
    })
}

/// Symmetric norm of a non-increasing sequence.
pub fn norm_of_values<T: Real>(s: &[T], spec: NormSpec) -> Result<T> {
    spec.validate()?;
    let top = s.first().copied().unwrap_or_else(T::zero);
    Ok(match spec {
        NormSpec::OperatorNorm => top,
        NormSpec::Schatten(p) if p.is_infinite() => top,
        NormSpec::Schatten(p) => {
            if top == T::zero() {
                return Ok(T::zero());
            }
            // Scaled by s_1 so large p cannot overflow.
            let p = T::of(p);
            let sum: T = s.iter().map(|&x| (x / top).powf(p)).sum();
            top * sum.powf(p.recip())
        }
        NormSpec::WeakLp(p) => {
            let inv = T::of(p.recip());
            s.iter()
                .enumerate()
                .map(|(k, &x)| T::of((k + 1) as f64).powf(inv) * x)
                .fold(T::zero(), T::max)
        }
        NormSpec::KyFan(k) => {
            if k > s.len() {
                return Err(Error::InvalidSpec(format!(
                    "ky fan k = {k} exceeds dimension {}",
                    s.len()
                )));
            }
            s.iter().take(k).copied().sum()
        }
    })
}

pub fn norm_eval<T: Real>(t: &Matrix<T>, spec: NormSpec) -> Result<T> {
    spec.validate()?;
    singular_values(t)?.norm(spec)
}

pub fn operator_norm<T: Real>(t: &Matrix<T>) -> Result<T> {
    norm_eval(t, NormSpec::OperatorNorm)
}

/// Per-`k` outcome of a submajorization test `G <<  F`.
#[derive(Debug, Clone, PartialEq)]
pub struct Submajorization {
    pub holds: bool,
    /// `sum_{j<=k} s_j(F) - sum_{j<=k} s_j(G)`.
    pub margins: Vec<f64>,
    /// First `k` (1-based) where the partial sum of `G` exceeds that of `F`.
    pub first_violation: Option<usize>,
}

pub const SUBMAJORIZATION_TOL: f64 = 1e-10;

/// Checks `G` is submajorized by `F` at every integer `t`.
///
/// Partial sums are piecewise linear between integers, so integer checks are exhaustive.
pub fn submajorization_check<T: Real>(f: &Matrix<T>, g: &Matrix<T>) -> Result<Submajorization> {
    f.check_same(g)?;
    let sf = singular_values(f)?.partial_sums();
    let sg = singular_values(g)?.partial_sums();
    let margins: Vec<f64> = sf
        .iter()
        .zip(&sg)
        .map(|(a, b)| (*a - *b).as_f64())
        .collect();
    let first_violation = margins
        .iter()
        .position(|&m| m < -SUBMAJORIZATION_TOL)
        .map(|k| k + 1);
    Ok(Submajorization {
        holds: first_violation.is_none(),
        margins,
        first_violation,
    })
}

/// `|T|^2 = T* T`.
pub fn abs_squared<T: Real>(t: &Matrix<T>) -> Result<Matrix<T>> {
    t.adjoint().try_mul(t)
}

/// Norm in the 2-convexification, `|| |T|^2 ||_E^{1/2}`.
pub fn two_convex_norm<T: Real>(t: &Matrix<T>, spec: NormSpec) -> Result<T> {
    spec.validate()?;
    let s: Vec<T> = singular_values(t)?.values.iter().map(|&x| x * x).collect();
    Ok(norm_of_values(&s, spec)?.sqrt())
}

fn psd_power<T: Real>(b: &HermitianOperator<T>, exponent: T) -> Result<HermitianOperator<T>> {
    let floor = -T::of(T::CHECK_TOL) * (T::one() + b.operator_norm()?);
    let min = b.spectrum()?.first().copied().unwrap_or_else(T::zero);
    if min < floor {
        return Err(Error::NonPositiveFactor(min.as_f64()));
    }
    b.map_spectrum(|l| {
        let l = l.max(T::zero());
        Ok(if exponent == T::zero() {
            T::one()
        } else {
            l.powf(exponent)
        })
    })
}

/// `||B0^{1-theta} A B1^theta||_E <= ||B0||_E^{1-theta} ||A|| ||B1||_E^theta`.
pub fn interpolation_bound_check<T: Real>(
    b0: &HermitianOperator<T>,
    a: &Matrix<T>,
    b1: &HermitianOperator<T>,
    theta: f64,
    spec: NormSpec,
) -> Result<EstimateReport> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::InvalidParameter(format!(
            "theta = {theta} outside [0, 1]"
        )));
    }
    let th = T::of(theta);
    let left = psd_power(b0, T::one() - th)?;
    let right = psd_power(b1, th)?;
    let prod = left.matrix().try_mul(a)?.try_mul(right.matrix())?;
    let lhs = norm_eval(&prod, spec)?.as_f64();
    let nb0 = norm_eval(b0.matrix(), spec)?.as_f64();
    let nb1 = norm_eval(b1.matrix(), spec)?.as_f64();
    let na = operator_norm(a)?.as_f64();
    let rhs = nb0.powf(1.0 - theta) * na * nb1.powf(theta);
    let mut report = EstimateReport::new("interpolation", lhs, rhs, 1.0, ConstantSource::Exact);
    report.params.theta = Some(theta);
    report.params.n = Some(a.rows());
    report.params.norm = Some(spec.to_string());
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(d: &[f64]) -> Matrix<f64> {
        Matrix::from_real_diag(d)
    }

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["schatten:2", "schatten:inf", "weak:1", "kyfan:3", "op"] {
            let spec: NormSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
        }
        assert!("schatten:0.5".parse::<NormSpec>().is_err());
        assert!("kyfan:0".parse::<NormSpec>().is_err());
        assert!("frobenius".parse::<NormSpec>().is_err());
    }

    #[test]
    fn small_diagonal_values() {
        let s = singular_values(&diag(&[3.0, -1.0, 2.0])).unwrap();
        assert_eq!(s.values(), &[3.0, 2.0, 1.0]);
        let id = singular_values(&Matrix::<f64>::identity(4)).unwrap();
        assert_eq!(id.values(), &[1.0; 4]);
        assert!(
            (norm_eval(&diag(&[3.0, 4.0]), NormSpec::Schatten(2.0)).unwrap() - 5.0).abs() < 1e-14
        );
        let w = diag(&[1.0, 0.5f64.sqrt(), (1.0f64 / 3.0).sqrt()]);
        assert!((norm_eval(&w, NormSpec::WeakLp(2.0)).unwrap() - 1.0).abs() < 1e-14);
        assert!(
            (norm_eval(&diag(&[1.0, 2.0, 3.0]), NormSpec::KyFan(2)).unwrap() - 5.0).abs() < 1e-14
        );
        assert!(norm_eval(&diag(&[1.0, 2.0]), NormSpec::KyFan(3)).is_err());
    }

    #[test]
    fn mu_is_a_right_continuous_step() {
        let s = singular_values(&diag(&[3.0, 1.0])).unwrap();
        assert_eq!(s.mu(0.0), 3.0);
        assert_eq!(s.mu(0.99), 3.0);
        assert_eq!(s.mu(1.0), 1.0);
        assert_eq!(s.mu(2.0), 0.0);
    }

    #[test]
    fn submajorization_examples() {
        let f = diag(&[2.0, 0.0]);
        let g = diag(&[1.0, 1.0]);
        let r = submajorization_check(&f, &g).unwrap();
        assert!(r.holds);
        assert_eq!(r.margins, vec![1.0, 0.0]);
        let r = submajorization_check(&g, &f).unwrap();
        assert!(!r.holds);
        assert_eq!(r.first_violation, Some(1));
        let same = submajorization_check(&f, &f).unwrap();
        assert!(same.holds && same.margins.iter().all(|&m| m == 0.0));
    }

    #[test]
    fn two_convex_examples() {
        assert!(
            (two_convex_norm(&diag(&[2.0]), NormSpec::Schatten(1.0)).unwrap() - 2.0).abs() < 1e-14
        );
        let v = two_convex_norm(&diag(&[1.0, 1.0]), NormSpec::Schatten(1.0)).unwrap();
        assert!((v - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn interpolation_boundary_cases() {
        let b0 = HermitianOperator::from_real_diag(&[2.0, 0.5]);
        let b1 = HermitianOperator::from_real_diag(&[1.0, 3.0]);
        let a = Matrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.5]]);
        let r = interpolation_bound_check(&b0, &a, &b1, 0.0, NormSpec::Schatten(1.0)).unwrap();
        assert!(r.pass);
        let id = HermitianOperator::from_real_diag(&[1.0, 1.0]);
        let r = interpolation_bound_check(&id, &a, &id, 0.5, NormSpec::Schatten(3.0)).unwrap();
        assert!(r.pass);
        let neg = HermitianOperator::from_real_diag(&[-1.0, 1.0]);
        assert!(matches!(
            interpolation_bound_check(&neg, &a, &id, 0.5, NormSpec::Schatten(1.0)),
            Err(Error::NonPositiveFactor(_))
        ));
    }
}
