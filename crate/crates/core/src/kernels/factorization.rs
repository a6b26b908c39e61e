//! Pointwise checks of the kernel factorizations behind the estimates.

use crate::error::{Error, Result};
use crate::function::ScalarFunction;

use super::{divided_difference, GFamily, Kernel, SplitPart};

/// A factorization identity `lhs(lambda, mu) = rhs(lambda, mu)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FactorizationKind {
    /// Divided difference of `t/(alpha^2+t^2)^{1/2}` equals
    /// `psi'_alpha (1 + (alpha^2 - lambda mu)/(Delta_lambda Delta_mu))`; on `[-5, 5]^2`.
    AlphaCommutatorSplit { alpha: f64 },
    /// `(lambda mu)^{1/2}/(lambda + mu) = 1/(rho^{1/2} + rho^{-1/2})`; on `(0, 10]^2`.
    SqrtRatioSplit,
    /// Divided difference of `(alpha^2+t^2)^{-1/2}` equals
    /// `-(lambda+mu)/(Delta_lambda Delta_mu) psi'_alpha`; on `[-5, 5]^2`.
    InverseSplit { alpha: f64 },
    /// Divided difference of `t^{1-r}` equals its smooth near/far split; on
    /// `lambda/mu` in `[e^-3, e^3]`, `mu` in `[0.2, 5]`.
    PowerSplit { r: f64 },
}

impl FactorizationKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::AlphaCommutatorSplit { .. } => "alpha_commutator_split",
            Self::SqrtRatioSplit => "sqrt_ratio_split",
            Self::InverseSplit { .. } => "inverse_split",
            Self::PowerSplit { .. } => "power_split",
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Self::AlphaCommutatorSplit { alpha } | Self::InverseSplit { alpha }
                if !(alpha > 0.0) =>
            {
                Err(Error::InvalidParameter(format!(
                    "alpha = {alpha} must be positive"
                )))
            }
            Self::PowerSplit { r } if !(r > 1.0) => {
                Err(Error::InvalidParameter(format!("r = {r} must exceed 1")))
            }
            _ => Ok(()),
        }
    }

    fn sides(&self, a: f64, b: f64) -> Result<(f64, f64)> {
        Ok(match *self {
            Self::AlphaCommutatorSplit { alpha } => {
                let f = ScalarFunction::FAlpha(alpha);
                let lhs = divided_difference(&f, &f.derivative(), a, b)?.re;
                let rhs = Kernel::PsiPrimeAlpha(alpha).eval(a, b)?.re
                    * Kernel::PsiAlphaFactor(alpha).eval(a, b)?.re;
                (lhs, rhs)
            }
            Self::SqrtRatioSplit => {
                let lhs = Kernel::PsiZero.eval(a, b)?.re * (a * b).sqrt();
                let rhs = GFamily::SechHalf.g((a / b).ln());
                (lhs, rhs)
            }
            Self::InverseSplit { alpha } => {
                let f = ScalarFunction::HAlpha(alpha);
                let lhs = divided_difference(&f, &f.derivative(), a, b)?.re;
                let rhs = -Kernel::PsiHAlphaFactor(alpha).eval(a, b)?.re
                    * Kernel::PsiPrimeAlpha(alpha).eval(a, b)?.re;
                (lhs, rhs)
            }
            Self::PowerSplit { r } => {
                // (a, b) arrive as (ln rho, mu).
                let (mu, lambda) = (b, b * a.exp());
                let f = ScalarFunction::PowerOneMinusR(r);
                let lhs = divided_difference(&f, &f.derivative(), lambda, mu)?.re;
                let rhs = Kernel::WeakLpSplit {
                    r,
                    part: SplitPart::Full,
                }
                .eval(lambda, mu)?
                .re;
                (lhs, rhs)
            }
        })
    }

    /// Sample axes; the two axes never share a point, so `lambda != mu` on the rectangle.
    fn axes(&self, n: usize) -> (Vec<f64>, Vec<f64>) {
        let cells = |lo: f64, hi: f64| -> Vec<f64> {
            (0..n)
                .map(|i| lo + (hi - lo) * (i as f64 + 0.5) / n as f64)
                .collect()
        };
        let nodes = |lo: f64, hi: f64| -> Vec<f64> {
            (0..n)
                .map(|j| lo + (hi - lo) * j as f64 / (n - 1) as f64)
                .collect()
        };
        match self {
            Self::AlphaCommutatorSplit { .. } | Self::InverseSplit { .. } => {
                (cells(-5.0, 5.0), nodes(-5.0, 5.0))
            }
            Self::SqrtRatioSplit => (cells(0.0, 10.0), nodes(0.05, 10.0)),
            Self::PowerSplit { .. } => {
                let mus = nodes(0.2f64.ln(), 5f64.ln())
                    .into_iter()
                    .map(f64::exp)
                    .collect();
                (cells(-3.0, 3.0), mus)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FactorizationResidual {
    pub kind: &'static str,
    pub points: usize,
    pub max_residual: f64,
    pub max_lhs: f64,
    /// `max_residual / (1 + max_lhs)`.
    pub relative: f64,
}

impl FactorizationResidual {
    pub fn within(&self, tol: f64) -> bool {
        self.relative <= tol
    }
}

/// Evaluates both sides of the identity on an `n x n` rectangle sample.
pub fn factorization_residual(kind: FactorizationKind, n: usize) -> Result<FactorizationResidual> {
    kind.validate()?;
    if n < 2 {
        return Err(Error::InvalidParameter(
            "grid needs at least 2 points per axis".into(),
        ));
    }
    let (xs, ys) = kind.axes(n);
    let mut max_residual: f64 = 0.0;
    let mut max_lhs: f64 = 0.0;
    for &a in &xs {
        for &b in &ys {
            let (lhs, rhs) = kind.sides(a, b)?;
            max_residual = max_residual.max((lhs - rhs).abs());
            max_lhs = max_lhs.max(lhs.abs());
        }
    }
    Ok(FactorizationResidual {
        kind: kind.name(),
        points: xs.len() * ys.len(),
        max_residual,
        max_lhs,
        relative: max_residual / (1.0 + max_lhs),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identities_hold_on_small_grids() {
        for kind in [
            FactorizationKind::AlphaCommutatorSplit { alpha: 1.0 },
            FactorizationKind::AlphaCommutatorSplit { alpha: 0.3 },
            FactorizationKind::SqrtRatioSplit,
            FactorizationKind::InverseSplit { alpha: 2.0 },
            FactorizationKind::PowerSplit { r: 1.5 },
        ] {
            let r = factorization_residual(kind, 40).unwrap();
            assert!(r.within(1e-10), "{kind:?}: {r:?}");
        }
    }

    #[test]
    fn sign_error_would_be_caught() {
        // Dropping the minus sign in the inverse split must not pass.
        let (lhs, rhs) = FactorizationKind::InverseSplit { alpha: 1.0 }
            .sides(0.5, 1.5)
            .unwrap();
        assert!((lhs + rhs).abs() > 1e-3 && (lhs - rhs).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(factorization_residual(FactorizationKind::PowerSplit { r: 1.0 }, 10).is_err());
        assert!(
            factorization_residual(FactorizationKind::InverseSplit { alpha: 0.0 }, 10).is_err()
        );
    }
}
