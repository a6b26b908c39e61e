//! The derivative on the circle truncated to `2N + 1` Fourier modes.
//!
//! `(1 + D0^2)^{-1/2}` has singular values `(1 + k^2)^{-1/2}`, each twice:
//! its weak-L1 norm stays bounded in `N` while its trace grows like `2 ln N`.
//! Adding a bounded potential keeps the Lipschitz transform under control.

use doiforge::ensemble::trigonometric_potential;
use doiforge::harness::verify_cor22;
use doiforge::norms::norm_of_values;
use doiforge::{EnsembleSpec, EstimateReport, HermitianOperator, NormSpec, TrialRng};
use serde::Serialize;

use crate::CliError;

/// Potential used by the demo: `V(x) = 0.6 cos x + 0.3 cos 2x`, so `||V|| <= 0.9`.
pub const DEMO_POTENTIAL: [f64; 3] = [0.0, 0.6, 0.3];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodicDemo {
    pub modes: usize,
    pub p: f64,
    /// Weak-Lp norm of `(1 + D0^2)^{-1/2}`.
    pub weak_norm: f64,
    /// Schatten-1 norm of the same operator.
    pub trace_norm: f64,
    /// Weak-Lp norm of `(1 + D^2)^{-1/2}` for the perturbed `D = D0 + V`.
    pub weak_norm_perturbed: f64,
    pub report: EstimateReport,
}

fn resolvent_values(d: &HermitianOperator<f64>) -> Result<Vec<f64>, CliError> {
    let mut s: Vec<f64> = d
        .spectrum()?
        .iter()
        .map(|l| 1.0 / (1.0 + l * l).sqrt())
        .collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

pub fn periodic_demo(modes: usize, p: f64) -> Result<PeriodicDemo, CliError> {
    if modes == 0 {
        return Err(CliError::Config("--N must be at least 1".into()));
    }
    let weak = NormSpec::WeakLp(p);
    weak.validate()
        .map_err(|e| CliError::Config(e.to_string()))?;
    // The model is deterministic; the generator is never drawn from.
    let d0 =
        EnsembleSpec::PeriodicDerivativeModel { modes }.generate(&mut TrialRng::new(0, 0, 0))?;
    let v = trigonometric_potential(modes, &DEMO_POTENTIAL);
    let d = HermitianOperator::new(d0.matrix() + v.matrix())?;
    let s0 = resolvent_values(&d0)?;
    Ok(PeriodicDemo {
        modes,
        p,
        weak_norm: norm_of_values(&s0, weak)?,
        trace_norm: norm_of_values(&s0, NormSpec::Schatten(1.0))?,
        weak_norm_perturbed: norm_of_values(&resolvent_values(&d)?, weak)?,
        report: verify_cor22(&d0, &d, weak)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weak_norm_stays_bounded_while_trace_grows() {
        let small = periodic_demo(5, 1.0).unwrap();
        let large = periodic_demo(50, 1.0).unwrap();
        assert!(large.trace_norm > small.trace_norm + 4.0);
        // j mu_j peaks at 5/sqrt(5) (k = 2) and tends to 2.
        assert!(large.weak_norm <= 5f64.sqrt() + 1e-12);
        assert!((large.weak_norm - small.weak_norm).abs() < 1e-12);
        assert!(large.report.pass);
        assert!(periodic_demo(0, 1.0).is_err());
    }
}
