//! Commutator and Lipschitz estimates for `f_alpha(D) = D (alpha^2 + D^2)^{-1/2}`
//! and for `(alpha^2 + D^2)^{-1/2}`.
//!
//! Constants are proof-chain products: a three-term split of the divided
//! difference of `f_alpha` (two terms for `h_alpha`), the interpolation bound
//! for `B0^{1-theta} X B1^theta`, and the multiplier bound of the
//! translation-form kernel `psi_theta`.

use crate::ensemble::MIN_ABS_EIGENVALUE;
use crate::error::{Error, Result};
use crate::function::ScalarFunction;
use crate::matrix::Matrix;
use crate::norms::{operator_norm, NormSpec};
use crate::report::{ConstantSource, EstimateReport};
use crate::spectral::HermitianOperator;

use super::{
    f_alpha_of, hermitian_norm, inverse_delta_norm, norm, params, sech_half_bound, theta_bound,
};

/// Upper pin for `constant(theta) min(theta, 1-theta)^{1/2}` on `[0.05, 0.95]`.
pub const THETA_SCALING_PIN: f64 = 1.1;

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveAlpha(alpha))
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if theta > 0.0 && theta < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "theta = {theta} outside (0, 1)"
        )))
    }
}

/// `||[f_alpha(D), a]||_E <= 3 m ||Delta_alpha^{-1}||_E ||[D, a]||` with `m = 1/2` the sech multiplier bound.
pub fn verify_thm11(
    d: &HermitianOperator<f64>,
    a: &Matrix<f64>,
    alpha: f64,
    spec: NormSpec,
) -> Result<EstimateReport> {
    check_alpha(alpha)?;
    let lhs = norm(&f_alpha_of(d, alpha)?.commutator(a)?, spec)?;
    let comm = operator_norm(&d.matrix().commutator(a)?)?;
    let rhs = inverse_delta_norm(d, alpha, spec)? * comm;
    let p = params(d.dim(), spec);
    Ok(EstimateReport::new(
        "thm11",
        lhs,
        rhs,
        3.0 * sech_half_bound(),
        ConstantSource::ProofChain,
    )
    .with_params(crate::report::ReportParams {
        alpha: Some(alpha),
        ..p
    })
    .with_extra("commutator_op", comm))
}

/// `||[f_{2^-k}(D), a] - [sgn D, a]||_E` for `k = 0..=kmax`.
pub fn alpha_limit_curve(
    d: &HermitianOperator<f64>,
    a: &Matrix<f64>,
    spec: NormSpec,
    kmax: u32,
) -> Result<Vec<f64>> {
    let sign = d
        .apply_function(&ScalarFunction::Sign)?
        .into_matrix()
        .commutator(a)?;
    (0..=kmax)
        .map(|k| {
            let c = f_alpha_of(d, 0.5_f64.powi(k as i32))?.commutator(a)?;
            norm(&(&c - &sign), spec)
        })
        .collect()
}

/// `||[sgn D, a]||_E <= 3 m || |D|^{-1} ||_E ||[D, a]||`, the `alpha -> 0` limit of the
/// commutator estimate, plus monotone convergence along `alpha = 2^{-k}`, `k <= 20`.
pub fn verify_cor12(
    d: &HermitianOperator<f64>,
    a: &Matrix<f64>,
    spec: NormSpec,
) -> Result<EstimateReport> {
    let gap = d.spectral_gap()?;
    if gap < MIN_ABS_EIGENVALUE {
        let value = d
            .spectrum()?
            .iter()
            .copied()
            .min_by(|x, y| x.abs().total_cmp(&y.abs()))
            .unwrap_or(0.0);
        return Err(Error::SpectrumContainsZero {
            value,
            gap: MIN_ABS_EIGENVALUE,
        });
    }
    let lhs = norm(
        &d.apply_function(&ScalarFunction::Sign)?
            .into_matrix()
            .commutator(a)?,
        spec,
    )?;
    let inv_abs = d.map_spectrum(|l| Ok(1.0 / l.abs()))?;
    let comm = operator_norm(&d.matrix().commutator(a)?)?;
    let rhs = hermitian_norm(&inv_abs, spec)? * comm;
    let curve = alpha_limit_curve(d, a, spec, 20)?;
    let monotone = curve
        .windows(2)
        .all(|w| w[1] <= w[0] * (1.0 + 1e-9) + 1e-14);
    let last = *curve.last().expect("21 points");
    let vanishes = last <= 1e-6 * (1.0 + lhs);
    let mut r = EstimateReport::new(
        "cor12",
        lhs,
        rhs,
        3.0 * sech_half_bound(),
        ConstantSource::ProofChain,
    )
    .with_params(params(d.dim(), spec))
    .with_extra("spectral_gap", gap)
    .with_extra("limit_first", curve[0])
    .with_extra("limit_last", last)
    .with_extra("limit_monotone", if monotone { 1.0 } else { 0.0 });
    if !monotone {
        r = r.fail("alpha -> 0 curve not monotone");
    }
    if !vanishes {
        r = r.fail("alpha -> 0 curve does not vanish");
    }
    Ok(r)
}

/// `||f_alpha(D) - f_alpha(D0)||_E <= 3 m_theta ||Delta_{0,alpha}^{-1}||^{1-theta} ||Delta_alpha^{-1}||^theta ||D - D0||`.
pub fn verify_thm13(
    d0: &HermitianOperator<f64>,
    d: &HermitianOperator<f64>,
    alpha: f64,
    theta: f64,
    spec: NormSpec,
) -> Result<EstimateReport> {
    check_alpha(alpha)?;
    check_theta(theta)?;
    let lhs = norm(&(&f_alpha_of(d, alpha)? - &f_alpha_of(d0, alpha)?), spec)?;
    let dist = operator_norm(&(d.matrix() - d0.matrix()))?;
    let n0 = inverse_delta_norm(d0, alpha, spec)?;
    let n1 = inverse_delta_norm(d, alpha, spec)?;
    let rhs = n0.powf(1.0 - theta) * n1.powf(theta) * dist;
    let constant = 3.0 * theta_bound(theta);
    let scaled = constant * theta.min(1.0 - theta).sqrt();
    let mut r = EstimateReport::new("thm13", lhs, rhs, constant, ConstantSource::ProofChain)
        .with_params(crate::report::ReportParams {
            alpha: Some(alpha),
            theta: Some(theta),
            ..params(d.dim(), spec)
        })
        .with_extra("distance_op", dist)
        .with_extra("theta_scaled_constant", scaled);
    if (0.05..=0.95).contains(&theta) && scaled > THETA_SCALING_PIN {
        r = r.fail("theta scaling above pin");
    }
    Ok(r)
}

/// Which form of the inverse estimate to check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InverseBranch {
    /// Both inverse norms on the right, fixed `theta`.
    Fixed(f64),
    /// Only `||Delta_{0,alpha}^{-1}||_E`, after the bootstrap on `theta`.
    Bootstrap,
}

/// `theta = min(1/4, alpha'^2/4)` with `alpha' = alpha / max(1, ||D - D0||)`.
pub fn bootstrap_theta(alpha: f64, dist: f64) -> f64 {
    let a = alpha / dist.max(1.0);
    (0.25_f64).min(a * a / 4.0)
}

/// Inverse estimate `||Delta_alpha^{-1} - Delta_{0,alpha}^{-1}||_E`.
///
/// Fixed branch: constant `2 m_theta / alpha`, one per term of
/// `-(lambda + mu)/(Delta_lambda Delta_mu) psi'_alpha`. Bootstrap branch:
/// with `c = 2 m_theta` and `kappa = c theta ||D - D0||/alpha <= 1/2`, the
/// relative error `A` obeys `A <= c ||D - D0||/alpha (1 + theta A)`, hence
/// `A <= 2 c ||D - D0||/alpha`.
pub fn verify_thm14_15(
    d0: &HermitianOperator<f64>,
    d: &HermitianOperator<f64>,
    alpha: f64,
    branch: InverseBranch,
    spec: NormSpec,
) -> Result<EstimateReport> {
    check_alpha(alpha)?;
    let h = ScalarFunction::h_alpha(alpha)?;
    let diff = d.apply_function(&h)?.matrix() - d0.apply_function(&h)?.matrix();
    let lhs = norm(&diff, spec)?;
    let dist = operator_norm(&(d.matrix() - d0.matrix()))?;
    let n0 = inverse_delta_norm(d0, alpha, spec)?;
    let base = crate::report::ReportParams {
        alpha: Some(alpha),
        ..params(d.dim(), spec)
    };
    match branch {
        InverseBranch::Fixed(theta) => {
            check_theta(theta)?;
            let n1 = inverse_delta_norm(d, alpha, spec)?;
            let rhs = n0.powf(1.0 - theta) * n1.powf(theta) * dist;
            Ok(EstimateReport::new(
                "thm14",
                lhs,
                rhs,
                2.0 * theta_bound(theta) / alpha,
                ConstantSource::ProofChain,
            )
            .with_params(crate::report::ReportParams {
                theta: Some(theta),
                ..base
            })
            .with_extra("distance_op", dist))
        }
        InverseBranch::Bootstrap => {
            let theta = bootstrap_theta(alpha, dist);
            let c = 2.0 * theta_bound(theta);
            let kappa = c * theta * dist / alpha;
            let slack = 0.5 - kappa;
            let a_rel = if n0 > 0.0 { lhs / n0 } else { 0.0 };
            // The inequality the bootstrap solves, checked on the measured A.
            let bootstrap_gap = c * dist / alpha * (1.0 + theta * a_rel) - a_rel;
            let constant = 2.0 * c / alpha;
            let mut r = EstimateReport::new(
                "thm15",
                lhs,
                n0 * dist,
                constant,
                ConstantSource::ProofChain,
            )
            .with_params(crate::report::ReportParams {
                theta: Some(theta),
                ..base
            })
            .with_extra("distance_op", dist)
            .with_extra("relative_error", a_rel)
            .with_extra("bootstrap_slack", slack)
            .with_extra("bootstrap_gap", bootstrap_gap)
            .with_extra(
                "constant_over_max1_inv_alpha",
                constant / (1.0_f64).max(1.0 / alpha),
            );
            if !(slack > 0.0) {
                r = r.fail("bootstrap slack not positive");
            }
            if bootstrap_gap < -1e-9 * (1.0 + a_rel) {
                r = r.fail("bootstrap inequality violated");
            }
            Ok(r)
        }
    }
}

/// `||f_alpha(D) - f_alpha(D0)||_E <= C ||Delta_{0,alpha}^{-1}||_E ||D - D0||` for `||D - D0|| <= 1`.
///
/// `C = 3 m sqrt(1 + C15)` where `C15` is the bootstrap constant at distance 1.
pub fn verify_thm16(
    d0: &HermitianOperator<f64>,
    d: &HermitianOperator<f64>,
    alpha: f64,
    spec: NormSpec,
) -> Result<EstimateReport> {
    lipschitz_transform("thm16", d0, d, alpha, spec)
}

/// The `alpha = 1` case: `||F - F0||_E <= C ||D - D0||` with `F = D (1 + D^2)^{-1/2}`.
pub fn verify_cor22(
    d0: &HermitianOperator<f64>,
    d: &HermitianOperator<f64>,
    spec: NormSpec,
) -> Result<EstimateReport> {
    lipschitz_transform("cor22", d0, d, 1.0, spec)
}

fn lipschitz_transform(
    id: &str,
    d0: &HermitianOperator<f64>,
    d: &HermitianOperator<f64>,
    alpha: f64,
    spec: NormSpec,
) -> Result<EstimateReport> {
    check_alpha(alpha)?;
    let dist = operator_norm(&(d.matrix() - d0.matrix()))?;
    if dist > 1.0 + 1e-12 {
        return Err(Error::PreconditionError(format!(
            "||D - D0|| = {dist} exceeds 1"
        )));
    }
    let lhs = norm(&(&f_alpha_of(d, alpha)? - &f_alpha_of(d0, alpha)?), spec)?;
    let n0 = inverse_delta_norm(d0, alpha, spec)?;
    let theta = bootstrap_theta(alpha, 1.0);
    let c15 = 4.0 * theta_bound(theta) / alpha;
    let constant = 3.0 * sech_half_bound() * (1.0 + c15).sqrt();
    Ok(
        EstimateReport::new(id, lhs, n0 * dist, constant, ConstantSource::ProofChain)
            .with_params(crate::report::ReportParams {
                alpha: Some(alpha),
                ..params(d.dim(), spec)
            })
            .with_extra("distance_op", dist)
            .with_extra("inverse_norm", n0)
            .with_extra(
                "constant_over_max1_inv_sqrt_alpha",
                constant / (1.0_f64).max(alpha.powf(-0.5)),
            ),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{clustered_values, TrialRng};

    fn pauli() -> (HermitianOperator<f64>, Matrix<f64>) {
        (
            HermitianOperator::from_real_diag(&[1.0, -1.0]),
            Matrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]),
        )
    }

    #[test]
    fn thm11_commuting_a_is_zero() {
        let mut rng = TrialRng::new(1, 0, 0);
        let d = rng.gaussian_hermitian(5);
        let r = verify_thm11(&d, &Matrix::identity(5), 1.0, NormSpec::Schatten(1.0)).unwrap();
        assert!(r.lhs < 1e-12 && r.pass);
    }

    #[test]
    fn thm11_two_by_two_by_hand() {
        let (d, a) = pauli();
        let r = verify_thm11(&d, &a, 1.0, NormSpec::Schatten(1.0)).unwrap();
        // [diag(h, -h), X] has singular values (2h, 2h), h = 2^{-1/2}.
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((r.lhs - 4.0 * h).abs() < 1e-12);
        // ||Delta^{-1}||_1 = 2h and ||[D, a]|| = 2.
        assert!((r.rhs - 4.0 * h).abs() < 1e-12);
        assert!(r.ratio <= 1.5 && r.pass);
        assert!((r.constant_used - 1.5).abs() < 1e-9);
        assert!(verify_thm11(&d, &a, 0.0, NormSpec::Schatten(1.0)).is_err());
    }

    #[test]
    fn thm11_ratio_is_unitarily_invariant() {
        let mut rng = TrialRng::new(2, 0, 0);
        let d = rng.gaussian_hermitian(6);
        let a = rng.gaussian_matrix(6, 6);
        let w = rng.haar_unitary(6);
        let dw = d.conjugate_by(&w).unwrap();
        let aw = &(&w * &a) * &w.adjoint();
        let r1 = verify_thm11(&d, &a, 0.7, NormSpec::Schatten(2.0)).unwrap();
        let r2 = verify_thm11(&dw, &aw, 0.7, NormSpec::Schatten(2.0)).unwrap();
        assert!((r1.lhs - r2.lhs).abs() < 1e-9 && (r1.rhs - r2.rhs).abs() < 1e-9);
    }

    #[test]
    fn thm11_lhs_scale_invariant_for_operator_norm() {
        let mut rng = TrialRng::new(3, 0, 0);
        let d = rng.gaussian_hermitian(5);
        let a = rng.gaussian_matrix(5, 5);
        let c = 3.7;
        let dc = HermitianOperator::new(d.matrix().scale_real(c)).unwrap();
        let r1 = verify_thm11(&d, &a, 0.4, NormSpec::OperatorNorm).unwrap();
        let r2 = verify_thm11(&dc, &a, 0.4 * c, NormSpec::OperatorNorm).unwrap();
        assert!((r1.lhs - r2.lhs).abs() < 1e-12);
    }

    #[test]
    fn cor12_pauli_operator_norm() {
        let (d, a) = pauli();
        let r = verify_cor12(&d, &a, NormSpec::Schatten(f64::INFINITY)).unwrap();
        assert!((r.lhs - 2.0).abs() < 1e-12 && (r.rhs - 2.0).abs() < 1e-12);
        assert!((r.ratio - 1.0).abs() < 1e-12 && r.pass, "{r:?}");
    }

    #[test]
    fn cor12_commuting_and_zero_spectrum() {
        let d = HermitianOperator::from_real_diag(&[1.0, -2.0, 3.0]);
        let a = Matrix::from_real_diag(&[4.0, 5.0, 6.0]);
        let r = verify_cor12(&d, &a, NormSpec::Schatten(2.0)).unwrap();
        assert!(r.lhs == 0.0 && r.pass);
        let z = HermitianOperator::from_real_diag(&[0.0, 1.0]);
        assert!(matches!(
            verify_cor12(&z, &Matrix::identity(2), NormSpec::Schatten(2.0)),
            Err(Error::SpectrumContainsZero { .. })
        ));
    }

    #[test]
    fn cor12_clustered_stress() {
        let mut rng = TrialRng::new(4, 0, 0);
        let d = rng.rotated_spectrum(&clustered_values(10, 1e-3));
        let a = rng.gaussian_matrix(10, 10);
        for p in [1.0, 2.0, 3.0] {
            let r = verify_cor12(&d, &a, NormSpec::Schatten(p)).unwrap();
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn alpha_curve_decreases_for_small_eigenvalues() {
        let d = HermitianOperator::from_real_diag(&[0.01, 0.3, -0.02]);
        let a = Matrix::from_real_rows(&[
            vec![0.0, 1.0, 0.0],
            vec![1.0, 0.0, 1.0],
            vec![0.0, 1.0, 0.0],
        ]);
        let c = alpha_limit_curve(&d, &a, NormSpec::Schatten(2.0), 20).unwrap();
        assert!(c.windows(2).all(|w| w[1] <= w[0]), "{c:?}");
        assert!(c[20] < 1e-7);
    }

    #[test]
    fn thm13_equal_operators_and_theta_half() {
        let mut rng = TrialRng::new(5, 0, 0);
        let d = rng.gaussian_hermitian(4);
        let r = verify_thm13(&d, &d, 1.0, 0.3, NormSpec::Schatten(2.0)).unwrap();
        assert!(r.lhs == 0.0 && r.pass);
        let e = rng.hermitian_with_norm(4, 1.0).unwrap();
        let d1 = HermitianOperator::new(d.matrix() + e.matrix()).unwrap();
        let half = verify_thm13(&d, &d1, 1.0, 0.5, NormSpec::Schatten(2.0)).unwrap();
        assert!((half.constant_used - 1.5).abs() < 1e-12 && half.pass);
        assert!(verify_thm13(&d, &d1, 1.0, 1.0, NormSpec::Schatten(2.0)).is_err());
    }

    #[test]
    fn thm13_theta_scaling_stays_below_pin() {
        for k in 1..=19 {
            let theta = 0.05 * k as f64;
            let scaled = 3.0 * theta_bound(theta) * theta.min(1.0 - theta).sqrt();
            assert!(scaled <= THETA_SCALING_PIN, "theta {theta}: {scaled}");
        }
    }

    #[test]
    fn thm14_15_on_random_pair() {
        let mut rng = TrialRng::new(6, 0, 0);
        let d0 = rng.gaussian_hermitian(8);
        let e = rng.hermitian_with_norm(8, 0.5).unwrap();
        let d = HermitianOperator::new(d0.matrix() + e.matrix()).unwrap();
        let spec = NormSpec::Schatten(2.0);
        assert!(
            verify_thm14_15(&d0, &d, 1.0, InverseBranch::Fixed(0.3), spec)
                .unwrap()
                .pass
        );
        let r = verify_thm14_15(&d0, &d, 1.0, InverseBranch::Bootstrap, spec).unwrap();
        assert!(r.pass && r.extras["bootstrap_slack"] > 0.0, "{r:?}");
        let same = verify_thm14_15(&d0, &d0, 1.0, InverseBranch::Bootstrap, spec).unwrap();
        assert!(same.lhs == 0.0 && same.pass);
    }

    #[test]
    fn thm15_constant_grows_faster_than_inverse_alpha() {
        // alpha = 2 pins theta = 1/4, alpha = 0.2 gives theta = 0.01. The chain
        // constant 4 m_theta / alpha changes by 10 m_0.01/m_0.25 ~ 26, while
        // max{1, 1/alpha} changes by 5; the normalized constants differ by ~5.2.
        let c = |alpha: f64| {
            4.0 * theta_bound(bootstrap_theta(alpha, 0.5)) / alpha / (1.0_f64).max(1.0 / alpha)
        };
        assert_eq!(bootstrap_theta(2.0, 0.5), 0.25);
        assert!((bootstrap_theta(0.2, 0.5) - 0.01).abs() < 1e-15);
        let factor = c(0.2) / c(2.0);
        assert!(factor > 5.0 && factor < 5.5, "{factor}");
    }

    #[test]
    fn thm16_precondition_and_rank_one() {
        let mut rng = TrialRng::new(7, 0, 0);
        let d0 = rng.gaussian_hermitian(6);
        let v: Vec<_> = (0..6).map(|_| rng.complex_normal()).collect();
        let nv: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>();
        let vv = Matrix::from_fn(6, 6, |i, j| v[i] * v[j].conj() / nv);
        let d = HermitianOperator::new(d0.matrix() + &vv.scale_real(0.5)).unwrap();
        let r = verify_thm16(&d0, &d, 0.5, NormSpec::Schatten(1.0)).unwrap();
        assert!(r.pass, "{r:?}");
        let far = HermitianOperator::new(d0.matrix() + &vv.scale_real(1.5)).unwrap();
        assert!(matches!(
            verify_thm16(&d0, &far, 0.5, NormSpec::Schatten(1.0)),
            Err(Error::PreconditionError(_))
        ));
        assert_eq!(
            verify_cor22(&d0, &d0, NormSpec::Schatten(2.0)).unwrap().lhs,
            0.0
        );
    }
}
