//! Differentiability of `D -> F = D (1 + D^2)^{-1/2}` along paths.

use crate::doi::frechet_derivative;
use crate::error::{Error, Result};
use crate::function::ScalarFunction;
use crate::matrix::Matrix;
use crate::norms::NormSpec;
use crate::report::{ConstantSource, EstimateReport};
use crate::spectral::HermitianOperator;

use super::{norm, params};

/// Halving ratios inside this window indicate first order.
pub const ORDER_WINDOW: (f64, f64) = (0.35, 0.65);
/// Consecutive in-window ratios that declare the asymptotic regime.
const REGIME_RUN: usize = 3;
const STEP_FLOOR: f64 = 1e-8;

fn transform(m: &Matrix<f64>) -> Result<Matrix<f64>> {
    Ok(HermitianOperator::new(m.clone())?
        .apply_function(&ScalarFunction::main_f())?
        .into_matrix())
}

/// Finite-difference errors against `H = T_{psi_f}(D0, D0)(G)` at `t_k = t0 2^{-k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderCurve {
    pub t: Vec<f64>,
    /// `||(F_t - F_0)/t - H||_E`.
    pub one_sided: Vec<f64>,
    /// `||(F_t - F_{-t})/(2t) - H||_E`.
    pub central: Vec<f64>,
}

impl OrderCurve {
    pub fn one_sided_ratios(&self) -> Vec<f64> {
        ratios(&self.one_sided)
    }

    pub fn central_ratios(&self) -> Vec<f64> {
        ratios(&self.central)
    }
}

fn ratios(e: &[f64]) -> Vec<f64> {
    e.windows(2).map(|w| w[1] / w[0]).collect()
}

/// Start index of the first run of `REGIME_RUN` ratios satisfying `ok`.
fn first_run(r: &[f64], ok: impl Fn(f64) -> bool) -> Option<usize> {
    r.windows(REGIME_RUN).position(|w| w.iter().all(|&x| ok(x)))
}

struct Path<'a> {
    d0: &'a HermitianOperator<f64>,
    g: &'a Matrix<f64>,
    f0: Matrix<f64>,
    h: Matrix<f64>,
    spec: NormSpec,
}

impl Path<'_> {
    fn at(&self, t: f64) -> Result<Matrix<f64>> {
        transform(&(self.d0.matrix() + &self.g.scale_real(t)))
    }

    fn errors(&self, t: f64) -> Result<(f64, f64)> {
        let plus = self.at(t)?;
        let minus = self.at(-t)?;
        let one = norm(
            &(&(&plus - &self.f0).scale_real(1.0 / t) - &self.h),
            self.spec,
        )?;
        let two = norm(
            &(&(&plus - &minus).scale_real(0.5 / t) - &self.h),
            self.spec,
        )?;
        Ok((one, two))
    }
}

pub fn order_curve(
    d0: &HermitianOperator<f64>,
    g: &Matrix<f64>,
    spec: NormSpec,
    t0: f64,
    steps: usize,
) -> Result<OrderCurve> {
    let path = Path {
        d0,
        g,
        f0: transform(d0.matrix())?,
        h: frechet_derivative(&ScalarFunction::main_f(), d0, g)?,
        spec,
    };
    let mut curve = OrderCurve {
        t: Vec::new(),
        one_sided: Vec::new(),
        central: Vec::new(),
    };
    for k in 0..=steps {
        let t = t0 * 0.5_f64.powi(k as i32);
        let (a, b) = path.errors(t)?;
        curve.t.push(t);
        curve.one_sided.push(a);
        curve.central.push(b);
    }
    Ok(curve)
}

/// Derivative at `D0` in direction `G` against one-sided and central differences.
///
/// Passes when three consecutive one-sided halving ratios fall in
/// `ORDER_WINDOW` and three consecutive central ratios are at most its lower end.
/// Halving continues past `steps` until both regimes appear or `t < 1e-8`.
pub fn verify_thm18(
    d0: &HermitianOperator<f64>,
    g: &Matrix<f64>,
    spec: NormSpec,
    t0: f64,
    steps: usize,
) -> Result<EstimateReport> {
    let mut curve = order_curve(d0, g, spec, t0, steps)?;
    let h = frechet_derivative(&ScalarFunction::main_f(), d0, g)?;
    let h_norm = norm(&h, spec)?;
    let oracle = richardson_derivative(d0, g)?;
    let dk = norm(&(&oracle - &h), spec)?;
    let base = EstimateReport::new("thm18", 0.0, ORDER_WINDOW.1, 1.0, ConstantSource::Exact)
        .with_params(params(d0.dim(), spec))
        .with_extra("derivative_norm", h_norm)
        .with_extra("daleckii_krein_residual", dk);

    let scale = 1e-13 * (1.0 + h_norm);
    if curve.one_sided.iter().all(|&e| e <= scale) {
        return Ok(base.note("difference quotients exact"));
    }
    let path = Path {
        d0,
        g,
        f0: transform(d0.matrix())?,
        h,
        spec,
    };
    loop {
        let one = first_run(&curve.one_sided_ratios(), |x| {
            (ORDER_WINDOW.0..=ORDER_WINDOW.1).contains(&x)
        });
        let two = first_run(&curve.central_ratios(), |x| x <= ORDER_WINDOW.0);
        if let (Some(i), Some(j)) = (one, two) {
            let r1 = curve.one_sided_ratios();
            let r2 = curve.central_ratios();
            let worst_one = r1[i..i + REGIME_RUN].iter().copied().fold(0.0, f64::max);
            let worst_two = r2[j..j + REGIME_RUN].iter().copied().fold(0.0, f64::max);
            let rep = EstimateReport {
                lhs: worst_one,
                ..base
            }
            .with_tolerance(0.0)
            .with_extra("central_ratio", worst_two)
            .with_extra("regime_start", i as f64)
            .with_extra("t_final", *curve.t.last().expect("non-empty"))
            .with_extra(
                "one_sided_final",
                *curve.one_sided.last().expect("non-empty"),
            )
            .with_extra("central_final", *curve.central.last().expect("non-empty"));
            return Ok(rep);
        }
        let t = 0.5 * curve.t.last().expect("non-empty");
        if t < STEP_FLOOR {
            return Err(Error::StepUnderflow { floor: STEP_FLOOR });
        }
        let (a, b) = path.errors(t)?;
        curve.t.push(t);
        curve.one_sided.push(a);
        curve.central.push(b);
    }
}

/// Three-level Richardson extrapolation of central differences, error `O(h^6)`.
fn richardson_derivative(d0: &HermitianOperator<f64>, g: &Matrix<f64>) -> Result<Matrix<f64>> {
    let at = |t: f64| transform(&(d0.matrix() + &g.scale_real(t)));
    let central = |h: f64| -> Result<Matrix<f64>> { Ok((&at(h)? - &at(-h)?).scale_real(0.5 / h)) };
    let (c1, c2, c3) = (central(0.02)?, central(0.01)?, central(0.005)?);
    let r1 = (&c2.scale_real(4.0) - &c1).scale_real(1.0 / 3.0);
    let r2 = (&c3.scale_real(4.0) - &c2).scale_real(1.0 / 3.0);
    Ok((&r2.scale_real(16.0) - &r1).scale_real(1.0 / 15.0))
}

/// `D_s = D0 + s G + s^2 K / 2`.
#[derive(Debug, Clone)]
pub struct QuadraticPath {
    pub d0: Matrix<f64>,
    pub g: Matrix<f64>,
    pub k: Matrix<f64>,
}

impl QuadraticPath {
    pub fn at(&self, s: f64) -> Result<HermitianOperator<f64>> {
        HermitianOperator::new(
            &(&self.d0 + &self.g.scale_real(s)) + &self.k.scale_real(0.5 * s * s),
        )
    }

    pub fn velocity(&self, s: f64) -> Matrix<f64> {
        &self.g + &self.k.scale_real(s)
    }
}

/// `dF/ds = T_{psi_f}(D_s, D_s)(dD/ds)` on `samples` points of `[-1, 1]`:
/// fitted Lipschitz modulus and a central-difference cross-check (`<= 1e-5`).
pub fn verify_thm19(
    path: &QuadraticPath,
    spec: NormSpec,
    samples: usize,
) -> Result<EstimateReport> {
    if samples < 2 {
        return Err(Error::InvalidParameter(
            "need at least two sample points".into(),
        ));
    }
    let f = ScalarFunction::main_f();
    let h = 1e-4;
    let mut derivs = Vec::with_capacity(samples);
    let mut fd_err = 0.0_f64;
    let mut top = 0.0_f64;
    let ss: Vec<f64> = (0..samples)
        .map(|i| -1.0 + 2.0 * i as f64 / (samples - 1) as f64)
        .collect();
    for &s in &ss {
        let ds = frechet_derivative(&f, &path.at(s)?, &path.velocity(s))?;
        let fd = (&transform(path.at(s + h)?.matrix())? - &transform(path.at(s - h)?.matrix())?)
            .scale_real(0.5 / h);
        fd_err = fd_err.max(norm(&(&fd - &ds), spec)?);
        top = top.max(norm(&ds, spec)?);
        derivs.push(ds);
    }
    let mut lipschitz = 0.0_f64;
    for i in 1..samples {
        let step = ss[i] - ss[i - 1];
        lipschitz = lipschitz.max(norm(&(&derivs[i] - &derivs[i - 1]), spec)? / step);
    }
    // The modulus fitted on neighbours must cover every pair.
    let mut worst_pair = 0.0_f64;
    for i in 0..samples {
        for j in i + 1..samples {
            let gap = norm(&(&derivs[j] - &derivs[i]), spec)? - lipschitz * (ss[j] - ss[i]);
            worst_pair = worst_pair.max(gap);
        }
    }
    let mut r = EstimateReport::new("thm19", fd_err, 1.0 + top, 1e-5, ConstantSource::Residual)
        .with_tolerance(0.0)
        .with_params(params(path.d0.rows(), spec))
        .with_extra("fitted_lipschitz", lipschitz)
        .with_extra("pair_excess", worst_pair)
        .with_extra("samples", samples as f64);
    if !lipschitz.is_finite() || worst_pair > 1e-9 * (1.0 + top) {
        r = r.fail("derivative path not Lipschitz on the samples");
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::TrialRng;

    #[test]
    fn zero_direction_is_exact() {
        let mut rng = TrialRng::new(1, 0, 0);
        let d0 = rng.gaussian_hermitian(4);
        let r = verify_thm18(&d0, &Matrix::zeros(4, 4), NormSpec::Schatten(2.0), 0.1, 8).unwrap();
        assert!(r.pass && r.lhs == 0.0);
    }

    #[test]
    fn scalar_derivative_at_zero() {
        let d0 = HermitianOperator::from_real_diag(&[0.0_f64]);
        let g = Matrix::identity(1);
        let h = frechet_derivative(&ScalarFunction::main_f(), &d0, &g).unwrap();
        assert!((h[(0, 0)].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn orders_on_random_direction() {
        let mut rng = TrialRng::new(2, 0, 0);
        let d0 = rng.gaussian_hermitian(8);
        let g = rng.hermitian_with_norm(8, 1.0).unwrap().into_matrix();
        for spec in [NormSpec::Schatten(1.0), NormSpec::Schatten(2.0)] {
            let r = verify_thm18(&d0, &g, spec, 0.1, 8).unwrap();
            assert!(r.pass, "{r:?}");
            assert!(r.extras["central_ratio"] <= 0.35);
            assert!(r.extras["daleckii_krein_residual"] <= 1e-9, "{r:?}");
        }
    }

    #[test]
    fn curve_has_requested_length() {
        let mut rng = TrialRng::new(3, 0, 0);
        let d0 = rng.gaussian_hermitian(3);
        let g = rng.hermitian_with_norm(3, 1.0).unwrap().into_matrix();
        let c = order_curve(&d0, &g, NormSpec::Schatten(2.0), 0.1, 8).unwrap();
        assert_eq!(c.t.len(), 9);
        assert_eq!(c.one_sided_ratios().len(), 8);
    }

    #[test]
    fn quadratic_path_derivative() {
        let mut rng = TrialRng::new(4, 0, 0);
        let path = QuadraticPath {
            d0: rng.gaussian_hermitian(6).into_matrix(),
            g: rng.hermitian_with_norm(6, 1.0).unwrap().into_matrix(),
            k: rng.hermitian_with_norm(6, 1.0).unwrap().into_matrix(),
        };
        let r = verify_thm19(&path, NormSpec::Schatten(1.0), 21).unwrap();
        assert!(r.pass && r.lhs <= 1e-5, "{r:?}");
        assert!(r.extras["fitted_lipschitz"].is_finite());
        let flat = QuadraticPath {
            g: Matrix::zeros(6, 6),
            k: Matrix::zeros(6, 6),
            ..path
        };
        let r = verify_thm19(&flat, NormSpec::Schatten(1.0), 21).unwrap();
        assert!(r.extras["fitted_lipschitz"] == 0.0 && r.pass);
    }
}
