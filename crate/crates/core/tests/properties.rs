use doiforge::besov::{holder_seminorm, poisson_smooth, DecayClass, SampledFunction};
use doiforge::doi::{commutator_transfer_check, homomorphism_check};
use doiforge::harness::{run_trial, verify_thm11, SuiteOptions, TheoremId};
use doiforge::norms::{norm_eval, NormSpec};
use doiforge::spectral::reconstruction_residual;
use doiforge::{DoiOperator, EstimateReport, Kernel, ScalarFunction, TrialRng};
use proptest::prelude::*;

fn cases(n: u32) -> ProptestConfig {
    ProptestConfig {
        cases: n,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(cases(48))]

    #[test]
    fn eigendecomposition_reconstructs(seed in any::<u64>(), n in 1usize..12) {
        let d = TrialRng::new(seed, 0, 0).gaussian_hermitian(n);
        prop_assert!(reconstruction_residual(&d).unwrap() < 1e-11 * (1.0 + d.operator_norm().unwrap()));
    }

    #[test]
    fn schatten_norms_decrease_in_p_and_ignore_unitaries(seed in any::<u64>(), n in 1usize..9) {
        let mut rng = TrialRng::new(seed, 0, 0);
        let a = rng.gaussian_matrix(n, n);
        let (u, v) = (rng.haar_unitary(n), rng.haar_unitary(n));
        let rotated = u.try_mul(&a).unwrap().try_mul(&v.adjoint()).unwrap();
        let mut last = f64::INFINITY;
        for p in [1.0, 1.5, 2.0, 4.0, f64::INFINITY] {
            let x = norm_eval(&a, NormSpec::Schatten(p)).unwrap();
            let y = norm_eval(&rotated, NormSpec::Schatten(p)).unwrap();
            prop_assert!(x <= last * (1.0 + 1e-12));
            prop_assert!((x - y).abs() <= 1e-10 * (1.0 + x));
            last = x;
        }
    }

    #[test]
    fn weak_norm_is_dominated_by_schatten(seed in any::<u64>(), n in 1usize..9, p in 1.0f64..4.0) {
        let a = TrialRng::new(seed, 0, 0).gaussian_matrix(n, n);
        let w = norm_eval(&a, NormSpec::WeakLp(p)).unwrap();
        let s = norm_eval(&a, NormSpec::Schatten(p)).unwrap();
        prop_assert!(w <= s * (1.0 + 1e-12));
    }

    #[test]
    fn constant_kernel_scales(seed in any::<u64>(), n in 1usize..7, c in -3.0f64..3.0) {
        let mut rng = TrialRng::new(seed, 0, 0);
        let (d0, d1) = (rng.gaussian_hermitian(n), rng.gaussian_hermitian(n));
        let x = rng.gaussian_matrix(n, n);
        let y = DoiOperator::new(Kernel::Constant(c), d0, d1).unwrap().apply(&x).unwrap();
        prop_assert!((&y - &x.scale_real(c)).max_abs() < 1e-11 * (1.0 + x.max_abs()));
    }

    #[test]
    fn kernel_products_compose(seed in any::<u64>(), n in 1usize..7, alpha in 0.2f64..3.0) {
        let mut rng = TrialRng::new(seed, 0, 0);
        let (d0, d1) = (rng.gaussian_hermitian(n), rng.gaussian_hermitian(n));
        let x = rng.gaussian_matrix(n, n);
        let r = homomorphism_check(
            &Kernel::PsiPrimeAlpha(alpha),
            &Kernel::divided_difference(ScalarFunction::main_f()),
            &d0,
            &d1,
            &x,
        )
        .unwrap();
        prop_assert!(r.pass, "{:?}", r);
    }

    #[test]
    fn commutator_transfer_is_exact(seed in any::<u64>(), n in 1usize..8, alpha in 0.1f64..5.0) {
        let mut rng = TrialRng::new(seed, 0, 0);
        let (d0, d1) = (rng.gaussian_hermitian(n), rng.gaussian_hermitian(n));
        let a = rng.gaussian_matrix(n, n);
        let f = ScalarFunction::f_alpha(alpha).unwrap();
        prop_assert!(commutator_transfer_check(&f, &f.derivative(), &d0, &d1, &a).unwrap().pass);
    }

    #[test]
    fn commutator_estimate_holds(seed in any::<u64>(), n in 1usize..10, alpha in 0.05f64..20.0, p in 1.0f64..5.0) {
        let mut rng = TrialRng::new(seed, 0, 0);
        let d = rng.gaussian_hermitian(n);
        let a = rng.gaussian_matrix(n, n);
        let r = verify_thm11(&d, &a, alpha, NormSpec::Schatten(p)).unwrap();
        prop_assert!(r.pass && r.ratio <= r.constant_used);
    }

    #[test]
    fn reports_recheck_and_round_trip(seed in any::<u64>(), trial in 0u64..50) {
        let opts = SuiteOptions { seed, ..SuiteOptions::default() };
        for id in [TheoremId::Thm13, TheoremId::Thm15, TheoremId::Cor22] {
            for r in run_trial(id, &opts, trial) {
                prop_assert_eq!(r.pass, r.recheck());
                let back: EstimateReport = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
                prop_assert_eq!(back, r);
            }
        }
    }
}

proptest! {
    #![proptest_config(cases(16))]

    #[test]
    fn smoothing_contracts(values in prop::collection::vec(-5.0f64..5.0, 9), s in 0.001f64..50.0) {
        // Piecewise-linear data on [-4, 4] with a coarse step.
        let f = SampledFunction::new(4.0, 1.0, values.clone(), DecayClass::Flat).unwrap();
        let u = poisson_smooth(&f, s).unwrap();
        let m = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        prop_assert!(u.values().iter().all(|v| v.abs() <= m * (1.0 + 1e-6) + 1e-12));
    }

    #[test]
    fn holder_seminorm_of_lines(slope in -3.0f64..3.0, alpha in 0.0f64..=1.0) {
        let f = SampledFunction::sample(1.0, 0.01, DecayClass::Flat, |t| slope * t).unwrap();
        let h = holder_seminorm(&f, alpha).unwrap();
        // sup over |dt| <= 2 of |slope| |dt|^{1-alpha}.
        let exact = slope.abs() * 2f64.powf(1.0 - alpha);
        prop_assert!((h - exact).abs() <= 1e-9 * (1.0 + exact));
    }
}
