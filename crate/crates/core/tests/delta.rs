use hosc::delta_kernel::{
    kernel_square, kernel_trace, kernel_truncated, kernel_weak_convergence, mollified_delta, sift,
    sift_rule, unit_integral, weak_convergence_rule, MollifiedDelta,
};
use hosc::quadrature::gauss_hermite;
use proptest::prelude::*;

#[test]
fn projector_identities() {
    for n in [10usize, 50, 200] {
        let rule = gauss_hermite(128.max(n)).unwrap();
        let trace = kernel_trace(n, &rule).unwrap();
        assert!((trace - n as f64).abs() <= 1e-8, "N={n} trace={trace}");
        for (q, qp) in [(0.0, 0.0), (0.5, -1.3), (2.0, 2.5)] {
            let sq = kernel_square(n, q, qp, &rule).unwrap();
            let k = kernel_truncated(n, q, qp).unwrap();
            assert!((sq - k).abs() <= 1e-8, "N={n} ({q}, {qp})");
        }
    }
}

const NOISE_FLOOR: f64 = 1e-12;

fn monotone_with_floor(errors: &[f64]) -> bool {
    errors.windows(2).all(|w| w[1] <= w[0].max(NOISE_FLOOR))
}

#[test]
fn weak_convergence_tables() {
    let ns = [30, 40, 60, 80, 100, 150, 200];
    let rule = weak_convergence_rule(200).unwrap();

    let table = kernel_weak_convergence(&ns, |x| (-0.5 * x * x).exp(), 0.0, &rule).unwrap();
    let errors: Vec<f64> = table.iter().map(|v| (v - 1.0).abs()).collect();
    assert!(monotone_with_floor(&errors));
    assert!(errors[errors.len() - 1] <= 1e-3);

    let f = |x: f64| x * x * (-x * x / 8.0).exp();
    let table = kernel_weak_convergence(&ns, f, 1.0, &rule).unwrap();
    let errors: Vec<f64> = table.iter().map(|v| (v - f(1.0)).abs()).collect();
    assert!(monotone_with_floor(&errors), "{errors:?}");
    assert!(errors[errors.len() - 1] <= 1e-10);
}

#[test]
fn sifting_error_is_linear_in_width() {
    let errs: Vec<f64> = [0.1, 0.05, 0.025]
        .iter()
        .map(|&e| {
            let eps = MollifiedDelta::new(e).unwrap();
            (sift(&eps, f64::cos, 0.0, &sift_rule(&eps, 0.0).unwrap()).unwrap() - 1.0).abs()
        })
        .collect();
    for w in errs.windows(2) {
        assert!((w[0] / w[1] - 2.0).abs() <= 0.1);
    }
}

proptest! {
    #[test]
    fn unit_integral_for_any_width(e in 0.01f64..5.0) {
        let eps = MollifiedDelta::new(e).unwrap();
        let gh = gauss_hermite(40).unwrap();
        prop_assert!((unit_integral(&eps, &gh) - 1.0).abs() <= 1e-12);
        let uniform = sift_rule(&eps, 0.0).unwrap();
        prop_assert!((unit_integral(&eps, &uniform) - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn mollifier_even(e in 0.01f64..10.0, x in -20.0f64..20.0) {
        let eps = MollifiedDelta::new(e).unwrap();
        prop_assert_eq!(mollified_delta(&eps, x).to_bits(), mollified_delta(&eps, -x).to_bits());
    }

    #[test]
    fn kernel_symmetric_and_even(n in 1usize..300, a in -8.0f64..8.0, b in -8.0f64..8.0) {
        let k = kernel_truncated(n, a, b).unwrap();
        prop_assert_eq!(k.to_bits(), kernel_truncated(n, b, a).unwrap().to_bits());
        prop_assert_eq!(k.to_bits(), kernel_truncated(n, -a, -b).unwrap().to_bits());
    }
}
